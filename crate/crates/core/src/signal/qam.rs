//! Gray-coded square QAM.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qam {
    order: u32,
    bits_per_axis: usize,
    levels: usize,
    scale: f64,
}

impl Qam {
    pub fn new(order: u32) -> Result<Self> {
        let bits_per_axis = match order {
            4 => 1,
            16 => 2,
            64 => 3,
            other => return Err(Error::UnsupportedQam(other)),
        };
        let levels = 1usize << bits_per_axis;
        // mean energy of square M-QAM on the odd-integer grid is 2(M-1)/3
        let scale = (1.5 / (order as f64 - 1.0)).sqrt();
        Ok(Self {
            order,
            bits_per_axis,
            levels,
            scale,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    fn axis_level(&self, bits: &[u8]) -> f64 {
        let gray = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        // inverse Gray code
        let mut idx = gray;
        let mut shift = gray >> 1;
        while shift != 0 {
            idx ^= shift;
            shift >>= 1;
        }
        (2 * idx) as f64 - (self.levels - 1) as f64
    }

    fn axis_index(&self, x: f64) -> usize {
        let idx = ((x / self.scale + (self.levels - 1) as f64) / 2.0).round();
        idx.clamp(0.0, (self.levels - 1) as f64) as usize
    }

    /// Map `bits_per_symbol` bits (I half first) to a unit-energy symbol.
    pub fn map(&self, bits: &[u8]) -> Complex64 {
        let (i_bits, q_bits) = bits.split_at(self.bits_per_axis);
        Complex64::new(self.axis_level(i_bits), self.axis_level(q_bits)) * self.scale
    }

    pub fn map_all(&self, bits: &[u8]) -> Vec<Complex64> {
        bits.chunks_exact(self.bits_per_symbol())
            .map(|c| self.map(c))
            .collect()
    }

    /// Nearest constellation point.
    pub fn decide(&self, sym: Complex64) -> Complex64 {
        let lv = |i: usize| ((2 * i) as f64 - (self.levels - 1) as f64) * self.scale;
        Complex64::new(lv(self.axis_index(sym.re)), lv(self.axis_index(sym.im)))
    }

    /// Hard-decision demapping, appending bits to `out`.
    pub fn demap_into(&self, sym: Complex64, out: &mut Vec<u8>) {
        for x in [sym.re, sym.im] {
            let idx = self.axis_index(x);
            let gray = idx ^ (idx >> 1);
            for b in (0..self.bits_per_axis).rev() {
                out.push(((gray >> b) & 1) as u8);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_energy_and_roundtrip() {
        for order in [4u32, 16, 64] {
            let q = Qam::new(order).unwrap();
            let k = q.bits_per_symbol();
            let mut energy = 0.0;
            for v in 0..order as usize {
                let bits: Vec<u8> = (0..k).rev().map(|b| ((v >> b) & 1) as u8).collect();
                let s = q.map(&bits);
                energy += s.norm_sqr();
                let mut back = Vec::new();
                q.demap_into(s, &mut back);
                assert_eq!(back, bits);
                assert_eq!(q.decide(s * 1.01), s);
            }
            assert!((energy / order as f64 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gray_neighbours_differ_by_one_bit() {
        let q = Qam::new(64).unwrap();
        let step = 2.0 * q.scale;
        for v in 0..64usize {
            let bits: Vec<u8> = (0..6).rev().map(|b| ((v >> b) & 1) as u8).collect();
            let s = q.map(&bits);
            let n = s + Complex64::new(step, 0.0);
            if n.re.abs() < 8.0 * q.scale {
                let mut nb = Vec::new();
                q.demap_into(n, &mut nb);
                let d = nb.iter().zip(&bits).filter(|(a, b)| a != b).count();
                assert!(d <= 1, "neighbour differs in {d} bits");
            }
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(Qam::new(8), Err(Error::UnsupportedQam(8))));
    }
}
