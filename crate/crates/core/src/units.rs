//! Physical constants and decibel helpers.

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge (C).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Field amplitude factor for a power change of `db`.
#[inline]
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Optical frequency (Hz) for a vacuum wavelength in nanometres.
#[inline]
pub fn wavelength_nm_to_freq(nm: f64) -> f64 {
    SPEED_OF_LIGHT / (nm * 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_roundtrip() {
        assert!((lin_to_db(db_to_lin(-7.02)) + 7.02).abs() < 1e-12);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
        assert!((dbm_to_watts(-20.0) - 1e-5).abs() < 1e-18);
        assert!((db_to_amplitude(6.0206) - 2.0).abs() < 1e-4);
    }

    #[test]
    fn c_band_frequency() {
        let f = wavelength_nm_to_freq(1550.0);
        assert!((f - 193.414e12).abs() < 0.01e12);
    }
}
