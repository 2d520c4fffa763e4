use rofsim_core::budget::{
    comp_feasibility, find_service, latency_budget, power_budget, propagation_delay, render_table,
    run_budget, BudgetFile, NodeKind, SAMPLE_TOPOLOGY,
};

fn ids(p: &[&str]) -> Vec<String> {
    p.iter().map(|s| s.to_string()).collect()
}

const TWO_RUS: &str = r#"
[[nodes]]
id = "co"
kind = "central_office"

[[nodes]]
id = "edge"
kind = "smart_edge"

[[nodes]]
id = "ru1"
kind = "ru"

[[nodes]]
id = "ru2"
kind = "ru"

[[links]]
from = "co"
to = "edge"
fiber = { length_km = 100.0 }

[[links]]
from = "edge"
to = "ru1"
fiber = { length_km = 10.0 }

[[links]]
from = "edge"
to = "ru2"
fiber = { length_km = 12.0 }
"#;

#[test]
fn anchors() {
    assert_eq!(propagation_delay(20.0, true), 200.0);
    assert_eq!(propagation_delay(100.0, true), 1000.0);
    assert_eq!(propagation_delay(20.0, false), 100.0);
}

#[test]
fn comp_needs_compensation_for_a_two_km_difference() {
    let f = BudgetFile::parse(TWO_RUS).unwrap();
    let mut t = f.topology().unwrap();
    let r = comp_feasibility(&t, &ids(&["ru1", "ru2"]), "edge").unwrap();
    assert!(!r.pass && r.latency_ok && !r.sync_ok);
    assert_eq!(r.offending_pairs.len(), 1);
    assert!((r.offending_pairs[0].differential_us - 10.0).abs() < 1e-9);

    t.nodes.iter_mut().find(|n| n.id == "edge").unwrap().sync_compensation = true;
    assert!(comp_feasibility(&t, &ids(&["ru1", "ru2"]), "edge").unwrap().pass);

    // from the central office the feeder alone is 500 µs
    let far = comp_feasibility(&t, &ids(&["ru1"]), "co").unwrap();
    assert!(!far.latency_ok);
}

#[test]
fn urllc_over_a_long_feeder_fails() {
    let f = BudgetFile::parse(TWO_RUS).unwrap();
    let mut t = f.topology().unwrap();
    t.nodes[0].processing_delay_us = 100.0;
    let r = latency_budget(&t, &ids(&["co", "edge"]), &find_service("urllc").unwrap()).unwrap();
    assert!((r.total_us - 600.0).abs() < 1e-9);
    assert!(!r.pass);
}

#[test]
fn sample_topology_report() {
    let f = BudgetFile::parse(SAMPLE_TOPOLOGY).unwrap();
    let r = run_budget(&f).unwrap();

    // ru_a and ru_b differ by 0.5 km: 2.5 µs of skew with no compensation
    let pair = &r.comp[0];
    assert!(!pair.pass);
    assert!((pair.max_differential_us - 2.5).abs() < 1e-9);
    assert!(r.comp[1].pass);
    // 10 + 100 + 5 + 25 µs from the central office: in time, still skewed
    assert!(r.comp[2].latency_ok && !r.comp[2].sync_ok);

    let home = &r.power[0];
    let expect = -4.0 - 2.0 * 2.5 - 1.2 - 0.5 - 10.0 * 4f64.log10() - 1.0 - 2.0 * 2.5 - 0.4;
    assert!((home.total_db - expect).abs() < 1e-9, "{} vs {expect}", home.total_db);
    assert_eq!(home.pass, home.received_power_dbm >= -20.0);

    let cpri = r.fronthaul.iter().find(|x| x.name == "cpri_lte_20").unwrap();
    assert!((cpri.rate.line_rate - 1.2288e9).abs() < 1.0);
    let ecpri = r.fronthaul.iter().find(|x| x.name == "ecpri").unwrap();
    assert!((ecpri.rate.line_rate - 307.2e6).abs() < 1.0);

    let table = render_table(&r);
    for section in ["LATENCY", "COMP", "POWER", "FRONTHAUL"] {
        assert!(table.contains(section), "{section}");
    }
}

#[test]
fn power_is_path_direction_agnostic_in_sum() {
    let f = BudgetFile::parse(SAMPLE_TOPOLOGY).unwrap();
    let t = f.topology().unwrap();
    let leaves: Vec<_> = t
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Onu | NodeKind::Ru))
        .map(|n| n.id.clone())
        .collect();
    for leaf in leaves {
        let down = power_budget(&t, &t.path_between("co", &leaf).unwrap()).unwrap();
        let up = power_budget(&t, &t.path_between(&leaf, "co").unwrap()).unwrap();
        assert!((down.total_db - up.total_db).abs() < 1e-9, "{leaf}");
    }
}
