//! One line per acceptance criterion, run against the fig8 preset.

use knotchar::verify::{run_checks, Status, VerifyConfig};
use knotchar::KnotPresentation;

#[test]
fn acceptance() {
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let results = run_checks(&pres, &VerifyConfig::default());
    let mut failed = Vec::new();
    for r in &results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!("[{tag}] {:>2} {} ({:.1}s): {}", r.id, r.name, r.seconds, r.detail);
        if r.status != Status::Pass {
            failed.push(r.id);
        }
    }
    let total: f64 = results.iter().map(|r| r.seconds).sum();
    println!("total {total:.1}s");
    assert_eq!(results.len(), 11);
    assert!(failed.is_empty(), "criteria not passing: {failed:?}");
}

#[test]
fn trefoil_structural_checks() {
    let pres = KnotPresentation::builtin("trefoil").unwrap();
    let cfg = VerifyConfig { loops: 4, ..VerifyConfig::default() };
    let results = run_checks(&pres, &cfg);
    for r in &results {
        println!("{:?} {:>2} {}: {}", r.status, r.id, r.name, r.detail);
    }
    for id in [1, 3, 4, 8, 11] {
        assert_eq!(results[id - 1].status, Status::Pass, "{:?}", results[id - 1]);
    }
}
