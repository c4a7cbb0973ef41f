use nctorus::verify::{verify_all, VerificationReport};

fn show(report: &VerificationReport) {
    for c in &report.cases {
        println!(
            "{:<40} {:>12.3e} <= {:<8.1e} {}",
            c.id,
            c.residual,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!("wall time {:.2}s", report.wall_time_s);
}

#[test]
fn every_case_passes() {
    let report = verify_all(7, None).unwrap();
    show(&report);
    let failed: Vec<_> = report.failures().map(|c| c.id.clone()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}

#[test]
fn deterministic_under_seed() {
    let a = verify_all(11, None).unwrap();
    let b = verify_all(11, None).unwrap();
    assert_eq!(a.cases, b.cases);
}
