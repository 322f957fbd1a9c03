use agmstar::verify::{run_suite, IdentityId, SampleGrid};
use agmstar::ToleranceConfig;

#[test]
fn default_suite_passes() {
    let reports = run_suite(&SampleGrid::default(), &ToleranceConfig::default());
    for r in &reports {
        println!("{:<20} n={:<5} max={:<12.3e} tol={:<8.1e} {} {:?}", r.identity_id, r.samples, r.max_residual, r.tolerance, r.passed, r.witness);
    }
    assert_eq!(reports.len(), IdentityId::ALL.len());
    assert!(reports.iter().all(|r| r.passed));
}
