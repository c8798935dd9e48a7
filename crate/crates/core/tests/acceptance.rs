//! Acceptance suite: one line per criterion with its timing and budget.

use weylcalc::verify::{check_names, run_check};

const SEED: u64 = 20240611;

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (id, _) in check_names() {
        let report = run_check(id, SEED).expect("known check");
        println!("{}", report.line());
        if !report.passed {
            failed.push(report.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
