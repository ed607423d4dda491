//! The twelve acceptance checks at their pinned tolerances and budgets.
//! Run with `-- --nocapture` to see the per-check lines.

use ort_cli::verify::{run_check, CHECKS, DEFAULT_SEED};

#[test]
fn acceptance_battery() {
    let mut failed = Vec::new();
    for check in CHECKS {
        let outcome = run_check(check, DEFAULT_SEED);
        println!("{}", outcome.line());
        if !outcome.passed {
            failed.push(outcome.line());
        }
    }
    println!("{}/{} checks passed", CHECKS.len() - failed.len(), CHECKS.len());
    assert!(failed.is_empty(), "failing checks:\n{}", failed.join("\n"));
}
