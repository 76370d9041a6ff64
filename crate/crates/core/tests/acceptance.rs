//! Acceptance suite. Prints one line per criterion and fails the target if
//! any criterion fails.

use std::process::ExitCode;

use checkmark_core::verify::run_acceptance;

fn main() -> ExitCode {
    let results = run_acceptance(7);
    for c in &results {
        println!("{c}");
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
