//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;

use delayrd_core::verify::{run_verify, VerifyOptions};

fn main() -> ExitCode {
    // `cargo test -- <name>` runs only the criteria whose id or group matches.
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let verbose = std::env::var_os("DELAYRD_VERBOSE").is_some();
    let reports = run_verify(&VerifyOptions { filter, inject: None });
    let mut failed = 0;
    for r in &reports {
        println!("{}", if verbose { r.render_verbose() } else { r.render() });
        if !r.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
