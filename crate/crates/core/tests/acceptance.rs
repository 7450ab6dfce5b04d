//! Runs criteria 1–15 and prints one line per criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use hamflow::harness::{format_check, run_criterion, VerifyOptions, CRITERIA};

fn main() -> ExitCode {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let opts = VerifyOptions { threads, ..Default::default() };
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let check = run_criterion(id, &opts);
        println!("{} [{:.1}s]", format_check(&check), start.elapsed().as_secs_f64());
        if !check.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
