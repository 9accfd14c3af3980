//! One line per criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use equiblow::criteria::run_all;
use equiblow_core::Budget;

fn main() -> ExitCode {
    let start = Instant::now();
    let results = run_all(Budget::default());
    for c in &results {
        println!("{}  ({} ms)", c.line(), c.millis);
    }
    let failed: Vec<usize> = results.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if results.len() != 12 || !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
