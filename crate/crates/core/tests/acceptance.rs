//! Runs every acceptance criterion at full size and prints one line each.
//! Built without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use brownlab::verify::{self, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for &id in &verify::CRITERIA {
        let r = verify::run_criterion(id, &opts);
        println!("{}", r.line());
        for n in &r.notes {
            println!("    {n}");
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", verify::CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
