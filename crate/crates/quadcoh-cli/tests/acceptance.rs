//! Acceptance gate for the binary: the `verify` subcommand must pass the
//! full law suite and exit zero, and the deliberate fault injection behind
//! `--negative-control` must be caught with a nonzero exit.

use std::process::Command;
use std::time::{Duration, Instant};

fn run_verify(extra: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_quadcoh"))
        .arg("verify")
        .args(extra)
        .output()
        .expect("failed to spawn quadcoh");
    (
        out.status.code(),
        String::from_utf8(out.stdout).expect("stdout is not utf-8"),
        String::from_utf8(out.stderr).expect("stderr is not utf-8"),
    )
}

#[test]
fn criterion_11_verify_command_gates_on_the_law_suite() {
    let budget = Duration::from_secs(120);
    let started = Instant::now();

    let (code, stdout, stderr) = run_verify(&[]);
    for line in stdout
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
    {
        println!("criterion 11 {line}");
    }
    assert_eq!(
        code,
        Some(0),
        "verify exited with {code:?}\nstdout:\n{stdout}\nstderr:\n{stderr}"
    );
    assert!(
        stdout.contains("all 13 law checks passed"),
        "missing summary line:\n{stdout}"
    );
    assert!(
        !stdout.contains("FAIL"),
        "clean run printed a FAIL line:\n{stdout}"
    );

    // Same suite with the fault injected: exactly the combination law must
    // trip, and the process must report failure through its exit status.
    let (code, stdout, stderr) = run_verify(&["--negative-control"]);
    for line in stdout.lines().filter(|l| l.starts_with("FAIL")) {
        println!("criterion 11 negative control {line}");
    }
    assert_eq!(
        code,
        Some(1),
        "negative control exited with {code:?}\nstdout:\n{stdout}\nstderr:\n{stderr}"
    );
    assert!(
        stdout.contains("FAIL combination-law"),
        "negative control did not trip the combination law:\n{stdout}"
    );
    assert!(
        stdout.contains("1 of 13 law checks failed"),
        "unexpected failure summary:\n{stdout}"
    );

    let elapsed = started.elapsed();
    println!(
        "criterion 11 runtime {:.2} s (budget {:.0} s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed <= budget,
        "criterion 11 exceeded its runtime budget: {:.2} s > {:.0} s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}
