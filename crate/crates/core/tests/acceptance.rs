//! The ten acceptance criteria at their stated tolerances and budgets.
//!
//! Writes one PASS/FAIL line per criterion straight to stdout, so the lines
//! show even when the harness captures test output.

use std::io::Write;
use tracedefect::cli::{criteria, run_criterion};

#[test]
fn acceptance_criteria() {
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    writeln!(out).unwrap();
    for c in criteria() {
        let o = run_criterion(&c);
        writeln!(out, "{}", o.line()).unwrap();
        if let Some(r) = &o.report {
            assert!(r.checks.len() >= 3, "criterion {} asserts too little", o.id);
            for ch in r.checks.iter().filter(|ch| !ch.pass) {
                writeln!(out, "    failed: {} (lhs {:e}, rhs {:e}, tol {:e})", ch.identity, ch.lhs, ch.rhs, ch.tol).unwrap();
            }
        }
        if !o.pass {
            failed.push(o.id);
        }
    }
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
