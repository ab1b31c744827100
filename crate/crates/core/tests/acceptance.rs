//! One PASS/FAIL line per acceptance criterion. Lines go straight to the
//! process stdout so they show up without `--nocapture`.

use std::io::Write;

use cantor_transducers::par::Exec;
use cantor_transducers::suite::{run_criterion, CRITERIA};
use cantor_transducers::Bounds;

#[test]
fn acceptance_criteria() {
    let bounds = Bounds::default();
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for &(id, title, _) in CRITERIA.iter() {
        let line = match run_criterion(id, &bounds, Exec::Parallel) {
            Ok(outcome) => {
                if !outcome.pass {
                    failed.push(id);
                }
                outcome.line()
            }
            Err(e) => {
                failed.push(id);
                format!("FAIL [{id}] {title} ({e})")
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
