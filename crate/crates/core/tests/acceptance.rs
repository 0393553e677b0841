//! End-to-end acceptance run: every check of the verification suite must
//! pass, with one printed line per check.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use mukai_lattice::verify::{self, Status};

#[test]
fn acceptance_suite_passes() {
    let report = verify::run(None, 0).expect("suite runs");
    let ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, verify::CHECK_IDS, "every criterion appears exactly once");
    let mut failures = Vec::new();
    for check in &report.checks {
        let label = match check.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
        };
        println!("{label}  {id}  ({ms} ms)", id = check.id, ms = check.millis);
        if check.status == Status::Fail {
            failures.push(format!(
                "{}: {}",
                check.id,
                serde_json::to_string(&check.witness).unwrap_or_default()
            ));
        }
    }
    assert!(failures.is_empty(), "failed checks:\n{}", failures.join("\n"));
}

#[test]
fn report_is_deterministic_for_a_seed() {
    let a = verify::run(Some(&["index-formula".into(), "vector-arithmetic".into()]), 7).unwrap();
    let b = verify::run(Some(&["index-formula".into(), "vector-arithmetic".into()]), 7).unwrap();
    let strip = |r: &verify::VerifyReport| {
        r.checks
            .iter()
            .map(|c| (c.id.clone(), c.status, serde_json::to_string(&c.witness).unwrap()))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
    assert!(a.all_passed());
}
