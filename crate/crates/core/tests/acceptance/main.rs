//! One PASS/FAIL line per acceptance criterion. Lines go straight to the
//! process stdout so they show up without `--nocapture`.

mod atoms;
mod bench;
mod mailbox;
mod patterns;
mod runtime;

use std::io::Write;
use std::time::{Duration, Instant};

pub enum Verdict {
    Pass(String),
    Fail(String),
    /// Not run; the reason is printed.
    Skip(String),
    /// Non-gating measurement.
    Report(String),
}

type Criterion = fn() -> Verdict;

pub fn check(ok: bool, detail: impl Into<String>) -> Verdict {
    if ok {
        Verdict::Pass(detail.into())
    } else {
        Verdict::Fail(detail.into())
    }
}

fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 11] = [
        ("atom round-trip", atoms::round_trip),
        ("cow exactness", atoms::cow_exactness),
        ("pattern oracle equivalence", patterns::oracle_equivalence),
        ("mailbox linearizability", mailbox::linearizability),
        ("wakeup exactness", mailbox::wakeup_exactness),
        ("fixed_stack conformance", runtime::fixed_stack_conformance),
        ("sync messaging", runtime::sync_messaging),
        ("exit propagation", runtime::exit_propagation),
        ("ring bench desk scale", bench::ring_desk_scale),
        ("full-scale counts", bench::full_scale),
        ("scaling smoke", bench::scaling_smoke),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let took = format_took(start.elapsed());
        match verdict {
            Verdict::Pass(d) => line(&format!("PASS {name} [{took}] {d}")),
            Verdict::Fail(d) => {
                line(&format!("FAIL {name} [{took}] {d}"));
                failed.push(name);
            }
            Verdict::Skip(d) => line(&format!("SKIP {name} {d}")),
            Verdict::Report(d) => line(&format!("INFO {name} [{took}] {d}")),
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn format_took(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}
