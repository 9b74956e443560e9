use std::process::ExitCode;
use std::time::{Duration, Instant};

use curvature_kit::checks::{list_checks, run_check, CheckOutcome};
use serde_json::{json, Value};

const SEED: u64 = 0x5EED;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: &'static [&'static str],
    params: fn(&str) -> Value,
    budget_s: u64,
}

fn defaults(_: &str) -> Value {
    Value::Null
}

fn smoothing_eps(_: &str) -> Value {
    json!({ "eps": [0.02, 0.05, 0.1] })
}

fn hopf_both(name: &str) -> Value {
    match name {
        "hopf-radius-half" => json!({ "fibration": ["s3", "s7"] }),
        _ => Value::Null,
    }
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, title: "smoothing suite", checks: &["smoothing-lemma12"], params: smoothing_eps, budget_s: 10 },
    Criterion { id: 2, title: "comparison inequalities", checks: &["smoothing-lemma13"], params: smoothing_eps, budget_s: 5 },
    Criterion { id: 3, title: "oracle sanity", checks: &["oracle-sanity"], params: defaults, budget_s: 30 },
    Criterion { id: 4, title: "conic equivalence", checks: &["conic-equivalence"], params: defaults, budget_s: 60 },
    Criterion { id: 5, title: "bundle formula vs oracle", checks: &["bundle-formula-vs-oracle"], params: defaults, budget_s: 300 },
    Criterion { id: 6, title: "zero-section formula", checks: &["bundle-zero-section"], params: defaults, budget_s: 120 },
    Criterion { id: 7, title: "V/W identities", checks: &["bundle-vw-identities"], params: defaults, budget_s: 5 },
    Criterion { id: 8, title: "select L and family scan", checks: &["bundle-positivity-family"], params: defaults, budget_s: 300 },
    Criterion { id: 9, title: "gluing suite", checks: &["glue-positivity-demo"], params: defaults, budget_s: 300 },
    Criterion { id: 10, title: "Hopf suite", checks: &["hopf-radius-half", "hopf-sp2"], params: hopf_both, budget_s: 60 },
    Criterion { id: 11, title: "connection round trip", checks: &["extract-q-roundtrip"], params: defaults, budget_s: 30 },
];

fn run(name: &str, params: Value) -> (Result<CheckOutcome, String>, Duration) {
    let t = Instant::now();
    let out = run_check(name, params, SEED).map_err(|e| e.to_string());
    (out, t.elapsed())
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut first_runs: Vec<(String, Value, String)> = Vec::new();

    for c in &CRITERIA {
        let mut ok = true;
        let mut elapsed = Duration::ZERO;
        let mut notes = Vec::new();
        for &name in c.checks {
            let params = (c.params)(name);
            let (out, dt) = run(name, params.clone());
            elapsed += dt;
            match out {
                Ok(o) => {
                    if !o.passed {
                        ok = false;
                        notes.push(format!("{name} failed: {}", o.details));
                    }
                    first_runs.push((name.to_owned(), params, serde_json::to_string(&o).unwrap()));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{name}: {e}"));
                }
            }
        }
        if elapsed > Duration::from_secs(c.budget_s) {
            ok = false;
            notes.push(format!("runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), c.budget_s));
        }
        all_ok &= ok;
        println!(
            "criterion {:>2} {:<28} {} ({:.2}s, budget {}s)",
            c.id,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget_s
        );
        for n in notes {
            println!("    {n}");
        }
    }

    let mut ok = first_runs.len() == list_checks().len();
    let mut notes = Vec::new();
    for (name, params, first) in &first_runs {
        let again = run(name, params.clone()).0.map(|o| serde_json::to_string(&o).unwrap());
        if again.as_deref() != Ok(first.as_str()) {
            ok = false;
            notes.push(format!("{name}: rerun differs"));
        }
    }
    all_ok &= ok;
    println!(
        "criterion 12 {:<28} {} ({} checks rerun with seed {SEED:#x})",
        "determinism",
        if ok { "PASS" } else { "FAIL" },
        first_runs.len()
    );
    for n in notes {
        println!("    {n}");
    }

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
