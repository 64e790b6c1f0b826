//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! printed.

use std::process::ExitCode;
use std::time::Instant;

use pairprob::bench::{summarize, time_engine, EngineKind};
use pairprob::closed_form::{closed_form_p, count_unpaired_dagger};
use pairprob::montecarlo::estimate_p_with_workers;
use pairprob::oracle::{enumerate_process, DEFAULT_ENUMERATION_CAP};
use pairprob::verification::{
    census_suite, equivalence_suite, limits_probe, normalization_suite, oracle_suite,
    proof_identity_suite, CheckReport,
};
use pairprob::{BackendKind, Configuration, Exact, Float, Scalar};

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(r: CheckReport) -> Outcome {
    let detail = match (&r.failure, &r.worst_case) {
        (Some(f), _) => format!("{} checked over {}; {f}", r.checked, r.range),
        (None, Some(w)) => format!(
            "{} checked over {}; worst {} at {:.3e}",
            r.checked, r.range, w.input, w.discrepancy
        ),
        (None, None) => format!("{} checked over {}", r.checked, r.range),
    };
    Outcome { passed: r.passed(), detail }
}

fn float_p(i: u32, s: u32) -> f64 {
    closed_form_p::<Float>(Configuration::new(i, s)).0
}

fn census() -> Outcome {
    let mut out = from_report(census_suite(9, DEFAULT_ENUMERATION_CAP));
    let cfg = Configuration::new(7, 2);
    let observed = enumerate_process(cfg)
        .expect("(7,2) is within the enumeration cap")
        .wirings()
        .filter(|(w, _)| w.bb_pairings() == 2)
        .count() as u64;
    let expected = (3..=7)
        .map(|h| count_unpaired_dagger::<Exact>(cfg, 2, h).expect("dagger case").to_f64())
        .sum::<f64>()
        * 2.0;
    let ok = observed as f64 == expected;
    out.passed &= ok;
    out.detail += &format!("; (7,2) j=2 wirings {observed} vs 2!*sum_h {expected}");
    out
}

fn point_values() -> Outcome {
    let (p10, p25) = (float_p(10, 10), float_p(25, 25));
    let ok10 = (p10 - 0.52).abs() <= 0.005;
    let ok25 = (p25 - 0.51).abs() <= 0.005;
    Outcome {
        passed: ok10 && ok25,
        detail: format!(
            "P(10,10) = {} = {p10:.6} ({}), P(25,25) = {} = {p25:.6} ({})",
            closed_form_p::<Exact>(Configuration::new(10, 10)),
            if ok10 { "within 0.52 +/- 0.005" } else { "outside 0.52 +/- 0.005" },
            closed_form_p::<Exact>(Configuration::new(25, 25)),
            if ok25 { "within 0.51 +/- 0.005" } else { "outside 0.51 +/- 0.005" },
        ),
    }
}

fn monte_carlo() -> Outcome {
    const SAMPLES: u64 = 1_000_000;
    const SEED: u64 = 20_240_917;
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, s) in [(2, 2), (1, 4), (10, 10), (7, 2), (30, 15)] {
        let cfg = Configuration::new(i, s);
        let runs: Vec<_> = [1, 2, 8]
            .into_iter()
            .map(|w| estimate_p_with_workers(cfg, SAMPLES, SEED, w).expect("S >= 1"))
            .collect();
        let same_hits = runs.iter().all(|r| r.hits == runs[0].hits);
        let est = runs[0];
        let z = (est.estimate - float_p(i, s)).abs() / est.std_error;
        let ok = same_hits && z <= 4.0;
        passed &= ok;
        parts.push(format!(
            "{cfg} z={z:.2}{}",
            if same_hits { "" } else { " hits differ across workers" }
        ));
    }
    Outcome { passed, detail: parts.join(", ") }
}

fn performance() -> Outcome {
    const TIMEOUT_S: f64 = 120.0;
    let mean = |engine, n: u32, reps| {
        summarize(&time_engine(engine, Configuration::new(n, n), reps, TIMEOUT_S, BackendKind::Float)).mean_s
    };
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [25, 30, 35] {
        match (mean(EngineKind::Recursive, n, 5), mean(EngineKind::Recursive, n + 5, 3)) {
            (Some(a), Some(b)) => {
                let ratio = b / a;
                passed &= ratio >= 3.0;
                parts.push(format!("t({})/t({n}) = {ratio:.1}", n + 5));
            }
            _ => {
                passed = false;
                parts.push(format!("recursive timed out at {n} or {}", n + 5));
            }
        }
    }
    match mean(EngineKind::Closed, 100, 10) {
        Some(t) => {
            passed &= t <= 1.0;
            parts.push(format!("closed t(100) = {t:.2e} s"));
        }
        None => {
            passed = false;
            parts.push("closed form timed out at 100".into());
        }
    }
    Outcome { passed, detail: parts.join(", ") }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact engine equivalence", Box::new(|| from_report(equivalence_suite(30, BackendKind::Exact)))),
        ("float engine equivalence", Box::new(|| from_report(equivalence_suite(50, BackendKind::Float)))),
        ("oracle equivalence", Box::new(|| from_report(oracle_suite(9, DEFAULT_ENUMERATION_CAP)))),
        ("enumeration census", Box::new(census)),
        ("normalization", Box::new(|| from_report(normalization_suite(30)))),
        ("I = S identity U(x) = 1", Box::new(|| from_report(proof_identity_suite(20)))),
        ("published point values", Box::new(point_values)),
        ("limit behaviour", Box::new(|| from_report(limits_probe()))),
        ("Monte Carlo consistency", Box::new(monte_carlo)),
        ("performance shape", Box::new(performance)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        if !outcome.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {name} [{secs:.1}s] {}",
            k + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
