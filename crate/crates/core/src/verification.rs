//! Cross-checks between the engines, each summarized as a [`CheckReport`].

use serde::Serialize;

use crate::closed_form::{
    closed_form_p, count_bb_selections, count_generic_selections, count_target_selections,
    total_wiring_probability, unpaired_dagger_any_j, wiring_probability,
};
use crate::model::{max_bb_pairings, min_bb_pairings, Configuration};
use crate::numerics::{Backend, BackendKind, Exact, ExactScalar, Float, Scalar};
use crate::oracle::enumerate_process_with_cap;
use crate::parallel;
use crate::recursion::{memoized_p, MemoTable};

/// Float-backend tolerance for "agrees to machine precision".
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub input: String,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub range: String,
    pub status: Status,
    /// Largest discrepancy allowed; zero for exact checks.
    pub tolerance: f64,
    pub checked: usize,
    pub worst_case: Option<WorstCase>,
    /// First failing input with a short explanation, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// One observation: an input label, its discrepancy, and whether it is within
/// tolerance (exact checks decide equality structurally, not via the float).
struct Observation {
    input: String,
    discrepancy: f64,
    ok: bool,
    note: Option<String>,
}

impl Observation {
    fn exact(input: String, ok: bool, discrepancy: f64) -> Self {
        // An exact mismatch must never look like a zero discrepancy.
        let discrepancy = if ok { discrepancy } else { discrepancy.max(f64::MIN_POSITIVE) };
        Observation { input, discrepancy, ok, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn report(name: &str, range: String, tolerance: f64, observations: Vec<Observation>) -> CheckReport {
    let worst = observations
        .iter()
        .max_by(|a, b| a.discrepancy.total_cmp(&b.discrepancy));
    let failure = observations.iter().find(|o| !o.ok).map(|o| match &o.note {
        Some(note) => format!("{}: {note}", o.input),
        None => format!("{}: discrepancy {:e}", o.input, o.discrepancy),
    });
    CheckReport {
        name: name.to_string(),
        range,
        status: if failure.is_none() { Status::Pass } else { Status::Fail },
        tolerance,
        checked: observations.len(),
        worst_case: worst.map(|o| WorstCase { input: o.input.clone(), discrepancy: o.discrepancy }),
        failure,
    }
}

fn square_grid(max_n: u32) -> Vec<Configuration> {
    (1..=max_n)
        .flat_map(|i| (1..=max_n).map(move |s| Configuration::new(i, s)))
        .collect()
}

fn equivalence<B: Backend>(max_n: u32) -> Vec<Observation> {
    let memo = MemoTable::<B>::new();
    parallel::map_collect(square_grid(max_n), |cfg| {
        let a = memoized_p(cfg, &memo);
        let b = closed_form_p::<B>(cfg);
        let d = a.abs_diff(&b);
        match B::KIND {
            BackendKind::Exact => Observation::exact(cfg.to_string(), a == b, d),
            BackendKind::Float => Observation {
                input: cfg.to_string(),
                discrepancy: d,
                ok: d <= FLOAT_TOLERANCE,
                note: None,
            },
        }
    })
}

/// Memoized recursion against the closed form on `1 <= I, S <= max_n`.
pub fn equivalence_suite(max_n: u32, backend: BackendKind) -> CheckReport {
    let (obs, tol) = match backend {
        BackendKind::Exact => (equivalence::<Exact>(max_n), 0.0),
        BackendKind::Float => (equivalence::<Float>(max_n), FLOAT_TOLERANCE),
    };
    report(
        &format!("equivalence_{backend}"),
        format!("1 <= I,S <= {max_n}"),
        tol,
        obs,
    )
}

/// Total probability over all final wirings is exactly one on `1 <= I, S <= max_n`.
pub fn normalization_suite(max_n: u32) -> CheckReport {
    let obs = parallel::map_collect(square_grid(max_n), |cfg| {
        let total = total_wiring_probability::<Exact>(cfg);
        let one = ExactScalar::one();
        Observation::exact(cfg.to_string(), total == one, total.abs_diff(&one))
    });
    report("normalization", format!("1 <= I,S <= {max_n}"), 0.0, obs)
}

/// Every configuration with `S >= 1` and `I + S <= max_devices`.
pub fn small_configurations(max_devices: u32) -> Vec<Configuration> {
    (1..=max_devices)
        .flat_map(|n| (0..n).map(move |i| Configuration::new(i, n - i)))
        .collect()
}

/// Enumeration against both engines, plus clean-device symmetry.
pub fn oracle_suite(max_devices: u32, cap: u32) -> CheckReport {
    let obs = parallel::map_collect(small_configurations(max_devices), |cfg| {
        let label = cfg.to_string();
        let census = match enumerate_process_with_cap(cfg, cap) {
            Ok(c) => c,
            Err(e) => return Observation::exact(label, false, f64::INFINITY).with_note(e.to_string()),
        };
        let oracle = census.hit_probability(1);
        let memo = memoized_p(cfg, &MemoTable::<Exact>::new());
        let closed = closed_form_p::<Exact>(cfg);
        let symmetric = (2..=cfg.clean).all(|t| census.hit_probability(t) == oracle);
        let d = oracle.abs_diff(&memo).max(oracle.abs_diff(&closed));
        let ok = oracle == memo && oracle == closed && symmetric;
        let obs = Observation::exact(label, ok, d);
        if symmetric {
            obs
        } else {
            obs.with_note("clean devices have different infection probabilities")
        }
    });
    report(
        "oracle",
        format!("S >= 1, I + S <= {max_devices}"),
        0.0,
        obs,
    )
}

/// Mismatches between an enumeration census and the counting formulas.
fn census_mismatches(cfg: Configuration, cap: u32) -> Vec<String> {
    let census = match enumerate_process_with_cap(cfg, cap) {
        Ok(c) => c,
        Err(e) => return vec![e.to_string()],
    };
    let mut problems = Vec::new();
    let (lo, hi) = (min_bb_pairings(cfg), max_bb_pairings(cfg));
    for &j in census.classes.keys() {
        if j < lo || j > hi {
            problems.push(format!("wirings with j = {j} outside [{lo}, {hi}]"));
        }
    }
    let summary = census.summary();
    let s_factorial = ExactScalar::from(crate::numerics::factorial(cfg.s()).unwrap());
    for j in lo..=hi {
        let jj = i64::from(j);
        let class = summary.j_classes.iter().find(|c| c.j == j);
        let (count, hits) = class.map_or((0, 0), |c| (c.wiring_count, c.target_hit_count));
        let n = count_bb_selections::<Exact>(cfg, jj).unwrap();
        let n_w = count_generic_selections::<Exact>(cfg, jj).unwrap();
        let n_t = count_target_selections::<Exact>(cfg, jj).unwrap();
        if ExactScalar::from_u64(count) != n.clone() * n_w.clone() {
            problems.push(format!("j = {j}: {count} wirings, formulas give {n} * {n_w}"));
        }
        if ExactScalar::from_u64(hits) != n.clone() * n_t.clone() {
            problems.push(format!("j = {j}: {hits} wirings pair w1, formulas give {n} * {n_t}"));
        }
        if let Some(class) = class {
            let p = wiring_probability::<Exact>(cfg, jj);
            if class.per_wiring_prob.as_ref() != Some(&p) {
                problems.push(format!(
                    "j = {j}: per-wiring probability {:?}, formula gives {p}",
                    class.per_wiring_prob.as_ref().map(ToString::to_string)
                ));
            }
        }
        if cfg.dagger().forced_j == Some(j) {
            let dagger = census.dagger_h_counts();
            let mut total = ExactScalar::zero();
            for h in 1..=cfg.infected {
                let expected = unpaired_dagger_any_j::<Exact>(cfg, jj, i64::from(h));
                let seen = dagger.get(&h).copied().unwrap_or(0);
                if ExactScalar::from_u64(seen) != expected.clone() * s_factorial.clone() {
                    problems.push(format!(
                        "j = {j}: {seen} wirings leave b{h} unpaired, formula gives {expected} * S!"
                    ));
                }
                total = total + expected;
            }
            if total != n {
                problems.push(format!("j = {j}: unpaired-index counts sum to {total}, not {n}"));
            }
        }
    }
    let unpaired_outside_dagger = census
        .wirings()
        .any(|(w, _)| w.unpaired_infected.is_some() && cfg.dagger().forced_j != Some(w.bb_pairings()));
    if unpaired_outside_dagger {
        problems.push("unpaired infected device outside the dagger case".into());
    }
    problems
}

/// Enumeration censuses against the counting formulas, for every
/// configuration with `I, S >= 1` and `I + S <= max_devices`.
pub fn census_suite(max_devices: u32, cap: u32) -> CheckReport {
    let configs: Vec<_> = small_configurations(max_devices)
        .into_iter()
        .filter(|c| c.infected >= 1)
        .collect();
    let obs = parallel::map_collect(configs, |cfg| {
        let problems = census_mismatches(cfg, cap);
        let ok = problems.is_empty();
        let obs = Observation::exact(cfg.to_string(), ok, if ok { 0.0 } else { 1.0 });
        match problems.into_iter().next() {
            Some(p) => obs.with_note(p),
            None => obs,
        }
    });
    report(
        "enumeration_census",
        format!("I,S >= 1, I + S <= {max_devices}"),
        0.0,
        obs,
    )
}

/// `U(x) = (4x-1) P(2x,2x) - (2x-1) [P(2x-1,2x-1) + P(2x-2,2x)]`, which should
/// be exactly one.
pub fn proof_identity_u(x: u32) -> ExactScalar {
    assert!(x >= 1, "U(x) is defined for x >= 1");
    let p = |i: u32, s: u32| closed_form_p::<Exact>(Configuration::new(i, s));
    let (a, b) = (u64::from(4 * x - 1), u64::from(2 * x - 1));
    ExactScalar::from_u64(a) * p(2 * x, 2 * x)
        - ExactScalar::from_u64(b) * (p(2 * x - 1, 2 * x - 1) + p(2 * x - 2, 2 * x))
}

pub fn proof_identity_suite(x_max: u32) -> CheckReport {
    let xs: Vec<u32> = (1..=x_max).collect();
    let obs = parallel::map_collect(xs, |x| {
        let u = proof_identity_u(x);
        let one = ExactScalar::one();
        Observation::exact(format!("x={x}"), u == one, u.abs_diff(&one))
    });
    report("proof_identity_u", format!("1 <= x <= {x_max}"), 0.0, obs)
}

fn float_p(i: u32, s: u32) -> f64 {
    closed_form_p::<Float>(Configuration::new(i, s)).0
}

/// Limit probes: `P(200,10) >= 0.95`, `P(10,200) <= 0.05`,
/// `|P(100,100) - 1/2| <= 0.01`. Discrepancy is the distance past the bound.
pub fn limits_probe() -> CheckReport {
    let probes = [
        ("P(200,10) >= 0.95", 0.95 - float_p(200, 10)),
        ("P(10,200) <= 0.05", float_p(10, 200) - 0.05),
        ("|P(100,100) - 0.5| <= 0.01", (float_p(100, 100) - 0.5).abs() - 0.01),
    ];
    let obs = probes
        .into_iter()
        .map(|(label, excess)| Observation {
            input: label.to_string(),
            discrepancy: excess.max(0.0),
            ok: excess <= 0.0,
            note: None,
        })
        .collect();
    report("limits", "I,S in {10, 100, 200}".into(), 0.0, obs)
}

/// Some `I` in `[30, 100]` with `P(I+1, 10) < P(I, 10)`.
pub fn sawtooth_probe() -> CheckReport {
    let drop = (30..=100).find(|&i| float_p(i + 1, 10) < float_p(i, 10));
    let obs = vec![match drop {
        Some(i) => Observation {
            input: format!("I={i}"),
            discrepancy: 0.0,
            ok: true,
            note: None,
        },
        None => Observation {
            input: "30 <= I <= 100".into(),
            discrepancy: 1.0,
            ok: false,
            note: Some("P(I,10) is monotone".into()),
        },
    }];
    report("sawtooth", "S = 10, 30 <= I <= 100".into(), 0.0, obs)
}

/// Parameters for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_exact: u32,
    pub max_float: u32,
    /// Largest `I + S` compared against enumeration.
    pub oracle_max_devices: u32,
    /// Enumeration cap handed to the oracle.
    pub enumeration_cap: u32,
    pub ux_max: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_exact: 30,
            max_float: 50,
            oracle_max_devices: 9,
            enumeration_cap: crate::oracle::DEFAULT_ENUMERATION_CAP,
            ux_max: 20,
        }
    }
}

pub fn run_all(config: VerifyConfig) -> Vec<CheckReport> {
    vec![
        equivalence_suite(config.max_exact, BackendKind::Exact),
        equivalence_suite(config.max_float, BackendKind::Float),
        normalization_suite(config.max_exact),
        oracle_suite(config.oracle_max_devices, config.enumeration_cap),
        census_suite(config.oracle_max_devices, config.enumeration_cap),
        proof_identity_suite(config.ux_max),
        limits_probe(),
        sawtooth_probe(),
    ]
}
