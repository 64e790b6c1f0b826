//! Non-recursive evaluation of `P(I,S)` by counting final wirings.
//!
//! A wiring is the set of pairings left when every infected device has had
//! its turn. All wirings with the same number `j` of infected–infected
//! ("bb") pairings are equally likely, so
//!
//! ```text
//! P(I,S) = Σ_{j=L(I,S)}^{⌊I/2⌋} P(I,S,j) · N(I,S,j) · N(I,S,j,w_t)
//! ```
//!
//! where `P(I,S,j)` is the probability of one such wiring
//! ([`wiring_probability`]), `N(I,S,j)` counts the ways to choose the bb
//! pairs ([`count_bb_selections`]) and `N(I,S,j,w_t)` counts the clean
//! assignments that cover a fixed clean device ([`count_target_selections`]).
//!
//! Every count is kept as a list of small integer factors until the whole
//! term is assembled; [`Backend::product`] then decides how to multiply them,
//! which keeps the float backend finite for `I, S <= 200`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{dagger_indicator, max_bb_pairings, min_bb_pairings, Configuration};
use crate::numerics::{heaviside, Backend, Scalar};

/// Numerator and denominator factors of a rational quantity.
#[derive(Debug, Clone, Default)]
struct Factors {
    num: Vec<u64>,
    den: Vec<u64>,
}

impl Factors {
    fn zero() -> Self {
        Factors { num: vec![0], den: Vec::new() }
    }

    fn times(mut self, n: u64) -> Self {
        self.num.push(n);
        self
    }

    fn times_all(mut self, ns: impl IntoIterator<Item = u64>) -> Self {
        self.num.extend(ns);
        self
    }

    /// Divides by `n!`.
    fn over_factorial(mut self, n: i64) -> Self {
        assert!(n >= 0, "factorial of {n}");
        self.den.extend(1..=n as u64);
        self
    }

    fn over_all(mut self, ds: impl IntoIterator<Item = u64>) -> Self {
        self.den.extend(ds);
        self
    }

    fn merge(mut self, other: &Factors) -> Self {
        self.num.extend_from_slice(&other.num);
        self.den.extend_from_slice(&other.den);
        self
    }

    fn eval<B: Backend>(&self) -> B::Value {
        B::product(&self.num, &self.den)
    }
}

/// A count that is either a product of factors or, in the dagger case with
/// at least two bb-pairings, a sum over the index of the unpaired device.
#[derive(Debug, Clone)]
enum Count {
    Product(Factors),
    Sum(Vec<Factors>),
}

impl Count {
    fn eval<B: Backend>(&self) -> B::Value {
        match self {
            Count::Product(f) => f.eval::<B>(),
            Count::Sum(parts) => parts
                .iter()
                .fold(B::Value::zero(), |acc, f| acc + f.eval::<B>()),
        }
    }
}

/// Multiplies all parts, folding plain products into a single factor list.
fn eval_product<B: Backend>(parts: &[&Count]) -> B::Value {
    let mut merged = Factors::default();
    let mut sums = Vec::new();
    for part in parts {
        match part {
            Count::Product(f) => merged = merged.merge(f),
            Count::Sum(_) => sums.push(part.eval::<B>()),
        }
    }
    sums.into_iter().fold(merged.eval::<B>(), |acc, s| acc * s)
}

/// `C(x, 2)` for `x >= 0`.
fn pairs(x: i64) -> u64 {
    assert!(x >= 0, "C({x}, 2) is never needed");
    let x = x as u64;
    x * x.saturating_sub(1) / 2
}

fn in_range(cfg: Configuration, j: i64) -> bool {
    j >= i64::from(min_bb_pairings(cfg)) && j <= i64::from(max_bb_pairings(cfg))
}

fn check_admissible(cfg: Configuration, j: i64) -> Result<()> {
    if in_range(cfg, j) {
        Ok(())
    } else {
        Err(Error::InadmissiblePairings {
            cfg,
            j,
            min: i64::from(min_bb_pairings(cfg)),
            max: i64::from(max_bb_pairings(cfg)),
        })
    }
}

fn wiring_factors(cfg: Configuration, j: i64) -> Factors {
    if !in_range(cfg, j) {
        return Factors::zero();
    }
    let (i, s) = (cfg.i(), cfg.s());
    let z = dagger_indicator(cfg, j);
    Factors::default().over_all((0..=i - j - 1 - z).map(|k| (i + s - 1 - 2 * k) as u64))
}

fn unpaired_dagger_factors(cfg: Configuration, j: i64, h: i64) -> Factors {
    let (i, s) = (cfg.i(), cfg.s());
    if h <= s {
        return Factors::zero();
    }
    if h == i {
        return Factors::default()
            .times_all((0..j).map(|k| pairs(i - 1 - 2 * k)))
            .over_factorial(j);
    }
    if h == i - 1 {
        return Factors::default()
            .times((i - 2) as u64)
            .times_all((0..=j - 2).map(|k| pairs(i - 3 - 2 * k)))
            .over_factorial(j - 1);
    }
    // b_{h+1}..b_I are all claimed by earlier choosers; the remaining
    // bb-pairs come from the still unpaired devices among b_1..b_{h-1}.
    let claimed = i - h;
    let rest = j - claimed;
    if rest < 0 {
        return Factors::zero();
    }
    Factors::default()
        .times_all((1..=claimed).map(|t| (h - t) as u64))
        .times_all((1..=rest).map(|t| pairs(2 * h - i - 1 - 2 * (t - 1))))
        .over_factorial(rest)
}

fn bb_count(cfg: Configuration, j: i64) -> Count {
    let i = cfg.i();
    if dagger_indicator(cfg, j) == 0 {
        return Count::Product(
            Factors::default()
                .times_all((1..=j).map(|k| pairs(i - 2 * (k - 1))))
                .over_factorial(j),
        );
    }
    match j {
        0 => Count::Product(Factors::default()),
        1 => Count::Product(Factors::default().times(pairs(i) - 1)),
        _ => Count::Sum(
            (cfg.s() + 1..=i)
                .map(|h| unpaired_dagger_factors(cfg, j, h))
                .collect(),
        ),
    }
}

fn target_factors(cfg: Configuration, j: i64) -> Factors {
    let (i, s) = (cfg.i(), cfg.s());
    if dagger_indicator(cfg, j) == 1 {
        return Factors::default().times_all(1..=s as u64);
    }
    let matched = i - 2 * j;
    // C(S-1, matched-1) with the zero convention outside 0..=S-1.
    let choose = matched - 1;
    if choose < 0 || choose > s - 1 {
        return Factors::zero();
    }
    Factors::default()
        .times_all(1..=matched as u64)
        .times_all((0..choose).map(|k| (s - 1 - k) as u64))
        .over_factorial(choose)
}

fn generic_factors(cfg: Configuration, j: i64) -> Result<Factors> {
    let (i, s) = (cfg.i(), cfg.s());
    if dagger_indicator(cfg, j) == 1 {
        return Ok(Factors::default().times_all(1..=s as u64));
    }
    let matched = i - 2 * j;
    if matched > s {
        return Err(Error::NoSuchWiring { cfg, j, unmatched: matched, clean: cfg.clean });
    }
    Ok(Factors::default().times_all((0..matched).map(|k| (s - k) as u64)))
}

/// Probability of one particular final wiring with exactly `j` bb-pairings;
/// zero when no such wiring exists.
pub fn wiring_probability<B: Backend>(cfg: Configuration, j: i64) -> B::Value {
    wiring_factors(cfg, j).eval::<B>()
}

/// Number of ways to choose the `j` bb-pairs of a final wiring.
pub fn count_bb_selections<B: Backend>(cfg: Configuration, j: i64) -> Result<B::Value> {
    check_admissible(cfg, j)?;
    Ok(bb_count(cfg, j).eval::<B>())
}

/// In a dagger configuration with `j >= 2`, the number of bb-pair choices
/// that leave `b_h` as the unpaired infected device.
pub fn count_unpaired_dagger<B: Backend>(cfg: Configuration, j: i64, h: i64) -> Result<B::Value> {
    if j < 2 || cfg.dagger().forced_j != Some(j as u32) {
        return Err(Error::NotDagger { cfg, j });
    }
    if h < 1 || h > cfg.i() {
        return Err(Error::UnpairedIndexOutOfRange { h, infected: cfg.infected });
    }
    Ok(unpaired_dagger_factors(cfg, j, h).eval::<B>())
}

/// Unpaired-index count for any bb-pairing count, including `j < 2` where the
/// public [`count_unpaired_dagger`] refuses. Used to check enumeration
/// censuses of small dagger configurations.
pub(crate) fn unpaired_dagger_any_j<B: Backend>(cfg: Configuration, j: i64, h: i64) -> B::Value {
    unpaired_dagger_factors(cfg, j, h).eval::<B>()
}

/// Number of clean-device assignments, given the bb-pairs, in which a fixed
/// clean device ends up paired.
pub fn count_target_selections<B: Backend>(cfg: Configuration, j: i64) -> Result<B::Value> {
    if cfg.clean == 0 {
        return Err(Error::NoCleanDevices(cfg));
    }
    check_admissible(cfg, j)?;
    Ok(target_factors(cfg, j).eval::<B>())
}

/// Number of clean-device assignments given the bb-pairs: `S!` in the dagger
/// case, otherwise the ordered selections of `I-2j` out of `S`.
pub fn count_generic_selections<B: Backend>(cfg: Configuration, j: i64) -> Result<B::Value> {
    check_admissible(cfg, j)?;
    Ok(generic_factors(cfg, j)?.eval::<B>())
}

fn pairing_range(cfg: Configuration) -> impl Iterator<Item = i64> {
    i64::from(min_bb_pairings(cfg))..=i64::from(max_bb_pairings(cfg))
}

/// `H(⌊I/2⌋-j) H(j-(I-S-(I+S) mod 2)/2)`: the range gate carried by every
/// term. Identically one on the summation range.
fn range_gate(cfg: Configuration, j: i64) -> i64 {
    let (i, s) = (cfg.i(), cfg.s());
    let twice_low = i - s - (i + s).rem_euclid(2);
    // j - twice_low/2 >= 0  <=>  2j - twice_low >= 0
    heaviside(i / 2 - j) * heaviside(2 * j - twice_low)
}

/// `P(I,S)` as a sum over bb-pairing counts.
pub fn closed_form_p<B: Backend>(cfg: Configuration) -> B::Value {
    if cfg.is_degenerate() {
        return B::Value::zero();
    }
    pairing_range(cfg)
        .filter(|&j| range_gate(cfg, j) == 1)
        .map(|j| {
            let wiring = Count::Product(wiring_factors(cfg, j));
            let target = Count::Product(target_factors(cfg, j));
            eval_product::<B>(&[&wiring, &bb_count(cfg, j), &target])
        })
        .fold(B::Value::zero(), |acc, t| acc + t)
}

/// `Σ_j P(I,S,j) N(I,S,j) N_w(I,S,j)`: total probability over all final
/// wirings. Equals one for every configuration with `I, S >= 1`.
pub fn total_wiring_probability<B: Backend>(cfg: Configuration) -> B::Value {
    pairing_range(cfg)
        .map(|j| {
            let wiring = Count::Product(wiring_factors(cfg, j));
            let generic = Count::Product(
                generic_factors(cfg, j).expect("every admissible j has a wiring"),
            );
            eval_product::<B>(&[&wiring, &bb_count(cfg, j), &generic])
        })
        .fold(B::Value::zero(), |acc, t| acc + t)
}

/// The factors of one `j` term of the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermBreakdown<V> {
    pub j: u32,
    pub wiring_prob: V,
    pub bb_count: V,
    pub target_count: V,
    pub generic_count: V,
    /// `wiring_prob · bb_count · target_count`, multiplied factor-wise.
    #[serde(rename = "term")]
    pub term_value: V,
}

/// One [`TermBreakdown`] per admissible `j`. Empty for degenerate
/// configurations.
pub fn term_breakdown<B: Backend>(cfg: Configuration) -> Vec<TermBreakdown<B::Value>> {
    if cfg.is_degenerate() {
        return Vec::new();
    }
    pairing_range(cfg)
        .map(|j| {
            let wiring = Count::Product(wiring_factors(cfg, j));
            let bb = bb_count(cfg, j);
            let target = Count::Product(target_factors(cfg, j));
            let generic = generic_factors(cfg, j).expect("every admissible j has a wiring");
            TermBreakdown {
                j: j as u32,
                wiring_prob: wiring.eval::<B>(),
                bb_count: bb.eval::<B>(),
                target_count: target.eval::<B>(),
                generic_count: generic.eval::<B>(),
                term_value: eval_product::<B>(&[&wiring, &bb, &target]),
            }
        })
        .collect()
}
