//! Exhaustive enumeration of the pairing process.
//!
//! The lowest-index infected device that is still unpaired picks a partner
//! uniformly among all other unpaired devices; if none is left it stays
//! unpaired and the process ends. Every choice sequence is expanded with its
//! exact probability and the leaves are grouped by final wiring.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Configuration;
use crate::numerics::{ExactScalar, Scalar};
use crate::parallel;

/// Enumeration is refused above this many devices unless a larger cap is
/// passed explicitly.
pub const DEFAULT_ENUMERATION_CAP: u32 = 11;

/// A device, numbered from 1 within its kind. Infected devices sort first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Device {
    Infected(u32),
    Clean(u32),
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Device::Infected(k) => write!(f, "b{k}"),
            Device::Clean(k) => write!(f, "w{k}"),
        }
    }
}

/// A final wiring in canonical form: each pair ordered, pairs sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wiring {
    pub pairs: Vec<(Device, Device)>,
    /// Index of the infected device left without a partner, if any.
    pub unpaired_infected: Option<u32>,
}

impl Wiring {
    pub fn bb_pairings(&self) -> u32 {
        self.pairs
            .iter()
            .filter(|(a, b)| matches!((a, b), (Device::Infected(_), Device::Infected(_))))
            .count() as u32
    }

    pub fn pairs_clean(&self, target: u32) -> bool {
        let t = Device::Clean(target);
        self.pairs.iter().any(|&(a, b)| a == t || b == t)
    }
}

impl fmt::Display for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{{{}}}", pairs.join(", "))?;
        if let Some(h) = self.unpaired_infected {
            write!(f, " b{h} unpaired")?;
        }
        Ok(())
    }
}

/// Final wirings of one configuration, grouped by bb-pairing count, with the
/// exact probability of reaching each.
#[derive(Debug, Clone, PartialEq)]
pub struct WiringCensus {
    pub cfg: Configuration,
    pub classes: BTreeMap<u32, BTreeMap<Wiring, ExactScalar>>,
}

/// Per-`j` digest of a census.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JClassSummary {
    pub j: u32,
    pub wiring_count: u64,
    /// Common probability of every wiring in the class; `None` if they differ.
    pub per_wiring_prob: Option<ExactScalar>,
    /// Wirings in which `w_1` is paired.
    pub target_hit_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusSummary {
    pub j_classes: Vec<JClassSummary>,
    pub dagger_h_counts: BTreeMap<u32, u64>,
}

impl WiringCensus {
    pub fn wirings(&self) -> impl Iterator<Item = (&Wiring, &ExactScalar)> {
        self.classes.values().flat_map(|c| c.iter())
    }

    pub fn total_probability(&self) -> ExactScalar {
        self.wirings()
            .fold(ExactScalar::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Probability that clean device `w_target` ends up paired.
    pub fn hit_probability(&self, target: u32) -> ExactScalar {
        self.wirings()
            .filter(|(w, _)| w.pairs_clean(target))
            .fold(ExactScalar::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Number of wirings leaving `b_h` unpaired, keyed by `h`.
    pub fn dagger_h_counts(&self) -> BTreeMap<u32, u64> {
        let mut counts = BTreeMap::new();
        for (w, _) in self.wirings() {
            if let Some(h) = w.unpaired_infected {
                *counts.entry(h).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn summary(&self) -> CensusSummary {
        let j_classes = self
            .classes
            .iter()
            .map(|(&j, wirings)| {
                let mut probs = wirings.values();
                let first = probs.next().cloned();
                let uniform = probs.all(|p| Some(p) == first.as_ref());
                JClassSummary {
                    j,
                    wiring_count: wirings.len() as u64,
                    per_wiring_prob: if uniform { first } else { None },
                    target_hit_count: wirings.keys().filter(|w| w.pairs_clean(1)).count() as u64,
                }
            })
            .collect();
        CensusSummary { j_classes, dagger_h_counts: self.dagger_h_counts() }
    }
}

struct Expansion {
    infected: u32,
    devices: u32,
    leaves: BTreeMap<Wiring, ExactScalar>,
}

impl Expansion {
    fn device(&self, index: u32) -> Device {
        if index < self.infected {
            Device::Infected(index + 1)
        } else {
            Device::Clean(index - self.infected + 1)
        }
    }

    fn chooser(&self, paired: u64) -> Option<u32> {
        (0..self.infected).find(|&b| paired & (1 << b) == 0)
    }

    fn options(&self, paired: u64, chooser: u32) -> Vec<u32> {
        (0..self.devices)
            .filter(|&d| d != chooser && paired & (1 << d) == 0)
            .collect()
    }

    fn expand(&mut self, paired: u64, pairs: &mut Vec<(u32, u32)>, weight: u128) {
        let Some(chooser) = self.chooser(paired) else {
            self.leaf(pairs, None, weight);
            return;
        };
        let options = self.options(paired, chooser);
        if options.is_empty() {
            self.leaf(pairs, Some(chooser + 1), weight);
            return;
        }
        let weight = weight
            .checked_mul(options.len() as u128)
            .expect("path probability denominator overflow");
        for d in options {
            pairs.push((chooser, d));
            self.expand(paired | (1 << chooser) | (1 << d), pairs, weight);
            pairs.pop();
        }
    }

    fn leaf(&mut self, pairs: &[(u32, u32)], unpaired: Option<u32>, weight: u128) {
        let mut canonical: Vec<(Device, Device)> = pairs
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (self.device(a), self.device(b));
                (a.min(b), a.max(b))
            })
            .collect();
        canonical.sort();
        let wiring = Wiring { pairs: canonical, unpaired_infected: unpaired };
        let p = ExactScalar::new(1u32, weight);
        let slot = self.leaves.entry(wiring).or_insert_with(ExactScalar::zero);
        *slot = slot.clone() + p;
    }
}

fn check_cap(cfg: Configuration, cap: u32) -> Result<()> {
    if cfg.devices() > cap {
        return Err(Error::EnumerationCap { cfg, devices: cfg.devices(), cap });
    }
    Ok(())
}

/// Enumerates every choice sequence of `cfg`, refusing configurations with
/// more than `cap` devices.
pub fn enumerate_process_with_cap(cfg: Configuration, cap: u32) -> Result<WiringCensus> {
    check_cap(cfg, cap)?;
    assert!(cfg.devices() <= 64, "device bitmask holds at most 64 devices");
    let fresh = || Expansion {
        infected: cfg.infected,
        devices: cfg.devices(),
        leaves: BTreeMap::new(),
    };
    // The first chooser's options are expanded independently and merged.
    let root = fresh();
    let leaves = match root.chooser(0) {
        Some(first) if !root.options(0, first).is_empty() => {
            let options = root.options(0, first);
            let width = options.len() as u128;
            let subtrees = parallel::map_collect(options, |d| {
                let mut sub = fresh();
                sub.expand((1 << first) | (1 << d), &mut vec![(first, d)], width);
                sub.leaves
            });
            let mut merged = BTreeMap::new();
            for sub in subtrees {
                for (w, p) in sub {
                    let slot = merged.entry(w).or_insert_with(ExactScalar::zero);
                    *slot = slot.clone() + p;
                }
            }
            merged
        }
        _ => {
            let mut all = root;
            all.expand(0, &mut Vec::new(), 1);
            all.leaves
        }
    };
    let mut classes: BTreeMap<u32, BTreeMap<Wiring, ExactScalar>> = BTreeMap::new();
    for (w, p) in leaves {
        classes.entry(w.bb_pairings()).or_default().insert(w, p);
    }
    Ok(WiringCensus { cfg, classes })
}

pub fn enumerate_process(cfg: Configuration) -> Result<WiringCensus> {
    enumerate_process_with_cap(cfg, DEFAULT_ENUMERATION_CAP)
}

/// Probability that `w_target` is paired, by enumeration.
pub fn oracle_p_with_cap(cfg: Configuration, target: u32, cap: u32) -> Result<ExactScalar> {
    if cfg.clean == 0 {
        return Err(Error::NoCleanDevices(cfg));
    }
    if target == 0 || target > cfg.clean {
        return Err(Error::TargetOutOfRange { target, clean: cfg.clean });
    }
    Ok(enumerate_process_with_cap(cfg, cap)?.hit_probability(target))
}

pub fn oracle_p(cfg: Configuration, target: u32) -> Result<ExactScalar> {
    oracle_p_with_cap(cfg, target, DEFAULT_ENUMERATION_CAP)
}

/// True iff every clean device has exactly the same infection probability.
pub fn symmetry_check_with_cap(cfg: Configuration, cap: u32) -> Result<bool> {
    if cfg.clean == 0 {
        return Err(Error::NoCleanDevices(cfg));
    }
    let census = enumerate_process_with_cap(cfg, cap)?;
    let first = census.hit_probability(1);
    Ok((2..=cfg.clean).all(|t| census.hit_probability(t) == first))
}

pub fn symmetry_check(cfg: Configuration) -> Result<bool> {
    symmetry_check_with_cap(cfg, DEFAULT_ENUMERATION_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: u32, s: u32) -> Configuration {
        Configuration::new(i, s)
    }

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::new(n, d)
    }

    #[test]
    fn census_of_two_two() {
        let census = enumerate_process(c(2, 2)).unwrap();
        let summary = census.summary();
        assert_eq!(summary.j_classes.len(), 2);
        assert_eq!(summary.j_classes[0].wiring_count, 2);
        assert_eq!(summary.j_classes[0].per_wiring_prob, Some(q(1, 3)));
        assert_eq!(summary.j_classes[1].wiring_count, 1);
        assert_eq!(summary.j_classes[1].per_wiring_prob, Some(q(1, 3)));
        assert_eq!(census.total_probability(), q(1, 1));
        assert!(summary.dagger_h_counts.is_empty());
    }

    #[test]
    fn census_of_one_one() {
        let census = enumerate_process(c(1, 1)).unwrap();
        let all: Vec<_> = census.wirings().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].0.pairs, vec![(Device::Infected(1), Device::Clean(1))]);
        assert_eq!(all[0].1, &q(1, 1));
    }

    #[test]
    fn census_of_seven_two_dagger_classes() {
        let census = enumerate_process(c(7, 2)).unwrap();
        let h: Vec<(u32, u64)> = census.dagger_h_counts().into_iter().collect();
        assert_eq!(h, vec![(5, 24), (6, 60), (7, 90)]);
        assert_eq!(census.total_probability(), q(1, 1));
        assert_eq!(census.hit_probability(1), q(93, 128));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_p(c(2, 2), 1).unwrap(), q(2, 3));
        assert_eq!(oracle_p(c(3, 1), 1).unwrap(), q(1, 1));
        assert!(matches!(oracle_p(c(5, 0), 1), Err(Error::NoCleanDevices(_))));
        assert!(matches!(oracle_p(c(2, 2), 3), Err(Error::TargetOutOfRange { .. })));
        assert!(matches!(oracle_p(c(0, 2), 1), Ok(v) if v.is_zero()));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_process(c(6, 6)),
            Err(Error::EnumerationCap { devices: 12, cap: 11, .. })
        ));
        assert!(enumerate_process_with_cap(c(6, 6), 12).is_ok());
    }

    #[test]
    fn symmetry_examples() {
        assert!(symmetry_check(c(2, 2)).unwrap());
        assert!(symmetry_check(c(3, 4)).unwrap());
        assert!(symmetry_check(c(1, 3)).unwrap());
        assert!(symmetry_check(c(6, 5)).unwrap());
    }

    #[test]
    fn figure_wiring_is_reachable() {
        // b1-w1, b2-b3, b4-w2, b5-b7, b6 left over
        let census = enumerate_process(c(7, 2)).unwrap();
        let wiring = Wiring {
            pairs: vec![
                (Device::Infected(1), Device::Clean(1)),
                (Device::Infected(2), Device::Infected(3)),
                (Device::Infected(4), Device::Clean(2)),
                (Device::Infected(5), Device::Infected(7)),
            ],
            unpaired_infected: Some(6),
        };
        assert_eq!(census.classes[&2][&wiring], q(1, 8 * 6 * 4 * 2));
        assert_eq!(
            wiring.to_string(),
            "{b1-w1, b2-b3, b4-w2, b5-b7} b6 unpaired"
        );
    }

    #[test]
    fn every_wiring_is_valid_and_has_one_path() {
        for n in 1..=9u32 {
            for i in 0..=n {
                let cfg = c(i, n - i);
                let census = enumerate_process(cfg).unwrap();
                for (w, p) in census.wirings() {
                    let mut seen = std::collections::HashSet::new();
                    for &(a, b) in &w.pairs {
                        assert!(seen.insert(a) && seen.insert(b), "device reused in {w}");
                    }
                    let paired_infected = (1..=i)
                        .filter(|&k| seen.contains(&Device::Infected(k)))
                        .count() as u32;
                    assert!(i - paired_infected <= 1);
                    assert_eq!(w.unpaired_infected.is_some(), paired_infected < i);
                    // a leaf is reached by exactly one choice sequence, so its
                    // probability is a unit fraction
                    assert_eq!(p.numer(), &1.into());
                }
                assert_eq!(census.total_probability(), q(1, 1));
            }
        }
    }
}
