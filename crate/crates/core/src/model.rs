//! Configurations of infected and clean devices, the dagger predicate and
//! the bounds on the number of infected–infected ("bb") pairings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{heaviside, kronecker};

/// `I` infected devices `b_1..b_I` meeting `S` clean devices `w_1..w_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub infected: u32,
    pub clean: u32,
}

impl Configuration {
    pub const fn new(infected: u32, clean: u32) -> Self {
        Configuration { infected, clean }
    }

    pub fn devices(&self) -> u32 {
        self.infected + self.clean
    }

    /// True when one of the engines' base cases (`I = 0`, `S = 0`) applies.
    pub fn is_degenerate(&self) -> bool {
        self.infected == 0 || self.clean == 0
    }

    pub(crate) fn i(&self) -> i64 {
        i64::from(self.infected)
    }

    pub(crate) fn s(&self) -> i64 {
        i64::from(self.clean)
    }

    pub fn dagger(&self) -> DaggerInfo {
        let (i, s) = (self.i(), self.s());
        let is_dagger = i > s && (i + s) % 2 == 1;
        DaggerInfo {
            is_dagger,
            forced_j: is_dagger.then(|| ((i - s - 1) / 2) as u32),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.infected, self.clean)
    }
}

/// Whether a configuration can end with one infected device left unpaired,
/// and for which bb-pairing count that happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DaggerInfo {
    pub is_dagger: bool,
    pub forced_j: Option<u32>,
}

/// `H(I-S-1) δ((I+S+1) mod 2) δ(2j-I+S+1)`: one exactly when `I > S`, `I+S`
/// is odd and `j = (I-S-1)/2`.
pub fn dagger_indicator(cfg: Configuration, j: i64) -> i64 {
    let (i, s) = (cfg.i(), cfg.s());
    heaviside(i - s - 1) * kronecker((i + s + 1).rem_euclid(2)) * kronecker(2 * j - i + s + 1)
}

/// Fewest bb-pairings any final wiring of `cfg` can have.
pub fn min_bb_pairings(cfg: Configuration) -> u32 {
    let (i, s) = (cfg.i(), cfg.s());
    let twice = heaviside(i - s - 1) * (i - s - (i + s).rem_euclid(2));
    assert_eq!(twice % 2, 0, "min bb-pairings of {cfg} is not an integer");
    (twice / 2) as u32
}

pub fn max_bb_pairings(cfg: Configuration) -> u32 {
    cfg.infected / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const fn c(i: u32, s: u32) -> Configuration {
        Configuration::new(i, s)
    }

    #[test]
    fn dagger_indicator_examples() {
        assert_eq!(dagger_indicator(c(7, 2), 2), 1);
        for j in -3..10 {
            assert_eq!(dagger_indicator(c(7, 5), j), 0);
        }
        assert_eq!(dagger_indicator(c(3, 2), 0), 1);
        assert_eq!(dagger_indicator(c(3, 2), 1), 0);
    }

    #[test]
    fn min_and_max_pairings() {
        assert_eq!(min_bb_pairings(c(3, 5)), 0);
        assert_eq!(min_bb_pairings(c(7, 2)), 2);
        assert_eq!(min_bb_pairings(c(8, 2)), 3);
        assert_eq!(max_bb_pairings(c(7, 2)), 3);
        assert_eq!(max_bb_pairings(c(0, 5)), 0);
        assert_eq!(max_bb_pairings(c(6, 1)), 3);
    }

    #[test]
    fn dagger_info_matches_indicator() {
        assert_eq!(
            c(7, 2).dagger(),
            DaggerInfo { is_dagger: true, forced_j: Some(2) }
        );
        assert_eq!(c(7, 5).dagger(), DaggerInfo { is_dagger: false, forced_j: None });
        assert!(!c(2, 3).dagger().is_dagger);
    }

    proptest! {
        #[test]
        fn pairing_bounds_and_unique_dagger_j(i in 0u32..60, s in 0u32..60) {
            let cfg = c(i, s);
            if i >= 1 {
                prop_assert!(min_bb_pairings(cfg) <= max_bb_pairings(cfg));
            }
            let hits: Vec<i64> = (-5..70).filter(|&j| dagger_indicator(cfg, j) == 1).collect();
            prop_assert!(hits.len() <= 1);
            if let Some(&j) = hits.first() {
                prop_assert!(j >= i64::from(min_bb_pairings(cfg)));
                prop_assert!(j <= i64::from(max_bb_pairings(cfg)));
                prop_assert_eq!(cfg.dagger().forced_j, Some(j as u32));
            } else {
                prop_assert!(!cfg.dagger().is_dagger);
            }
        }
    }
}
