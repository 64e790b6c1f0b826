//! The closed form written out as one gated expression, term for term, with
//! explicit step and delta factors instead of the factored counting
//! functions. It must agree with the library's assembly exactly.

use pairprob::closed_form::{closed_form_p, total_wiring_probability};
use pairprob::numerics::{heaviside as h_step, kronecker as delta};
use pairprob::recursion::{memoized_p, MemoTable};
use pairprob::{Configuration, Exact, ExactScalar, Scalar};

fn int(n: i128) -> ExactScalar {
    ExactScalar::from_integer(n)
}

fn fact(n: i64) -> ExactScalar {
    assert!(n >= 0);
    int((1..=n as i128).product())
}

fn choose(a: i64, b: i64) -> ExactScalar {
    if b < 0 || b > a {
        return int(0);
    }
    assert!(a >= 0);
    let mut acc: i128 = 1;
    for k in 0..b as i128 {
        acc = acc * (a as i128 - k) / (k + 1);
    }
    int(acc)
}

fn prod(lo: i64, hi: i64, f: impl Fn(i64) -> ExactScalar) -> ExactScalar {
    (lo..=hi).fold(int(1), |acc, k| acc * f(k))
}

/// `gate * value()`, evaluating `value` only when the gate is open.
fn gated(gate: i64, value: impl FnOnce() -> ExactScalar) -> ExactScalar {
    if gate == 0 {
        int(0)
    } else {
        int(gate as i128) * value()
    }
}

struct Literal {
    i: i64,
    s: i64,
    /// Read the `h = I` unpaired-index case with `1/j` in place of `1/j!`.
    typo: bool,
}

impl Literal {
    fn f(&self, j: i64) -> i64 {
        let (i, s) = (self.i, self.s);
        h_step(i - s - 1) * delta((i + s + 1).rem_euclid(2)) * delta(2 * j - i + s + 1)
    }

    fn lower(&self) -> i64 {
        let (i, s) = (self.i, self.s);
        (i - s - (i + s).rem_euclid(2)) / 2
    }

    fn first(&self, j: i64) -> ExactScalar {
        let (i, s) = (self.i, self.s);
        let gate = h_step(i / 2 - j) * h_step(j - self.lower());
        gated(gate, || {
            prod(0, i - j - 1 - self.f(j), |k| ExactScalar::new(1, i + s - 1 - 2 * k))
        })
    }

    fn unpaired(&self, j: i64, h: i64) -> ExactScalar {
        let (i, s) = (self.i, self.s);
        let last = gated(delta(h - i), || {
            let norm = if self.typo { int(j as i128) } else { fact(j) };
            prod(0, j - 1, |k| choose(i - 1 - 2 * k, 2)) / norm
        });
        let second_last = gated(delta(h - i + 1), || {
            int((i - 2) as i128) * prod(0, j - 2, |k| choose(i - 3 - 2 * k, 2)) / fact(j - 1)
        });
        let middle = gated(h_step(h - s - 1) * h_step(i - 2 - h), || {
            let exact_claim = gated(delta(j - i + h), || {
                prod(1, i - h, |k| int((h - k) as i128)) / fact(j - i + h)
            });
            let extra = gated(h_step(j - i + h - 1), || {
                prod(1, i - h, |k| int((h - k) as i128))
                    * prod(1, j - i + h, |d| choose(2 * h - i - 1 - 2 * (d - 1), 2))
                    / fact(j - i + h)
            });
            exact_claim + extra
        });
        last + second_last + middle
    }

    fn second(&self, j: i64) -> ExactScalar {
        let (i, s) = (self.i, self.s);
        let f = self.f(j);
        let regular = gated(1 - f, || prod(1, j, |k| choose(i - 2 * (k - 1), 2)) / fact(j));
        let dagger = gated(f, || {
            let j0 = int(delta(j) as i128);
            let j1 = gated(delta(j - 1), || choose(i, 2) - int(1));
            let many = gated(h_step(j - 2), || {
                (s + 1..=i).fold(int(0), |acc, h| acc + self.unpaired(j, h))
            });
            j0 + j1 + many
        });
        regular + dagger
    }

    fn third(&self, j: i64) -> ExactScalar {
        let (i, s) = (self.i, self.s);
        let f = self.f(j);
        gated(1 - f, || fact(i - 2 * j) * choose(s - 1, i - 1 - 2 * j)) + gated(f, || fact(s))
    }

    fn generic(&self, j: i64) -> ExactScalar {
        let (i, s) = (self.i, self.s);
        gated(1 - self.f(j), || fact(s) / fact(s - (i - 2 * j))) + gated(self.f(j), || fact(s))
    }

    fn range(&self) -> std::ops::RangeInclusive<i64> {
        h_step(self.i - self.s - 1) * self.lower()..=self.i / 2
    }

    fn p(&self) -> ExactScalar {
        self.range()
            .fold(int(0), |acc, j| acc + self.first(j) * self.second(j) * self.third(j))
    }

    fn total(&self) -> ExactScalar {
        self.range()
            .fold(int(0), |acc, j| acc + self.first(j) * self.second(j) * self.generic(j))
    }
}

fn literal(i: u32, s: u32, typo: bool) -> Literal {
    Literal { i: i64::from(i), s: i64::from(s), typo }
}

#[test]
fn literal_expression_matches_factored_assembly() {
    for i in 1..=24u32 {
        for s in 1..=24u32 {
            let cfg = Configuration::new(i, s);
            assert_eq!(literal(i, s, false).p(), closed_form_p::<Exact>(cfg), "{cfg}");
            assert_eq!(
                literal(i, s, false).total(),
                total_wiring_probability::<Exact>(cfg),
                "{cfg}"
            );
        }
    }
}

#[test]
fn literal_expression_matches_recursion() {
    let memo = MemoTable::<Exact>::new();
    for i in 1..=20u32 {
        for s in 1..=20u32 {
            let cfg = Configuration::new(i, s);
            assert_eq!(literal(i, s, false).p(), memoized_p(cfg, &memo), "{cfg}");
        }
    }
}

#[test]
fn reading_the_typo_literally_breaks_normalization() {
    // 1/j and 1/j! coincide for j = 2, so (7,2) cannot tell them apart; the
    // first dagger configuration with j = 3 is (8,1).
    assert_eq!(literal(7, 2, true).total(), ExactScalar::one());
    assert_ne!(literal(8, 1, true).total(), ExactScalar::one());
    let memo = MemoTable::<Exact>::new();
    assert_ne!(literal(8, 1, true).p(), memoized_p(Configuration::new(8, 1), &memo));
    let broken = (1..=12u32)
        .flat_map(|i| (1..=12u32).map(move |s| (i, s)))
        .filter(|&(i, s)| literal(i, s, true).total() != ExactScalar::one())
        .count();
    assert!(broken > 0);
}
