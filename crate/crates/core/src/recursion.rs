//! The second-order recurrence
//!
//! ```text
//! P(0,S) = 0,  P(I,0) = 0,  P(1,S) = 1/S,
//! P(I,S) = 1/(I+S-1) + (S-1)/(I+S-1) P(I-1,S-1) + (I-1)/(I+S-1) P(I-2,S)
//! ```
//!
//! evaluated two ways: [`recursive_p`] follows the recurrence literally with
//! no caching (its cost grows like a Fibonacci sequence in `I`), and
//! [`memoized_p`] fills a [`MemoTable`] with an explicit work list.

use std::collections::HashMap;
use std::hint::black_box;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;
use std::time::Instant;

use crate::model::Configuration;
use crate::numerics::{Backend, Scalar};

/// Observes every call of the naive recursion and may stop it.
pub trait CallMonitor {
    fn enter(&mut self) -> ControlFlow<()>;
}

/// Never interrupts.
#[derive(Debug, Default, Clone, Copy)]
pub struct Unmonitored;

impl CallMonitor for Unmonitored {
    #[inline(always)]
    fn enter(&mut self) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

/// Counts calls.
#[derive(Debug, Default, Clone, Copy)]
pub struct CallCounter {
    pub calls: u64,
}

impl CallMonitor for CallCounter {
    fn enter(&mut self) -> ControlFlow<()> {
        self.calls += 1;
        ControlFlow::Continue(())
    }
}

/// Breaks once the wall clock passes a deadline. The clock is read every
/// 4096 calls.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Instant,
    calls: u64,
}

impl Deadline {
    pub fn new(at: Instant) -> Self {
        Deadline { at, calls: 0 }
    }
}

impl CallMonitor for Deadline {
    #[inline]
    fn enter(&mut self) -> ControlFlow<()> {
        self.calls += 1;
        if self.calls & 0xfff == 0 && Instant::now() >= self.at {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

/// Base cases, checked in the order `P(0,S)`, `P(I,0)`, `P(1,S)`.
fn base_case<B: Backend>(cfg: Configuration) -> Option<B::Value> {
    if cfg.infected == 0 || cfg.clean == 0 {
        Some(B::Value::zero())
    } else if cfg.infected == 1 {
        Some(B::Value::ratio(1, u64::from(cfg.clean)))
    } else {
        None
    }
}

fn combine<B: Backend>(cfg: Configuration, fewer_both: B::Value, fewer_infected: B::Value) -> B::Value {
    let (i, s) = (u64::from(cfg.infected), u64::from(cfg.clean));
    let n = i + s - 1;
    B::Value::ratio(1, n) + B::Value::ratio(s - 1, n) * fewer_both + B::Value::ratio(i - 1, n) * fewer_infected
}

fn children(cfg: Configuration) -> (Configuration, Configuration) {
    (
        Configuration::new(cfg.infected - 1, cfg.clean - 1),
        Configuration::new(cfg.infected - 2, cfg.clean),
    )
}

/// `P(I,S)` by direct recursion, without any caching.
pub fn recursive_p<B: Backend>(cfg: Configuration) -> B::Value {
    match recursive_p_monitored::<B, _>(cfg, &mut Unmonitored) {
        Some(v) => v,
        None => unreachable!("unmonitored recursion cannot be interrupted"),
    }
}

/// [`recursive_p`] reporting each call to `monitor`; `None` if the monitor
/// broke off the evaluation.
pub fn recursive_p_monitored<B: Backend, M: CallMonitor>(
    cfg: Configuration,
    monitor: &mut M,
) -> Option<B::Value> {
    if monitor.enter().is_break() {
        return None;
    }
    // Keeps the optimizer from folding repeated subcalls together.
    let cfg = black_box(cfg);
    if let Some(v) = base_case::<B>(cfg) {
        return Some(v);
    }
    let (a, b) = children(cfg);
    let fewer_both = recursive_p_monitored::<B, M>(a, monitor)?;
    let fewer_infected = recursive_p_monitored::<B, M>(b, monitor)?;
    Some(combine::<B>(cfg, fewer_both, fewer_infected))
}

/// Insert-once cache of `P` values for one backend.
///
/// Safe to share between threads: concurrent callers may compute the same
/// entry twice, but the first write wins and every reader sees it.
pub struct MemoTable<B: Backend> {
    entries: RwLock<HashMap<Configuration, B::Value>>,
    evaluations: AtomicU64,
}

impl<B: Backend> Default for MemoTable<B> {
    fn default() -> Self {
        MemoTable {
            entries: RwLock::new(HashMap::new()),
            evaluations: AtomicU64::new(0),
        }
    }
}

impl<B: Backend> MemoTable<B> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, cfg: Configuration) -> Option<B::Value> {
        self.entries.read().unwrap().get(&cfg).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of subproblems this table has computed (including any
    /// duplicates lost to a concurrent writer).
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn contains(&self, cfg: Configuration) -> bool {
        self.entries.read().unwrap().contains_key(&cfg)
    }

    fn insert(&self, cfg: Configuration, value: B::Value) -> B::Value {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.entries
            .write()
            .unwrap()
            .entry(cfg)
            .or_insert(value)
            .clone()
    }
}

/// `P(I,S)` through `memo`, evaluating each missing subproblem once.
pub fn memoized_p<B: Backend>(cfg: Configuration, memo: &MemoTable<B>) -> B::Value {
    if let Some(v) = memo.get(cfg) {
        return v;
    }
    let mut pending = vec![cfg];
    let mut result = None;
    while let Some(&top) = pending.last() {
        if let Some(v) = memo.get(top) {
            pending.pop();
            result = Some(v);
            continue;
        }
        if let Some(v) = base_case::<B>(top) {
            result = Some(memo.insert(top, v));
            pending.pop();
            continue;
        }
        let (a, b) = children(top);
        match (memo.get(a), memo.get(b)) {
            (Some(va), Some(vb)) => {
                result = Some(memo.insert(top, combine::<B>(top, va, vb)));
                pending.pop();
            }
            (va, vb) => {
                if va.is_none() {
                    pending.push(a);
                }
                if vb.is_none() {
                    pending.push(b);
                }
            }
        }
    }
    result.expect("work list always resolves the query")
}
