//! Wall-clock timing of the three deterministic engines on `I = S` sizes.
//!
//! Cells run one after another on the calling thread. Every replicate is
//! cold: the memoized engine gets a fresh table and the naive recursion never
//! caches. A replicate that exceeds the timeout ends its cell; once a size
//! times out for an engine, larger sizes for that engine are marked timed
//! out without being run, since cost only grows with size.

use std::fmt;
use std::hint::black_box;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::closed_form::closed_form_p;
use crate::error::Error;
use crate::model::Configuration;
use crate::numerics::{Backend, BackendKind, Exact, Float};
use crate::recursion::{memoized_p, recursive_p_monitored, Deadline, MemoTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Recursive,
    Memoized,
    Closed,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [EngineKind::Recursive, EngineKind::Memoized, EngineKind::Closed];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Recursive => "recursive",
            EngineKind::Memoized => "memoized",
            EngineKind::Closed => "closed",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "recursive" => Ok(EngineKind::Recursive),
            "memoized" | "memo" => Ok(EngineKind::Memoized),
            "closed" => Ok(EngineKind::Closed),
            other => Err(Error::UnknownEngine(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub engine: EngineKind,
    pub infected: u32,
    pub clean: u32,
    /// 1-based.
    pub replicate: u32,
    pub seconds: f64,
}

/// All replicates of one engine on one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTiming {
    pub engine: EngineKind,
    pub cfg: Configuration,
    pub records: Vec<BenchRecord>,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub engine: EngineKind,
    pub infected: u32,
    pub clean: u32,
    pub min_s: Option<f64>,
    pub mean_s: Option<f64>,
    pub max_s: Option<f64>,
    pub timed_out: bool,
}

/// Runs one replicate; `None` if it ran past `deadline`.
fn run_once<B: Backend>(engine: EngineKind, cfg: Configuration, timeout: Duration) -> Option<Duration> {
    let start = Instant::now();
    match engine {
        EngineKind::Recursive => {
            let mut deadline = Deadline::new(start + timeout);
            black_box(recursive_p_monitored::<B, _>(black_box(cfg), &mut deadline))?;
        }
        EngineKind::Memoized => {
            let memo = MemoTable::<B>::new();
            black_box(memoized_p(black_box(cfg), &memo));
        }
        EngineKind::Closed => {
            black_box(closed_form_p::<B>(black_box(cfg)));
        }
    }
    let elapsed = start.elapsed();
    (elapsed <= timeout).then_some(elapsed)
}

/// Times `replicates` cold runs of `engine` on `cfg`.
pub fn time_engine(
    engine: EngineKind,
    cfg: Configuration,
    replicates: u32,
    timeout_s: f64,
    backend: BackendKind,
) -> CellTiming {
    let timeout = Duration::from_secs_f64(timeout_s.max(0.0));
    let mut records = Vec::with_capacity(replicates as usize);
    let mut timed_out = false;
    for replicate in 1..=replicates.max(1) {
        let run = match backend {
            BackendKind::Exact => run_once::<Exact>(engine, cfg, timeout),
            BackendKind::Float => run_once::<Float>(engine, cfg, timeout),
        };
        match run {
            Some(elapsed) => records.push(BenchRecord {
                engine,
                infected: cfg.infected,
                clean: cfg.clean,
                replicate,
                seconds: elapsed.as_secs_f64(),
            }),
            None => {
                timed_out = true;
                break;
            }
        }
    }
    CellTiming { engine, cfg, records, timed_out }
}

/// [`time_engine`] with the engine given by name.
pub fn time_engine_named(
    engine: &str,
    cfg: Configuration,
    replicates: u32,
    timeout_s: f64,
    backend: BackendKind,
) -> Result<CellTiming, Error> {
    Ok(time_engine(engine.parse()?, cfg, replicates, timeout_s, backend))
}

/// Min/mean/max over a cell's records; no numbers for timed-out cells.
pub fn summarize(cell: &CellTiming) -> BenchSummary {
    let secs: Vec<f64> = cell.records.iter().map(|r| r.seconds).collect();
    let stats = (!cell.timed_out && !secs.is_empty()).then(|| {
        let min = secs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = secs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = (secs.iter().sum::<f64>() / secs.len() as f64).clamp(min, max);
        (min, mean, max)
    });
    BenchSummary {
        engine: cell.engine,
        infected: cell.cfg.infected,
        clean: cell.cfg.clean,
        min_s: stats.map(|s| s.0),
        mean_s: stats.map(|s| s.1),
        max_s: stats.map(|s| s.2),
        timed_out: cell.timed_out,
    }
}

/// Times every engine on every `I = S` size. Cells are returned size-major,
/// engines in the order given.
pub fn bench_cells(
    sizes: &[u32],
    engines: &[EngineKind],
    replicates: u32,
    timeout_s: f64,
    backend: BackendKind,
) -> Vec<CellTiming> {
    let mut sorted_sizes = sizes.to_vec();
    sorted_sizes.sort_unstable();
    sorted_sizes.dedup();
    let mut cells = Vec::new();
    for (rank, &engine) in engines.iter().enumerate() {
        let mut exhausted = false;
        for &n in &sorted_sizes {
            let cfg = Configuration::new(n, n);
            let cell = if exhausted {
                CellTiming { engine, cfg, records: Vec::new(), timed_out: true }
            } else {
                time_engine(engine, cfg, replicates, timeout_s, backend)
            };
            exhausted |= cell.timed_out;
            cells.push((n, rank, cell));
        }
    }
    cells.sort_by_key(|&(n, rank, _)| (n, rank));
    cells.into_iter().map(|(_, _, c)| c).collect()
}

pub fn bench_suite(
    sizes: &[u32],
    engines: &[EngineKind],
    replicates: u32,
    timeout_s: f64,
    backend: BackendKind,
) -> Vec<BenchSummary> {
    bench_cells(sizes, engines, replicates, timeout_s, backend)
        .iter()
        .map(summarize)
        .collect()
}

pub const SUMMARY_CSV_HEADER: &str = "engine,I,S,min_s,mean_s,max_s,timed_out";
pub const RECORDS_CSV_HEADER: &str = "engine,I,S,replicate,seconds";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_summary_csv<W: Write>(mut out: W, rows: &[BenchSummary]) -> io::Result<()> {
    writeln!(out, "{SUMMARY_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.engine,
            r.infected,
            r.clean,
            opt(r.min_s),
            opt(r.mean_s),
            opt(r.max_s),
            r.timed_out
        )?;
    }
    Ok(())
}

pub fn write_records_csv<W: Write>(mut out: W, records: &[BenchRecord]) -> io::Result<()> {
    writeln!(out, "{RECORDS_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.engine, r.infected, r.clean, r.replicate, r.seconds)?;
    }
    Ok(())
}
