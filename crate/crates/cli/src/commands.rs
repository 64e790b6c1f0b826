use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use pairprob::bench::{self, EngineKind};
use pairprob::closed_form::{closed_form_p, term_breakdown};
use pairprob::montecarlo::{estimate_p_with_workers, EstimateWithError};
use pairprob::numerics::IntoAny;
use pairprob::oracle::oracle_p_with_cap;
use pairprob::parallel;
use pairprob::recursion::{memoized_p, recursive_p, MemoTable};
use pairprob::verification::{run_all, VerifyConfig};
use pairprob::{AnyScalar, Backend, BackendKind, Configuration, Exact, Float, Scalar};
use serde::Serialize;

use crate::exit::CliError;
use crate::{Engine, Format, SliceAxis};

/// Evaluates one engine on many configurations, sharing memo tables.
pub struct Evaluator {
    engine: Engine,
    backend: BackendKind,
    cap: u32,
    exact_memo: MemoTable<Exact>,
    float_memo: MemoTable<Float>,
}

fn deterministic<B: Backend>(engine: Engine, cfg: Configuration, memo: &MemoTable<B>) -> AnyScalar
where
    B::Value: IntoAny,
{
    match engine {
        Engine::Recursive => recursive_p::<B>(cfg).into_any(),
        Engine::Memo => memoized_p(cfg, memo).into_any(),
        Engine::Closed => closed_form_p::<B>(cfg).into_any(),
        Engine::Oracle | Engine::Mc => unreachable!("not a deterministic formula engine"),
    }
}

impl Evaluator {
    pub fn new(engine: Engine, backend: BackendKind, cap: u32) -> Self {
        Evaluator {
            engine,
            backend,
            cap,
            exact_memo: MemoTable::new(),
            float_memo: MemoTable::new(),
        }
    }

    pub fn eval(&self, cfg: Configuration) -> Result<AnyScalar, CliError> {
        match self.engine {
            Engine::Oracle => {
                // Enumeration needs a clean target; the empty cases are 0 by definition.
                let p = if cfg.is_degenerate() {
                    pairprob::ExactScalar::from_integer(0)
                } else {
                    oracle_p_with_cap(cfg, 1, self.cap)?
                };
                Ok(match self.backend {
                    BackendKind::Exact => p.into_any(),
                    BackendKind::Float => AnyScalar::Float(pairprob::FloatScalar(p.to_f64())),
                })
            }
            Engine::Mc => Err(CliError::Usage("the mc engine only runs through compute".into())),
            engine => Ok(match self.backend {
                BackendKind::Exact => deterministic(engine, cfg, &self.exact_memo),
                BackendKind::Float => deterministic(engine, cfg, &self.float_memo),
            }),
        }
    }
}

/// Stdout, or a buffered file.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn reject_format(cmd: &str, format: Format, allowed: &[Format]) -> Result<(), CliError> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{cmd} does not support --format {format}")))
    }
}

#[derive(Serialize)]
struct ComputeJson<'a> {
    infected: u32,
    clean: u32,
    engine: &'a str,
    backend: BackendKind,
    p: AnyScalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimate: Option<EstimateWithError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<serde_json::Value>,
}

pub struct ComputeArgs {
    pub cfg: Configuration,
    pub engine: Engine,
    pub backend: BackendKind,
    pub mc_samples: Option<u64>,
    pub seed: u64,
    pub explain: bool,
    pub format: Format,
    pub cap: u32,
}

pub fn compute(args: ComputeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    reject_format("compute", args.format, &[Format::Plain, Format::Json])?;
    let (p, estimate) = match args.engine {
        Engine::Mc => {
            let samples = args
                .mc_samples
                .ok_or_else(|| CliError::Usage("--engine mc needs --mc-samples".into()))?;
            let est = estimate_p_with_workers(args.cfg, samples, args.seed, parallel::default_workers())?;
            (AnyScalar::Float(pairprob::FloatScalar(est.estimate)), Some(est))
        }
        engine => (Evaluator::new(engine, args.backend, args.cap).eval(args.cfg)?, None),
    };
    let terms = if args.explain {
        Some(match args.backend {
            BackendKind::Exact => serde_json::to_value(term_breakdown::<Exact>(args.cfg))?,
            BackendKind::Float => serde_json::to_value(term_breakdown::<Float>(args.cfg))?,
        })
    } else {
        None
    };
    match args.format {
        Format::Json => {
            let doc = ComputeJson {
                infected: args.cfg.infected,
                clean: args.cfg.clean,
                engine: args.engine.name(),
                backend: if estimate.is_some() { BackendKind::Float } else { args.backend },
                p,
                estimate,
                terms,
            };
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
        _ => {
            writeln!(out, "{p}")?;
            if let Some(t) = terms {
                serde_json::to_writer_pretty(&mut *out, &t)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn write_table(
    out: &mut dyn Write,
    format: Format,
    header: &[&str],
    rows: &[(Vec<u32>, AnyScalar)],
) -> Result<(), CliError> {
    let sep = if format == Format::Csv { "," } else { " " };
    writeln!(out, "{}", header.join(sep))?;
    for (keys, p) in rows {
        let keys: Vec<String> = keys.iter().map(u32::to_string).collect();
        writeln!(out, "{}{sep}{p}", keys.join(sep))?;
    }
    out.flush()?;
    Ok(())
}

pub fn grid(
    max: u32,
    evaluator: &Evaluator,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    reject_format("grid", format, &[Format::Plain, Format::Csv])?;
    if max == 0 {
        return Err(CliError::Usage("--max must be at least 1".into()));
    }
    let cells: Vec<Configuration> = (1..=max)
        .flat_map(|i| (1..=max).map(move |s| Configuration::new(i, s)))
        .collect();
    let values = parallel::map_collect(cells.clone(), |cfg| evaluator.eval(cfg));
    let rows = cells
        .into_iter()
        .zip(values)
        .map(|(cfg, p)| Ok((vec![cfg.infected, cfg.clean], p?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    write_table(&mut *sink(out)?, format, &["I", "S", "P"], &rows)
}

pub fn slice(
    axis: SliceAxis,
    lo: u32,
    hi: u32,
    evaluator: &Evaluator,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    reject_format("slice", format, &[Format::Plain, Format::Csv])?;
    if lo > hi {
        return Err(CliError::Usage(format!("empty range {lo}..{hi}")));
    }
    let xs: Vec<u32> = (lo..=hi).collect();
    let values = parallel::map_collect(xs.clone(), |x| {
        evaluator.eval(match axis {
            SliceAxis::Infected(n) => Configuration::new(n, x),
            SliceAxis::Clean(n) => Configuration::new(x, n),
            SliceAxis::Diagonal => Configuration::new(x, x),
        })
    });
    let rows = xs
        .into_iter()
        .zip(values)
        .map(|(x, p)| Ok((vec![x], p?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    write_table(&mut *sink(out)?, format, &["x", "P"], &rows)
}

/// Runs the suites; `Ok(false)` when any check failed.
pub fn verify(config: VerifyConfig, format: Format, out: &mut dyn Write) -> Result<bool, CliError> {
    reject_format("verify", format, &[Format::Plain, Format::Json])?;
    let reports = run_all(config);
    if format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &reports)?;
        writeln!(out)?;
    } else {
        for r in &reports {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            write!(out, "{status} {} ({}, {} checked)", r.name, r.range, r.checked)?;
            if let Some(f) = &r.failure {
                write!(out, ": {f}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(reports.iter().all(|r| r.passed()))
}

pub fn simulate(
    cfg: Configuration,
    samples: u64,
    seed: u64,
    threads: usize,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    reject_format("simulate", format, &[Format::Plain, Format::Json])?;
    let est = estimate_p_with_workers(cfg, samples, seed, threads)?;
    if format == Format::Json {
        serde_json::to_writer(&mut *out, &est)?;
        writeln!(out)?;
    } else {
        writeln!(
            out,
            "{} +/- {} ({} of {} samples, seed {})",
            est.estimate, est.std_error, est.hits, est.samples, est.seed
        )?;
    }
    Ok(())
}

pub struct BenchArgs<'a> {
    pub sizes: Vec<u32>,
    pub engines: Vec<EngineKind>,
    pub replicates: u32,
    pub timeout: f64,
    pub backend: BackendKind,
    pub format: Format,
    pub out: Option<&'a Path>,
    pub raw: Option<&'a Path>,
}

pub fn bench(args: BenchArgs<'_>) -> Result<(), CliError> {
    reject_format("bench", args.format, &[Format::Plain, Format::Csv])?;
    // Open outputs first so an unwritable path fails before any timing.
    let mut out = sink(args.out)?;
    let raw = args.raw.map(File::create).transpose()?;
    let cells = bench::bench_cells(&args.sizes, &args.engines, args.replicates, args.timeout, args.backend);
    let summaries: Vec<_> = cells.iter().map(bench::summarize).collect();
    if args.format == Format::Csv {
        bench::write_summary_csv(&mut out, &summaries)?;
    } else {
        for s in &summaries {
            match s.mean_s {
                Some(mean) => writeln!(
                    out,
                    "{:<9} {:>4} {:>4}  mean {mean:.6e} s  (min {:.6e}, max {:.6e})",
                    s.engine,
                    s.infected,
                    s.clean,
                    s.min_s.unwrap_or(mean),
                    s.max_s.unwrap_or(mean)
                )?,
                None => writeln!(out, "{:<9} {:>4} {:>4}  timed out", s.engine, s.infected, s.clean)?,
            }
        }
    }
    out.flush()?;
    if let Some(file) = raw {
        let records: Vec<_> = cells.into_iter().flat_map(|c| c.records).collect();
        let mut w = BufWriter::new(file);
        bench::write_records_csv(&mut w, &records)?;
        w.flush()?;
    }
    Ok(())
}
