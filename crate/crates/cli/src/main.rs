use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use pairprob::bench::EngineKind;
use pairprob::oracle::DEFAULT_ENUMERATION_CAP;
use pairprob::parallel::default_workers;
use pairprob::verification::VerifyConfig;
use pairprob::{BackendKind, Configuration};

mod commands;
mod exit;

use commands::{BenchArgs, ComputeArgs, Evaluator};
use exit::CliError;

const CAP_ENV: &str = "PAIRPROB_ORACLE_CAP";

#[derive(Parser)]
#[command(name = "pairprob", version, about = "Infection probability of the Bluetooth pairing model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Recursive,
    Memo,
    Closed,
    Oracle,
    Mc,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Recursive => "recursive",
            Engine::Memo => "memo",
            Engine::Closed => "closed",
            Engine::Oracle => "oracle",
            Engine::Mc => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

impl From<Backend> for BackendKind {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Exact => BackendKind::Exact,
            Backend::Float => BackendKind::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Plain => "plain",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Which parameter a slice holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    Infected(u32),
    Clean(u32),
    Diagonal,
}

impl FromStr for SliceAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "diagonal" {
            return Ok(SliceAxis::Diagonal);
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected infected=N, clean=N or diagonal, got {s:?}"))?;
        let n: u32 = value.parse().map_err(|e| format!("{value:?}: {e}"))?;
        match key {
            "infected" | "I" => Ok(SliceAxis::Infected(n)),
            "clean" | "S" => Ok(SliceAxis::Clean(n)),
            _ => Err(format!("unknown parameter {key:?}")),
        }
    }
}

/// Inclusive `lo..hi`.
fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    Ok((lo, hi))
}

#[derive(Debug, Clone)]
struct Sizes(Vec<u32>);

#[derive(Debug, Clone)]
struct Engines(Vec<EngineKind>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    size_list(s).map(Sizes)
}

fn parse_engines(s: &str) -> Result<Engines, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|e: pairprob::Error| e.to_string()))
        .collect::<Result<_, _>>()
        .map(Engines)
}

/// `lo..hi:step`, `lo..hi`, a comma list, or the empty string.
fn size_list(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains("..") {
        let (range, step) = match s.split_once(':') {
            Some((r, st)) => (r, st.trim().parse::<u32>().map_err(|e| format!("{st:?}: {e}"))?),
            None => (s, 1),
        };
        if step == 0 {
            return Err("step must be positive".into());
        }
        let (lo, hi) = parse_range(range)?;
        return Ok((lo..=hi).step_by(step as usize).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[derive(Subcommand)]
enum Command {
    /// Print P(I,S) from one engine.
    Compute {
        #[arg(short = 'I', long = "infected")]
        infected: u32,
        #[arg(short = 'S', long = "clean")]
        clean: u32,
        #[arg(long, value_enum, default_value_t = Engine::Closed)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = Backend::Exact)]
        backend: Backend,
        /// Sample count for the mc engine.
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also print the per-j terms of the closed form.
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Write P over 1 <= I,S <= max.
    Grid {
        #[arg(long)]
        max: u32,
        #[arg(long, value_enum, default_value_t = Engine::Closed)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = Backend::Float)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write P along one line of the (I,S) plane.
    Slice {
        /// infected=N, clean=N or diagonal.
        #[arg(long)]
        fix: SliceAxis,
        /// Inclusive lo..hi for the varying parameter.
        #[arg(long, value_parser = parse_range)]
        range: (u32, u32),
        #[arg(long, value_enum, default_value_t = Engine::Closed)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = Backend::Float)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-engine checks; exit 1 if any fails.
    Verify {
        #[arg(long, default_value_t = 30)]
        max_exact: u32,
        #[arg(long, default_value_t = 50)]
        max_float: u32,
        /// Largest I + S compared against enumeration.
        #[arg(long, default_value_t = 9)]
        oracle_cap: u32,
        #[arg(long, default_value_t = 20)]
        ux_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo estimate of P(I,S).
    Simulate {
        #[arg(short = 'I', long = "infected")]
        infected: u32,
        #[arg(short = 'S', long = "clean")]
        clean: u32,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Time the deterministic engines on I = S sizes.
    Bench {
        /// lo..hi:step, lo..hi, or a comma list; empty for none.
        #[arg(long, value_parser = parse_sizes, default_value = "5..50:5")]
        sizes: Sizes,
        #[arg(long, value_parser = parse_engines, default_value = "recursive,memo,closed")]
        engines: Engines,
        #[arg(long, default_value_t = 10)]
        replicates: u32,
        /// Per-replicate limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, value_enum, default_value_t = Backend::Float)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every replicate to this CSV.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
}

fn enumeration_cap() -> Result<u32, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("{CAP_ENV}={v:?}: {e}"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_CAP),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cap = enumeration_cap()?;
    let stdout = &mut io::stdout().lock() as &mut dyn Write;
    match cli.command {
        Command::Compute { infected, clean, engine, backend, mc_samples, seed, explain, format } => {
            commands::compute(
                ComputeArgs {
                    cfg: Configuration::new(infected, clean),
                    engine,
                    backend: backend.into(),
                    mc_samples,
                    seed,
                    explain,
                    format,
                    cap,
                },
                stdout,
            )?;
        }
        Command::Grid { max, engine, backend, format, out } => {
            deterministic_only(engine)?;
            commands::grid(max, &Evaluator::new(engine, backend.into(), cap), format, out.as_deref())?;
        }
        Command::Slice { fix, range: (lo, hi), engine, backend, format, out } => {
            deterministic_only(engine)?;
            let ev = Evaluator::new(engine, backend.into(), cap);
            commands::slice(fix, lo, hi, &ev, format, out.as_deref())?;
        }
        Command::Verify { max_exact, max_float, oracle_cap, ux_max, format } => {
            let config = VerifyConfig {
                max_exact,
                max_float,
                oracle_max_devices: oracle_cap,
                enumeration_cap: cap,
                ux_max,
            };
            if !commands::verify(config, format, stdout)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Simulate { infected, clean, samples, seed, threads, format } => {
            let threads = threads.unwrap_or_else(default_workers);
            commands::simulate(Configuration::new(infected, clean), samples, seed, threads, format, stdout)?;
        }
        Command::Bench { sizes, engines, replicates, timeout, backend, format, out, raw } => {
            commands::bench(BenchArgs {
                sizes: sizes.0,
                engines: engines.0,
                replicates,
                timeout,
                backend: backend.into(),
                format,
                out: out.as_deref(),
                raw: raw.as_deref(),
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn deterministic_only(engine: Engine) -> Result<(), CliError> {
    match engine {
        Engine::Mc => Err(CliError::Usage("grid and slice need a deterministic engine".into())),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pairprob: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(size_list("5..50:5").unwrap(), (1..=10).map(|k| 5 * k).collect::<Vec<_>>());
        assert_eq!(size_list("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(size_list("7, 9,11").unwrap(), vec![7, 9, 11]);
        assert!(size_list("").unwrap().is_empty());
        assert!(size_list("5..10:0").is_err());
        assert!(size_list("a..b").is_err());
    }

    #[test]
    fn slice_axes() {
        assert_eq!("diagonal".parse(), Ok(SliceAxis::Diagonal));
        assert_eq!("infected=3".parse(), Ok(SliceAxis::Infected(3)));
        assert_eq!("clean=10".parse(), Ok(SliceAxis::Clean(10)));
        assert!("clean".parse::<SliceAxis>().is_err());
        assert!("other=1".parse::<SliceAxis>().is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..100"), Ok((0, 100)));
        assert!(parse_range("4").is_err());
    }

    #[test]
    fn flags_are_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
