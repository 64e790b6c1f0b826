use thiserror::Error;

use crate::model::Configuration;

/// Errors raised by the engines when an operation is called outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("factorial of negative number {0}")]
    NegativeFactorial(i64),

    #[error("double factorial is undefined for {0} (needs n >= -1)")]
    DoubleFactorialDomain(i64),

    #[error("binomial coefficient with negative upper index: C({upper}, {lower})")]
    NegativeBinomialUpper { upper: i64, lower: i64 },

    #[error("j = {j} is outside the admissible range [{min}, {max}] for {cfg}")]
    InadmissiblePairings { cfg: Configuration, j: i64, min: i64, max: i64 },

    #[error("{cfg} with j = {j} is not a dagger configuration with j >= 2")]
    NotDagger { cfg: Configuration, j: i64 },

    #[error("unpaired index h = {h} out of range 1..={infected}")]
    UnpairedIndexOutOfRange { h: i64, infected: u32 },

    #[error("{0} has no clean devices")]
    NoCleanDevices(Configuration),

    #[error("no wiring of {cfg} has {j} bb-pairings: {unmatched} infected devices but only {clean} clean")]
    NoSuchWiring { cfg: Configuration, j: i64, unmatched: i64, clean: u32 },

    #[error("{cfg} has {devices} devices, above the enumeration cap of {cap}")]
    EnumerationCap { cfg: Configuration, devices: u32, cap: u32 },

    #[error("clean target w_{target} out of range 1..={clean}")]
    TargetOutOfRange { target: u32, clean: u32 },

    #[error("sample count must be positive")]
    NoSamples,

    #[error("unknown engine {0:?}")]
    UnknownEngine(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
