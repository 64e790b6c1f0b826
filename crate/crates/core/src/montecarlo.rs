//! Seeded simulation of the pairing process.
//!
//! Sample `k` of a run with seed `s` draws from its own ChaCha8 stream: the
//! generator is seeded with `ChaCha8Rng::seed_from_u64(s)` and then switched
//! to stream number `k` (`set_stream(k)`), starting at word 0. Partners are
//! drawn with [`uniform_index`]. Both rules are fixed, so hit counts depend
//! only on `(cfg, samples, seed)` and never on how samples are split across
//! threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Configuration;
use crate::parallel;

/// Fraction of episodes in which `w_1` was paired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    #[serde(rename = "n")]
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// `sqrt(p̂ (1 - p̂) / n)`.
    pub std_error: f64,
    pub seed: u64,
}

impl EstimateWithError {
    pub fn from_hits(samples: u64, hits: u64, seed: u64) -> Self {
        assert!(samples > 0 && hits <= samples);
        let p = hits as f64 / samples as f64;
        EstimateWithError {
            samples,
            hits,
            estimate: p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            seed,
        }
    }
}

/// The random stream of sample `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from `0..m` by rejection on 64-bit words: words at or above
/// the largest multiple of `m` that fits are discarded, the rest reduced
/// modulo `m`.
pub fn uniform_index<R: RngCore + ?Sized>(rng: &mut R, m: u32) -> u32 {
    assert!(m > 0, "empty choice set");
    let m = u64::from(m);
    // 2^64 mod m
    let excess = (u64::MAX % m + 1) % m;
    loop {
        let x = rng.next_u64();
        if x <= u64::MAX - excess {
            return (x % m) as u32;
        }
    }
}

/// Scratch space reused across episodes.
struct Episode {
    infected: u32,
    /// Unpaired devices, in arbitrary order.
    pool: Vec<u32>,
    /// Position of each device in `pool`, or `u32::MAX` once paired.
    slot: Vec<u32>,
}

impl Episode {
    fn new(cfg: Configuration) -> Self {
        let n = cfg.devices() as usize;
        Episode {
            infected: cfg.infected,
            pool: Vec::with_capacity(n),
            slot: vec![0; n],
        }
    }

    fn remove(&mut self, device: u32) {
        let at = self.slot[device as usize] as usize;
        self.pool.swap_remove(at);
        if let Some(&moved) = self.pool.get(at) {
            self.slot[moved as usize] = at as u32;
        }
        self.slot[device as usize] = u32::MAX;
    }

    /// One full episode; true iff `w_1` ends up paired.
    fn run<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> bool {
        let n = self.slot.len() as u32;
        self.pool.clear();
        self.pool.extend(0..n);
        for (d, s) in self.slot.iter_mut().enumerate() {
            *s = d as u32;
        }
        let target = self.infected;
        for chooser in 0..self.infected {
            if self.slot[chooser as usize] == u32::MAX {
                continue;
            }
            self.remove(chooser);
            if self.pool.is_empty() {
                break;
            }
            let partner = self.pool[uniform_index(rng, self.pool.len() as u32) as usize];
            if partner == target {
                return true;
            }
            self.remove(partner);
        }
        false
    }
}

/// Runs one episode of `cfg` and reports whether `w_1` was paired.
pub fn simulate_once<R: RngCore + ?Sized>(cfg: Configuration, rng: &mut R) -> Result<bool> {
    if cfg.clean == 0 {
        return Err(Error::NoCleanDevices(cfg));
    }
    Ok(Episode::new(cfg).run(rng))
}

fn count_hits(cfg: Configuration, seed: u64, indices: std::ops::Range<u64>) -> u64 {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut episode = Episode::new(cfg);
    indices
        .filter(|&k| {
            let mut rng = base.clone();
            rng.set_stream(k);
            episode.run(&mut rng)
        })
        .count() as u64
}

/// Estimates `P(I,S)` from `samples` episodes on `workers` threads.
pub fn estimate_p_with_workers(
    cfg: Configuration,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<EstimateWithError> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    if cfg.clean == 0 {
        return Err(Error::NoCleanDevices(cfg));
    }
    let chunks = (workers.max(1) * 8) as u64;
    let hits = parallel::with_workers(workers, || {
        parallel::sum_over_chunks(samples, chunks, |range| count_hits(cfg, seed, range))
    });
    Ok(EstimateWithError::from_hits(samples, hits, seed))
}

/// Estimates `P(I,S)` on the default number of workers.
pub fn estimate_p(cfg: Configuration, samples: u64, seed: u64) -> Result<EstimateWithError> {
    estimate_p_with_workers(cfg, samples, seed, parallel::default_workers())
}
