//! Ball-box simulator: Monte Carlo estimates of belief, plausibility,
//! conflict rate, and normalized combination.
//!
//! Each distribution is a box of labeled balls. Drawing a ball samples a
//! focal granule with exactly its mass as probability: masses are scaled
//! to a common integer denominator D and a uniform integer below D is
//! drawn by rejection from the ChaCha8 stream, so no floating point
//! enters the sampling path. Combination draws one ball from each box,
//! rejects disjoint pairs, and tallies intersections among the kept
//! pairs — normalization realized as conditioning on non-conflict.
//!
//! Runs are deterministic per seed: samples are processed in fixed
//! chunks of [`CHUNK_SIZE`], chunk `i` draws from stream `i` of a
//! ChaCha8 generator seeded with the configured seed, and chunk results
//! merge in index order. The merged report is therefore independent of
//! worker count and scheduling, and the chosen generator plus this
//! consumption pattern are pinned by golden files in the test suite.
//!
//! Everything analytic stays exact elsewhere in the crate; reports hold
//! decimal estimates plus the raw counts they came from.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::combination::Credibility;
use crate::distribution::GranularDistribution;
use crate::error::{Error, Result};
use crate::exec::{map_chunks, ExecMode};
use crate::frame::{Granule, Subset};

/// Samples per RNG substream; part of the determinism contract.
pub const CHUNK_SIZE: u64 = 4096;

/// Simulation parameters. Credibilities, when given, discount the two
/// boxes of a combination run: a drawn ball's label is replaced by the
/// whole frame with probability 1 − α. Query estimation ignores them.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub samples: u64,
    pub seed: u64,
    pub credibilities: Option<(Credibility, Credibility)>,
}

impl SimConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        SimConfig {
            samples,
            seed,
            credibilities: None,
        }
    }

    pub fn with_credibilities(mut self, g: Credibility, h: Credibility) -> Self {
        self.credibilities = Some((g, h));
        self
    }
}

/// Empirical counterpart of belief/plausibility for one query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryEstimate {
    pub belief: f64,
    pub possibility: f64,
    pub certain_count: u64,
    pub possible_count: u64,
}

/// Empirical frequency of one intersection among kept pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedMass {
    pub set: Granule,
    pub frequency: f64,
    pub count: u64,
}

/// Empirical counterpart of conflict mass and normalized combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationEstimate {
    pub conflict_rate: f64,
    pub rejected: u64,
    pub samples_kept: u64,
    /// True when every pair was rejected (empirical total conflict);
    /// reported, not fatal.
    pub all_rejected: bool,
    pub combined: Vec<CombinedMass>,
}

/// Report of one simulation run; bit-identical for identical configs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combination: Option<CombinationEstimate>,
}

impl SimReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Exact uniform integer below a fixed bound, by rejection from 64-bit
/// words. A bound of 1 consumes no randomness; a bound within one word
/// runs on plain integer arithmetic; larger bounds assemble words into a
/// big integer. Every accepted attempt consumes the same number of words
/// regardless of path.
enum UniformBelow {
    Unit,
    Word { bound: u64, limit: u128 },
    Wide { bound: BigUint, words: u32, limit: BigUint },
}

impl UniformBelow {
    fn new(bound: &BigUint) -> Self {
        if bound.is_one() {
            return UniformBelow::Unit;
        }
        match bound.to_u64() {
            Some(b) => {
                let range = 1u128 << 64;
                UniformBelow::Word {
                    bound: b,
                    limit: range - range % (b as u128),
                }
            }
            None => {
                let words = bound.bits().div_ceil(64) as u32;
                let range = BigUint::one() << (64 * words as u64);
                let limit = &range - &range % bound;
                UniformBelow::Wide {
                    bound: bound.clone(),
                    words,
                    limit,
                }
            }
        }
    }
}

/// Draws focal granules of one distribution with exactly their masses as
/// probabilities, via cumulative integer thresholds over the common
/// denominator.
pub struct GranuleSampler {
    granules: Vec<Granule>,
    uniform: UniformBelow,
    cumulative_small: Vec<u64>,
    cumulative_wide: Vec<BigUint>,
}

impl GranuleSampler {
    pub fn new(dist: &GranularDistribution) -> Self {
        let mut denom = BigUint::one();
        for (_, m) in dist.focal() {
            denom = denom.lcm(&m.denom().to_biguint().expect("positive denominator"));
        }
        let mut cumulative = Vec::with_capacity(dist.len());
        let mut acc = BigUint::zero();
        for (_, m) in dist.focal() {
            let num = m.numer().to_biguint().expect("positive numerator");
            let den = m.denom().to_biguint().expect("positive denominator");
            acc += (&denom / den) * num;
            cumulative.push(acc.clone());
        }
        debug_assert_eq!(acc, denom, "thresholds must exhaust the denominator");
        let uniform = UniformBelow::new(&denom);
        let (cumulative_small, cumulative_wide) = match uniform {
            UniformBelow::Wide { .. } => (Vec::new(), cumulative),
            _ => (
                cumulative
                    .iter()
                    .map(|t| t.to_u64().expect("thresholds fit the small bound"))
                    .collect(),
                Vec::new(),
            ),
        };
        GranuleSampler {
            granules: dist.focal().iter().map(|(g, _)| g.clone()).collect(),
            uniform,
            cumulative_small,
            cumulative_wide,
        }
    }

    pub fn sample_index<R: RngCore>(&self, rng: &mut R) -> usize {
        match &self.uniform {
            UniformBelow::Unit => 0,
            UniformBelow::Word { bound, limit } => loop {
                let x = rng.next_u64();
                if (x as u128) < *limit {
                    let v = x % bound;
                    return self.cumulative_small.partition_point(|t| *t <= v);
                }
            },
            UniformBelow::Wide {
                bound,
                words,
                limit,
            } => loop {
                let mut bytes = vec![0u8; *words as usize * 8];
                for chunk in bytes.chunks_mut(8) {
                    chunk.copy_from_slice(&rng.next_u64().to_le_bytes());
                }
                let x = BigUint::from_bytes_le(&bytes);
                if x < *limit {
                    let v = x % bound;
                    return self.cumulative_wide.partition_point(|t| *t <= v);
                }
            },
        }
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> &Granule {
        &self.granules[self.sample_index(rng)]
    }
}

/// One-shot draw from a distribution. Loops should build a
/// [`GranuleSampler`] instead and reuse it.
pub fn sample_granule<R: RngCore>(dist: &GranularDistribution, rng: &mut R) -> Granule {
    GranuleSampler::new(dist).sample(rng).clone()
}

/// Bernoulli draw for a credibility: keep the ball's label with
/// probability α, otherwise replace it by the whole frame. Degenerate
/// credibilities (0 and 1) consume no randomness.
struct KeepDraw {
    threshold_small: u64,
    threshold_wide: BigUint,
    uniform: UniformBelow,
}

impl KeepDraw {
    fn new(credibility: &Credibility) -> Self {
        let alpha = credibility.alpha();
        let num = alpha.numer().to_biguint().expect("alpha is nonnegative");
        let den = alpha.denom().to_biguint().expect("positive denominator");
        let uniform = UniformBelow::new(&den);
        KeepDraw {
            threshold_small: num.to_u64().unwrap_or(u64::MAX),
            threshold_wide: num,
            uniform,
        }
    }

    fn keeps<R: RngCore>(&self, rng: &mut R) -> bool {
        match &self.uniform {
            // Denominator 1: alpha is exactly 0 or exactly 1.
            UniformBelow::Unit => !self.threshold_wide.is_zero(),
            UniformBelow::Word { bound, limit } => loop {
                let x = rng.next_u64();
                if (x as u128) < *limit {
                    return x % bound < self.threshold_small;
                }
            },
            UniformBelow::Wide {
                bound,
                words,
                limit,
            } => loop {
                let mut bytes = vec![0u8; *words as usize * 8];
                for chunk in bytes.chunks_mut(8) {
                    chunk.copy_from_slice(&rng.next_u64().to_le_bytes());
                }
                let x = BigUint::from_bytes_le(&bytes);
                if x < *limit {
                    return x % bound < self.threshold_wide;
                }
            },
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_len(samples: u64, chunk: u64) -> u64 {
    let start = chunk * CHUNK_SIZE;
    CHUNK_SIZE.min(samples - start)
}

fn chunk_count(samples: u64) -> u64 {
    samples.div_ceil(CHUNK_SIZE)
}

/// Empirical belief and plausibility of `q` under `dist`.
pub fn estimate_query(
    dist: &GranularDistribution,
    q: &Subset,
    cfg: &SimConfig,
) -> Result<SimReport> {
    estimate_query_with(dist, q, cfg, ExecMode::default())
}

pub fn estimate_query_with(
    dist: &GranularDistribution,
    q: &Subset,
    cfg: &SimConfig,
    mode: ExecMode,
) -> Result<SimReport> {
    if dist.frame() != q.frame() {
        return Err(Error::FrameMismatch);
    }
    if cfg.samples == 0 {
        return Err(Error::NoSamples);
    }
    let sampler = GranuleSampler::new(dist);
    let q_bits = q.bits();
    let per_chunk = map_chunks(mode, chunk_count(cfg.samples), |chunk| {
        let mut rng = chunk_rng(cfg.seed, chunk);
        let mut certain = 0u64;
        let mut possible = 0u64;
        for _ in 0..chunk_len(cfg.samples, chunk) {
            let bits = sampler.sample(&mut rng).bits();
            if bits & !q_bits == 0 {
                certain += 1;
            }
            if bits & q_bits != 0 {
                possible += 1;
            }
        }
        (certain, possible)
    });
    let (certain, possible) = per_chunk
        .into_iter()
        .fold((0u64, 0u64), |(c, p), (dc, dp)| (c + dc, p + dp));
    Ok(SimReport {
        samples: cfg.samples,
        seed: cfg.seed,
        query: Some(QueryEstimate {
            belief: certain as f64 / cfg.samples as f64,
            possibility: possible as f64 / cfg.samples as f64,
            certain_count: certain,
            possible_count: possible,
        }),
        combination: None,
    })
}

/// Draws independently from both boxes, discards disjoint pairs, and
/// tallies intersection frequencies among the kept pairs. With
/// credibilities, each drawn label is first replaced by the whole frame
/// with probability 1 − α for its box.
pub fn simulate_combination(
    g: &GranularDistribution,
    h: &GranularDistribution,
    cfg: &SimConfig,
) -> Result<SimReport> {
    simulate_combination_with(g, h, cfg, ExecMode::default())
}

pub fn simulate_combination_with(
    g: &GranularDistribution,
    h: &GranularDistribution,
    cfg: &SimConfig,
    mode: ExecMode,
) -> Result<SimReport> {
    if g.frame() != h.frame() {
        return Err(Error::FrameMismatch);
    }
    if cfg.samples == 0 {
        return Err(Error::NoSamples);
    }
    let frame = g.frame().clone();
    let full = frame.full_mask();
    let g_sampler = GranuleSampler::new(g);
    let h_sampler = GranuleSampler::new(h);
    let keep = cfg
        .credibilities
        .as_ref()
        .map(|(cg, ch)| (KeepDraw::new(cg), KeepDraw::new(ch)));

    let per_chunk = map_chunks(mode, chunk_count(cfg.samples), |chunk| {
        let mut rng = chunk_rng(cfg.seed, chunk);
        let mut rejected = 0u64;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..chunk_len(cfg.samples, chunk) {
            // Fixed draw order: G ball, G keep, H ball, H keep.
            let mut g_bits = g_sampler.sample(&mut rng).bits();
            if let Some((kg, _)) = &keep {
                if !kg.keeps(&mut rng) {
                    g_bits = full;
                }
            }
            let mut h_bits = h_sampler.sample(&mut rng).bits();
            if let Some((_, kh)) = &keep {
                if !kh.keeps(&mut rng) {
                    h_bits = full;
                }
            }
            let inter = g_bits & h_bits;
            if inter == 0 {
                rejected += 1;
            } else {
                *counts.entry(inter).or_insert(0) += 1;
            }
        }
        (rejected, counts)
    });

    let mut rejected = 0u64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (r, c) in per_chunk {
        rejected += r;
        for (bits, n) in c {
            *counts.entry(bits).or_insert(0) += n;
        }
    }
    let kept = cfg.samples - rejected;
    let combined = counts
        .into_iter()
        .map(|(bits, count)| CombinedMass {
            set: frame.granule_from_bits(bits),
            frequency: count as f64 / kept as f64,
            count,
        })
        .collect();
    Ok(SimReport {
        samples: cfg.samples,
        seed: cfg.seed,
        query: None,
        combination: Some(CombinationEstimate {
            conflict_rate: rejected as f64 / cfg.samples as f64,
            rejected,
            samples_kept: kept,
            all_rejected: kept == 0,
            combined,
        }),
    })
}
