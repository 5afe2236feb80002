//! Seeded Monte Carlo experiments and exact formulas for the asymptotic
//! density results: coprimality of random integer tuples, expected reciprocal
//! gcd, remnant genericity, image-density estimates against the remnant
//! bound, and the exact rank-1 expected-density sequence.
//!
//! Every experiment is deterministic given its parameters and seed: samples
//! are split into fixed-size shards, each shard draws from a ChaCha substream
//! selected by `(seed, shard index)`, and partial sums are reduced in shard
//! order. Worker count therefore never affects the result.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conjugacy::{membership, Decision};
use crate::error::Error;
use crate::hom::{sample_hom_with, FreeHomomorphism};
use crate::remnant::remnant_report;
use crate::words::{Rank, WordSampler};

/// Samples per deterministic shard; chosen once so results do not depend on
/// the worker count.
const SHARD_SIZE: u64 = 4096;

/// A Riemann zeta evaluation with an explicit tail bound:
/// `|value − ζ(s)| ≤ error_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: u32,
    pub value: f64,
    pub error_bound: f64,
}

/// Evaluates `ζ(s)` for integer `s ≥ 2` by partial summation, stopping once
/// the integral tail bound `N^(1−s)/(s−1)` drops below `10⁻⁹`.
pub fn zeta(s: u32) -> Result<ZetaValue, Error> {
    if s < 2 {
        return Err(Error::param("s", "zeta is evaluated only for s >= 2"));
    }
    static MEMO: OnceLock<Mutex<HashMap<u32, ZetaValue>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(cached) = memo.lock().unwrap().get(&s) {
        return Ok(*cached);
    }

    let target = 1e-9_f64;
    let tail = |n: u64| (n as f64).powf(1.0 - s as f64) / (s as f64 - 1.0);
    let mut terms = (1.0 / (target * (s as f64 - 1.0)))
        .powf(1.0 / (s as f64 - 1.0))
        .ceil() as u64;
    terms = terms.max(2);
    while tail(terms) > target {
        terms += 1;
    }

    // Kahan summation, smallest terms first.
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    for d in (1..=terms).rev() {
        let term = (d as f64).powi(-(s as i32));
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    let value = ZetaValue {
        s,
        value: sum,
        error_bound: tail(terms),
    };
    memo.lock().unwrap().insert(s, value);
    Ok(value)
}

/// Parameters a result was produced with; fields are present only when the
/// experiment uses them.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
}

/// A seeded Monte Carlo estimate together with its standard error and the
/// reference value the estimate is compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub parameters: ExperimentParams,
    pub seed: u64,
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub reference: Option<f64>,
    pub elapsed_ms: u64,
}

/// Runs `per_sample` over `samples` draws in deterministic shards and
/// returns `(Σx, Σx²)`.
fn sharded_sums<F>(samples: u64, seed: u64, per_sample: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let shards = samples.div_ceil(SHARD_SIZE);
    let partials: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let x = per_sample(&mut rng);
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();
    partials
        .into_iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

fn binomial_std_error(estimate: f64, samples: u64) -> f64 {
    (estimate * (1.0 - estimate) / samples as f64).sqrt()
}

fn mean_std_error(sum: f64, sum_sq: f64, samples: u64) -> f64 {
    if samples < 2 {
        return 0.0;
    }
    let n = samples as f64;
    let variance = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    (variance / n).sqrt()
}

fn gcd_of_uniform_tuple(n: u32, p: u64, rng: &mut ChaCha8Rng) -> u64 {
    let bound = p as i64;
    let mut g = 0u64;
    for _ in 0..n {
        let x: i64 = rng.gen_range(-bound..=bound);
        g = g.gcd(&x.unsigned_abs());
    }
    g
}

fn validate_tuple_experiment(n: u32, p: u64, samples: u64) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::param("n", "tuple experiments need n >= 2"));
    }
    if p < 1 {
        return Err(Error::param("p", "p must be at least 1"));
    }
    if samples < 1 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    Ok(())
}

/// Fraction of uniform tuples in `[−p, p]^n` with gcd exactly 1; the
/// all-zero tuple (gcd 0) counts as non-coprime. Reference: `1/ζ(n)`.
pub fn coprime_density_experiment(
    n: u32,
    p: u64,
    samples: u64,
    seed: u64,
) -> Result<ExperimentResult, Error> {
    validate_tuple_experiment(n, p, samples)?;
    let started = Instant::now();
    let (hits, _) = sharded_sums(samples, seed, |rng| {
        if gcd_of_uniform_tuple(n, p, rng) == 1 {
            1.0
        } else {
            0.0
        }
    });
    let estimate = hits / samples as f64;
    Ok(ExperimentResult {
        experiment: "coprime".to_string(),
        parameters: ExperimentParams {
            n: Some(n.into()),
            p: Some(p),
            ..Default::default()
        },
        seed,
        samples,
        estimate,
        std_error: binomial_std_error(estimate, samples),
        reference: Some(1.0 / zeta(n)?.value),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Sample mean of `1/gcd` over uniform tuples in `[−p, p]^n`; the all-zero
/// tuple contributes 0, matching the degenerate image of the trivial map.
/// Reference: `ζ(n+1)/ζ(n)`.
pub fn expected_gcd_reciprocal_experiment(
    n: u32,
    p: u64,
    samples: u64,
    seed: u64,
) -> Result<ExperimentResult, Error> {
    validate_tuple_experiment(n, p, samples)?;
    let started = Instant::now();
    let (sum, sum_sq) = sharded_sums(samples, seed, |rng| {
        match gcd_of_uniform_tuple(n, p, rng) {
            0 => 0.0,
            g => 1.0 / g as f64,
        }
    });
    let estimate = sum / samples as f64;
    Ok(ExperimentResult {
        experiment: "gcd-mean".to_string(),
        parameters: ExperimentParams {
            n: Some(n.into()),
            p: Some(p),
            ..Default::default()
        },
        seed,
        samples,
        estimate,
        std_error: mean_std_error(sum, sum_sq, samples),
        reference: Some(zeta(n + 1)?.value / zeta(n)?.value),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Fraction of random homomorphisms `F_n → F_m` (images uniform in `H_p`)
/// whose remnant length is at least `l`. Genericity predicts the fraction
/// tends to 1 as `p` grows; the reference records that limit.
pub fn remnant_density_experiment(
    n: Rank,
    m: Rank,
    l: usize,
    p: usize,
    samples: u64,
    seed: u64,
) -> Result<ExperimentResult, Error> {
    if m.get() < 2 {
        return Err(Error::param("m", "remnant genericity requires rank m >= 2"));
    }
    if l < 1 {
        return Err(Error::param("l", "remnant length threshold must be >= 1"));
    }
    if samples < 1 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    let started = Instant::now();
    let sampler = WordSampler::new(m, p);
    let (hits, _) = sharded_sums(samples, seed, |rng| {
        let hom = sample_hom_with(n, &sampler, rng);
        let report = remnant_report(hom.images()).expect("nonempty same-rank tuple");
        match report.remnant_length {
            Some(length) if length >= l => 1.0,
            _ => 0.0,
        }
    });
    let estimate = hits / samples as f64;
    Ok(ExperimentResult {
        experiment: "remnant-density".to_string(),
        parameters: ExperimentParams {
            n: Some(n.get() as u64),
            m: Some(m.get() as u64),
            l: Some(l as u64),
            p: Some(p as u64),
            ..Default::default()
        },
        seed,
        samples,
        estimate,
        std_error: binomial_std_error(estimate, samples),
        reference: Some(1.0),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Upper bound `16n(2n−1)^(−⌈l/2⌉)` on the image density of a homomorphism
/// into a rank-`n` group with remnant length `l`; `l = 0` yields the vacuous
/// bound `16n`.
pub fn image_density_bound(n: u32, l: usize) -> f64 {
    let exponent = l.div_ceil(2);
    16.0 * n as f64 / ((2 * n - 1) as f64).powi(exponent as i32)
}

/// Estimates the density of `φ(G)` inside the codomain by membership tests
/// on uniform words from `H_p`. Requires φ to have remnant so membership is
/// decidable; the reference records the remnant upper bound.
pub fn image_density_experiment(
    phi: &FreeHomomorphism,
    p: usize,
    samples: u64,
    seed: u64,
) -> Result<ExperimentResult, Error> {
    let report = remnant_report(phi.images())?;
    let remnant_length = report
        .remnant_length
        .ok_or_else(|| Error::param("phi", "image density needs a homomorphism with remnant"))?;
    if samples < 1 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    let started = Instant::now();
    let sampler = WordSampler::new(phi.codomain_rank(), p);
    let (hits, _) = sharded_sums(samples, seed, |rng| {
        let w = sampler.sample(rng);
        match membership(phi, &w) {
            Ok(Decision::Conjugate(_)) => 1.0,
            Ok(_) => 0.0,
            Err(e) => panic!("membership on sampled word failed: {e}"),
        }
    });
    let estimate = hits / samples as f64;
    let phi_text: Vec<String> = phi.images().iter().map(|w| w.to_string()).collect();
    Ok(ExperimentResult {
        experiment: "image-density".to_string(),
        parameters: ExperimentParams {
            n: Some(phi.domain_rank().get() as u64),
            m: Some(phi.codomain_rank().get() as u64),
            l: Some(remnant_length as u64),
            p: Some(p as u64),
            phi: Some(phi_text.join(",")),
        },
        seed,
        samples,
        estimate,
        std_error: binomial_std_error(estimate, samples),
        reference: Some(image_density_bound(
            phi.codomain_rank().get() as u32,
            remnant_length,
        )),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Exact sequence `p ↦ 2·H_p/(2p+1)`, the average reciprocal image index of
/// degree-`k` maps `ℤ → ℤ` over `|k| ≤ p` (`H_p` is the `p`-th harmonic
/// number). Stores `H_p` over the denominator `lcm(1..=p)` so stepping stays
/// cheap while every comparison remains exact.
pub struct Rank1ExpectedDensitySeq {
    p: u64,
    /// Numerator of `H_p` over `harmonic_den`.
    harmonic_num: BigUint,
    /// `lcm(1..=p)`.
    harmonic_den: BigUint,
}

impl Rank1ExpectedDensitySeq {
    /// Starts at `p = 1`, where the value is `2/3`.
    pub fn new() -> Rank1ExpectedDensitySeq {
        Rank1ExpectedDensitySeq {
            p: 1,
            harmonic_num: BigUint::one(),
            harmonic_den: BigUint::one(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Advances to `p + 1`; the return value reports, exactly, whether the
    /// value strictly decreased in this step.
    pub fn step(&mut self) -> bool {
        let p = self.p;
        // value(p+1) < value(p)  ⟺  den·(2p+1) < 2·num·(p+1), independent of
        // the (unreduced) representation.
        let decreased =
            &self.harmonic_den * (2 * p + 1) < &self.harmonic_num * (2 * (p + 1));
        let next = p + 1;
        let factor = prime_power_base(next);
        if factor > 1 {
            self.harmonic_num *= factor;
            self.harmonic_den *= factor;
        }
        self.harmonic_num += &self.harmonic_den / next;
        self.p = next;
        decreased
    }

    /// The exact value `2·H_p/(2p+1)` in lowest terms.
    pub fn value(&self) -> BigRational {
        BigRational::new(
            BigInt::from(2u32) * BigInt::from(self.harmonic_num.clone()),
            BigInt::from(self.harmonic_den.clone()) * BigInt::from(2 * self.p + 1),
        )
    }

    /// Floating-point approximation of the value, computed from the exact
    /// representation with one scaled division.
    pub fn value_f64(&self) -> f64 {
        let num = &self.harmonic_num * 2u32;
        let den = &self.harmonic_den * (2 * self.p + 1);
        big_ratio_to_f64(&num, &den)
    }

    /// Exact comparison `value(p) < num/den` without reducing the value.
    pub fn value_below(&self, num: u64, den: u64) -> bool {
        &self.harmonic_num * (2 * den) < &self.harmonic_den * ((2 * self.p + 1) * num)
    }
}

impl Default for Rank1ExpectedDensitySeq {
    fn default() -> Self {
        Self::new()
    }
}

/// If `x` is a prime power `q^k`, returns `q`; otherwise 1. (`lcm(1..=x)`
/// gains a factor of `q` exactly at prime powers.)
fn prime_power_base(x: u64) -> u64 {
    debug_assert!(x >= 2);
    let mut smallest = x;
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            smallest = d;
            break;
        }
        d += 1;
    }
    let mut rest = x;
    while rest % smallest == 0 {
        rest /= smallest;
    }
    if rest == 1 {
        smallest
    } else {
        1
    }
}

/// Quotient of two positive big integers as `f64`: the numerator is shifted
/// so the integer quotient carries well over 53 significant bits, then the
/// scale is restored. Avoids the overflow-to-NaN pitfalls of converting
/// numerator and denominator separately.
fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    if num.bits() == 0 {
        return 0.0;
    }
    let spare = 80i64 - (num.bits() as i64 - den.bits() as i64);
    let (quotient, exponent) = if spare >= 0 {
        ((num << spare as u64) / den, -spare)
    } else {
        (num / (den << (-spare) as u64), -spare)
    };
    quotient.to_f64().unwrap_or(f64::NAN) * 2f64.powi(exponent as i32)
}

/// Exact expected image density for rank-1 → rank-1 homomorphisms drawn from
/// `[−p, p]`: `2·H_p/(2p+1)`.
pub fn rank1_rank1_expected_density(p: u64) -> Result<BigRational, Error> {
    if p < 1 {
        return Err(Error::param("p", "p must be at least 1"));
    }
    let mut seq = Rank1ExpectedDensitySeq::new();
    while seq.p() < p {
        seq.step();
    }
    Ok(seq.value())
}
