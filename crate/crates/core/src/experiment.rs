//! Seeded sample generation and the bound/compensation comparison tables.
//!
//! Samples fix `D` and draw a skew uniformly from `[-range, +range]` ppm
//! on a 10^-9 ppm grid, using ChaCha8 seeded from a `u64`. `A` is
//! `D·(1 + skew·10^-6)` rounded half up. All draws happen up front on one
//! thread; evaluation is then spread over rayon workers with integer
//! accumulators, so tables are identical for any worker count.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{candidate_interval, compute_t_hat, interval_deltas, BoundMethod, Precision, ReferenceBounds};
use crate::compensator::{compensate, naive_compensate};
use crate::exact_rational::Rational;
use crate::{Error, Result};

pub const DEFAULT_D: u64 = 1_000_000;
pub const DEFAULT_RANGE_PPM: i64 = 100;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_CLOCKS: [u64; 4] = [1_000_000, 10_000_000, 100_000_000, 1_000_000_000];

/// Skew draws are integers in units of 10^-9 ppm.
const SKEW_GRID_PER_PPM: i64 = 1_000_000_000;

/// Name of the sampling scheme, for output metadata.
pub const SAMPLING_DESCRIPTION: &str =
    "skew ~ uniform integer multiple of 1e-9 ppm in [-range, range] (ChaCha8, seed_from_u64); A = round_half_up(D*(1+skew*1e-6))";

/// `ε = 10^-7·i` margin coefficient of the approximate bounds.
pub fn default_eps_coeff() -> Rational {
    Rational::new(1, 10_000_000).expect("nonzero denominator")
}

/// One draw: `D` fixed, `A` derived from the sampled skew.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockSample {
    pub d: u64,
    pub a: u64,
    pub skew_ppm: Rational,
}

impl ClockSample {
    pub fn from_skew(d: u64, skew_ppm: Rational) -> Result<Self> {
        let scale = Rational::from(1_000_000i64);
        let a = (Rational::from(d) * (Rational::one() + &skew_ppm / scale)).round_half_up();
        let a = a
            .to_u64()
            .filter(|a| *a > 0)
            .ok_or_else(|| Error::InvalidRange(skew_ppm.to_string()))?;
        Ok(ClockSample { d, a, skew_ppm })
    }

    pub fn is_identity(&self) -> bool {
        self.d == self.a
    }

    /// `(Δb, Δa)` of the slope the walk runs on.
    pub fn walk_slope(&self) -> (u64, u64) {
        if self.d < self.a {
            (self.d, self.a)
        } else {
            (self.d - self.a, self.a)
        }
    }
}

pub fn generate_samples(seed: u64, n: usize, d: u64, range_ppm: &Rational) -> Result<Vec<ClockSample>> {
    if range_ppm.is_negative() || *range_ppm >= Rational::from(1_000_000i64) {
        return Err(Error::InvalidRange(range_ppm.to_string()));
    }
    if d == 0 {
        return Err(Error::ZeroDivisor);
    }
    let bound = (range_ppm * Rational::from(SKEW_GRID_PER_PPM))
        .floor()
        .to_i64()
        .ok_or_else(|| Error::InvalidRange(range_ppm.to_string()))?;
    let grid = BigInt::from(SKEW_GRID_PER_PPM);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m: i64 = rng.random_range(-bound..=bound);
            ClockSample::from_skew(d, Rational::new(m, grid.clone())?)
        })
        .collect()
}

/// Min, max, average and count of an integer-valued statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatSummary {
    pub min: Rational,
    pub max: Rational,
    pub avg: Rational,
    pub count: u64,
}

impl StatSummary {
    pub fn min_i64(&self) -> i64 {
        self.min.floor().to_i64().unwrap_or(i64::MIN)
    }

    pub fn max_i64(&self) -> i64 {
        self.max.floor().to_i64().unwrap_or(i64::MAX)
    }

    pub fn avg_f64(&self) -> f64 {
        self.avg.to_f64()
    }
}

/// Order-independent accumulator behind [`StatSummary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatAccumulator {
    min: i64,
    max: i64,
    sum: i128,
    count: u64,
}

impl Default for StatAccumulator {
    fn default() -> Self {
        StatAccumulator {
            min: i64::MAX,
            max: i64::MIN,
            sum: 0,
            count: 0,
        }
    }
}

impl StatAccumulator {
    pub fn push(&mut self, value: i64) {
        self.min = self.min.min(value);
        self.max = self.max.max(value);
        self.sum += value as i128;
        self.count += 1;
    }

    pub fn merge(self, other: StatAccumulator) -> StatAccumulator {
        StatAccumulator {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
            sum: self.sum + other.sum,
            count: self.count + other.count,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `None` when nothing was pushed.
    pub fn summary(&self) -> Option<StatSummary> {
        if self.count == 0 {
            return None;
        }
        Some(StatSummary {
            min: Rational::from(self.min),
            max: Rational::from(self.max),
            avg: Rational::new(BigInt::from(self.sum), BigInt::from(self.count)).ok()?,
            count: self.count,
        })
    }
}

/// One row of the bound comparison: deltas of a working-precision interval
/// against the exact reference for the same format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsRow {
    pub method: BoundMethod,
    pub precision: Precision,
    pub i: u64,
    pub dlb: StatSummary,
    pub dub: StatSummary,
    /// Samples with `D = A`, which need no interval and are left out.
    pub identity_samples: u64,
}

/// Default rows: theoretical in both precisions, practical and approximate
/// in binary32.
pub fn default_bound_configs() -> Vec<(BoundMethod, Precision)> {
    vec![
        (BoundMethod::Theoretical, Precision::Binary64),
        (BoundMethod::Theoretical, Precision::Binary32),
        (BoundMethod::Practical, Precision::Binary32),
        (BoundMethod::Approximate, Precision::Binary32),
    ]
}

#[derive(Debug, Clone, Copy, Default)]
struct DeltaAcc {
    dlb: StatAccumulator,
    dub: StatAccumulator,
    identity: u64,
}

impl DeltaAcc {
    fn merge(self, other: DeltaAcc) -> DeltaAcc {
        DeltaAcc {
            dlb: self.dlb.merge(other.dlb),
            dub: self.dub.merge(other.dub),
            identity: self.identity + other.identity,
        }
    }
}

pub fn bounds_experiment(
    samples: &[ClockSample],
    clocks: &[u64],
    configs: &[(BoundMethod, Precision)],
    eps_coeff: &Rational,
) -> Result<Vec<BoundsRow>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut rows = Vec::with_capacity(configs.len() * clocks.len());
    for &(method, precision) in configs {
        let reference = ReferenceBounds::new(precision.format())?;
        for &i in clocks {
            let acc = samples
                .par_iter()
                .try_fold(DeltaAcc::default, |mut acc, sample| -> Result<DeltaAcc> {
                    if sample.is_identity() {
                        acc.identity += 1;
                        return Ok(acc);
                    }
                    let (db, da) = sample.walk_slope();
                    let candidate = candidate_interval(i, db, da, method, precision, eps_coeff)?;
                    let exact = reference.interval(i, db, da)?;
                    let (dlb, dub) = interval_deltas(&candidate, &exact);
                    acc.dlb.push(dlb);
                    acc.dub.push(dub);
                    Ok(acc)
                })
                .try_reduce(DeltaAcc::default, |a, b| Ok(a.merge(b)))?;
            let (Some(dlb), Some(dub)) = (acc.dlb.summary(), acc.dub.summary()) else {
                return Err(Error::EmptySamples);
            };
            rows.push(BoundsRow {
                method,
                precision,
                i,
                dlb,
                dub,
                identity_samples: acc.identity,
            });
        }
    }
    Ok(rows)
}

/// A compensation algorithm under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// `floor(t̂)` straight from the working precision.
    Naive(Precision),
    /// Candidate interval plus integer walk.
    Compensated(BoundMethod, Precision),
}

impl Algorithm {
    pub fn precision(&self) -> Precision {
        match *self {
            Algorithm::Naive(p) | Algorithm::Compensated(_, p) => p,
        }
    }

    pub fn method(&self) -> Option<BoundMethod> {
        match *self {
            Algorithm::Naive(_) => None,
            Algorithm::Compensated(m, _) => Some(m),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Naive(p) => write!(f, "naive-{p}"),
            Algorithm::Compensated(m, p) => write!(f, "{m}-{p}"),
        }
    }
}

pub fn default_algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::Naive(Precision::Binary32),
        Algorithm::Compensated(BoundMethod::Practical, Precision::Binary32),
        Algorithm::Compensated(BoundMethod::Approximate, Precision::Binary32),
    ]
}

/// One row of the compensation comparison. `err = floor(t̂_binary64) - j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompensationRow {
    pub algorithm: Algorithm,
    pub i: u64,
    pub err: StatSummary,
    /// `None` for the naive algorithm.
    pub iterations: Option<StatSummary>,
    /// Samples whose candidate interval excluded the compensated clock.
    pub violations: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct CompAcc {
    err: StatAccumulator,
    iterations: StatAccumulator,
    violations: u64,
}

impl CompAcc {
    fn merge(self, other: CompAcc) -> CompAcc {
        CompAcc {
            err: self.err.merge(other.err),
            iterations: self.iterations.merge(other.iterations),
            violations: self.violations + other.violations,
        }
    }
}

fn to_signed(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::OverflowRisk(format!("{v} exceeds i64")))
}

pub fn compensation_experiment(
    samples: &[ClockSample],
    clocks: &[u64],
    algorithms: &[Algorithm],
    eps_coeff: &Rational,
) -> Result<Vec<CompensationRow>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut rows = Vec::with_capacity(algorithms.len() * clocks.len());
    for &algorithm in algorithms {
        for &i in clocks {
            let acc = samples
                .par_iter()
                .try_fold(CompAcc::default, |mut acc, sample| -> Result<CompAcc> {
                    let reference = compute_t_hat(i, sample.d, sample.a, Precision::Binary64)?.floor() as i64;
                    match algorithm {
                        Algorithm::Naive(precision) => {
                            let j = naive_compensate(i, sample.d, sample.a, precision)?;
                            acc.err.push(reference - to_signed(j)?);
                        }
                        Algorithm::Compensated(method, precision) => {
                            let res = compensate(i, sample.d, sample.a, method, precision, eps_coeff)?;
                            acc.err.push(reference - to_signed(res.j)?);
                            acc.iterations.push(to_signed(res.iterations)?);
                            acc.violations += res.bounds_violated as u64;
                        }
                    }
                    Ok(acc)
                })
                .try_reduce(CompAcc::default, |a, b| Ok(a.merge(b)))?;
            let err = acc.err.summary().ok_or(Error::EmptySamples)?;
            rows.push(CompensationRow {
                algorithm,
                i,
                err,
                iterations: acc.iterations.summary(),
                violations: acc.violations,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_rational::rat;

    #[test]
    fn empty_and_zero_range() {
        assert!(generate_samples(1, 0, DEFAULT_D, &Rational::from(100i64)).unwrap().is_empty());
        let flat = generate_samples(1, 50, DEFAULT_D, &Rational::zero()).unwrap();
        assert!(flat.iter().all(|s| s.a == s.d && s.is_identity()));
    }

    #[test]
    fn samples_stay_in_range() {
        let samples = generate_samples(1, 3, DEFAULT_D, &Rational::from(100i64)).unwrap();
        assert_eq!(samples.len(), 3);
        for s in &samples {
            assert!((999_900..=1_000_100).contains(&s.a), "{}", s.a);
            assert!(s.skew_ppm.abs() <= Rational::from(100i64));
            let expected = (Rational::from(s.d) * (Rational::one() + &s.skew_ppm / Rational::from(1_000_000i64)))
                .round_half_up();
            assert_eq!(BigInt::from(s.a), expected);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let range = Rational::from(100i64);
        let a = generate_samples(42, 1000, DEFAULT_D, &range).unwrap();
        let b = generate_samples(42, 1000, DEFAULT_D, &range).unwrap();
        let c = generate_samples(43, 1000, DEFAULT_D, &range).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_range() {
        assert!(generate_samples(1, 3, DEFAULT_D, &Rational::from(-1i64)).is_err());
        assert!(generate_samples(1, 3, DEFAULT_D, &Rational::from(1_000_000i64)).is_err());
    }

    #[test]
    fn accumulator_merge_is_order_free() {
        let values = [3i64, -1, 7, 0, 2, 2, -5];
        let mut whole = StatAccumulator::default();
        values.iter().for_each(|v| whole.push(*v));
        let (mut left, mut right) = (StatAccumulator::default(), StatAccumulator::default());
        values[..3].iter().for_each(|v| left.push(*v));
        values[3..].iter().for_each(|v| right.push(*v));
        assert_eq!(right.merge(left), whole);
        let s = whole.summary().unwrap();
        assert_eq!((s.min_i64(), s.max_i64(), s.count), (-5, 7, 7));
        assert_eq!(s.avg, rat(8, 7).unwrap());
        assert!(StatAccumulator::default().summary().is_none());
    }

    #[test]
    fn small_tables() {
        let samples = generate_samples(7, 400, DEFAULT_D, &Rational::from(100i64)).unwrap();
        let eps = default_eps_coeff();
        let rows = bounds_experiment(&samples, &[1_000_000], &default_bound_configs(), &eps).unwrap();
        assert_eq!(rows.len(), 4);
        let theo64 = &rows[0];
        assert_eq!((theo64.dlb.min_i64(), theo64.dlb.max_i64()), (0, 0));
        assert_eq!((theo64.dub.min_i64(), theo64.dub.max_i64()), (0, 0));
        assert_eq!(theo64.dlb.count + theo64.identity_samples, 400);

        let rows = compensation_experiment(&samples, &[1_000_000], &default_algorithms(), &eps).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].iterations.is_none());
        for row in &rows[1..] {
            assert!(row.err.min_i64() >= -1 && row.err.max_i64() <= 0);
            assert_eq!(row.violations, 0);
        }
    }

    #[test]
    fn empty_samples_rejected() {
        let eps = default_eps_coeff();
        assert_eq!(bounds_experiment(&[], &[10], &default_bound_configs(), &eps), Err(Error::EmptySamples));
        assert_eq!(compensation_experiment(&[], &[10], &default_algorithms(), &eps), Err(Error::EmptySamples));
    }
}
