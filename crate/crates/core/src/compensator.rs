//! Integer-only skew compensation.
//!
//! The compensated clock `j` is the `y` coordinate, at `x = i`, of the
//! lattice point tracking the line `y = x·Δb/Δa`. Starting from the lower
//! corner `(i - l, lb)` of a candidate interval, an extended Bresenham walk
//! advances `x` one unit at a time, keeping the residual
//! `r = x·Δb - y·Δa` within `-Δa <= 2r < Δa`. That band pins `y` to
//! `floor(x·Δb/Δa + 1/2)`, so the walk needs nothing but integer add,
//! subtract and compare.
//!
//! For `D/A < 1` the walk runs directly with `Δa = A, Δb = D`. For
//! `D/A > 1`, `i·D/A = i + i·(D-A)/A` and the walk handles the second term
//! with `Δb = D - A`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::bounds::{candidate_interval, compute_t_hat, BoundMethod, CandidateInterval, Precision};
use crate::exact_rational::Rational;
use crate::{Error, Result};

/// Position and residual of the integer line walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BresenhamState {
    delta_a: i64,
    delta_b: i64,
    x: i64,
    y: i64,
    /// `x·Δb - y·Δa`
    r: i64,
}

impl BresenhamState {
    /// Place the walk at `(x, y)`; `y` need not be on the line yet.
    pub fn new(delta_a: i64, delta_b: i64, x: i64, y: i64) -> Result<Self> {
        if delta_a <= 0 || delta_b < 0 || delta_b >= delta_a {
            return Err(Error::InvalidSlope {
                d: delta_b.max(0) as u64,
                a: delta_a.max(0) as u64,
            });
        }
        let overflow = || Error::OverflowRisk(format!("residual at ({x}, {y}) with slope {delta_b}/{delta_a}"));
        let r = x
            .checked_mul(delta_b)
            .and_then(|xb| y.checked_mul(delta_a).and_then(|ya| xb.checked_sub(ya)))
            .ok_or_else(overflow)?;
        // the comparisons below double r
        r.checked_mul(2).ok_or_else(overflow)?;
        Ok(BresenhamState {
            delta_a,
            delta_b,
            x,
            y,
            r,
        })
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn residual(&self) -> i64 {
        self.r
    }

    /// True when `-Δa <= 2r < Δa`.
    pub fn is_normalized(&self) -> bool {
        let twice = 2 * self.r;
        -self.delta_a <= twice && twice < self.delta_a
    }

    /// Move `y` onto the line at the current `x`. Returns the number of
    /// unit adjustments made.
    pub fn normalize(&mut self) -> u64 {
        let mut adjustments = 0;
        while 2 * self.r >= self.delta_a {
            self.y += 1;
            self.r -= self.delta_a;
            adjustments += 1;
        }
        while 2 * self.r < -self.delta_a {
            self.y -= 1;
            self.r += self.delta_a;
            adjustments += 1;
        }
        adjustments
    }

    /// Advance `x` by one. Requires a normalized state; `y` then rises by
    /// at most one since `Δb < Δa`.
    pub fn step(&mut self) {
        self.x += 1;
        self.r += self.delta_b;
        if 2 * self.r >= self.delta_a {
            self.y += 1;
            self.r -= self.delta_a;
        }
    }
}

/// Outcome of [`refine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Refinement {
    pub j: i64,
    /// Normalization adjustments plus `x` steps.
    pub iterations: u64,
    /// The walk ended outside the supplied interval, i.e. the interval did
    /// not contain the true compensated clock.
    pub bounds_violated: bool,
}

/// Walk from `(i - l, lb)` to `x = i`, where `l = ub - lb`.
///
/// The result is `floor(i·Δb/Δa + 1/2)` whatever interval is supplied; the
/// interval only decides the starting point and thereby the iteration
/// count. A start left of `x = 0` is walked like any other.
pub fn refine(i: u64, delta_a: u64, delta_b: u64, interval: &CandidateInterval) -> Result<Refinement> {
    if interval.lb > interval.ub {
        return Err(Error::EmptyInterval {
            lb: interval.lb,
            ub: interval.ub,
        });
    }
    let to_i64 = |v: u64, what: &str| {
        i64::try_from(v).map_err(|_| Error::OverflowRisk(format!("{what} = {v} exceeds 63 bits")))
    };
    let i = to_i64(i, "i")?;
    let delta_a = to_i64(delta_a, "delta_a")?;
    let delta_b = to_i64(delta_b, "delta_b")?;
    // every residual along the walk is bounded by |i·Δb| + |lb·Δa| + Δa
    i.checked_mul(delta_b)
        .and_then(|v| v.checked_add(delta_a))
        .and_then(|v| v.checked_mul(2))
        .ok_or_else(|| Error::OverflowRisk(format!("i·Δb = {i}·{delta_b}")))?;

    let width = interval
        .ub
        .checked_sub(interval.lb)
        .ok_or_else(|| Error::OverflowRisk("interval width".into()))?;
    let x0 = i
        .checked_sub(width)
        .ok_or_else(|| Error::OverflowRisk("start abscissa".into()))?;

    let mut state = BresenhamState::new(delta_a, delta_b, x0, interval.lb)?;
    let mut iterations = state.normalize();
    while state.x() < i {
        state.step();
        iterations += 1;
    }
    let j = state.y();
    Ok(Refinement {
        j,
        iterations,
        bounds_violated: !interval.contains(j),
    })
}

/// Which branch of the compensation procedure ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompCase {
    /// `D = A`: no skew to compensate.
    Identity,
    /// `D < A`: walk with `Δb = D`.
    Case1,
    /// `D > A`: `j = i + walk with Δb = D - A`.
    Case2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompResult {
    pub j: u64,
    pub iterations: u64,
    pub method: BoundMethod,
    pub precision: Precision,
    pub case: CompCase,
    pub bounds_violated: bool,
}

/// Skew-compensated clock for hardware clock `i`, with `D/A` in `(0, 2)`.
pub fn compensate(
    i: u64,
    d: u64,
    a: u64,
    method: BoundMethod,
    precision: Precision,
    eps_coeff: &Rational,
) -> Result<CompResult> {
    if d == 0 || a == 0 || d / 2 >= a {
        return Err(Error::SkewOutOfRange { d, a });
    }
    let result = |j, iterations, case, bounds_violated| CompResult {
        j,
        iterations,
        method,
        precision,
        case,
        bounds_violated,
    };
    if d == a {
        return Ok(result(i, 0, CompCase::Identity, false));
    }
    let (delta_b, case) = if d < a {
        (d, CompCase::Case1)
    } else {
        (d - a, CompCase::Case2)
    };
    let interval = candidate_interval(i, delta_b, a, method, precision, eps_coeff)?;
    let walk = refine(i, a, delta_b, &interval)?;
    let partial = u64::try_from(walk.j).map_err(|_| Error::OverflowRisk(format!("negative clock {}", walk.j)))?;
    let j = match case {
        CompCase::Case2 => i
            .checked_add(partial)
            .ok_or_else(|| Error::OverflowRisk("i + j̄".into()))?,
        _ => partial,
    };
    Ok(result(j, walk.iterations, case, walk.bounds_violated))
}

/// `floor(i·D/A + 1/2)` in exact arithmetic.
pub fn oracle_nearest(i: u64, d: u64, a: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::ZeroDivisor);
    }
    let t = Rational::new(BigInt::from(i) * BigInt::from(d), BigInt::from(a))?;
    let nearest = t.round_half_up();
    nearest
        .to_u64()
        .ok_or_else(|| Error::OverflowRisk(format!("{nearest} exceeds u64")))
}

/// `floor(t̂)` with `t̂` computed directly in the working precision.
pub fn naive_compensate(i: u64, d: u64, a: u64, precision: Precision) -> Result<u64> {
    let t = compute_t_hat(i, d, a, precision)?;
    Ok(t.floor() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::IntervalOrigin;
    use crate::exact_rational::rat;
    use proptest::prelude::*;

    fn iv(lb: i64, ub: i64) -> CandidateInterval {
        CandidateInterval {
            lb,
            ub,
            origin: IntervalOrigin::Working(BoundMethod::Practical, Precision::Binary32),
        }
    }

    fn eps() -> Rational {
        rat(1, 10_000_000).unwrap()
    }

    /// Replays the walk rules by hand: returns (j, iterations).
    fn hand_walk(i: i64, da: i64, db: i64, lb: i64, ub: i64) -> (i64, u64) {
        let (mut x, mut y) = (i - (ub - lb), lb);
        let mut r = x * db - y * da;
        let mut n = 0;
        while 2 * r >= da {
            y += 1;
            r -= da;
            n += 1;
        }
        while 2 * r < -da {
            y -= 1;
            r += da;
            n += 1;
        }
        while x < i {
            x += 1;
            r += db;
            if 2 * r >= da {
                y += 1;
                r -= da;
            }
            n += 1;
        }
        (y, n)
    }

    #[test]
    fn refine_examples() {
        // from (8, 4): r = 0; x=9 -> r=1, 2r>=2 so y=5, r=-1; x=10 -> r=0
        let out = refine(10, 2, 1, &iv(4, 6)).unwrap();
        assert_eq!((out.j, out.iterations, out.bounds_violated), (5, 2, false));
        assert_eq!(hand_walk(10, 2, 1, 4, 6), (5, 2));

        let out = refine(4, 3, 1, &iv(1, 1)).unwrap();
        assert_eq!((out.j, out.iterations), (1, 0));

        // from (3, 3): r = -3, 2r < -5 so y=2, r=2; then two steps to y=4
        let out = refine(5, 5, 4, &iv(3, 5)).unwrap();
        assert_eq!((out.j, out.iterations), (4, 3));
        assert_eq!(hand_walk(5, 5, 4, 3, 5), (4, 3));
    }

    #[test]
    fn refine_flags_excluding_interval() {
        let out = refine(10, 2, 1, &iv(6, 7)).unwrap();
        assert_eq!(out.j, 5);
        assert!(out.bounds_violated);
    }

    #[test]
    fn refine_overflow_is_reported() {
        let err = refine(1 << 62, 1 << 40, 1 << 39, &iv(0, 1)).unwrap_err();
        assert!(matches!(err, Error::OverflowRisk(_)));
        assert!(matches!(refine(u64::MAX, 3, 1, &iv(0, 1)), Err(Error::OverflowRisk(_))));
    }

    #[test]
    fn state_rejects_bad_slope() {
        assert!(BresenhamState::new(3, 3, 0, 0).is_err());
        assert!(BresenhamState::new(0, 0, 0, 0).is_err());
        let mut s = BresenhamState::new(7, 3, 10, 0).unwrap();
        assert!(!s.is_normalized());
        assert_eq!(s.normalize(), 4);
        assert!(s.is_normalized());
        assert_eq!(s.y(), 4); // 30/7 = 4.29
        s.step();
        assert_eq!((s.x(), s.y()), (11, 5)); // 33/7 = 4.71
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_nearest(10, 1, 2).unwrap(), 5);
        assert_eq!(oracle_nearest(7, 3, 5).unwrap(), 4);
        assert_eq!(oracle_nearest(9, 1, 2).unwrap(), 5);
        assert_eq!(oracle_nearest(9, 1, 0), Err(Error::ZeroDivisor));
    }

    #[test]
    fn compensate_examples() {
        let e = eps();
        let id = compensate(1_000_000, 5, 5, BoundMethod::Practical, Precision::Binary32, &e).unwrap();
        assert_eq!((id.j, id.iterations, id.case), (1_000_000, 0, CompCase::Identity));

        let c2 = compensate(999_900, 1_000_000, 999_900, BoundMethod::Practical, Precision::Binary32, &e).unwrap();
        assert_eq!((c2.j, c2.case), (1_000_000, CompCase::Case2));

        for method in BoundMethod::ALL {
            for precision in Precision::ALL {
                let res = compensate(7, 3, 5, method, precision, &e).unwrap();
                assert_eq!(res.j, 4, "{method} {precision}");
                assert_eq!(res.case, CompCase::Case1);
            }
        }
    }

    #[test]
    fn compensate_rejects_out_of_range_skew() {
        let e = eps();
        for (d, a) in [(0, 5), (10, 5), (11, 5), (1, 0)] {
            assert_eq!(
                compensate(10, d, a, BoundMethod::Practical, Precision::Binary32, &e),
                Err(Error::SkewOutOfRange { d, a })
            );
        }
    }

    #[test]
    fn naive_examples() {
        assert_eq!(naive_compensate(100_000_000, 7, 7, Precision::Binary32).unwrap(), 100_000_000);
        assert_eq!(naive_compensate(10, 1, 2, Precision::Binary32).unwrap(), 5);
        // binary32 grid spacing near 10^9 is 64: the naive result is off by tens
        let exact = (1_000_000_000u128 * 1_000_000 / 999_950) as u64;
        let naive = naive_compensate(1_000_000_000, 1_000_000, 999_950, Precision::Binary32).unwrap();
        let emulated = crate::bounds::emulated_t_hat(1_000_000_000, 1_000_000, 999_950, Precision::Binary32.format())
            .unwrap()
            .floor();
        assert_eq!(BigInt::from(naive), emulated);
        assert_ne!(naive, exact);
    }

    proptest! {
        #[test]
        fn walk_matches_hand_replay(i in 0i64..5_000, da in 1i64..500, db_frac in 0.0f64..1.0, lb_off in -30i64..30, width in 0i64..40) {
            let db = ((da as f64) * db_frac) as i64 % da;
            let target = oracle_nearest(i as u64, db as u64, da as u64).unwrap() as i64;
            let lb = target + lb_off;
            let out = refine(i as u64, da as u64, db as u64, &iv(lb, lb + width)).unwrap();
            prop_assert_eq!((out.j, out.iterations), hand_walk(i, da, db, lb, lb + width));
            prop_assert_eq!(out.j, target);
            prop_assert!(out.iterations >= width as u64);
            prop_assert_eq!(out.bounds_violated, !(lb <= target && target <= lb + width));
        }

        #[test]
        fn widening_keeps_result(i in 0u64..100_000, da in 2u64..10_000, db_frac in 0.0f64..1.0, extra in 0i64..50) {
            let db = ((da as f64) * db_frac) as u64 % da;
            let target = oracle_nearest(i, db, da).unwrap() as i64;
            let tight = refine(i, da, db, &iv(target, target)).unwrap();
            let wide = refine(i, da, db, &iv(target - extra, target + extra)).unwrap();
            prop_assert_eq!(tight.j, wide.j);
            prop_assert_eq!(tight.iterations, 0);
            prop_assert!(wide.iterations >= tight.iterations);
        }

        #[test]
        fn case2_shift_identity(i in 0u64..2_000_000_000, a in 1u64..2_000_000, frac in 0.0f64..1.0) {
            let extra = ((a as f64) * frac) as u64 % a;
            let d = a + extra;
            let shifted = i + oracle_nearest(i, extra, a).unwrap();
            prop_assert_eq!(shifted, oracle_nearest(i, d, a).unwrap());
        }
    }
}
