//! Quick seeded invariant checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewcomp::bounds::{emulated_t_hat, optimal_coefficients, practical_coefficients};
use skewcomp::exact_rational::{is_in_format, round_to_format};
use skewcomp::experiment::{bounds_experiment, default_eps_coeff, generate_samples, DEFAULT_D};
use skewcomp::{
    compensate, compute_t_hat, oracle_nearest, BoundMethod, FloatFormat, Precision, Rational,
};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

pub fn run_all(seed: u64, trials: usize) -> Vec<Check> {
    vec![
        Check {
            name: "representability",
            outcome: representability(),
        },
        Check {
            name: "coefficient-ordering",
            outcome: coefficient_ordering(),
        },
        Check {
            name: "optimal-bounds-binary32",
            outcome: optimal_bounds(seed, trials),
        },
        Check {
            name: "t-hat-emulation",
            outcome: t_hat_emulation(seed, trials),
        },
        Check {
            name: "oracle-equivalence",
            outcome: oracle_equivalence(seed, trials),
        },
        Check {
            name: "binary64-theoretical-exact",
            outcome: binary64_exact(seed, trials),
        },
    ]
}

fn representability() -> Result<String, String> {
    for p in [11, 24, 53] {
        let fmt = FloatFormat::binary(p).map_err(|e| e.to_string())?;
        let u = fmt.unit_roundoff();
        let one = Rational::one();
        if !is_in_format(&(&one - &u), fmt) || !is_in_format(&(&one + &u + &u), fmt) {
            return Err(format!("1-u or 1+2u not representable at p={p}"));
        }
        if is_in_format(&(&one + &u), fmt) {
            return Err(format!("1+u representable at p={p}"));
        }
    }
    Ok("p in {11, 24, 53}".into())
}

fn coefficient_ordering() -> Result<String, String> {
    for p in 2..=64 {
        let fmt = FloatFormat::binary(p).map_err(|e| e.to_string())?;
        let (lo, hi) = optimal_coefficients(fmt).map_err(|e| e.to_string())?;
        let (plo, phi) = practical_coefficients(fmt).map_err(|e| e.to_string())?;
        if !(plo <= lo && lo < Rational::one() && Rational::one() < hi && hi <= phi) {
            return Err(format!("coefficients out of order at p={p}"));
        }
    }
    Ok("p in 2..=64".into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: u64 = rng.random_range(0..=u64::MAX >> 8);
    let den: u64 = rng.random_range(1..=u64::MAX >> 8);
    Rational::new(num, den).expect("nonzero denominator")
}

fn optimal_bounds(seed: u64, trials: usize) -> Result<String, String> {
    let fmt = FloatFormat::BINARY32;
    let (c_lo, c_hi) = optimal_coefficients(fmt).map_err(|e| e.to_string())?;
    let fl = |q: &Rational| round_to_format(q, fmt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
        let z = &random_rational(&mut rng) + &Rational::new(1, 1u64 << 40).expect("valid");
        let t = &x * &y / &z;
        let rounded = fl(&(fl(&x) * fl(&(fl(&y) / fl(&z)))));
        if !(&c_lo * &t <= rounded && rounded <= &c_hi * &t) {
            return Err(format!("bound fails for x={x} y={y} z={z}"));
        }
    }
    Ok(format!("{trials} triples"))
}

fn random_slope(rng: &mut ChaCha8Rng) -> (u64, u64, u64) {
    let i = rng.random_range(0..=1_000_000_000);
    let a = rng.random_range(1..=2_000_000);
    let d = rng.random_range(1..2 * a);
    (i, d, a)
}

fn t_hat_emulation(seed: u64, trials: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..trials {
        let (i, d, a) = random_slope(&mut rng);
        for precision in Precision::ALL {
            let hw = compute_t_hat(i, d, a, precision).map_err(|e| e.to_string())?;
            let emu = emulated_t_hat(i, d, a, precision.format()).map_err(|e| e.to_string())?;
            if emu.to_f64_exact() != Some(hw) {
                return Err(format!("t̂ mismatch at i={i} D={d} A={a} {precision}"));
            }
        }
    }
    Ok(format!("{trials} inputs x 2 precisions"))
}

fn oracle_equivalence(seed: u64, trials: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let eps = default_eps_coeff();
    let mut flagged = 0;
    for _ in 0..trials {
        let (i, d, a) = random_slope(&mut rng);
        let oracle = oracle_nearest(i, d, a).map_err(|e| e.to_string())?;
        for method in BoundMethod::ALL {
            for precision in Precision::ALL {
                let res = compensate(i, d, a, method, precision, &eps).map_err(|e| e.to_string())?;
                if res.bounds_violated {
                    flagged += 1;
                } else if res.j != oracle {
                    return Err(format!("j={} oracle={oracle} at i={i} D={d} A={a} {method}/{precision}", res.j));
                }
            }
        }
    }
    Ok(format!("{trials} inputs x 6 configurations, {flagged} flagged"))
}

fn binary64_exact(seed: u64, trials: usize) -> Result<String, String> {
    let samples = generate_samples(seed, trials, DEFAULT_D, &Rational::from(100i64)).map_err(|e| e.to_string())?;
    let rows = bounds_experiment(
        &samples,
        &[1_000_000_000],
        &[(BoundMethod::Theoretical, Precision::Binary64)],
        &default_eps_coeff(),
    )
    .map_err(|e| e.to_string())?;
    for row in &rows {
        let all_zero = [&row.dlb, &row.dub]
            .iter()
            .all(|s| s.min_i64() == 0 && s.max_i64() == 0);
        if !all_zero {
            return Err(format!("nonzero deltas at i={}", row.i));
        }
    }
    Ok(format!("{trials} samples at i=1e9"))
}
