use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use pseudoconvex::staircase::{build_cantor, default_alphas, fat_f, find_x0, staircase_f, FatF};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "staircase-build",
    description:
        "Fat Cantor system, devil's staircase and the C^{1,1} profile F with its quadratic bound",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha1: f64,
    pub generations: usize,
    /// Generations checked in rational arithmetic.
    pub exact_generations: usize,
    /// Offsets sampled for the quadratic bound.
    pub samples: usize,
    /// Points sampled inside each removed interval.
    pub gap_samples: usize,
    /// Points of the exported profile table.
    pub export_points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha1: 0.9,
            generations: 12,
            exact_generations: 10,
            samples: 1000,
            gap_samples: 4,
            export_points: 2049,
        }
    }
}

/// The rational number written by the shortest decimal form of `x`.
fn decimal_rational(x: f64) -> anyhow::Result<BigRational> {
    let s = format!("{x}");
    let (int, frac) = s.split_once('.').unwrap_or((&s, ""));
    let digits: BigInt = format!("{int}{frac}").parse()?;
    Ok(BigRational::new(
        digits,
        num_traits::pow(BigInt::from(10), frac.len()),
    ))
}

fn run(v: &Value, _cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let mut out = Outcome::default();

    let n_exact = p.exact_generations.min(p.generations);
    let exact = build_cantor(
        &default_alphas(decimal_rational(p.alpha1)?, n_exact),
        n_exact,
    )?;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    let mut expected = BigRational::one();
    for n in 0..=n_exact {
        if n > 0 {
            let a = &exact.alphas()[n - 1];
            expected =
                expected * (BigRational::one() - a) / BigRational::from_integer(BigInt::from(2));
        }
        for iv in exact.retained(n) {
            checked += 1;
            if iv.length() != expected {
                mismatches += 1;
            }
        }
    }
    out.check(
        "exact_interval_lengths",
        "staircase/|I[n][i]| = 2^-n prod(1 - alpha_k)",
        mismatches == 0 && checked > 0,
        format!("{mismatches} of {checked} intervals differ, generations 0..={n_exact}"),
    );
    let iterates = staircase_f(&exact, n_exact)?;
    let mut slope_errors = 0usize;
    for n in 0..=n_exact {
        for iv in exact.retained(n) {
            let rise = iterates.eval(n, &iv.b) - iterates.eval(n, &iv.a);
            if rise / iv.length() != iterates.slope(n) {
                slope_errors += 1;
            }
        }
    }
    out.check(
        "staircase_slopes",
        "staircase/f_n has slope l_n on I[n]",
        slope_errors == 0,
        format!("{slope_errors} intervals with a different slope"),
    );

    let system = build_cantor(&default_alphas(p.alpha1, p.generations), p.generations)?;
    let f: FatF<f64> = fat_f(&system, p.generations)?;
    let ends = [f.profile().value(0.0), f.profile().value(1.0)];
    out.check(
        "boundary_values",
        "staircase/F(0) = F(1) = 0",
        ends.iter().all(|e| e.abs() <= 1e-12),
        format!("F(0) = {:e}, F(1) = {:e}", ends[0], ends[1]),
    );
    let mut worst_gap = 0.0f64;
    let mut gap_points = 0usize;
    for n in 0..p.generations {
        for gap in system.removed(n) {
            for k in 0..p.gap_samples {
                let x = gap.a + gap.length() * (k as f64 + 0.5) / p.gap_samples as f64;
                worst_gap = worst_gap.max((f.second(x) + 1.0).abs());
                gap_points += 1;
            }
        }
    }
    out.check(
        "second_derivative_on_gaps",
        "staircase/F'' = -1 on removed intervals",
        gap_points > 0 && worst_gap <= 1e-4,
        format!("max |F'' + 1| = {worst_gap:e} at {gap_points} points"),
    );

    let x0 = find_x0(&f, p.samples)?;
    let l_expected = 0.5 * (1.0 / (1.0 - p.alpha1) - 1.0);
    out.check(
        "quadratic_bound",
        "staircase/F(x0+s) >= F(x0) + s F'(x0) + L s^2",
        x0.bound.passed && (x0.l - l_expected).abs() <= 1e-12 * l_expected.max(1.0),
        format!(
            "L = {}, delta0 = {:e}, min margin {:e} at {} offsets",
            x0.l, x0.bound.delta0, x0.bound.min_margin, x0.bound.samples
        ),
    );

    out.result("L", x0.l);
    out.result("x0", &x0);
    out.result("alpha1", p.alpha1);
    out.result("sup_f", f.sup_norm());
    out.result("limit_error_bound", f.limit_error_bound());
    out.result("measure_estimate", system.measure_estimate());
    out.result("intervals_checked_exactly", checked);

    let mut table = Table::new("profile.csv", &["x", "staircase", "F", "dF", "d2F"]);
    let m = p.export_points.max(2) - 1;
    for k in 0..=m {
        let x = k as f64 / m as f64;
        table.push(&[x, f.staircase(x), f.value(x), f.first(x), f.second(x)]);
    }
    out.tables.push(table);
    Ok(out)
}
