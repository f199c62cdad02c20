use num_complex::Complex;
use pseudoconvex::field::{Grid3, Regularity};
use pseudoconvex::levi::{slice_graph, slice_lower_bound, FnGraph};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "slice-check",
    description:
        "Slices phi(y1, z2, z2 t) of a graph over three complex variables and their lower bound",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Weight of `-|z3|^2` in the test graph; also its Hessian bound.
    pub kappa: f64,
    pub t_norms: Vec<f64>,
    pub directions: usize,
    pub spacing: f64,
    pub half_width: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            t_norms: vec![0.0, 0.025, 0.05, 0.1],
            directions: 4,
            spacing: 1.0 / 64.0,
            half_width: 0.25,
        }
    }
}

fn run(v: &Value, _cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let mut out = Outcome::default();
    let grid = Grid3::centered_cube([0.0; 3], p.half_width, p.spacing)?;
    let kappa = p.kappa;
    // phi(0, z2, 0) = |z2|^2, second derivatives in z3 bounded by kappa
    let test = FnGraph::new(2, 2.0, move |y: f64, z: &[Complex<f64>]| {
        z[0].norm_sqr() - kappa * z[1].norm_sqr() + y * y + y * z[1].re
    });
    let squares = FnGraph::new(2, 2.0, |_y: f64, z: &[Complex<f64>]| {
        z[0].norm_sqr() + z[1].norm_sqr()
    });
    let regularity = Regularity::Smooth {
        constant: 2.0 * (1.0 + kappa),
    };

    let flat = slice_graph(&test, &[Complex::new(0.0, 0.0)], &grid, regularity)?;
    let identity_err = grid
        .nodes()
        .map(|n| {
            let x = grid.point(n);
            (flat.at(n) - (x[1] * x[1] + x[2] * x[2] + x[0] * x[0])).abs()
        })
        .fold(0.0, f64::max);
    out.check(
        "identity_slice",
        "levi/slice_graph at t = 0",
        identity_err <= 1e-15,
        format!("max deviation {identity_err:e}"),
    );

    let mut table = Table::new(
        "slices.csv",
        &["t_re", "t_im", "min_ratio", "bound", "squares_ratio_error"],
    );
    let (mut all_hold, mut worst_sq) = (true, 0.0f64);
    let mut bounds = Vec::new();
    for &norm in &p.t_norms {
        for k in 0..p.directions.max(1) {
            let t = Complex::from_polar(
                norm,
                std::f64::consts::TAU * k as f64 / p.directions.max(1) as f64,
            );
            let sliced = slice_graph(&test, &[t], &grid, regularity)?;
            let b = slice_lower_bound(&sliced, kappa, norm)?;
            all_hold &= b.holds;
            let sq = slice_graph(&squares, &[t], &grid, regularity)?;
            let sq_err = slice_lower_bound(&sq, 0.0, 0.0)
                .map(|s| (s.min_ratio - (1.0 + norm * norm)).abs())?;
            worst_sq = worst_sq.max(sq_err);
            table.push(&[t.re, t.im, b.min_ratio, b.bound, sq_err]);
            bounds.push(b);
        }
    }
    out.check(
        "slice_lower_bound",
        "levi/slice transversality proxy",
        all_hold,
        format!("{} slices checked", bounds.len()),
    );
    out.check(
        "sum_of_squares_slice",
        "levi/slice of |z2|^2 + |z3|^2 is (1 + |t|^2)|z2|^2",
        worst_sq <= 1e-12,
        format!("max ratio error {worst_sq:e}"),
    );
    out.tables.push(table);
    out.result("bounds", bounds);
    Ok(out)
}
