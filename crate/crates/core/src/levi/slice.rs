use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid3, Regularity, ScalarField3};
use crate::scalar::{lit, to_f64, Real};

/// Graph function `phi(y1, z2, ..., zn)` on a subset of `R x C^{n-1}`.
pub trait GraphFunction<T: Real>: Sync {
    /// Number of complex arguments after `y1`.
    fn complex_dim(&self) -> usize;
    /// Evaluates `phi`, or reports that the point lies outside its domain.
    fn eval(&self, y1: T, z: &[Complex<T>]) -> Result<T>;
}

/// [`GraphFunction`] backed by a closure, defined on `|y1|^2 + |z|^2 < radius^2`.
pub struct FnGraph<F> {
    dim: usize,
    radius: f64,
    f: F,
}

impl<F> FnGraph<F> {
    pub fn new(dim: usize, radius: f64, f: F) -> Self {
        Self { dim, radius, f }
    }
}

impl<T: Real, F: Fn(T, &[Complex<T>]) -> T + Sync> GraphFunction<T> for FnGraph<F> {
    fn complex_dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, y1: T, z: &[Complex<T>]) -> Result<T> {
        let r2 = y1 * y1 + z.iter().fold(T::zero(), |a, w| a + w.norm_sqr());
        let rad = lit::<T>(self.radius);
        if !(r2 < rad * rad) {
            return Err(Error::Domain(format!(
                "point at distance {} outside the radius {}",
                to_f64(r2.sqrt()),
                self.radius
            )));
        }
        Ok((self.f)(y1, z))
    }
}

/// Restriction `phi^t(y1, z2) = phi(y1, z2, z2 t)` sampled on `grid`.
pub fn slice_graph<T: Real, G: GraphFunction<T> + ?Sized>(
    phi: &G,
    t: &[Complex<T>],
    grid: &Grid3<T>,
    regularity: Regularity<T>,
) -> Result<ScalarField3<T>> {
    let n = phi.complex_dim();
    if n < 2 {
        return Err(Error::Parameter(format!(
            "slices need at least three complex variables, got {}",
            n + 1
        )));
    }
    if t.len() != n - 1 {
        return Err(Error::Parameter(format!(
            "slice direction has {} components, expected {}",
            t.len(),
            n - 1
        )));
    }
    let values: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(grid.node(k));
            let z2 = Complex::new(x[1], x[2]);
            let mut z = Vec::with_capacity(n);
            z.push(z2);
            z.extend(t.iter().map(|&tj| z2 * tj));
            phi.eval(x[0], &z)
        })
        .collect::<Result<_>>()?;
    ScalarField3::new(grid.clone(), values, regularity)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceBound {
    /// Minimum of `phi^t(0, z2) / |z2|^2` over grid nodes with `y1 = 0`, `z2 != 0`.
    pub min_ratio: f64,
    /// `1 - C |t|^2 - 10 h`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks the lower bound `phi^t(0, z2) >= (1 - C|t|^2 - 10 h)|z2|^2` on the
/// plane `y1 = 0` of a sliced field.
pub fn slice_lower_bound<T: Real>(
    slice: &ScalarField3<T>,
    hessian_bound: f64,
    t_norm: f64,
) -> Result<SliceBound> {
    let grid = slice.grid();
    let h = to_f64(grid.spacing());
    let mut min_ratio = f64::INFINITY;
    for node in grid.nodes() {
        let p = grid.point(node).map(to_f64);
        if p[0].abs() > 0.5 * h {
            continue;
        }
        let r2 = p[1] * p[1] + p[2] * p[2];
        if r2 < 0.25 * h * h {
            continue;
        }
        min_ratio = min_ratio.min(to_f64(slice.at(node)) / r2);
    }
    if !min_ratio.is_finite() {
        return Err(Error::Domain(
            "grid has no nodes on the plane y1 = 0".into(),
        ));
    }
    let bound = 1.0 - hessian_bound * t_norm * t_norm - 10.0 * h;
    Ok(SliceBound {
        min_ratio,
        bound,
        holds: min_ratio >= bound,
    })
}
