use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tangent::{delta_tau_jet, tau_of_jet};
use crate::error::{Error, Result};
use crate::field::{fd_jet, Jet3, Node, ScalarField3};
use crate::scalar::{lit, to_f64, Real};

/// Graph-form Levi expression of `phi` from its jet, checked against
/// `-Delta_{tau(phi)} phi`.
pub fn graph_levi_jet<T: Real>(jet: &Jet3<T>) -> Result<T> {
    let w = jet.wirtinger();
    let quarter = lit::<T>(0.25);
    let half = lit::<T>(0.5);
    let one_minus = num_complex::Complex::new(T::one(), -w.d_y1);
    let i = num_complex::Complex::new(T::zero(), T::one());
    let value = -quarter * w.d_y1y1 * w.d_z2.norm_sqr()
        + half * (i * one_minus * w.d_z2 * w.d_y1_zb2).re
        - quarter * w.d_z2_zb2 * one_minus.norm_sqr();
    let dual = -delta_tau_jet(&jet.hess, &tau_of_jet(jet))?;
    let scale = jet
        .hess
        .iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v.abs()))
        * (T::one() + jet.grad.iter().fold(T::zero(), |m, v| m.max(v.abs()))).powi(2);
    let tol = lit::<T>(1e-9).max(lit::<T>(1e3) * T::epsilon()) * T::one().max(scale);
    if !((value - dual).abs() <= tol) {
        return Err(Error::Consistency(format!(
            "graph Levi expression {} differs from -Delta_tau phi = {}",
            to_f64(value),
            to_f64(dual)
        )));
    }
    Ok(value)
}

/// Graph-form Levi expression at a grid node, with central-difference derivatives.
pub fn graph_levi<T: Real>(phi: &ScalarField3<T>, node: Node) -> Result<T> {
    graph_levi_jet(&fd_jet(phi, node)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    PseudoconvexOk,
    Violating,
    NearZero { tol: f64 },
}

impl Classification {
    pub fn of<T: Real>(value: T, tol: T) -> Self {
        if value.abs() <= tol {
            Classification::NearZero { tol: to_f64(tol) }
        } else if value > T::zero() {
            Classification::PseudoconvexOk
        } else {
            Classification::Violating
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::PseudoconvexOk => "pseudoconvex_ok",
            Classification::Violating => "violating",
            Classification::NearZero { .. } => "near_zero",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LeviSample<T> {
    pub node: Node,
    pub point: [T; 3],
    pub levi_value: T,
    pub delta_tau_value: T,
    pub classification: Classification,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions<T> {
    /// Near-zero tolerance; `None` means `10 h` times the regularity constant.
    pub tolerance: Option<T>,
    /// Nodes closer than this many cells to the grid boundary are skipped.
    pub margin: usize,
}

impl<T> Default for ScanOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: None,
            margin: 1,
        }
    }
}

/// Evaluates the graph-form Levi expression at every node at least
/// `margin` cells inside the grid. Output is in grid order.
pub fn levi_scan<T: Real>(
    phi: &ScalarField3<T>,
    opts: &ScanOptions<T>,
) -> Result<Vec<LeviSample<T>>> {
    let grid = phi.grid();
    let tol = opts
        .tolerance
        .unwrap_or_else(|| lit::<T>(10.0) * grid.spacing() * phi.regularity().constant());
    let margin = opts.margin.max(1);
    let nodes: Vec<Node> = grid
        .nodes()
        .filter(|&n| grid.is_interior(n, margin))
        .collect();
    nodes
        .par_iter()
        .map(|&node| {
            let jet = fd_jet(phi, node)?;
            let levi_value = graph_levi_jet(&jet)?;
            let delta_tau_value = delta_tau_jet(&jet.hess, &tau_of_jet(&jet))?;
            Ok(LeviSample {
                node,
                point: grid.point(node),
                levi_value,
                delta_tau_value,
                classification: Classification::of(levi_value, tol),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeviSummary {
    pub count: usize,
    pub min: f64,
    pub argmin: [f64; 3],
    pub violating: usize,
    pub near_zero: usize,
    pub pseudoconvex_ok: usize,
}

impl LeviSummary {
    pub fn from_samples<T: Real>(samples: &[LeviSample<T>]) -> Option<Self> {
        let first = samples.first()?;
        let mut s = LeviSummary {
            count: samples.len(),
            min: to_f64(first.levi_value),
            argmin: first.point.map(to_f64),
            violating: 0,
            near_zero: 0,
            pseudoconvex_ok: 0,
        };
        for x in samples {
            let v = to_f64(x.levi_value);
            if v < s.min {
                s.min = v;
                s.argmin = x.point.map(to_f64);
            }
            match x.classification {
                Classification::PseudoconvexOk => s.pseudoconvex_ok += 1,
                Classification::Violating => s.violating += 1,
                Classification::NearZero { .. } => s.near_zero += 1,
            }
        }
        Some(s)
    }

    /// Writes `xi1,xi2,xi3,levi_value,classification` rows.
    pub fn write_csv<T: Real>(path: &Path, samples: &[LeviSample<T>]) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "xi1,xi2,xi3,levi_value,classification")?;
        for s in samples {
            let p = s.point.map(to_f64);
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{}",
                p[0],
                p[1],
                p[2],
                to_f64(s.levi_value),
                s.classification.label()
            )?;
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Grid3, Regularity};

    fn field(f: impl Fn([f64; 3]) -> f64 + Sync) -> ScalarField3<f64> {
        let g = Grid3::centered_cube([0.0; 3], 0.25, 1.0 / 32.0).unwrap();
        ScalarField3::from_fn(g, Regularity::Smooth { constant: 2.0 }, f).unwrap()
    }

    #[test]
    fn graph_levi_examples() {
        let f = field(|x| x[1] * x[1] + x[2] * x[2]);
        let c = f.grid().nearest_node([0.0; 3]).unwrap();
        assert!((graph_levi(&f, c).unwrap() + 0.25).abs() < 1e-10);
        let f = field(|x| -(x[1] * x[1] + x[2] * x[2]));
        assert!((graph_levi(&f, c).unwrap() - 0.25).abs() < 1e-10);
        assert_eq!(graph_levi(&field(|_| 0.0), c).unwrap(), 0.0);
    }

    #[test]
    fn scan_of_concave_cap_has_no_violations() {
        let f = field(|x| -0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        let opts = ScanOptions {
            tolerance: Some(1e-12),
            margin: 1,
        };
        let samples = levi_scan(&f, &opts).unwrap();
        let s = LeviSummary::from_samples(&samples).unwrap();
        assert_eq!(s.violating, 0);
        assert_eq!(s.count, 15 * 15 * 15);
        for x in &samples {
            assert!((x.levi_value + x.delta_tau_value).abs() < 1e-10);
        }
    }

    #[test]
    fn classification_boundaries() {
        assert_eq!(Classification::of(0.5, 0.1), Classification::PseudoconvexOk);
        assert_eq!(Classification::of(-0.5, 0.1), Classification::Violating);
        assert_eq!(
            Classification::of(0.1, 0.1),
            Classification::NearZero { tol: 0.1 }
        );
    }
}
