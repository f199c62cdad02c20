use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convolve::convolve3;
use super::kernel::MarginalCdf;
use super::lifted::LiftedProfile;
use crate::error::{Error, Result};
use crate::field::{fd_hessian, fd_jet, Grid3, Node, ScalarField3};
use crate::levi::{delta_tau_jet, tau_of_jet};
use crate::scalar::fit_slope;

/// Floor applied to `-m(delta)` before taking logarithms.
pub const SLOPE_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub alpha: f64,
    pub p: f64,
    pub epsilon: f64,
    /// Number of dyadic steps below `delta(eps)`.
    pub sweep_len: usize,
    /// Explicit radii replacing the dyadic sweep.
    pub deltas: Option<Vec<f64>>,
    /// Tolerance for the a.e. hypothesis `-Delta_{tau(phi)} v >= 0`.
    pub hypothesis_tol: f64,
}

impl Default for CertificateParams {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            p: 6.0,
            epsilon: 1e-2,
            sweep_len: 7,
            deltas: None,
            hypothesis_tol: 1e-9,
        }
    }
}

impl CertificateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 3.0) {
            return Err(Error::Parameter(format!("p = {} must exceed 3", self.p)));
        }
        if !(self.alpha > 3.0 / self.p && self.alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha = {} must lie in (3/p, 1) = ({}, 1)",
                self.alpha,
                3.0 / self.p
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Parameter("eps must be positive".into()));
        }
        Ok(())
    }

    /// `alpha - 3/p`.
    pub fn rate(&self) -> f64 {
        self.alpha - 3.0 / self.p
    }

    /// `delta(eps) = eps^{1 / (alpha - 3/p)}`.
    pub fn delta_max(&self) -> f64 {
        self.epsilon.powf(1.0 / self.rate())
    }
}

/// `delta_k = delta(eps) 2^{-k}`, `k = 0, ..., sweep_len - 1`, unless radii are given.
pub fn delta_sweep(params: &CertificateParams) -> Vec<f64> {
    match &params.deltas {
        Some(d) => d.clone(),
        None => {
            let d0 = params.delta_max();
            (0..params.sweep_len)
                .map(|k| d0 * 0.5f64.powi(k as i32))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub epsilon: f64,
    pub alpha: f64,
    pub p: f64,
    pub rate: f64,
    pub delta_max: f64,
    pub deltas: Vec<f64>,
    /// `m(delta) = min over U^delta of -Delta_{tau(phi)}(v * theta_delta)`.
    pub m_values: Vec<f64>,
    /// Slope of `log max(-m, 1e-14)` against `log delta`.
    pub fitted_slope: f64,
    /// `max_k max(-m_k, 0) / delta_k^rate`.
    pub empirical_constant: f64,
    /// `l^p` grid norm of the second derivatives of `v` away from kinks (an estimate).
    pub sobolev_estimate: f64,
    pub route: String,
    /// `m(delta) >= -eps` for every swept `delta <= delta(eps)`.
    pub pass: bool,
}

fn finish(
    params: &CertificateParams,
    deltas: Vec<f64>,
    m_values: Vec<f64>,
    sobolev_estimate: f64,
    route: &str,
) -> CertificateReport {
    let rate = params.rate();
    let delta_max = params.delta_max();
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = m_values
        .iter()
        .map(|m| (-m).max(SLOPE_FLOOR).ln())
        .collect();
    let fitted_slope = if deltas.len() >= 2 {
        fit_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let empirical_constant = deltas
        .iter()
        .zip(&m_values)
        .map(|(d, m)| (-m).max(0.0) / d.powf(rate))
        .fold(0.0, f64::max);
    let pass = !deltas.is_empty()
        && deltas
            .iter()
            .zip(&m_values)
            .all(|(d, m)| *d > delta_max * (1.0 + 1e-12) || *m >= -params.epsilon);
    CertificateReport {
        epsilon: params.epsilon,
        alpha: params.alpha,
        p: params.p,
        rate,
        delta_max,
        deltas,
        m_values,
        fitted_slope,
        empirical_constant,
        sobolev_estimate,
        route: route.to_string(),
        pass,
    }
}

fn min_of(values: Vec<f64>) -> Result<f64> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("certificate minimum".into()));
    }
    values
        .into_iter()
        .reduce(f64::min)
        .ok_or_else(|| Error::Resolution("no nodes left after shrinking by delta".into()))
}

fn hypothesis_error(count: usize, worst: f64) -> Error {
    Error::Hypothesis(format!(
        "-Delta_tau(phi) v is negative at {count} nodes away from kinks (worst {worst})"
    ))
}

/// Certificate for gridded data: `v` is mollified by discrete convolution and
/// differentiated by central differences, so every radius must span two cells.
pub fn mollifier_certificate(
    v: &ScalarField3<f64>,
    phi: &ScalarField3<f64>,
    params: &CertificateParams,
) -> Result<CertificateReport> {
    params.validate()?;
    if v.grid() != phi.grid() {
        return Err(Error::InvalidGrid("v and phi must share a grid".into()));
    }
    let grid = v.grid();
    let h = grid.spacing();
    let away = |n: Node| !v.near_kink(n, 1.5) && !phi.near_kink(n, 1.5);
    let interior: Vec<Node> = grid.nodes().filter(|&n| grid.is_interior(n, 1)).collect();
    let checks: Vec<(f64, f64)> = interior
        .par_iter()
        .map(|&n| {
            let jv = fd_jet(v, n)?;
            let jp = fd_jet(phi, n)?;
            let value = -delta_tau_jet(&jv.hess, &tau_of_jet(&jp))?;
            let norm = if away(n) {
                jv.hess
                    .iter()
                    .flatten()
                    .map(|x| x.abs().powf(params.p))
                    .sum::<f64>()
            } else {
                0.0
            };
            Ok((if away(n) { value } else { f64::INFINITY }, norm))
        })
        .collect::<Result<_>>()?;
    let bad: Vec<f64> = checks
        .iter()
        .map(|c| c.0)
        .filter(|x| *x < -params.hypothesis_tol)
        .collect();
    if !bad.is_empty() {
        return Err(hypothesis_error(
            bad.len(),
            bad.iter().cloned().fold(0.0, f64::min),
        ));
    }
    let sobolev = (h * h * h * checks.iter().map(|c| c.1).sum::<f64>()).powf(1.0 / params.p);
    let deltas = delta_sweep(params);
    let mut m_values = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let m = convolve3(v, delta)?;
        let g = m.field().grid();
        let nodes: Vec<Node> = g.nodes().filter(|&n| g.is_interior(n, 1)).collect();
        let vals: Vec<f64> = nodes
            .par_iter()
            .map(|&n| {
                let tau = tau_of_jet(&fd_jet(phi, m.to_base(n))?);
                Ok(-delta_tau_jet(&fd_hessian(m.field(), n)?, &tau)?)
            })
            .collect::<Result<_>>()?;
        m_values.push(min_of(vals)?);
    }
    Ok(finish(params, deltas, m_values, sobolev, "grid"))
}

fn inside_by(grid: &Grid3<f64>, p: [f64; 3], delta: f64) -> bool {
    let o = grid.origin();
    let e = grid.extents();
    (0..3).all(|a| {
        let hi = o[a] + grid.spacing() * (e[a] - 1) as f64;
        p[a] - o[a] > delta && hi - p[a] > delta
    })
}

/// Certificate for lifted one-dimensional profiles: the mollified Hessian is
/// evaluated exactly through the marginal distribution of the kernel, so the
/// radii may be far below the grid spacing. The grid only supplies the
/// evaluation nodes.
pub fn mollifier_certificate_lifted(
    v: &LiftedProfile,
    phi: &LiftedProfile,
    grid: &Grid3<f64>,
    params: &CertificateParams,
) -> Result<CertificateReport> {
    params.validate()?;
    let h = grid.spacing();
    let on_break = |x: f64, f: &LiftedProfile| {
        f.profile
            .breaks()
            .iter()
            .any(|b| (x + f.shift - b).abs() < 1e-12)
    };
    let nodes: Vec<[f64; 3]> = grid.nodes().map(|n| grid.point(n)).collect();
    let checks: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&p| {
            if on_break(p[0], v) || on_break(p[0], phi) {
                return Ok((f64::INFINITY, 0.0));
            }
            let jv = v.jet(p);
            let value = -delta_tau_jet(&jv.hess, &tau_of_jet(&phi.jet(p)))?;
            let norm = jv
                .hess
                .iter()
                .flatten()
                .map(|x| x.abs().powf(params.p))
                .sum::<f64>();
            Ok((value, norm))
        })
        .collect::<Result<_>>()?;
    let bad: Vec<f64> = checks
        .iter()
        .map(|c| c.0)
        .filter(|x| *x < -params.hypothesis_tol)
        .collect();
    if !bad.is_empty() {
        return Err(hypothesis_error(
            bad.len(),
            bad.iter().cloned().fold(0.0, f64::min),
        ));
    }
    let sobolev = (h * h * h * checks.iter().map(|c| c.1).sum::<f64>()).powf(1.0 / params.p);
    let cdf = MarginalCdf::shared();
    let deltas = delta_sweep(params);
    let mut m_values = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let vals: Vec<f64> = nodes
            .par_iter()
            .filter(|p| inside_by(grid, **p, delta))
            .map(|&p| {
                let tau = tau_of_jet(&phi.jet(p));
                Ok(-delta_tau_jet(&v.mollified_hessian(p, delta, cdf), &tau)?)
            })
            .collect::<Result<_>>()?;
        m_values.push(min_of(vals)?);
    }
    Ok(finish(params, deltas, m_values, sobolev, "lifted"))
}
