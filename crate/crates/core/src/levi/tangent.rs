use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fd_jet, Jet3, Node, ScalarField3};
use crate::scalar::{lit, to_f64, Real};

/// Pair of complex coefficients `(tau1, tau2)` of the operator `Delta_tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TangentPair<T> {
    pub tau1: Complex<T>,
    pub tau2: Complex<T>,
}

impl<T: Real> TangentPair<T> {
    pub fn new(tau1: Complex<T>, tau2: Complex<T>) -> Result<Self> {
        let finite = |c: Complex<T>| c.re.is_finite() && c.im.is_finite();
        if !finite(tau1) || !finite(tau2) {
            return Err(Error::NonFinite("tangent pair".into()));
        }
        Ok(Self { tau1, tau2 })
    }

    /// Coefficients `T_jk`, `j <= k`, of the real form of `Delta_tau`.
    pub fn real_coefficients(&self) -> [[T; 3]; 3] {
        let quarter = lit::<T>(0.25);
        let cross = self.tau1.conj() * self.tau2;
        let t11 = self.tau1.norm_sqr();
        let t22 = quarter * self.tau2.norm_sqr();
        [
            [t11, cross.im, -cross.re],
            [T::zero(), t22, T::zero()],
            [T::zero(), T::zero(), t22],
        ]
    }
}

/// `tau(phi)` from the gradient of `phi`: `(-phi_{z2} / 2, (1 + i phi_{y1}) / 2)`.
pub fn tau_of_jet<T: Real>(jet: &Jet3<T>) -> TangentPair<T> {
    let w = jet.wirtinger();
    let half = lit::<T>(0.5);
    TangentPair {
        tau1: -w.d_z2 * half,
        tau2: Complex::new(half, half * w.d_y1),
    }
}

pub fn tau_of_phi<T: Real>(phi: &ScalarField3<T>, node: Node) -> Result<TangentPair<T>> {
    let t = tau_of_jet(&fd_jet(phi, node)?);
    TangentPair::new(t.tau1, t.tau2)
}

/// `|tau1|^2 v_{y1y1} + 2 Re(i tau1 conj(tau2) v_{y1 zb2}) + |tau2|^2 v_{z2 zb2}`.
pub fn delta_tau_complex<T: Real>(hess: &[[T; 3]; 3], tau: &TangentPair<T>) -> T {
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let v_y1_zb2 = Complex::new(half * hess[0][1], half * hess[0][2]);
    let v_z2_zb2 = quarter * (hess[1][1] + hess[2][2]);
    let i = Complex::new(T::zero(), T::one());
    let mixed = i * tau.tau1 * tau.tau2.conj() * v_y1_zb2;
    tau.tau1.norm_sqr() * hess[0][0] + lit::<T>(2.0) * mixed.re + tau.tau2.norm_sqr() * v_z2_zb2
}

/// `sum_{j <= k} T_jk v_jk` in the real coordinates.
pub fn delta_tau_real<T: Real>(hess: &[[T; 3]; 3], tau: &TangentPair<T>) -> T {
    let t = tau.real_coefficients();
    let mut acc = T::zero();
    for j in 0..3 {
        for k in j..3 {
            acc = acc + t[j][k] * hess[j][k];
        }
    }
    acc
}

fn consistency_tolerance<T: Real>(scale: T) -> T {
    let base = lit::<T>(1e-9).max(lit::<T>(1e3) * T::epsilon());
    base * T::one().max(scale)
}

/// `Delta_tau v` from a Hessian, evaluated in both forms; a disagreement
/// beyond rounding is reported as a consistency error.
pub fn delta_tau_jet<T: Real>(hess: &[[T; 3]; 3], tau: &TangentPair<T>) -> Result<T> {
    let a = delta_tau_complex(hess, tau);
    let b = delta_tau_real(hess, tau);
    let scale = hess.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
        * (tau.tau1.norm_sqr() + tau.tau2.norm_sqr());
    if !((a - b).abs() <= consistency_tolerance(scale)) {
        return Err(Error::Consistency(format!(
            "complex form {} and real form {} of Delta_tau disagree",
            to_f64(a),
            to_f64(b)
        )));
    }
    Ok(a)
}

/// `Delta_tau v` at a grid node with the Hessian of `v` from central differences.
pub fn delta_tau<T: Real>(v: &ScalarField3<T>, tau: &TangentPair<T>, node: Node) -> Result<T> {
    let jet = fd_jet(v, node)?;
    delta_tau_jet(&jet.hess, tau)
}
