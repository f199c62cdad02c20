use serde::{Deserialize, Serialize};

use super::kernel::MarginalCdf;
use crate::error::{Error, Result};
use crate::field::{Grid3, Jet3, KinkPlane, Regularity, ScalarField3};
use crate::scalar::{lit, to_f64, Real};

/// `C^{1,1}` function of one variable whose second derivative is piecewise
/// constant on `[breaks[0], breaks[M]]` and zero outside; value and slope
/// vanish to the left of `breaks[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PiecewiseQuadratic<T = f64> {
    breaks: Vec<T>,
    second: Vec<T>,
    first_at: Vec<T>,
    value_at: Vec<T>,
}

impl<T: Real> PiecewiseQuadratic<T> {
    pub fn new(breaks: Vec<T>, second: Vec<T>) -> Result<Self> {
        if breaks.len() != second.len() + 1 || second.is_empty() {
            return Err(Error::Parameter(
                "need one second-derivative value per piece".into(),
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter(
                "breakpoints must increase strictly".into(),
            ));
        }
        let half = lit::<T>(0.5);
        let mut first_at = vec![T::zero(); breaks.len()];
        let mut value_at = vec![T::zero(); breaks.len()];
        for k in 0..second.len() {
            let l = breaks[k + 1] - breaks[k];
            first_at[k + 1] = first_at[k] + second[k] * l;
            value_at[k + 1] = value_at[k] + first_at[k] * l + half * second[k] * l * l;
        }
        Ok(Self {
            breaks,
            second,
            first_at,
            value_at,
        })
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn second_values(&self) -> &[T] {
        &self.second
    }

    pub fn max_abs_second(&self) -> T {
        self.second.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Index of the piece containing `x` (right-continuous), `None` outside.
    fn piece(&self, x: T) -> Option<usize> {
        let m = self.second.len();
        if x < self.breaks[0] || x >= self.breaks[m] {
            return None;
        }
        Some(self.breaks.partition_point(|&b| b <= x) - 1)
    }

    pub fn value(&self, x: T) -> T {
        let m = self.second.len();
        if x < self.breaks[0] {
            return T::zero();
        }
        if x >= self.breaks[m] {
            return self.value_at[m] + self.first_at[m] * (x - self.breaks[m]);
        }
        let k = self.piece(x).unwrap_or(0);
        let d = x - self.breaks[k];
        self.value_at[k] + self.first_at[k] * d + lit::<T>(0.5) * self.second[k] * d * d
    }

    pub fn first(&self, x: T) -> T {
        let m = self.second.len();
        if x < self.breaks[0] {
            return T::zero();
        }
        if x >= self.breaks[m] {
            return self.first_at[m];
        }
        let k = self.piece(x).unwrap_or(0);
        self.first_at[k] + self.second[k] * (x - self.breaks[k])
    }

    pub fn second(&self, x: T) -> T {
        self.piece(x).map_or(T::zero(), |k| self.second[k])
    }

    /// `(F'' * theta~_delta)(x)` with the 1-D marginal of the 3-D bump,
    /// computed exactly piece by piece from the marginal distribution.
    pub fn mollified_second(&self, x: T, delta: T, cdf: &MarginalCdf) -> T {
        let m = self.second.len();
        let (lo, hi) = (x - delta, x + delta);
        if hi <= self.breaks[0] || lo >= self.breaks[m] {
            return T::zero();
        }
        let first = self.breaks.partition_point(|&b| b <= lo).saturating_sub(1);
        let (xf, df) = (to_f64(x), to_f64(delta));
        let mut acc = T::zero();
        for k in first..m {
            let (a, b) = (self.breaks[k], self.breaks[k + 1]);
            if a >= hi {
                break;
            }
            let w = cdf.cdf((xf - to_f64(a)) / df) - cdf.cdf((xf - to_f64(b)) / df);
            acc = acc + self.second[k] * lit::<T>(w);
        }
        acc
    }
}

/// `v(xi) = a F(xi1 + s) + b . xi + xi^T Q xi / 2` for a piecewise quadratic `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedProfile {
    pub profile: PiecewiseQuadratic<f64>,
    pub amplitude: f64,
    pub shift: f64,
    pub linear: [f64; 3],
    pub hessian: [[f64; 3]; 3],
}

impl LiftedProfile {
    pub fn new(profile: PiecewiseQuadratic<f64>, amplitude: f64, shift: f64) -> Self {
        Self {
            profile,
            amplitude,
            shift,
            linear: [0.0; 3],
            hessian: [[0.0; 3]; 3],
        }
    }

    pub fn with_quadratic(mut self, linear: [f64; 3], hessian: [[f64; 3]; 3]) -> Self {
        self.linear = linear;
        self.hessian = hessian;
        self
    }

    pub fn value(&self, xi: [f64; 3]) -> f64 {
        let mut q = 0.0;
        for a in 0..3 {
            q += self.linear[a] * xi[a];
            for b in 0..3 {
                q += 0.5 * self.hessian[a][b] * xi[a] * xi[b];
            }
        }
        self.amplitude * self.profile.value(xi[0] + self.shift) + q
    }

    /// Exact gradient and (almost everywhere) Hessian.
    pub fn jet(&self, xi: [f64; 3]) -> Jet3<f64> {
        let x = xi[0] + self.shift;
        let mut grad = self.linear;
        for a in 0..3 {
            for b in 0..3 {
                grad[a] += self.hessian[a][b] * xi[b];
            }
        }
        grad[0] += self.amplitude * self.profile.first(x);
        let mut hess = self.hessian;
        hess[0][0] += self.amplitude * self.profile.second(x);
        Jet3 { grad, hess }
    }

    /// Hessian of `v * theta_delta` at `xi`.
    pub fn mollified_hessian(&self, xi: [f64; 3], delta: f64, cdf: &MarginalCdf) -> [[f64; 3]; 3] {
        let mut hess = self.hessian;
        hess[0][0] += self.amplitude
            * self
                .profile
                .mollified_second(xi[0] + self.shift, delta, cdf);
        hess
    }

    /// Samples the profile on a grid, declaring its breakpoints as kinks.
    pub fn to_field(&self, grid: &Grid3<f64>) -> Result<ScalarField3<f64>> {
        let q = self
            .hessian
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let constant = self.amplitude.abs() * self.profile.max_abs_second() + 3.0 * q;
        let kinks = self
            .profile
            .breaks()
            .iter()
            .map(|&b| KinkPlane {
                axis: 0,
                coordinate: b - self.shift,
            })
            .collect();
        Ok(
            ScalarField3::from_fn(grid.clone(), Regularity::C11 { constant }, |p| {
                self.value(p)
            })?
            .with_kinks(kinks),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::quadrature::integrate;

    fn hat() -> PiecewiseQuadratic<f64> {
        // F'' = 1, -1, -1, 1 on quarters of [0, 1]: F' is a tent pair, F(1) = 0
        PiecewiseQuadratic::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![1.0, -1.0, -1.0, 1.0])
            .unwrap()
    }

    #[test]
    fn integrates_second_derivative() {
        let f = hat();
        assert_eq!(f.first(1.0), 0.0);
        assert!((f.value(0.25) - 1.0 / 32.0).abs() < 1e-16);
        assert!(f.value(1.0).abs() < 1e-16 && f.value(2.0).abs() < 1e-16);
        assert_eq!(f.second(0.25), -1.0);
        assert_eq!(f.second(-0.1), 0.0);
        let (x, e) = (0.6, 1e-6);
        assert!(((f.value(x + e) - f.value(x - e)) / (2.0 * e) - f.first(x)).abs() < 1e-9);
    }

    #[test]
    fn mollified_second_matches_direct_quadrature() {
        let f = hat();
        let cdf = MarginalCdf::shared();
        let delta = 0.07;
        let c = super::super::kernel::BumpKernel::<f64>::normalization();
        let marginal = |s: f64| {
            2.0 * std::f64::consts::PI
                * c
                * integrate(
                    |r: f64| super::super::kernel::profile(r) * r,
                    s.abs().min(1.0),
                    1.0,
                    16,
                    8,
                )
        };
        for &x in &[-0.05, 0.02, 0.24, 0.26, 0.5, 0.71, 0.99, 1.05] {
            let mut direct = 0.0;
            for (k, w) in f.breaks().windows(2).enumerate() {
                let lo = (x - w[1]).max(-delta);
                let hi = (x - w[0]).min(delta);
                if lo < hi {
                    direct += f.second_values()[k]
                        * integrate(|t: f64| marginal(t / delta) / delta, lo, hi, 64, 8);
                }
            }
            let exact = f.mollified_second(x, delta, cdf);
            assert!(
                (direct - exact).abs() < 1e-10,
                "x = {x}: {direct} vs {exact}"
            );
        }
        assert_eq!(f.mollified_second(0.125, 0.1, cdf), 1.0);
        assert_eq!(f.mollified_second(1.2, 0.1, cdf), 0.0);
    }

    #[test]
    fn lifted_jet_includes_quadratic() {
        let v = LiftedProfile::new(hat(), 2.0, 0.5).with_quadratic(
            [0.0, 1.0, 0.0],
            [[0.0; 3], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
        );
        let j = v.jet([0.0, 0.3, 0.1]);
        assert!((j.grad[1] - 0.7).abs() < 1e-15);
        assert_eq!(j.hess[0][0], -2.0);
        assert_eq!(j.hess[2][2], -1.0);
    }
}
