use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::quadrature::integrate;
use crate::scalar::{lit, to_f64, CompensatedSum, Real};

/// Unnormalized radial profile `exp(-1 / (1 - r^2))` on `[0, 1)`.
pub fn profile(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

struct Constants {
    /// `1 / int_{B} profile(|x|) dx`
    normalization: f64,
    /// `int x1^2 theta(x) dx` for the unit-scale kernel
    m2: f64,
}

fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let r2 = integrate(|r: f64| profile(r) * r * r, 0.0, 1.0, 256, 8);
        let r4 = integrate(|r: f64| profile(r) * r.powi(4), 0.0, 1.0, 256, 8);
        Constants {
            normalization: 1.0 / (4.0 * std::f64::consts::PI * r2),
            m2: r4 / (3.0 * r2),
        }
    })
}

/// Scaled bump `theta_delta(x) = delta^-3 theta(x / delta)` together with its
/// discrete weights on a lattice of spacing `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BumpKernel<T> {
    delta: T,
    spacing: T,
    reach: usize,
    /// Lattice offsets and weights; the weights sum to one.
    weights: Vec<([isize; 3], T)>,
    /// Riemann sum of `theta_delta` before renormalization.
    quadrature_mass: f64,
}

/// Builds the kernel of radius `delta` on the lattice `h Z^3`.
pub fn make_kernel<T: Real>(delta: T, h: T) -> Result<BumpKernel<T>> {
    if !(delta > T::zero()) || !(h > T::zero()) {
        return Err(Error::Parameter(
            "kernel radius and spacing must be positive".into(),
        ));
    }
    let (d, hf) = (to_f64(delta), to_f64(h));
    if d < 2.0 * hf * (1.0 - 1e-12) {
        return Err(Error::UnderResolvedKernel {
            delta: d,
            spacing: hf,
        });
    }
    let reach = (d / hf).ceil() as usize;
    let k = reach as isize;
    let c = constants().normalization / (d * d * d);
    let mut raw = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                let r = hf * ((i * i + j * j + l * l) as f64).sqrt() / d;
                let w = c * profile(r) * hf * hf * hf;
                if w > 0.0 {
                    raw.push(([i, j, l], w));
                }
            }
        }
    }
    let mut mass = CompensatedSum::new();
    for (_, w) in &raw {
        mass.add(*w);
    }
    let total = mass.value();
    let weights = raw
        .into_iter()
        .map(|(o, w)| (o, lit::<T>(w / total)))
        .collect();
    Ok(BumpKernel {
        delta,
        spacing: h,
        reach,
        weights,
        quadrature_mass: total,
    })
}

impl<T: Real> BumpKernel<T> {
    /// Normalization constant of the unit-scale kernel.
    pub fn normalization() -> f64 {
        constants().normalization
    }

    /// Axis second moment `int x1^2 theta` of the unit-scale kernel.
    pub fn m2() -> f64 {
        constants().m2
    }

    /// Continuous density `theta_delta(x)`.
    pub fn density(&self, x: [T; 3]) -> T {
        let d = to_f64(self.delta);
        let r = (x.iter().map(|v| to_f64(*v).powi(2)).sum::<f64>()).sqrt() / d;
        lit(constants().normalization * profile(r) / (d * d * d))
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Largest offset, in cells, along any axis.
    pub fn reach(&self) -> usize {
        self.reach
    }

    pub fn weights(&self) -> &[([isize; 3], T)] {
        &self.weights
    }

    pub fn quadrature_mass(&self) -> f64 {
        self.quadrature_mass
    }

    /// Sum of the normalized weights (one up to rounding).
    pub fn mass(&self) -> T {
        let mut s = CompensatedSum::new();
        for (_, w) in &self.weights {
            s.add(*w);
        }
        s.value()
    }

    /// Discrete second moment of the weights along one axis.
    pub fn axis_moment(&self, axis: usize) -> T {
        let mut s = CompensatedSum::new();
        for (o, w) in &self.weights {
            let x = self.spacing * lit::<T>(o[axis] as f64);
            s.add(*w * x * x);
        }
        s.value()
    }
}

/// Cumulative distribution of the one-dimensional marginal of the unit-scale
/// kernel, `Theta(s) = int_{-1}^{s} int int theta(t, y, z) dy dz dt`.
///
/// Tabulated once on a uniform grid with the marginal density as slope data
/// and evaluated by cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct MarginalCdf {
    step: f64,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

const TABLE: usize = 8192;

impl MarginalCdf {
    pub fn new() -> Self {
        let c = constants().normalization;
        // theta~(s) = 2 pi c int_{|s|}^1 profile(r) r dr
        let dens = |s: f64| {
            let a = s.abs();
            if a >= 1.0 {
                0.0
            } else {
                2.0 * std::f64::consts::PI * c * integrate(|r: f64| profile(r) * r, a, 1.0, 32, 8)
            }
        };
        let step = 2.0 / TABLE as f64;
        let mut cdf = vec![0.0; TABLE + 1];
        let mut density = vec![0.0; TABLE + 1];
        for k in 0..=TABLE {
            density[k] = dens(-1.0 + k as f64 * step);
        }
        let mut acc = CompensatedSum::new();
        for k in 0..TABLE {
            let a = -1.0 + k as f64 * step;
            acc.add(integrate(dens, a, a + step, 1, 8));
            cdf[k + 1] = acc.value();
        }
        // symmetrize against the accumulated rounding
        let total = cdf[TABLE];
        for k in 0..=TABLE / 2 {
            let lo = cdf[k] / total;
            let hi = 1.0 - cdf[TABLE - k] / total;
            let v = 0.5 * (lo + hi);
            cdf[k] = v;
            cdf[TABLE - k] = 1.0 - v;
        }
        cdf[TABLE / 2] = 0.5;
        Self { step, cdf, density }
    }

    pub fn shared() -> &'static MarginalCdf {
        static M: OnceLock<MarginalCdf> = OnceLock::new();
        M.get_or_init(MarginalCdf::new)
    }

    /// Marginal density at `s`.
    pub fn density(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let (k, t) = self.locate(s);
        self.density[k] * (1.0 - t) + self.density[k + 1] * t
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let x = (s + 1.0) / self.step;
        let k = (x.floor() as usize).min(TABLE - 1);
        (k, x - k as f64)
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= -1.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        let (k, t) = self.locate(s);
        let (y0, y1) = (self.cdf[k], self.cdf[k + 1]);
        let (d0, d1) = (self.density[k] * self.step, self.density[k + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }
}

impl Default for MarginalCdf {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_have_unit_mass_and_support() {
        let k = make_kernel(0.1, 0.02).unwrap();
        assert!((k.mass() - 1.0f64).abs() < 1e-14);
        assert!((k.quadrature_mass() - 1.0).abs() < 1e-2);
        assert_eq!(k.density([0.1, 0.0, 0.0]), 0.0);
        assert_eq!(k.density([0.06, 0.06, 0.06]), 0.0);
        assert!(k.density([0.05, 0.0, 0.0]) > 0.0);
        for (o, _) in k.weights() {
            let r2 = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]) as f64;
            assert!(r2.sqrt() * 0.02 < 0.1);
        }
    }

    #[test]
    fn under_resolved_kernel_is_rejected() {
        assert!(matches!(
            make_kernel(0.01, 0.006),
            Err(Error::UnderResolvedKernel { .. })
        ));
        assert!(make_kernel(0.02, 0.01).is_ok());
    }

    #[test]
    fn discrete_moment_approaches_continuous() {
        let d = 0.1;
        let k = make_kernel(d, d / 12.0).unwrap();
        let m = k.axis_moment(1);
        assert!((m / (d * d) - BumpKernel::<f64>::m2()).abs() < 1e-6);
    }

    #[test]
    fn m2_from_independent_cartesian_quadrature() {
        // brute-force 3-D midpoint sum of x^2 theta on the unit ball
        let n = 160;
        let s = 2.0 / n as f64;
        let (mut mass, mut mom) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let p = [i, j, l].map(|k| -1.0 + (k as f64 + 0.5) * s);
                    let w = profile((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
                    mass += w;
                    mom += w * p[0] * p[0];
                }
            }
        }
        assert!((mom / mass - BumpKernel::<f64>::m2()).abs() < 1e-7);
        assert!((mass * s * s * s * BumpKernel::<f64>::normalization() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn marginal_cdf_is_a_distribution() {
        let m = MarginalCdf::shared();
        assert_eq!(m.cdf(-1.0), 0.0);
        assert_eq!(m.cdf(1.0), 1.0);
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 0..=1000 {
            let s = -1.0 + k as f64 * 0.002;
            let v = m.cdf(s);
            assert!(v >= prev - 1e-15);
            assert!((v + m.cdf(-s) - 1.0).abs() < 1e-13);
            prev = v;
        }
        // variance of the marginal equals the axis moment
        let var = integrate(|s: f64| s * s * m.density(s), -1.0, 1.0, 512, 4);
        assert!((var - BumpKernel::<f64>::m2()).abs() < 1e-6);
    }
}
