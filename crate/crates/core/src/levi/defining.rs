use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::polynomial::Graph3;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// First and second Wirtinger derivatives of a defining function of two
/// complex variables at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LeviJet<T> {
    pub rho_z1: Complex<T>,
    pub rho_z2: Complex<T>,
    pub rho_z1_zb1: T,
    pub rho_z2_zb2: T,
    pub rho_z1_zb2: Complex<T>,
}

impl<T: Real> LeviJet<T> {
    /// Euclidean norm of the real gradient, `2 sqrt(|rho_z1|^2 + |rho_z2|^2)`.
    pub fn gradient_norm(&self) -> T {
        lit::<T>(2.0) * (self.rho_z1.norm_sqr() + self.rho_z2.norm_sqr()).sqrt()
    }

    /// Builds the jet from the real gradient and Hessian in the coordinates
    /// `(x1, y1, x2, y2)`.
    pub fn from_real(grad: [T; 4], hess: [[T; 4]; 4]) -> Self {
        let half = lit::<T>(0.5);
        let quarter = lit::<T>(0.25);
        let dz = |j: usize| Complex::new(half * grad[2 * j], -half * grad[2 * j + 1]);
        let dzzb = |j: usize, k: usize| {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            Complex::new(
                quarter * (hess[xj][xk] + hess[yj][yk]),
                quarter * (hess[xj][yk] - hess[yj][xk]),
            )
        };
        Self {
            rho_z1: dz(0),
            rho_z2: dz(1),
            rho_z1_zb1: dzzb(0, 0).re,
            rho_z2_zb2: dzzb(1, 1).re,
            rho_z1_zb2: dzzb(0, 1),
        }
    }
}

/// Defining function `rho` on a neighbourhood in `C^2`, with the domain on the
/// side `rho < 0`.
pub trait Defining2<T: Real>: Sync {
    fn value(&self, z: [Complex<T>; 2]) -> T;
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>>;
}

/// Levi expression of a jet, without the gradient check.
pub fn levi_from_jet<T: Real>(j: &LeviJet<T>) -> T {
    let mixed = j.rho_z1_zb2 * j.rho_z1.conj() * j.rho_z2;
    j.rho_z1_zb1 * j.rho_z2.norm_sqr() + j.rho_z2_zb2 * j.rho_z1.norm_sqr()
        - lit::<T>(2.0) * mixed.re
}

/// `rho_{z1 zb1}|rho_{z2}|^2 + rho_{z2 zb2}|rho_{z1}|^2 - 2 Re(rho_{z1 zb2} rho_{zb1} rho_{z2})`
/// at `z`, rejecting points where `|grad rho| < c0`.
pub fn levi_condition_2d<T: Real, D: Defining2<T> + ?Sized>(
    rho: &D,
    z: [Complex<T>; 2],
    c0: T,
) -> Result<T> {
    let jet = rho.levi_jet(z)?;
    let norm = jet.gradient_norm();
    if !(norm >= c0) || norm == T::zero() {
        return Err(Error::DegeneratePoint {
            norm: to_f64(norm),
            min: to_f64(c0),
        });
    }
    let l = levi_from_jet(&jet);
    if !l.is_finite() {
        return Err(Error::NonFinite("levi expression".into()));
    }
    Ok(l)
}

/// `|z1|^2 + |z2|^2 - 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ball;

impl<T: Real> Defining2<T> for Ball {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        z[0].norm_sqr() + z[1].norm_sqr() - T::one()
    }
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        Ok(LeviJet {
            rho_z1: z[0].conj(),
            rho_z2: z[1].conj(),
            rho_z1_zb1: T::one(),
            rho_z2_zb2: T::one(),
            rho_z1_zb2: Complex::new(T::zero(), T::zero()),
        })
    }
}

/// `Re z1 - |z2|^2`, whose sublevel set `Re z1 < |z2|^2` is not pseudoconvex.
#[derive(Clone, Copy, Debug, Default)]
pub struct G2Model;

impl<T: Real> Defining2<T> for G2Model {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        z[0].re - z[1].norm_sqr()
    }
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        Ok(LeviJet {
            rho_z1: Complex::new(lit(0.5), T::zero()),
            rho_z2: -z[1].conj(),
            rho_z1_zb1: T::zero(),
            rho_z2_zb2: -T::one(),
            rho_z1_zb2: Complex::new(T::zero(), T::zero()),
        })
    }
}

/// `Re z1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Hyperplane;

impl<T: Real> Defining2<T> for Hyperplane {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        z[0].re
    }
    fn levi_jet(&self, _z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        Ok(LeviJet {
            rho_z1: Complex::new(lit(0.5), T::zero()),
            rho_z2: zero,
            rho_z1_zb1: T::zero(),
            rho_z2_zb2: T::zero(),
            rho_z1_zb2: zero,
        })
    }
}

/// A real function of one complex variable with its Wirtinger derivatives
/// `phi_z` and `phi_{z zb} = Delta phi / 4`.
pub trait PlanarJet<T: Real>: Sync {
    fn value(&self, z: Complex<T>) -> Result<T>;
    fn d_z(&self, z: Complex<T>) -> Result<Complex<T>>;
    fn d_z_zb(&self, z: Complex<T>) -> Result<T>;
}

/// `|w|^2 - exp(2 phi(z))` for the Hartogs domain `{log|w| < phi(z)}`.
#[derive(Clone, Debug)]
pub struct HartogsLifted<P> {
    pub cap: P,
}

impl<P> HartogsLifted<P> {
    pub fn new(cap: P) -> Self {
        Self { cap }
    }
}

impl<T: Real, P: PlanarJet<T>> Defining2<T> for HartogsLifted<P> {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        match self.cap.value(z[0]) {
            Ok(p) => z[1].norm_sqr() - (lit::<T>(2.0) * p).exp(),
            Err(_) => T::nan(),
        }
    }
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        let p = self.cap.value(z[0])?;
        let pz = self.cap.d_z(z[0])?;
        let pzz = self.cap.d_z_zb(z[0])?;
        let e = (lit::<T>(2.0) * p).exp();
        Ok(LeviJet {
            rho_z1: pz * (-lit::<T>(2.0) * e),
            rho_z2: z[1].conj(),
            rho_z1_zb1: -e * (lit::<T>(2.0) * pzz + lit::<T>(4.0) * pz.norm_sqr()),
            rho_z2_zb2: T::one(),
            rho_z1_zb2: Complex::new(T::zero(), T::zero()),
        })
    }
}

/// `x1 - phi(y1, z2)` with derivatives taken exactly from the graph function.
#[derive(Clone, Debug)]
pub struct GraphDefining<G> {
    pub phi: G,
}

impl<G> GraphDefining<G> {
    pub fn new(phi: G) -> Self {
        Self { phi }
    }
}

impl<T: Real, G: Graph3<T>> Defining2<T> for GraphDefining<G> {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        z[0].re - self.phi.value([z[0].im, z[1].re, z[1].im])
    }
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        let w = self.phi.jet([z[0].im, z[1].re, z[1].im]).wirtinger();
        let half = lit::<T>(0.5);
        Ok(LeviJet {
            rho_z1: Complex::new(half, half * w.d_y1),
            rho_z2: -w.d_z2,
            rho_z1_zb1: -lit::<T>(0.25) * w.d_y1y1,
            rho_z2_zb2: -w.d_z2_zb2,
            rho_z1_zb2: Complex::new(T::zero(), half) * w.d_y1_zb2,
        })
    }
}

/// Defining function given by samples of a closure in `(x1, y1, x2, y2)`;
/// derivatives come from central differences with step `h`.
pub struct SampledDefining<F> {
    f: F,
    h: f64,
}

impl<F> SampledDefining<F> {
    pub fn new(f: F, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!(
                "difference step must be positive, got {h}"
            )));
        }
        Ok(Self { f, h })
    }
}

impl<T: Real, F: Fn([T; 4]) -> T + Sync> Defining2<T> for SampledDefining<F> {
    fn value(&self, z: [Complex<T>; 2]) -> T {
        (self.f)([z[0].re, z[0].im, z[1].re, z[1].im])
    }
    fn levi_jet(&self, z: [Complex<T>; 2]) -> Result<LeviJet<T>> {
        let x = [z[0].re, z[0].im, z[1].re, z[1].im];
        let h = lit::<T>(self.h);
        let at = |da: [i32; 4]| {
            let mut p = x;
            for a in 0..4 {
                p[a] = p[a] + h * lit::<T>(da[a] as f64);
            }
            (self.f)(p)
        };
        let e = |a: usize, s: i32| {
            let mut d = [0i32; 4];
            d[a] = s;
            d
        };
        let f0 = at([0; 4]);
        let mut grad = [T::zero(); 4];
        let mut hess = [[T::zero(); 4]; 4];
        let two = lit::<T>(2.0);
        for a in 0..4 {
            let fp = at(e(a, 1));
            let fm = at(e(a, -1));
            grad[a] = (fp - fm) / (two * h);
            hess[a][a] = (fp - two * f0 + fm) / (h * h);
            for b in a + 1..4 {
                let mut pp = [0i32; 4];
                pp[a] = 1;
                pp[b] = 1;
                let mut pm = pp;
                pm[b] = -1;
                let mut mp = pp;
                mp[a] = -1;
                let mut mm = pm;
                mm[a] = -1;
                let v = (at(pp) - at(pm) - at(mp) + at(mm)) / (lit::<T>(4.0) * h * h);
                hess[a][b] = v;
                hess[b][a] = v;
            }
        }
        if grad
            .iter()
            .chain(hess.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("sampled defining function".into()));
        }
        Ok(LeviJet::from_real(grad, hess))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levi::polynomial::{BallCap, Poly3};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn built_in_examples() {
        let one = levi_condition_2d(&Ball, [c(1.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap();
        assert!((one - 1.0).abs() < 1e-15);
        let zero = levi_condition_2d(&Hyperplane, [c(0.3, -1.0), c(2.0, 0.5)], 1e-6).unwrap();
        assert_eq!(zero, 0.0);
        let g2 = levi_condition_2d(&G2Model, [c(0.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap();
        assert!((g2 + 0.25).abs() < 1e-15);
    }

    #[test]
    fn vanishing_gradient_is_rejected() {
        let err = levi_condition_2d(&Ball, [c(0.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoint { .. }));
    }

    #[test]
    fn sampled_route_matches_symbolic_ball() {
        let s = SampledDefining::new(
            |x: [f64; 4]| x.iter().map(|v| v * v).sum::<f64>() - 1.0,
            1e-3,
        )
        .unwrap();
        let p = [c(0.6, 0.0), c(0.0, 0.8)];
        let a = levi_condition_2d(&s, p, 1e-6).unwrap();
        let b = levi_condition_2d(&Ball, p, 1e-6).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    struct DiscCap;

    impl PlanarJet<f64> for DiscCap {
        fn value(&self, z: Complex<f64>) -> Result<f64> {
            Ok(0.5 * (1.0 - z.norm_sqr()).ln())
        }
        fn d_z(&self, z: Complex<f64>) -> Result<Complex<f64>> {
            Ok(-z.conj() * (0.5 / (1.0 - z.norm_sqr())))
        }
        fn d_z_zb(&self, z: Complex<f64>) -> Result<f64> {
            Ok(-0.5 / (1.0 - z.norm_sqr()).powi(2))
        }
    }

    #[test]
    fn hartogs_lift_of_disc_cap_is_the_ball() {
        let lifted = HartogsLifted::new(DiscCap);
        for &(z, w) in &[(c(0.3, 0.2), 0.0), (c(-0.5, 0.1), 0.4)] {
            let r = (1.0 - Complex::<f64>::norm_sqr(&z)).sqrt();
            let w = c(w, (r * r - w * w).sqrt());
            let p = [z, w];
            let a = levi_condition_2d(&lifted, p, 1e-6).unwrap();
            let b = levi_condition_2d(&Ball, p, 1e-6).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn graph_of_sphere_is_pseudoconvex() {
        let rho = GraphDefining::new(BallCap);
        let l = levi_condition_2d(&rho, [c(0.0, 0.1), c(0.2, -0.1)], 1e-6).unwrap();
        assert!(l > 0.0);
        let g2 = GraphDefining::new(Poly3::new(vec![(1.0, [0, 2, 0]), (1.0, [0, 0, 2])]));
        let v = levi_condition_2d(&g2, [c(0.0, 0.0), c(0.0, 0.0)], 1e-6).unwrap();
        assert!((v + 0.25).abs() < 1e-15);
    }
}
