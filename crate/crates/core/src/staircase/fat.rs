use serde::{Deserialize, Serialize};

use super::cantor::CantorSystem;
use super::iterates::staircase_f;
use crate::error::{Error, Result};
use crate::mollify::{LiftedProfile, PiecewiseQuadratic};
use crate::scalar::{lit, to_f64, Exact, Real};

/// `F(x) = int_0^x (f_N(t) - t) 1_{[0,1]}(t) dt`, integrated exactly.
///
/// `F'' = -1` on every removed interval and `l_N - 1` on every `I[N][i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FatF<T> {
    profile: PiecewiseQuadratic<T>,
    /// Breakpoints `(x, f_N(x))`.
    staircase: Vec<(T, T)>,
    generations: usize,
    alpha1: T,
    first_interval: (T, T),
}

/// Builds `F` from the staircase of generation `n`.
pub fn fat_f<E: Exact, T: Real>(system: &CantorSystem<E>, n: usize) -> Result<FatF<T>> {
    let it = staircase_f(system, n)?;
    let pts = it.breakpoints(n);
    let slope_n = to_f64(it.slope(n));
    let staircase: Vec<(T, T)> = pts
        .iter()
        .map(|(x, f)| (lit::<T>(to_f64(x.clone())), lit::<T>(to_f64(f.clone()))))
        .collect();
    let breaks: Vec<T> = staircase.iter().map(|p| p.0).collect();
    let second: Vec<T> = pts
        .windows(2)
        .map(|w| {
            if w[0].1 == w[1].1 {
                -T::one()
            } else {
                lit::<T>(slope_n - 1.0)
            }
        })
        .collect();
    let i11 = &system.retained(1.min(system.generations()))[0];
    Ok(FatF {
        profile: PiecewiseQuadratic::new(breaks, second)?,
        staircase,
        generations: n,
        alpha1: lit(to_f64(system.alphas()[0].clone())),
        first_interval: (lit(to_f64(i11.a.clone())), lit(to_f64(i11.b.clone()))),
    })
}

impl<T: Real> FatF<T> {
    pub fn value(&self, x: T) -> T {
        if x <= T::zero() || x >= T::one() {
            return T::zero();
        }
        self.profile.value(x)
    }

    pub fn first(&self, x: T) -> T {
        self.profile.first(x)
    }

    /// Right-continuous second derivative.
    pub fn second(&self, x: T) -> T {
        self.profile.second(x)
    }

    pub fn staircase(&self, x: T) -> T {
        let pts = &self.staircase;
        if x <= T::zero() {
            return T::zero();
        }
        if x >= T::one() {
            return T::one();
        }
        let k = pts.partition_point(|p| p.0 <= x) - 1;
        let ((x0, f0), (x1, f1)) = (pts[k], pts[k + 1]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    pub fn profile(&self) -> &PiecewiseQuadratic<T> {
        &self.profile
    }

    pub fn generations(&self) -> usize {
        self.generations
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }

    /// `I[1][1]`.
    pub fn first_interval(&self) -> (T, T) {
        self.first_interval
    }

    /// `l_1 = (1 - alpha_1)^{-1}`.
    pub fn slope1(&self) -> T {
        T::one() / (T::one() - self.alpha1)
    }

    /// Uniform distance to the limit function, `2^{-N+1}`.
    pub fn limit_error_bound(&self) -> f64 {
        2f64.powi(1 - self.generations as i32)
    }

    /// `max |F|`, attained at a breakpoint or at a zero of `F'` inside a piece.
    pub fn sup_norm(&self) -> T {
        let b = self.profile.breaks();
        let mut m = T::zero();
        for k in 0..b.len() {
            m = m.max(self.value(b[k]).abs());
            if k + 1 < b.len() {
                let (d0, d1) = (self.first(b[k]), self.first(b[k + 1]));
                if d0 * d1 < T::zero() {
                    let c = self.profile.second_values()[k];
                    m = m.max(self.value(b[k] - d0 / c).abs());
                }
            }
        }
        m
    }

    /// Breakpoints of `F''` in `(0, 1)`.
    pub fn kinks(&self) -> &[T] {
        self.profile.breaks()
    }
}

impl FatF<f64> {
    /// `v(xi) = amplitude F(xi1 + shift)` as a lifted profile.
    pub fn lifted(&self, amplitude: f64, shift: f64) -> LiftedProfile {
        LiftedProfile::new(self.profile.clone(), amplitude, shift)
    }

    /// Pair `(v, phi)` for the mollification certificate on `|xi1| < 1/2`:
    /// `phi = F(xi1 + 1/2) + xi1 xi2 / 2`, so `tau_1(phi)` varies, and
    /// `v = F(xi1 + 1/2) - (l_N - 1) xi1^2 / 2`, with `v_11 = -l_N` on the gaps
    /// and `0` on the retained intervals. Then `-Delta_{tau(phi)} v >= 0` with
    /// equality on the retained intervals.
    pub fn lifted_certificate_case(&self) -> (LiftedProfile, LiftedProfile) {
        let top = self
            .profile
            .second_values()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let v = self
            .lifted(1.0, 0.5)
            .with_quadratic([0.0; 3], [[-top, 0.0, 0.0], [0.0; 3], [0.0; 3]]);
        let phi = self
            .lifted(1.0, 0.5)
            .with_quadratic([0.0; 3], [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0; 3]]);
        (v, phi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBound {
    pub delta0: f64,
    pub samples: usize,
    /// `min_s F(x0+s) - F(x0) - s F'(x0) - L s^2`.
    pub min_margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct X0 {
    pub x0: f64,
    pub l: f64,
    /// Leftmost minimizer of `g(x) = f_N(x) - l_1 x` over `I[1][1]`.
    pub argmin: f64,
    /// `g(argmin)`.
    pub g_min: f64,
    /// Sampled margin of the quadratic bound at `argmin`; negative when it fails there.
    pub argmin_margin: f64,
    /// Largest radius on which the bound at `x0` holds, found exactly.
    pub certified_radius: f64,
    pub bound: QuadraticBound,
}

fn sampled_margin<T: Real>(f: &FatF<T>, x0: T, l: T, delta0: T, samples: usize) -> T {
    let f0 = f.value(x0);
    let d0 = f.first(x0);
    let mut min_margin = T::infinity();
    for k in 0..samples {
        let s = delta0 * (lit::<T>((2 * k + 1) as f64 / samples as f64) - T::one());
        min_margin = min_margin.min(f.value(x0 + s) - f0 - s * d0 - l * s * s);
    }
    min_margin
}

/// Distance `u <= cap` up to which `m(u) = F(x0 + dir u) - F(x0) - dir u F'(x0) - l u^2`
/// stays above `-tol`. `m` is piecewise quadratic, so each piece is solved directly.
fn certified_side<T: Real>(f: &FatF<T>, x0: T, l: T, cap: T, tol: T, dir: T) -> T {
    let kinks = f.kinks();
    let (mut u, mut m, mut d) = (T::zero(), T::zero(), T::zero());
    while u < cap {
        let x = x0 + dir * u;
        let next_kink = if dir > T::zero() {
            let k = kinks.partition_point(|b| *b <= x);
            kinks.get(k).map_or(cap, |b| *b - x0)
        } else {
            let k = kinks.partition_point(|b| *b < x);
            if k == 0 {
                cap
            } else {
                x0 - kinks[k - 1]
            }
        };
        let next = next_kink.min(cap);
        let len = next - u;
        let c = f.second(x0 + dir * (u + lit::<T>(0.5) * len)) - lit::<T>(2.0) * l;
        let q = |t: T| m + d * t + lit::<T>(0.5) * c * t * t;
        let mut bad = None;
        if q(len) < -tol {
            bad = Some(len);
        } else if c > T::zero() && d < T::zero() && -d / c < len && q(-d / c) < -tol {
            bad = Some(-d / c);
        }
        if let Some(hi) = bad {
            let (mut lo, mut hi) = (T::zero(), hi);
            for _ in 0..200 {
                let mid = lit::<T>(0.5) * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if q(mid) < -tol {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            return u + lo;
        }
        m = q(len);
        d = d + c * len;
        u = next;
    }
    cap
}

/// Point `x0` in `I[1][1]` with `F(x0 + s) >= F(x0) + s F'(x0) + L s^2` for
/// `|s| < delta0`, `L = (l_1 - 1) / 2`, and the sampled check of that bound at
/// `samples` offsets.
///
/// The minimizer of `g(x) = f_N(x) - l_1 x` only gives the bound for `s >= 0`:
/// it sits at the right end of a gap, where `F'' = -1` on the left. So `x0` is
/// taken among midpoints of retained pieces of `I[1][1]`, maximizing the radius
/// on which the bound holds (leftmost on ties). The minimizer is still reported.
pub fn find_x0<T: Real>(f: &FatF<T>, samples: usize) -> Result<X0> {
    if f.generations < 3 {
        return Err(Error::Parameter(format!(
            "need at least 3 generations, got {}",
            f.generations
        )));
    }
    let (a, b) = f.first_interval;
    let l1 = f.slope1();
    let l = lit::<T>(0.5) * (l1 - T::one());
    let half = lit::<T>(0.5);
    let default_delta = |x: T| lit::<T>(0.05).min(half * (x - a).min(b - x));
    let scale = T::one().max(f.sup_norm());
    let tol = lit::<T>(64.0) * T::epsilon() * scale;

    let mut argmin: Option<(T, T)> = None;
    for &(x, fx) in &f.staircase {
        if x < a || x > b {
            continue;
        }
        let g = fx - l1 * x;
        if argmin.map_or(true, |(_, gb)| g < gb) {
            argmin = Some((x, g));
        }
    }
    let (xm, g_min) =
        argmin.ok_or_else(|| Error::Construction("no breakpoints in I[1][1]".into()))?;
    let argmin_margin = sampled_margin(f, xm, l, default_delta(xm), samples);

    let mut best: Option<(T, T)> = None;
    for w in f.staircase.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 <= y0 || x0 < a || x1 > b {
            continue;
        }
        let x = half * (x0 + x1);
        let cap = default_delta(x);
        let r = certified_side(f, x, l, cap, tol, T::one()).min(certified_side(
            f,
            x,
            l,
            cap,
            tol,
            -T::one(),
        ));
        if best.map_or(true, |(_, rb)| r > rb * lit::<T>(1.0 + 1e-12)) {
            best = Some((x, r));
        }
    }
    let (x0, radius) =
        best.ok_or_else(|| Error::Construction("no retained piece in I[1][1]".into()))?;
    if !(radius > T::zero()) {
        return Err(Error::Construction(
            "no point of I[1][1] carries the quadratic bound".into(),
        ));
    }
    let delta0 = radius;
    let min_margin = sampled_margin(f, x0, l, delta0, samples);
    let passed = min_margin >= -tol;
    let out = X0 {
        x0: to_f64(x0),
        l: to_f64(l),
        argmin: to_f64(xm),
        g_min: to_f64(g_min),
        argmin_margin: to_f64(argmin_margin),
        certified_radius: to_f64(radius),
        bound: QuadraticBound {
            delta0: to_f64(delta0),
            samples,
            min_margin: to_f64(min_margin),
            passed,
        },
    };
    if !passed {
        return Err(Error::Construction(format!(
            "quadratic lower bound fails at x0 = {} by {}",
            out.x0, out.bound.min_margin
        )));
    }
    Ok(out)
}
