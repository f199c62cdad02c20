use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::quadrature::gauss_legendre;
use crate::field::{circle_mean, DiscField};
use crate::scalar::{to_f64, CompensatedSum, Real};

/// Both sides of the mean-value form of Green's formula on `D(0, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenIdentity {
    pub r: f64,
    /// Mean of `u` over the circle `|zeta| = r`.
    pub circle_mean: f64,
    pub centre_value: f64,
    /// `int_{D(0,r)} log(r/|zeta|) Delta u`.
    pub area_integral: f64,
    /// `(1/r) int_{|zeta|=r} u`, i.e. `2 pi` times the circle mean.
    pub raw_lhs: f64,
    /// `u(0) + int log(r/|zeta|) Delta u`.
    pub raw_rhs: f64,
    /// `u(0) + area_integral / (2 pi)`.
    pub normalized_rhs: f64,
    pub residual: f64,
}

/// Antiderivative of `ln |zeta|` in both variables.
fn log_antiderivative(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let t = |a: f64, b: f64| {
        if a == 0.0 {
            0.0
        } else {
            a * a * (b / a).atan()
        }
    };
    let xy_log = if r2 == 0.0 { 0.0 } else { x * y * r2.ln() };
    0.5 * (xy_log - 3.0 * x * y + t(x, y) + t(y, x))
}

/// `int_{[x0,x1] x [y0,y1]} log(r / |zeta|)` in closed form.
pub fn log_weight_rectangle(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    let g = log_antiderivative;
    let log_part = g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0);
    (x1 - x0) * (y1 - y0) * r.ln() - log_part
}

/// Integral of `log(r/|zeta|)` over the part of a square cell inside `D(0, r)`.
fn clipped_cell_weight(cx: f64, cy: f64, h: f64, r: f64) -> f64 {
    let (x0, x1, y0, y1) = (cx - 0.5 * h, cx + 0.5 * h, cy - 0.5 * h, cy + 0.5 * h);
    let near_x = if x0 > 0.0 {
        x0
    } else if x1 < 0.0 {
        -x1
    } else {
        0.0
    };
    let near_y = if y0 > 0.0 {
        y0
    } else if y1 < 0.0 {
        -y1
    } else {
        0.0
    };
    if near_x.hypot(near_y) >= r {
        return 0.0;
    }
    let far = x0.abs().max(x1.abs()).hypot(y0.abs().max(y1.abs()));
    if far <= r {
        return log_weight_rectangle(x0, x1, y0, y1, r);
    }
    // The weight vanishes on the circle, so the clipped integrand is continuous.
    const SUB: usize = 16;
    let (nodes, weights) = gauss_legendre::<f64>(2);
    let s = h / SUB as f64;
    let mut acc = CompensatedSum::new();
    for a in 0..SUB {
        for b in 0..SUB {
            let (ax, ay) = (x0 + a as f64 * s, y0 + b as f64 * s);
            for (p, wp) in nodes.iter().zip(&weights) {
                for (q, wq) in nodes.iter().zip(&weights) {
                    let x = ax + 0.5 * s * (p + 1.0);
                    let y = ay + 0.5 * s * (q + 1.0);
                    let rho = x.hypot(y);
                    if rho < r {
                        acc.add(0.25 * s * s * wp * wq * (r / rho).ln());
                    }
                }
            }
        }
    }
    acc.value()
}

/// Evaluates both sides of `mean_{|zeta|=r} u = u(0) + (1/2 pi) int_{D(0,r)} log(r/|zeta|) Delta u`.
///
/// The Laplacian is the 5-point stencil at each node, integrated against the
/// exact cell integral of the weight. `u` must be defined a few cells beyond `r`.
pub fn green_identity<T: Real>(u: &DiscField<T>, r: T) -> Result<GreenIdentity> {
    let h = to_f64(u.spacing());
    let rf = to_f64(r);
    if !(rf >= 4.0 * h) {
        return Err(Error::Resolution(format!(
            "radius {rf} spans fewer than 4 cells of size {h}"
        )));
    }
    let mean = to_f64(circle_mean(u, Complex::new(T::zero(), T::zero()), r)?);
    let centre_value = to_f64(
        u.get(u.center_node())
            .ok_or_else(|| Error::Domain("centre node undefined".into()))?,
    );
    let reach = rf + h;
    let side = u.side();
    let mut area = CompensatedSum::new();
    for j in 0..side {
        for i in 0..side {
            let z = u.coord([i, j]);
            let (x, y) = (to_f64(z.re), to_f64(z.im));
            if x.abs() > reach || y.abs() > reach {
                continue;
            }
            let w = clipped_cell_weight(x, y, h, rf);
            if w == 0.0 {
                continue;
            }
            let lap = u.laplacian([i, j]).ok_or_else(|| {
                Error::Domain(format!(
                    "Laplacian undefined at ({x}, {y}); the field must extend past radius {rf}"
                ))
            })?;
            area.add(to_f64(lap) * w);
        }
    }
    let area_integral = area.value();
    let normalized_rhs = centre_value + area_integral / (2.0 * PI);
    Ok(GreenIdentity {
        r: rf,
        circle_mean: mean,
        centre_value,
        area_integral,
        raw_lhs: 2.0 * PI * mean,
        raw_rhs: centre_value + area_integral,
        normalized_rhs,
        residual: (mean - normalized_rhs).abs(),
    })
}

/// `|mean_{|zeta|=r} u - u(0) - (1/2 pi) int log(r/|zeta|) Delta u|`.
pub fn green_identity_residual<T: Real>(u: &DiscField<T>, r: T) -> Result<f64> {
    Ok(green_identity(u, r)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiderivative_differentiates_to_log() {
        let (x, y, e) = (0.3, 0.7, 1e-4);
        let g = log_antiderivative;
        let mixed =
            (g(x + e, y + e) - g(x + e, y - e) - g(x - e, y + e) + g(x - e, y - e)) / (4.0 * e * e);
        assert!((mixed - 0.5 * (x * x + y * y as f64).ln()).abs() < 1e-6);
    }

    #[test]
    fn centred_square_matches_closed_form() {
        let a: f64 = 0.01;
        let w = log_weight_rectangle(-a, a, -a, a, 1.0);
        let expected = -4.0 * a * a * (a.ln() + 0.5 * (2f64.ln() - 3.0 + 0.5 * PI));
        assert!((w - expected).abs() < 1e-15);
    }

    #[test]
    fn disc_weight_total() {
        // int_{D(0,r)} log(r/|zeta|) = pi r^2 / 2
        let (h, r) = (1.0 / 64.0, 0.5);
        let n = (r / h) as i64 + 2;
        let mut total = 0.0;
        for j in -n..=n {
            for i in -n..=n {
                total += clipped_cell_weight(i as f64 * h, j as f64 * h, h, r);
            }
        }
        assert!((total - PI * r * r / 2.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn harmonic_and_constant_cases() {
        let h = 1.0 / 128.0;
        let u = DiscField::from_fn(0.5 + 4.0 * h, h, |z: Complex<f64>| z.re).unwrap();
        let g = green_identity(&u, 0.5).unwrap();
        assert!(g.residual < 1e-6 && g.circle_mean.abs() < 1e-6);
        let c = DiscField::from_fn(0.5 + 4.0 * h, h, |_| 3.0).unwrap();
        let g = green_identity(&c, 0.5).unwrap();
        assert!(g.residual < 1e-12);
        assert!((g.raw_lhs - 6.0 * PI).abs() < 1e-9 && (g.raw_rhs - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_radius_is_rejected() {
        let u = DiscField::from_fn(1.0, 0.1, |_| 0.0).unwrap();
        assert!(matches!(green_identity(&u, 0.3), Err(Error::Resolution(_))));
    }
}
