//! Central-difference stencils on [`ScalarField3`].
//!
//! First and pure second derivatives use the 3-point central stencil, mixed
//! second derivatives the 4-point cross. All are exact on quadratics.

use num_complex::Complex;

use super::grid::Node;
use super::scalar_field::ScalarField3;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Gradient and Hessian at a point, in the real coordinates `xi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3<T> {
    pub grad: [T; 3],
    pub hess: [[T; 3]; 3],
}

impl<T: Real> Jet3<T> {
    pub fn wirtinger(&self) -> Wirtinger<T> {
        let half = lit::<T>(0.5);
        let quarter = lit::<T>(0.25);
        Wirtinger {
            d_y1: self.grad[0],
            d_y1y1: self.hess[0][0],
            d_z2: Complex::new(half * self.grad[1], -half * self.grad[2]),
            d_z2_zb2: quarter * (self.hess[1][1] + self.hess[2][2]),
            d_y1_zb2: Complex::new(half * self.hess[0][1], half * self.hess[0][2]),
        }
    }
}

/// Derivatives of a real function of `(y1, z2)` in complex notation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wirtinger<T> {
    pub d_y1: T,
    pub d_y1y1: T,
    /// `d/dz2 = (d/dxi2 - i d/dxi3) / 2`
    pub d_z2: Complex<T>,
    /// `d^2/dz2 dzb2 = (d^2/dxi2^2 + d^2/dxi3^2) / 4`
    pub d_z2_zb2: T,
    /// `d^2/dy1 dzb2 = (d^2/dxi1 dxi2 + i d^2/dxi1 dxi3) / 2`
    pub d_y1_zb2: Complex<T>,
}

fn check_interior<T: Real>(f: &ScalarField3<T>, node: Node) -> Result<()> {
    if f.grid().is_interior(node, 1) {
        Ok(())
    } else {
        Err(Error::OutOfStencil { node })
    }
}

const UNIT: [[isize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

fn neg(d: [isize; 3]) -> [isize; 3] {
    [-d[0], -d[1], -d[2]]
}

fn add(a: [isize; 3], b: [isize; 3]) -> [isize; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn fd_gradient<T: Real>(f: &ScalarField3<T>, node: Node) -> Result<[T; 3]> {
    check_interior(f, node)?;
    let two_h = lit::<T>(2.0) * f.grid().spacing();
    let mut g = [T::zero(); 3];
    for (a, e) in UNIT.iter().enumerate() {
        g[a] = (f.at_offset(node, *e) - f.at_offset(node, neg(*e))) / two_h;
    }
    Ok(g)
}

pub fn fd_hessian<T: Real>(f: &ScalarField3<T>, node: Node) -> Result<[[T; 3]; 3]> {
    check_interior(f, node)?;
    let h = f.grid().spacing();
    let h2 = h * h;
    let two = lit::<T>(2.0);
    let four_h2 = lit::<T>(4.0) * h2;
    let center = f.at(node);
    let mut m = [[T::zero(); 3]; 3];
    for a in 0..3 {
        let e = UNIT[a];
        m[a][a] = (f.at_offset(node, e) - two * center + f.at_offset(node, neg(e))) / h2;
        for b in (a + 1)..3 {
            let eb = UNIT[b];
            let v = (f.at_offset(node, add(e, eb))
                - f.at_offset(node, add(e, neg(eb)))
                - f.at_offset(node, add(neg(e), eb))
                + f.at_offset(node, add(neg(e), neg(eb))))
                / four_h2;
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    Ok(m)
}

pub fn fd_jet<T: Real>(f: &ScalarField3<T>, node: Node) -> Result<Jet3<T>> {
    Ok(Jet3 {
        grad: fd_gradient(f, node)?,
        hess: fd_hessian(f, node)?,
    })
}

/// Wirtinger derivatives at a node from central differences.
pub fn complex_wirtinger<T: Real>(f: &ScalarField3<T>, node: Node) -> Result<Wirtinger<T>> {
    Ok(fd_jet(f, node)?.wirtinger())
}

#[cfg(test)]
mod tests {
    use super::super::{Grid3, Regularity};
    use super::*;

    fn field(f: impl Fn([f64; 3]) -> f64 + Sync, h: f64) -> ScalarField3<f64> {
        let g = Grid3::centered_cube([0.0; 3], 10.0 * h, h).unwrap();
        ScalarField3::from_fn(g, Regularity::Smooth { constant: 0.0 }, f).unwrap()
    }

    #[test]
    fn gradient_of_affine_is_exact() {
        let f = field(|p| p[0], 0.1);
        let g = fd_gradient(&f, [7, 3, 12]).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12);
        assert!(g[1].abs() < 1e-12 && g[2].abs() < 1e-12);
    }

    #[test]
    fn gradient_of_quadratic_at_half() {
        let h = 0.01;
        let g = Grid3::<f64>::new([0.0, 0.4, 0.0], h, [5, 21, 5]).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 0.0 }, |p| p[1] * p[1])
            .unwrap();
        let node = f.grid().nearest_node([0.02, 0.5, 0.02]).unwrap();
        assert!((f.grid().point(node)[1] - 0.5).abs() < 1e-12);
        let d = fd_gradient(&f, node).unwrap();
        assert!((d[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gradient_of_sine_matches_taylor_remainder() {
        let h = 0.05;
        let f = field(|p| p[0].sin(), h);
        let d = fd_gradient(&f, [10, 10, 10]).unwrap();
        // (sin h - sin(-h)) / 2h = sin(h)/h = 1 - h^2/6 + O(h^4)
        let defect = 1.0 - d[0];
        assert!(defect > 0.0 && defect <= h * h / 6.0);
        assert!((d[0] - h.sin() / h).abs() < 1e-14);
    }

    #[test]
    fn hessian_entries_of_quadratics() {
        let f = field(|p| p[0] * p[1], 0.1);
        let m = fd_hessian(&f, [4, 6, 9]).unwrap();
        assert!((m[0][1] - 1.0).abs() < 1e-12 && (m[1][0] - 1.0).abs() < 1e-12);
        assert!(m[0][0].abs() < 1e-12 && m[2][2].abs() < 1e-12);
        let f = field(|p| p[2] * p[2], 0.1);
        let m = fd_hessian(&f, [4, 6, 9]).unwrap();
        assert!((m[2][2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hessian_across_a_kink() {
        // nodes at xi1 = (k + 1/2) h
        let h: f64 = 0.1;
        let g = Grid3::new([-0.45, 0.0, 0.0], h, [10, 5, 5]).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::C11 { constant: 1.0 }, |p: [f64; 3]| {
            p[0].abs()
        })
        .unwrap();
        // node at 3h/2: stencil does not straddle the kink
        let far = fd_hessian(&f, [6, 2, 2]).unwrap();
        assert!(far[0][0].abs() < 1e-12);
        // node at h/2: stencil straddles the kink once
        let near = fd_hessian(&f, [5, 2, 2]).unwrap();
        assert!((near[0][0] - 1.0 / h).abs() < 1e-9);
        // node on the kink
        let g = Grid3::centered_cube([0.0; 3], 0.5, h).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::C11 { constant: 1.0 }, |p: [f64; 3]| {
            p[0].abs()
        })
        .unwrap();
        let on = fd_hessian(&f, [5, 5, 5]).unwrap();
        assert!((on[0][0] - 2.0 / h).abs() < 1e-9);
    }

    #[test]
    fn boundary_nodes_are_rejected() {
        let f = field(|p| p[0], 0.1);
        assert_eq!(
            fd_gradient(&f, [0, 3, 3]),
            Err(Error::OutOfStencil { node: [0, 3, 3] })
        );
        assert!(fd_hessian(&f, [3, 3, 20]).is_err());
    }

    #[test]
    fn wirtinger_conventions() {
        let f = field(|p| p[1] * p[1] + p[2] * p[2], 0.1);
        let w = complex_wirtinger(&f, [3, 8, 12]).unwrap();
        assert!((w.d_z2_zb2 - 1.0).abs() < 1e-12);

        let f = field(|p| p[1], 0.1);
        let w = complex_wirtinger(&f, [3, 8, 12]).unwrap();
        assert!((w.d_z2 - Complex::new(0.5, 0.0)).norm() < 1e-12);

        let f = field(|p| p[0] * p[2], 0.1);
        let w = complex_wirtinger(&f, [3, 8, 12]).unwrap();
        assert!((w.d_y1_zb2 - Complex::new(0.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn observed_order_is_second() {
        let f = |p: [f64; 3]| (p[0] + 0.3).sin() * (0.7 * p[1]).exp() + (p[2] * 1.3).cos() * p[0];
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for k in 0..4 {
            let h = 0.08 / f64::powi(2.0, k);
            let fld = field(f, h);
            let c = [10, 10, 10];
            let m = fd_hessian(&fld, c).unwrap();
            let g = fd_gradient(&fld, c).unwrap();
            let exact_g = [0.3f64.cos() + 1.0, 0.7 * 0.3f64.sin(), 0.0];
            let exact_h01 = 0.7 * 0.3f64.cos();
            let e = (g[0] - exact_g[0])
                .abs()
                .max((g[1] - exact_g[1]).abs())
                .max((m[0][1] - exact_h01).abs());
            errs.push(e.ln());
            hs.push(h.ln());
        }
        let order = crate::scalar::fit_slope(&hs, &errs);
        assert!(order >= 1.9, "observed order {order}");
    }
}
