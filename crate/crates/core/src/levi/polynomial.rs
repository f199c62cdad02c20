use crate::field::Jet3;
use crate::scalar::{from_usize, Real};

/// Graph function `phi(y1, z2)` with exact first and second derivatives.
pub trait Graph3<T: Real>: Sync {
    fn value(&self, xi: [T; 3]) -> T;
    fn jet(&self, xi: [T; 3]) -> Jet3<T>;
}

/// Polynomial in `(xi1, xi2, xi3)` stored as `(coefficient, exponents)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly3<T> {
    terms: Vec<(T, [u32; 3])>,
}

fn pow<T: Real>(x: T, e: u32) -> T {
    x.powi(e as i32)
}

fn dpow<T: Real>(x: T, e: u32, order: u32) -> T {
    // d^order/dx^order x^e
    if order > e {
        return T::zero();
    }
    let mut c = T::one();
    for k in 0..order {
        c = c * from_usize::<T>((e - k) as usize);
    }
    c * pow(x, e - order)
}

impl<T: Real> Poly3<T> {
    pub fn new(terms: Vec<(T, [u32; 3])>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(T, [u32; 3])] {
        &self.terms
    }

    fn partial(&self, xi: [T; 3], orders: [u32; 3]) -> T {
        self.terms
            .iter()
            .map(|(c, e)| {
                *c * dpow(xi[0], e[0], orders[0])
                    * dpow(xi[1], e[1], orders[1])
                    * dpow(xi[2], e[2], orders[2])
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

impl<T: Real> Graph3<T> for Poly3<T> {
    fn value(&self, xi: [T; 3]) -> T {
        self.partial(xi, [0, 0, 0])
    }

    fn jet(&self, xi: [T; 3]) -> Jet3<T> {
        let mut grad = [T::zero(); 3];
        let mut hess = [[T::zero(); 3]; 3];
        for a in 0..3 {
            let mut o = [0u32; 3];
            o[a] = 1;
            grad[a] = self.partial(xi, o);
            for b in a..3 {
                let mut o = [0u32; 3];
                o[a] += 1;
                o[b] += 1;
                let v = self.partial(xi, o);
                hess[a][b] = v;
                hess[b][a] = v;
            }
        }
        Jet3 { grad, hess }
    }
}

/// Graph of the unit sphere near its boundary point `(1, 0)`, translated to
/// the origin: `phi = sqrt(1 - y1^2 - |z2|^2) - 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BallCap;

impl<T: Real> Graph3<T> for BallCap {
    fn value(&self, xi: [T; 3]) -> T {
        (T::one() - xi[0] * xi[0] - xi[1] * xi[1] - xi[2] * xi[2]).sqrt() - T::one()
    }

    fn jet(&self, xi: [T; 3]) -> Jet3<T> {
        let s = (T::one() - xi[0] * xi[0] - xi[1] * xi[1] - xi[2] * xi[2]).sqrt();
        let mut grad = [T::zero(); 3];
        let mut hess = [[T::zero(); 3]; 3];
        let s3 = s * s * s;
        for a in 0..3 {
            grad[a] = -xi[a] / s;
            for b in 0..3 {
                let delta = if a == b { T::one() } else { T::zero() };
                hess[a][b] = -delta / s - xi[a] * xi[b] / s3;
            }
        }
        Jet3 { grad, hess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_jet() {
        // 2 y1^2 z... : p = 3 xi1^2 xi2 - xi3^3 + 0.5
        let p = Poly3::<f64>::new(vec![(3.0, [2, 1, 0]), (-1.0, [0, 0, 3]), (0.5, [0, 0, 0])]);
        let x = [0.3, -0.2, 0.7];
        assert!((p.value(x) - (3.0 * 0.09 * -0.2 - 0.343 + 0.5)).abs() < 1e-15);
        let j = p.jet(x);
        assert!((j.grad[0] - 6.0 * 0.3 * -0.2).abs() < 1e-15);
        assert!((j.grad[2] + 3.0 * 0.49).abs() < 1e-15);
        assert!((j.hess[0][1] - 6.0 * 0.3).abs() < 1e-15);
        assert!((j.hess[2][2] + 6.0 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn ball_cap_jet_matches_differences() {
        let x = [0.1, -0.2, 0.15];
        let j = Graph3::<f64>::jet(&BallCap, x);
        let h = 1e-5;
        for a in 0..3 {
            let mut p = x;
            let mut m = x;
            p[a] += h;
            m[a] -= h;
            let fd = (BallCap.value(p) - BallCap.value(m)) / (2.0 * h);
            assert!((fd - j.grad[a]).abs() < 1e-8);
        }
        assert!(
            (j.hess[0][0] + 1.0 / (1.0f64 - 0.0725).sqrt() + 0.01 / (0.9275f64).powf(1.5)).abs()
                < 1e-12
        );
    }
}
