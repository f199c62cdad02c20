//! One-dimensional quadrature helpers.

use crate::scalar::{from_usize, lit, CompensatedSum, Real};

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre recurrence).
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let one = T::one();
    let two = lit::<T>(2.0);
    let nt = from_usize::<T>(n);
    for i in 0..n.div_ceil(2) {
        let it = from_usize::<T>(i);
        let mut x = (T::PI() * (it + lit(0.75)) / (nt + lit(0.5))).cos();
        let mut dp = T::zero();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kt = from_usize::<T>(k);
                let p2 = ((two * kt - one) * x * p1 - (kt - one) * p0) / kt;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { one } else { p0 };
            dp = nt * (x * p - pm1) / (x * x - one);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() < T::epsilon() * lit(4.0) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = two / ((one - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize, order: usize) -> T {
    let (x, w) = gauss_legendre::<T>(order);
    let width = (b - a) / from_usize::<T>(panels);
    let half = width * lit(0.5);
    let mut acc = CompensatedSum::new();
    for p in 0..panels {
        let mid = a + width * (from_usize::<T>(p) + lit(0.5));
        for (xi, wi) in x.iter().zip(&w) {
            acc.add(*wi * half * f(mid + half * *xi));
        }
    }
    acc.value()
}
