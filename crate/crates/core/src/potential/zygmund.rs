use std::collections::HashMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cantor::{box_range, build_square_cantor, BoxDimension, SquareCantor};
use super::green::GreenPotential;
use super::measure::frostman_measure;
use crate::error::{Error, Result};
use crate::field::DiscField;
use crate::scalar::{lit, to_f64, Real};
use crate::staircase::{CapKind, HartogsDomain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZygmundEstimate {
    pub alpha: f64,
    /// `max |u(x + h) + u(x - h) - 2 u(x)| / |h|^alpha` over the samples.
    pub m: f64,
    pub argmax_norm: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Empirical Zygmund constant of a disc field from `budget` random pairs
/// `(x, h)` with lattice offsets `h`, `|h|` in `[4 spacing, 0.1]` and `x, x +- h`
/// nodes of the field.
pub fn zygmund_seminorm<T: Real>(
    u: &DiscField<T>,
    alpha: f64,
    budget: usize,
    seed: u64,
) -> Result<ZygmundEstimate> {
    let h = to_f64(u.spacing());
    let side = u.side();
    let (kmin, kmax) = (4.0, 0.1 / h);
    if kmax < kmin {
        return Err(Error::Resolution(format!(
            "spacing {h} leaves no offsets in [4h, 0.1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(budget);
    let mut attempts = 0usize;
    while pairs.len() < budget {
        attempts += 1;
        if attempts > 50 * budget + 1000 {
            return Err(Error::Resolution(format!(
                "found only {} admissible pairs",
                pairs.len()
            )));
        }
        let x = [rng.random_range(0..side), rng.random_range(0..side)];
        let r: f64 = rng.random_range(kmin..=kmax);
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let d = [(r * t.cos()).round() as i64, (r * t.sin()).round() as i64];
        let norm = (d[0] as f64).hypot(d[1] as f64);
        if norm < kmin || norm > kmax {
            continue;
        }
        let shift = |s: i64| -> Option<[usize; 2]> {
            let i = x[0] as i64 + s * d[0];
            let j = x[1] as i64 + s * d[1];
            (i >= 0 && j >= 0).then(|| [i as usize, j as usize])
        };
        let (Some(p), Some(m)) = (shift(1), shift(-1)) else {
            continue;
        };
        match (u.get(x), u.get(p), u.get(m)) {
            (Some(c), Some(a), Some(b)) => {
                pairs.push((to_f64(a + b - lit::<T>(2.0) * c).abs(), norm * h))
            }
            _ => continue,
        }
    }
    let (mut m, mut arg) = (0.0f64, 0.0);
    for (d2, n) in pairs {
        let ratio = d2 / n.powf(alpha);
        if ratio > m {
            m = ratio;
            arg = n;
        }
    }
    Ok(ZygmundEstimate {
        alpha,
        m,
        argmax_norm: arg,
        samples: budget,
        seed,
    })
}

/// Cap `phi = log(1 - |z|^2) / 2 - u` with `u` the Green potential of the
/// natural measure on a square Cantor set.
#[derive(Clone, Debug)]
pub struct ZygmundCap<T> {
    pub set: SquareCantor<T>,
    pub potential: GreenPotential<T>,
}

impl<T: Real> ZygmundCap<T> {
    pub fn new(alpha: T, n: usize) -> Result<Self> {
        let set = build_square_cantor(alpha, n)?;
        let potential = GreenPotential::new(frostman_measure(&set))?;
        Ok(Self { set, potential })
    }

    pub fn evaluate(&self, z: Complex<T>) -> T {
        lit::<T>(0.5) * (T::one() - z.norm_sqr()).ln() - self.potential.value(z)
    }
}

pub fn zygmund_domain<T: Real>(
    alpha: T,
    n: usize,
    radius: T,
    spacing: T,
) -> Result<HartogsDomain<T>> {
    if !(radius < T::one()) {
        return Err(Error::Domain("the cap is finite only on |z| < 1".into()));
    }
    let cap = ZygmundCap::new(alpha, n)?;
    let field = DiscField::from_fn(radius, spacing, |z| cap.evaluate(z))?;
    Ok(HartogsDomain::new(field, CapKind::Zygmund(Box::new(cap))))
}

fn circle_boxes(r: f64, eps: f64) -> Vec<(i64, i64)> {
    let n = ((16.0 * std::f64::consts::PI * r / eps).ceil() as usize).max(16);
    let mut out: Vec<(i64, i64)> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            (
                (r * t.cos() / eps).floor() as i64,
                (r * t.sin() / eps).floor() as i64,
            )
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Box counts in `C^2 = R^4` of `{(z, w): z in E, |w| = exp(phi(z))}`.
///
/// `E` is sampled by the centres of the generation-`(n+1)` squares (the
/// potential of the generation-`n` measure is finite there), each circle in
/// the `w` plane by its radius rounded to the box grid. Scales run over
/// `side_0 2^{-j}` down to the generation-`n` side.
pub fn graph_box_dimension<T: Real>(cap: &ZygmundCap<T>) -> Result<BoxDimension> {
    let set = &cap.set;
    let ratio = set.ratio();
    let pts: Vec<(f64, f64, f64)> = set
        .squares()
        .par_iter()
        .flat_map_iter(|q| q.children(ratio).map(|c| c.centre()))
        .map(|z| (to_f64(z.re), to_f64(z.im), to_f64(cap.evaluate(z).exp())))
        .collect();
    let s0 = to_f64(set.root().side);
    let sn = to_f64(set.side());
    let [ox, oy] = set.root().corner.map(to_f64);
    let scales: Vec<f64> = (1..)
        .map(|j| s0 * 0.5f64.powi(j))
        .take_while(|e| *e >= sn * (1.0 - 1e-9))
        .collect();
    let mut counts = Vec::with_capacity(scales.len());
    for &eps in &scales {
        let mut cells: HashMap<(i64, i64), Vec<i64>> = HashMap::new();
        for &(x, y, r) in &pts {
            let i = box_range(x, 0.0, ox, eps).0;
            let j = box_range(y, 0.0, oy, eps).0;
            cells
                .entry((i, j))
                .or_default()
                .push((r / eps).floor() as i64);
        }
        let mut levels: Vec<i64> = cells.values().flatten().copied().collect();
        levels.sort_unstable();
        levels.dedup();
        let circles: HashMap<i64, Vec<(i64, i64)>> = levels
            .par_iter()
            .map(|&k| (k, circle_boxes((k as f64 + 0.5) * eps, eps)))
            .collect();
        let mut keys: Vec<_> = cells.keys().copied().collect();
        keys.sort_unstable();
        let total: u64 = keys
            .par_iter()
            .map(|key| {
                let mut ks = cells[key].clone();
                ks.sort_unstable();
                ks.dedup();
                if ks.len() == 1 {
                    return circles[&ks[0]].len() as u64;
                }
                let mut all: Vec<(i64, i64)> =
                    ks.iter().flat_map(|k| circles[k].iter().copied()).collect();
                all.sort_unstable();
                all.dedup();
                all.len() as u64
            })
            .sum();
        counts.push(total);
    }
    BoxDimension::from_counts(scales, counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_and_affine_fields() {
        let q = DiscField::from_fn(0.9, 1.0 / 128.0, |z: Complex<f64>| z.norm_sqr()).unwrap();
        let e = zygmund_seminorm(&q, 1.0, 2000, 7).unwrap();
        // second difference of |x|^2 is 2|h|^2, so the ratio is 2|h|
        assert!((e.m - 2.0 * e.argmax_norm).abs() < 1e-12);
        assert!(e.argmax_norm <= 0.1 + 1e-12);
        let a = DiscField::from_fn(0.9, 1.0 / 128.0, |z: Complex<f64>| 3.0 * z.re - z.im + 1.0)
            .unwrap();
        assert!(zygmund_seminorm(&a, 1.0, 2000, 7).unwrap().m < 1e-12);
    }

    #[test]
    fn seeded_estimate_is_reproducible() {
        let q = DiscField::from_fn(0.9, 1.0 / 64.0, |z: Complex<f64>| z.re.abs()).unwrap();
        let a = zygmund_seminorm(&q, 1.0, 500, 3).unwrap();
        let b = zygmund_seminorm(&q, 1.0, 500, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn far_from_set_the_cap_is_strictly_superharmonic() {
        let d = zygmund_domain(1.0, 3, 0.9, 1.0 / 256.0).unwrap();
        let CapKind::Zygmund(cap) = d.kind() else {
            panic!()
        };
        let field = d.cap();
        let mut checked = 0;
        for n in field.defined_nodes() {
            let z = field.coord(n);
            if let Some(lap) = field.laplacian(n) {
                if cap.set.distance(z) > 0.1 {
                    assert!(lap <= -2.0 + 1e-3, "{z} {lap}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000);
    }
}
