use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fit_slope, lit, to_f64, Real};

/// Largest generation accepted by [`build_square_cantor`] (`4^11` squares).
pub const MAX_GENERATION: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Square<T> {
    /// Lower-left corner.
    pub corner: [T; 2],
    pub side: T,
}

impl<T: Real> Square<T> {
    pub fn centre(&self) -> Complex<T> {
        let h = lit::<T>(0.5) * self.side;
        Complex::new(self.corner[0] + h, self.corner[1] + h)
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.corner[0]
            && z.re <= self.corner[0] + self.side
            && z.im >= self.corner[1]
            && z.im <= self.corner[1] + self.side
    }

    pub fn distance(&self, z: Complex<T>) -> T {
        let gap = |p: T, lo: T| (lo - p).max(p - (lo + self.side)).max(T::zero());
        gap(z.re, self.corner[0]).hypot(gap(z.im, self.corner[1]))
    }

    /// The four corner squares with side `ratio * side`.
    pub fn children(&self, ratio: T) -> [Square<T>; 4] {
        let s = ratio * self.side;
        let off = self.side - s;
        let [x, y] = self.corner;
        [
            Square {
                corner: [x, y],
                side: s,
            },
            Square {
                corner: [x + off, y],
                side: s,
            },
            Square {
                corner: [x, y + off],
                side: s,
            },
            Square {
                corner: [x + off, y + off],
                side: s,
            },
        ]
    }
}

/// Generation `n` of the four-corner Cantor set with contraction
/// `a = 4^{-1/alpha}`, centred at the origin inside the closed disc of radius 1/2.
///
/// Square `4p + k` of generation `n` is child `k` of square `p` of generation `n - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SquareCantor<T> {
    alpha: T,
    generation: usize,
    ratio: T,
    root: Square<T>,
    squares: Vec<Square<T>>,
}

pub fn build_square_cantor<T: Real>(alpha: T, n: usize) -> Result<SquareCantor<T>> {
    if !(alpha > T::zero() && alpha < lit(2.0)) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0, 2), got {}",
            to_f64(alpha)
        )));
    }
    if n < 1 || n > MAX_GENERATION {
        return Err(Error::Parameter(format!(
            "generation must lie in 1..={MAX_GENERATION}, got {n}"
        )));
    }
    let ratio = lit::<T>(4.0).powf(-T::one() / alpha);
    let s0 = T::one() / lit::<T>(2.0).sqrt();
    let root = Square {
        corner: [-lit::<T>(0.5) * s0, -lit::<T>(0.5) * s0],
        side: s0,
    };
    let mut squares = vec![root];
    for _ in 0..n {
        squares = squares.iter().flat_map(|q| q.children(ratio)).collect();
    }
    Ok(SquareCantor {
        alpha,
        generation: n,
        ratio,
        root,
        squares,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// Least-squares slope of `log N` against `log(1/eps)`.
    pub slope: f64,
}

impl BoxDimension {
    pub fn from_counts(scales: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if scales.len() < 5 {
            return Err(Error::Resolution(format!(
                "box counting needs at least 5 scales, got {}",
                scales.len()
            )));
        }
        let xs: Vec<f64> = scales.iter().map(|e| -e.ln()).collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
        let slope = fit_slope(&xs, &ys);
        Ok(Self {
            scales,
            counts,
            slope,
        })
    }
}

/// Grid index range of boxes of size `eps` met by `[lo, lo + len]`.
pub(crate) fn box_range(lo: f64, len: f64, origin: f64, eps: f64) -> (i64, i64) {
    let u0 = (lo - origin) / eps;
    let u1 = (lo + len - origin) / eps;
    let i0 = (u0 + 1e-9).floor() as i64;
    let i1 = ((u1 - 1e-9).ceil() as i64 - 1).max(i0);
    (i0, i1)
}

impl<T: Real> SquareCantor<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Contraction `a = 4^{-1/alpha}`.
    pub fn ratio(&self) -> T {
        self.ratio
    }

    pub fn root(&self) -> &Square<T> {
        &self.root
    }

    pub fn squares(&self) -> &[Square<T>] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// Side of the generation-`n` squares.
    pub fn side(&self) -> T {
        self.squares[0].side
    }

    pub fn centres(&self) -> Vec<Complex<T>> {
        self.squares.iter().map(Square::centre).collect()
    }

    /// Distance from `z` to the union of the squares, by descending the
    /// subdivision tree and pruning squares farther than the best hit so far.
    pub fn distance(&self, z: Complex<T>) -> T {
        let mut best = T::infinity();
        self.descend(&self.root, 0, z, &mut best);
        best
    }

    fn descend(&self, q: &Square<T>, level: usize, z: Complex<T>, best: &mut T) {
        let d = q.distance(z);
        if d >= *best {
            return;
        }
        if level == self.generation {
            *best = d;
            return;
        }
        let mut kids = q.children(self.ratio);
        kids.sort_by(|a, b| {
            a.distance(z)
                .partial_cmp(&b.distance(z))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for k in &kids {
            self.descend(k, level + 1, z, best);
        }
    }

    /// Box counts at the scales `side_0 2^{-j}` that are not finer than the
    /// generation-`n` squares, on the grid anchored at the root corner.
    pub fn box_dimension(&self) -> Result<BoxDimension> {
        let s0 = to_f64(self.root.side);
        let sn = to_f64(self.side());
        let [ox, oy] = self.root.corner.map(to_f64);
        let scales: Vec<f64> = (1..)
            .map(|j| s0 * 0.5f64.powi(j))
            .take_while(|e| *e >= sn * (1.0 - 1e-9))
            .collect();
        let counts = scales
            .par_iter()
            .map(|&eps| {
                let mut boxes: Vec<(i64, i64)> = Vec::new();
                for q in &self.squares {
                    let (i0, i1) = box_range(to_f64(q.corner[0]), sn, ox, eps);
                    let (j0, j1) = box_range(to_f64(q.corner[1]), sn, oy, eps);
                    for i in i0..=i1 {
                        for j in j0..=j1 {
                            boxes.push((i, j));
                        }
                    }
                }
                boxes.sort_unstable();
                boxes.dedup();
                boxes.len() as u64
            })
            .collect();
        BoxDimension::from_counts(scales, counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_ratio() {
        let c = build_square_cantor(1.0f64, 2).unwrap();
        assert!((c.ratio() - 0.25).abs() < 1e-15);
        let c = build_square_cantor(1.5f64, 1).unwrap();
        assert!((c.ratio() - 0.39685).abs() < 1e-5);
        assert!(build_square_cantor(2.0, 3).is_err());
        assert!(build_square_cantor(1.0, 0).is_err());
    }

    #[test]
    fn squares_disjoint_inside_half_disc() {
        let c = build_square_cantor(1.3f64, 4).unwrap();
        assert_eq!(c.len(), 256);
        let s = c.side();
        assert!((s / (c.root().side * c.ratio().powi(4)) - 1.0).abs() < 1e-14);
        for q in c.squares() {
            for dx in [0.0, s] {
                for dy in [0.0, s] {
                    assert!(Complex::new(q.corner[0] + dx, q.corner[1] + dy).norm() <= 0.5 + 1e-15);
                }
            }
        }
        for (i, p) in c.squares().iter().enumerate() {
            for q in &c.squares()[i + 1..] {
                let apart = p.corner[0] + s < q.corner[0]
                    || q.corner[0] + s < p.corner[0]
                    || p.corner[1] + s < q.corner[1]
                    || q.corner[1] + s < p.corner[1];
                assert!(apart);
            }
        }
    }

    #[test]
    fn distance_matches_brute_force() {
        let c = build_square_cantor(0.8, 3).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let z = Complex::new(0.4 * t.cos(), 0.3 * (1.3 * t).sin());
            let brute = c
                .squares()
                .iter()
                .map(|q| q.distance(z))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(c.distance(z), brute);
        }
    }

    #[test]
    fn box_dimension_alpha_one() {
        let d = build_square_cantor(1.0, 8)
            .unwrap()
            .box_dimension()
            .unwrap();
        assert!((d.slope - 1.0).abs() < 0.1, "{d:?}");
        assert_eq!(d.counts[1], 4);
    }
}
