use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, CompensatedSum, Real};

/// Integer index `(i, j)` of a planar node; `i` runs along the real axis.
pub type DiscNode = [usize; 2];

/// Real function sampled on the square lattice `h Z^2` clipped to the open
/// disc `|z| < radius`. The origin is always a node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DiscField<T> {
    radius: T,
    spacing: T,
    half: usize,
    values: Vec<Option<T>>,
}

impl<T: Real> DiscField<T> {
    pub fn from_fn<F>(radius: T, spacing: T, f: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> T + Sync,
    {
        if !(radius > T::zero()) || !(spacing > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "radius {} and spacing {} must be positive",
                to_f64(radius),
                to_f64(spacing)
            )));
        }
        let half = (radius / spacing).ceil().to_usize().unwrap();
        if half < 2 {
            return Err(Error::InvalidGrid("disc narrower than two cells".into()));
        }
        let n = 2 * half + 1;
        let values: Vec<Option<T>> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let z = Self::coord_of(half, spacing, [k % n, k / n]);
                if z.norm() < radius {
                    Some(f(z))
                } else {
                    None
                }
            })
            .collect();
        if let Some(k) = values
            .iter()
            .position(|v| matches!(v, Some(x) if !x.is_finite()))
        {
            let z = Self::coord_of(half, spacing, [k % n, k / n]);
            return Err(Error::NonFinite(format!(
                "z = {} + {}i",
                to_f64(z.re),
                to_f64(z.im)
            )));
        }
        Ok(Self {
            radius,
            spacing,
            half,
            values,
        })
    }

    fn coord_of(half: usize, h: T, node: DiscNode) -> Complex<T> {
        let m = from_usize::<T>(half);
        Complex::new(
            (from_usize::<T>(node[0]) - m) * h,
            (from_usize::<T>(node[1]) - m) * h,
        )
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Nodes per side of the bounding square.
    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    pub fn center_node(&self) -> DiscNode {
        [self.half, self.half]
    }

    pub fn coord(&self, node: DiscNode) -> Complex<T> {
        Self::coord_of(self.half, self.spacing, node)
    }

    #[inline]
    pub fn get(&self, node: DiscNode) -> Option<T> {
        let n = self.side();
        if node[0] >= n || node[1] >= n {
            return None;
        }
        self.values[node[1] * n + node[0]]
    }

    fn get_offset(&self, node: DiscNode, di: isize, dj: isize) -> Option<T> {
        let i = node[0] as isize + di;
        let j = node[1] as isize + dj;
        if i < 0 || j < 0 {
            return None;
        }
        self.get([i as usize, j as usize])
    }

    /// Nearest node to `z` (which may be undefined if outside the disc).
    pub fn nearest_node(&self, z: Complex<T>) -> Option<DiscNode> {
        let m = from_usize::<T>(self.half);
        let i = (z.re / self.spacing + m).round();
        let j = (z.im / self.spacing + m).round();
        if i < T::zero() || j < T::zero() {
            return None;
        }
        let (i, j) = (i.to_usize()?, j.to_usize()?);
        (i < self.side() && j < self.side()).then_some([i, j])
    }

    /// All nodes carrying a value, in storage order.
    pub fn defined_nodes(&self) -> impl Iterator<Item = DiscNode> + '_ {
        let n = self.side();
        (0..n * n)
            .filter(move |&k| self.values[k].is_some())
            .map(move |k| [k % n, k / n])
    }

    /// Bilinear interpolation; every corner of the enclosing cell must be defined.
    pub fn bilinear(&self, z: Complex<T>) -> Result<T> {
        let m = from_usize::<T>(self.half);
        let tx = z.re / self.spacing + m;
        let ty = z.im / self.spacing + m;
        let out = || Error::Domain(format!("point {} + {}i", to_f64(z.re), to_f64(z.im)));
        if !(tx >= T::zero() && ty >= T::zero()) {
            return Err(out());
        }
        let i = tx.floor().to_usize().ok_or_else(out)?;
        let j = ty.floor().to_usize().ok_or_else(out)?;
        let fx = tx - from_usize::<T>(i);
        let fy = ty - from_usize::<T>(j);
        let v00 = self.get([i, j]).ok_or_else(out)?;
        let v10 = self.get([i + 1, j]).ok_or_else(out)?;
        let v01 = self.get([i, j + 1]).ok_or_else(out)?;
        let v11 = self.get([i + 1, j + 1]).ok_or_else(out)?;
        let one = T::one();
        Ok((one - fx) * (one - fy) * v00
            + fx * (one - fy) * v10
            + (one - fx) * fy * v01
            + fx * fy * v11)
    }

    /// Five-point Laplacian; `None` unless all four neighbours are defined.
    pub fn laplacian(&self, node: DiscNode) -> Option<T> {
        let c = self.get(node)?;
        let s = self.get_offset(node, 1, 0)?
            + self.get_offset(node, -1, 0)?
            + self.get_offset(node, 0, 1)?
            + self.get_offset(node, 0, -1)?;
        Some((s - lit::<T>(4.0) * c) / (self.spacing * self.spacing))
    }

    /// Central-difference Hessian `[[u_xx, u_xy], [u_xy, u_yy]]`.
    pub fn hessian(&self, node: DiscNode) -> Option<[[T; 2]; 2]> {
        let h2 = self.spacing * self.spacing;
        let two = lit::<T>(2.0);
        let c = self.get(node)?;
        let uxx = (self.get_offset(node, 1, 0)? - two * c + self.get_offset(node, -1, 0)?) / h2;
        let uyy = (self.get_offset(node, 0, 1)? - two * c + self.get_offset(node, 0, -1)?) / h2;
        let uxy = (self.get_offset(node, 1, 1)?
            - self.get_offset(node, 1, -1)?
            - self.get_offset(node, -1, 1)?
            + self.get_offset(node, -1, -1)?)
            / (lit::<T>(4.0) * h2);
        Some([[uxx, uxy], [uxy, uyy]])
    }

    /// Same lattice, values transformed node by node.
    pub fn map<F: Fn(Complex<T>, T) -> T + Sync>(&self, f: F) -> Result<Self> {
        let n = self.side();
        let values: Vec<Option<T>> = self
            .values
            .par_iter()
            .enumerate()
            .map(|(k, v)| v.map(|x| f(self.coord([k % n, k / n]), x)))
            .collect();
        if values
            .iter()
            .any(|v| matches!(v, Some(x) if !x.is_finite()))
        {
            return Err(Error::NonFinite("mapped disc field".into()));
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }
}

/// Angular quadrature nodes used by [`circle_mean`]: at least 256, and at
/// least four per grid cell of arc length.
pub fn circle_nodes<T: Real>(r: T, h: T) -> usize {
    let per_cell = (lit::<T>(8.0) * T::PI() * r / h)
        .ceil()
        .to_usize()
        .unwrap_or(256);
    per_cell.max(256)
}

/// Mean of `g` over the circle of radius `r` about `center`, by the periodic
/// trapezoid rule with bilinear interpolation off the lattice.
pub fn circle_mean<T: Real>(g: &DiscField<T>, center: Complex<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Parameter("circle radius must be positive".into()));
    }
    let n = circle_nodes(r, g.spacing());
    let step = lit::<T>(2.0) * T::PI() / from_usize::<T>(n);
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        let t = step * from_usize::<T>(k);
        let z = center + Complex::new(r * t.cos(), r * t.sin());
        acc.add(g.bilinear(z)?);
    }
    Ok(acc.value() / from_usize::<T>(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_nodes_inside_are_defined() {
        let d = DiscField::from_fn(0.5, 0.1, |_| 1.0).unwrap();
        assert_eq!(d.side(), 11);
        assert!(d.get([5, 5]).is_some());
        assert!(d.get([0, 0]).is_none());
        // |z| = 0.5 exactly is excluded
        assert!(d.get([10, 5]).is_none());
        assert!(d.get([9, 5]).is_some());
        for n in d.defined_nodes() {
            assert!(d.coord(n).norm() < 0.5);
        }
    }

    #[test]
    fn circle_mean_of_constant() {
        let d = DiscField::from_fn(0.5, 0.01, |_| 3.25).unwrap();
        let m = circle_mean(&d, Complex::new(0.1, -0.05), 0.2).unwrap();
        assert_eq!(m, 3.25);
    }

    #[test]
    fn circle_mean_of_harmonic() {
        let d = DiscField::from_fn(0.5, 0.01, |z: Complex<f64>| z.re).unwrap();
        let m = circle_mean(&d, Complex::new(0.0, 0.0), 0.3).unwrap();
        assert!(m.abs() < 1e-10);
    }

    #[test]
    fn circle_mean_of_modulus_squared() {
        // closed form: r^2 = 0.09; bilinear error is O(h^2)
        let d = DiscField::from_fn(0.5, 1.0 / 1024.0, |z: Complex<f64>| z.norm_sqr()).unwrap();
        let m = circle_mean(&d, Complex::new(0.0, 0.0), 0.3).unwrap();
        assert!((m - 0.09).abs() < 1e-6, "{m}");
    }

    #[test]
    fn circle_leaving_domain_is_an_error() {
        let d = DiscField::from_fn(0.5, 0.01, |z| z.re).unwrap();
        assert!(matches!(
            circle_mean(&d, Complex::new(0.3, 0.0), 0.3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rotation_invariance_of_radial_means() {
        // resampling a radial field with swapped axes leaves the mean unchanged
        let f = |z: Complex<f64>| (1.0 - z.norm_sqr()).ln() * 0.5;
        let g = |z: Complex<f64>| f(Complex::new(z.im, z.re));
        let a = DiscField::from_fn(0.9, 0.005, f).unwrap();
        let b = DiscField::from_fn(0.9, 0.005, g).unwrap();
        for r in [0.1, 0.4, 0.7] {
            let ma = circle_mean(&a, Complex::new(0.0, 0.0), r).unwrap();
            let mb = circle_mean(&b, Complex::new(0.0, 0.0), r).unwrap();
            assert!((ma - mb).abs() < 1e-8);
        }
    }

    #[test]
    fn laplacian_of_quadratic() {
        let d = DiscField::from_fn(0.5, 0.01, |z: Complex<f64>| {
            z.norm_sqr() + 3.0 * z.re * z.im
        })
        .unwrap();
        let c = d.center_node();
        assert!((d.laplacian(c).unwrap() - 4.0).abs() < 1e-9);
        let hs = d.hessian(c).unwrap();
        assert!((hs[0][1] - 3.0).abs() < 1e-9);
    }
}
