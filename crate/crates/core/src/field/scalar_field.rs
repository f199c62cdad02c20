use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid3, Node};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Regularity class of a field together with an estimate of its constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", bound = "T: Real")]
pub enum Regularity<T> {
    Smooth { constant: T },
    C1Alpha { alpha: T, constant: T },
    C11 { constant: T },
    Lipschitz { constant: T },
}

impl<T: Real> Regularity<T> {
    pub fn constant(&self) -> T {
        match *self {
            Regularity::Smooth { constant }
            | Regularity::C1Alpha { constant, .. }
            | Regularity::C11 { constant }
            | Regularity::Lipschitz { constant } => constant,
        }
    }

    /// Second derivatives exist only almost everywhere.
    pub fn has_kinks(&self) -> bool {
        !matches!(self, Regularity::Smooth { .. })
    }
}

/// An axis-aligned plane `xi[axis] = coordinate` across which second
/// derivatives may jump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KinkPlane<T> {
    pub axis: usize,
    pub coordinate: T,
}

/// Real-valued function of `(y1, Re z2, Im z2)` sampled on a [`Grid3`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ScalarField3<T> {
    grid: Grid3<T>,
    values: Vec<T>,
    regularity: Regularity<T>,
    #[serde(default)]
    kinks: Vec<KinkPlane<T>>,
}

impl<T: Real> ScalarField3<T> {
    pub fn new(grid: Grid3<T>, values: Vec<T>, regularity: Regularity<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("node {:?}", grid.node(i))));
        }
        if !(regularity.constant() >= T::zero()) {
            return Err(Error::Parameter(format!(
                "regularity constant must be non-negative, got {}",
                to_f64(regularity.constant())
            )));
        }
        Ok(Self {
            grid,
            values,
            regularity,
            kinks: Vec::new(),
        })
    }

    /// Samples `f` at every node (node-parallel).
    pub fn from_fn<F>(grid: Grid3<T>, regularity: Regularity<T>, f: F) -> Result<Self>
    where
        F: Fn([T; 3]) -> T + Sync,
    {
        let values: Vec<T> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.point(grid.node(i))))
            .collect();
        Self::new(grid, values, regularity)
    }

    pub fn with_kinks(mut self, kinks: Vec<KinkPlane<T>>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn regularity(&self) -> Regularity<T> {
        self.regularity
    }

    pub fn kinks(&self) -> &[KinkPlane<T>] {
        &self.kinks
    }

    #[inline]
    pub fn at(&self, node: Node) -> T {
        self.values[self.grid.index(node)]
    }

    /// Value at a node offset by `d`; the caller guarantees the offset is in range.
    #[inline]
    pub(crate) fn at_offset(&self, node: Node, d: [isize; 3]) -> T {
        let n = [
            (node[0] as isize + d[0]) as usize,
            (node[1] as isize + d[1]) as usize,
            (node[2] as isize + d[2]) as usize,
        ];
        self.at(n)
    }

    /// True when a declared kink plane passes within `cells` grid cells of the node.
    pub fn near_kink(&self, node: Node, cells: T) -> bool {
        let p = self.grid.point(node);
        let reach = cells * self.grid.spacing();
        self.kinks
            .iter()
            .any(|k| (p[k.axis] - k.coordinate).abs() <= reach)
    }

    /// Trilinear interpolation at an arbitrary point inside the grid box.
    pub fn interpolate(&self, point: [T; 3]) -> Result<T> {
        let h = self.grid.spacing();
        let origin = self.grid.origin();
        let ext = self.grid.extents();
        let mut base = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let t = (point[a] - origin[a]) / h;
            let last = T::from_usize(ext[a] - 1).unwrap();
            if t < T::zero() || t > last || !t.is_finite() {
                return Err(Error::Domain(format!("point {:?}", point.map(to_f64))));
            }
            let i = t.floor().to_usize().unwrap().min(ext[a] - 2);
            base[a] = i;
            frac[a] = t - T::from_usize(i).unwrap();
        }
        let mut acc = T::zero();
        for corner in 0..8usize {
            let mut w = T::one();
            let mut n = base;
            for a in 0..3 {
                if corner >> a & 1 == 1 {
                    w = w * frac[a];
                    n[a] += 1;
                } else {
                    w = w * (T::one() - frac[a]);
                }
            }
            acc = acc + w * self.at(n);
        }
        Ok(acc)
    }
}
