use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, to_f64, Real};

/// Integer index of a grid node.
pub type Node = [usize; 3];

/// Uniform Cartesian grid on `R^3`, same spacing on every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Grid3<T> {
    origin: [T; 3],
    spacing: T,
    extents: [usize; 3],
}

impl<T: Real> Grid3<T> {
    pub const MIN_EXTENT: usize = 5;

    pub fn new(origin: [T; 3], spacing: T, extents: [usize; 3]) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {}",
                to_f64(spacing)
            )));
        }
        if extents.iter().any(|&n| n < Self::MIN_EXTENT) {
            return Err(Error::InvalidGrid(format!(
                "every extent must be at least {}, got {extents:?}",
                Self::MIN_EXTENT
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            origin,
            spacing,
            extents,
        })
    }

    /// Grid covering the cube `[center - half_width, center + half_width]^3`
    /// with spacing `h`. The center is a node when `half_width / h` is an integer.
    pub fn centered_cube(center: [T; 3], half_width: T, h: T) -> Result<Self> {
        let k = (half_width / h).round().to_usize().ok_or_else(|| {
            Error::InvalidGrid("half width / spacing is not representable".into())
        })?;
        let kt = from_usize::<T>(k);
        let origin = [center[0] - kt * h, center[1] - kt * h, center[2] - kt * h];
        Self::new(origin, h, [2 * k + 1; 3])
    }

    pub fn origin(&self) -> [T; 3] {
        self.origin
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn len(&self) -> usize {
        self.extents[0] * self.extents[1] * self.extents[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major linear index: the last axis varies fastest.
    #[inline]
    pub fn index(&self, node: Node) -> usize {
        (node[0] * self.extents[1] + node[1]) * self.extents[2] + node[2]
    }

    #[inline]
    pub fn node(&self, index: usize) -> Node {
        let k = index % self.extents[2];
        let rest = index / self.extents[2];
        [rest / self.extents[1], rest % self.extents[1], k]
    }

    #[inline]
    pub fn point(&self, node: Node) -> [T; 3] {
        [
            self.origin[0] + from_usize::<T>(node[0]) * self.spacing,
            self.origin[1] + from_usize::<T>(node[1]) * self.spacing,
            self.origin[2] + from_usize::<T>(node[2]) * self.spacing,
        ]
    }

    /// True when the node has at least `margin` nodes on every side.
    pub fn is_interior(&self, node: Node, margin: usize) -> bool {
        (0..3).all(|a| node[a] >= margin && node[a] + margin < self.extents[a])
    }

    /// Nearest node to a point, if it lies inside the grid's bounding box.
    pub fn nearest_node(&self, point: [T; 3]) -> Option<Node> {
        let mut node = [0usize; 3];
        for a in 0..3 {
            let t = ((point[a] - self.origin[a]) / self.spacing).round();
            if t < T::zero() {
                return None;
            }
            let i = t.to_usize()?;
            if i >= self.extents[a] {
                return None;
            }
            node[a] = i;
        }
        Some(node)
    }

    /// Sub-grid of nodes with `margin` nodes stripped from each face.
    pub fn shrink(&self, margin: usize) -> Result<Self> {
        let extents = [
            self.extents[0].saturating_sub(2 * margin),
            self.extents[1].saturating_sub(2 * margin),
            self.extents[2].saturating_sub(2 * margin),
        ];
        let m = from_usize::<T>(margin) * self.spacing;
        Self::new(
            [self.origin[0] + m, self.origin[1] + m, self.origin[2] + m],
            self.spacing,
            extents,
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid3::new([0.0; 3], 0.0, [5; 3]).is_err());
        assert!(Grid3::new([0.0; 3], -1.0, [5; 3]).is_err());
        assert!(Grid3::new([0.0; 3], 0.1, [5, 4, 5]).is_err());
        assert!(Grid3::new([0.0; 3], 0.1, [5, 5, 5]).is_ok());
    }

    #[test]
    fn index_round_trips() {
        let g = Grid3::new([0.0; 3], 0.5, [5, 6, 7]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(g.node(i)), i);
        }
        assert_eq!(g.index([0, 0, 1]), 1);
        assert_eq!(g.index([0, 1, 0]), 7);
    }

    #[test]
    fn centered_cube_has_center_node() {
        let g = Grid3::<f64>::centered_cube([0.0; 3], 0.1, 0.01).unwrap();
        assert_eq!(g.extents(), [21; 3]);
        let c = g.point([10, 10, 10]);
        assert!(c.iter().all(|x| x.abs() < 1e-15));
        assert_eq!(g.nearest_node([0.0; 3]), Some([10, 10, 10]));
    }
}
