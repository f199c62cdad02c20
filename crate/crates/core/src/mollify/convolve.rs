use rayon::prelude::*;

use super::kernel::{make_kernel, BumpKernel};
use crate::error::Result;
use crate::field::{Grid3, Node, Regularity, ScalarField3};
use crate::scalar::{to_f64, Real};

/// `v * theta_delta` on the nodes of the base grid farther than `delta` from
/// its boundary.
#[derive(Clone, Debug)]
pub struct MollifiedField<T> {
    base: Grid3<T>,
    delta: T,
    margin: usize,
    field: ScalarField3<T>,
}

impl<T: Real> MollifiedField<T> {
    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn base_grid(&self) -> &Grid3<T> {
        &self.base
    }

    /// Cells removed from each side of the base grid.
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn field(&self) -> &ScalarField3<T> {
        &self.field
    }

    pub fn into_field(self) -> ScalarField3<T> {
        self.field
    }

    /// Node of the mollified grid corresponding to a base-grid node, if any.
    pub fn from_base(&self, node: Node) -> Option<Node> {
        let m = self.margin;
        let e = self.field.grid().extents();
        let n = [
            node[0].checked_sub(m)?,
            node[1].checked_sub(m)?,
            node[2].checked_sub(m)?,
        ];
        (n[0] < e[0] && n[1] < e[1] && n[2] < e[2]).then_some(n)
    }

    pub fn to_base(&self, node: Node) -> Node {
        node.map(|k| k + self.margin)
    }
}

/// Discrete convolution with `theta_delta` by direct summation over the
/// kernel support.
pub fn convolve3<T: Real>(v: &ScalarField3<T>, delta: T) -> Result<MollifiedField<T>> {
    let grid = v.grid();
    let kernel = make_kernel(delta, grid.spacing())?;
    convolve_with(v, &kernel)
}

pub(crate) fn convolve_with<T: Real>(
    v: &ScalarField3<T>,
    kernel: &BumpKernel<T>,
) -> Result<MollifiedField<T>> {
    let grid = v.grid();
    let ratio = to_f64(kernel.delta()) / to_f64(grid.spacing());
    let margin = (ratio.floor() as usize + 1).max(kernel.reach());
    let inner = grid.shrink(margin)?;
    let e = grid.extents();
    let stride = [(e[1] * e[2]) as isize, e[2] as isize, 1isize];
    let taps: Vec<(isize, T)> = kernel
        .weights()
        .iter()
        .map(|(o, w)| (o[0] * stride[0] + o[1] * stride[1] + o[2] * stride[2], *w))
        .collect();
    let values = v.values();
    let out: Vec<T> = (0..inner.len())
        .into_par_iter()
        .map(|k| {
            let n = inner.node(k);
            let centre = grid.index([n[0] + margin, n[1] + margin, n[2] + margin]) as isize;
            let mut acc = T::zero();
            for &(d, w) in &taps {
                acc = acc + w * values[(centre + d) as usize];
            }
            acc
        })
        .collect();
    let field = ScalarField3::new(
        inner,
        out,
        Regularity::Smooth {
            constant: v.regularity().constant(),
        },
    )?;
    Ok(MollifiedField {
        base: grid.clone(),
        delta: kernel.delta(),
        margin,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(f: impl Fn([f64; 3]) -> f64 + Sync) -> ScalarField3<f64> {
        let g = Grid3::centered_cube([0.0; 3], 0.3, 0.02).unwrap();
        ScalarField3::from_fn(g, Regularity::Smooth { constant: 2.0 }, f).unwrap()
    }

    #[test]
    fn constants_and_affine_fields_are_fixed() {
        let m = convolve3(&base(|_| 3.5), 0.1).unwrap();
        assert!(m.field().values().iter().all(|v| (v - 3.5).abs() < 1e-12));
        let f = |p: [f64; 3]| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2];
        let m = convolve3(&base(f), 0.1).unwrap();
        let g = m.field().grid();
        for node in g.nodes() {
            assert!((m.field().at(node) - f(g.point(node))).abs() < 1e-10);
        }
    }

    #[test]
    fn shrunk_grid_stays_delta_inside() {
        let v = base(|_| 0.0);
        let m = convolve3(&v, 0.1).unwrap();
        let inner = m.field().grid();
        let outer = v.grid();
        let lo = inner.origin()[0] - outer.origin()[0];
        assert!(lo > 0.1);
        assert_eq!(m.to_base([0, 0, 0]), [m.margin(); 3]);
        assert_eq!(m.from_base([m.margin(); 3]), Some([0, 0, 0]));
    }

    #[test]
    fn quadratic_picks_up_the_discrete_moment() {
        let m = convolve3(&base(|p| p[0] * p[0]), 0.1).unwrap();
        let g = m.field().grid();
        let c = g.nearest_node([0.0; 3]).unwrap();
        let k = make_kernel(0.1, 0.02).unwrap();
        assert!((m.field().at(c) - k.axis_moment(0)).abs() < 1e-14);
    }
}
