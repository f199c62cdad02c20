use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convolve::convolve3;
use crate::error::{Error, Result};
use crate::field::{Grid3, Node, Regularity, ScalarField3};

/// `rho_{delta,eps}(x1, xi) = x1 - (phi * theta_delta)(xi) + eps (x1^2 + |xi|^2) + eps`
/// for the graph defining function `rho = x1 - phi(xi)`.
#[derive(Clone, Debug)]
pub struct RegularizedDefining {
    phi: ScalarField3<f64>,
    smoothed: ScalarField3<f64>,
    margin: usize,
    epsilon: f64,
    delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    /// Nodes where the sublevel set `{rho_{delta,eps} < 0}` meets the line over the node.
    pub nodes: usize,
    /// Largest `r+ - phi` over nodes, where `r+` is the upper end of the sublevel interval in `x1`.
    pub max_excess: f64,
    /// Largest vertical distance `|r+ - phi|` between the two zero sets.
    pub max_distance: f64,
    pub contained: bool,
}

/// Builds the regularized defining function; `delta = 0` skips smoothing.
pub fn regularized_defining(
    phi: &ScalarField3<f64>,
    epsilon: f64,
    delta: f64,
) -> Result<RegularizedDefining> {
    if !(epsilon > 0.0) || !(delta >= 0.0) {
        return Err(Error::Parameter(format!(
            "need eps > 0 and delta >= 0, got {epsilon}, {delta}"
        )));
    }
    if delta > epsilon {
        return Err(Error::Parameter(format!(
            "delta {delta} must not exceed eps {epsilon}"
        )));
    }
    let (smoothed, margin) = if delta == 0.0 {
        (phi.clone(), 0)
    } else {
        let m = convolve3(phi, delta)?;
        let margin = m.margin();
        (m.into_field(), margin)
    };
    Ok(RegularizedDefining {
        phi: phi.clone(),
        smoothed,
        margin,
        epsilon,
        delta,
    })
}

impl RegularizedDefining {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid on which the regularized function is available.
    pub fn grid(&self) -> &Grid3<f64> {
        self.smoothed.grid()
    }

    fn base_node(&self, node: Node) -> Node {
        node.map(|k| k + self.margin)
    }

    /// Value of the reference defining function `x1 - phi` over a node of [`Self::grid`].
    pub fn reference(&self, x1: f64, node: Node) -> f64 {
        x1 - self.phi.at(self.base_node(node))
    }

    pub fn value(&self, x1: f64, node: Node) -> f64 {
        let xi = self.grid().point(node);
        let r2 = x1 * x1 + xi.iter().map(|v| v * v).sum::<f64>();
        x1 - self.smoothed.at(node) + self.epsilon * r2 + self.epsilon
    }

    /// Upper end of the interval `{x1 : rho_{delta,eps}(x1, xi) < 0}`, if nonempty.
    pub fn upper_root(&self, node: Node) -> Option<f64> {
        let xi = self.grid().point(node);
        let c =
            -self.smoothed.at(node) + self.epsilon * (xi.iter().map(|v| v * v).sum::<f64>() + 1.0);
        let disc = 1.0 - 4.0 * self.epsilon * c;
        if disc <= 0.0 {
            return None;
        }
        Some(-2.0 * c / (1.0 + disc.sqrt()))
    }

    /// Checks `{rho_{delta,eps} < 0} subset {rho < 0}` node by node.
    pub fn containment(&self) -> Containment {
        let grid = self.grid();
        let rows: Vec<Option<(f64, f64)>> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let node = grid.node(k);
                let r = self.upper_root(node)?;
                let phi = self.phi.at(self.base_node(node));
                Some((r - phi, (r - phi).abs()))
            })
            .collect();
        let mut out = Containment {
            nodes: 0,
            max_excess: f64::NEG_INFINITY,
            max_distance: 0.0,
            contained: true,
        };
        for (excess, dist) in rows.into_iter().flatten() {
            out.nodes += 1;
            out.max_excess = out.max_excess.max(excess);
            out.max_distance = out.max_distance.max(dist);
        }
        out.contained = out.max_excess < 0.0;
        out
    }

    /// Like [`Self::containment`], but a violation is an error.
    pub fn check_containment(&self) -> Result<Containment> {
        let c = self.containment();
        if !c.contained {
            return Err(Error::Parameter(format!(
                "regularized domain leaves the reference domain by {} at eps = {}, delta = {}",
                c.max_excess, self.epsilon, self.delta
            )));
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub spacing: f64,
    pub containment: Containment,
}

/// Runs the containment check along `delta = eps^2` on the box `|xi_j| <= half_width`.
pub fn containment_sweep<F>(
    phi: F,
    epsilons: &[f64],
    half_width: f64,
    max_spacing: f64,
) -> Result<Vec<SweepPoint>>
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    epsilons
        .iter()
        .map(|&epsilon| {
            let delta = epsilon * epsilon;
            let h = (delta / 2.0).min(max_spacing);
            let grid = Grid3::centered_cube([0.0; 3], half_width + delta, h)?;
            let field = ScalarField3::from_fn(grid, Regularity::Smooth { constant: 0.0 }, &phi)?;
            let reg = regularized_defining(&field, epsilon, delta)?;
            Ok(SweepPoint {
                epsilon,
                delta,
                spacing: h,
                containment: reg.containment(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap(p: [f64; 3]) -> f64 {
        (1.0 - p[0] * p[0] - p[1] * p[1] - p[2] * p[2]).sqrt() - 1.0
    }

    #[test]
    fn unsmoothed_case_is_exact() {
        let g = Grid3::centered_cube([0.0; 3], 0.1, 0.02).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 1.0 }, cap).unwrap();
        let r = regularized_defining(&f, 0.05, 0.0).unwrap();
        let node = [2, 7, 4];
        let xi = r.grid().point(node);
        let x1 = 0.03;
        let expected =
            r.reference(x1, node) + 0.05 * (x1 * x1 + xi.iter().map(|v| v * v).sum::<f64>()) + 0.05;
        assert_eq!(r.value(x1, node), expected);
        let root = r.upper_root(node).unwrap();
        assert!(r.value(root, node).abs() < 1e-15);
    }

    #[test]
    fn ball_cap_containment() {
        let g = Grid3::centered_cube([0.0; 3], 0.1 + 0.005, 0.0025).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 1.0 }, cap).unwrap();
        let r = regularized_defining(&f, 0.05, 0.005).unwrap();
        let c = r.check_containment().unwrap();
        assert_eq!(c.nodes, r.grid().len());
    }

    #[test]
    fn oversized_delta_is_rejected() {
        let g = Grid3::centered_cube([0.0; 3], 0.1, 0.02).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 1.0 }, cap).unwrap();
        assert!(matches!(
            regularized_defining(&f, 0.01, 0.05),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn strongly_convex_graph_breaks_containment() {
        // mollifying 200 |xi|^2 adds 600 m2 delta^2, more than eps near the origin
        let g = Grid3::centered_cube([0.0; 3], 0.2, 0.02).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 400.0 }, |p| {
            200.0 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
        })
        .unwrap();
        let r = regularized_defining(&f, 0.05, 0.05).unwrap();
        assert!(matches!(r.check_containment(), Err(Error::Parameter(_))));
    }
}
