//! The Levi condition in `C^2` and its graph form.
//!
//! A boundary written locally as `x1 < phi(y1, z2)` is pseudoconvex where
//! `-Delta_{tau(phi)} phi >= 0`, with `tau(phi) = (-phi_{z2} / 2, (1 + i phi_{y1}) / 2)`.
//! That quantity coincides with the Levi expression of `rho = x1 - phi`.

mod defining;
mod graph;
mod green;
mod polynomial;
mod slice;
mod tangent;

pub use defining::{
    levi_condition_2d, levi_from_jet, Ball, Defining2, G2Model, GraphDefining, HartogsLifted,
    Hyperplane, LeviJet, PlanarJet, SampledDefining,
};
pub use graph::{
    graph_levi, graph_levi_jet, levi_scan, Classification, LeviSample, LeviSummary, ScanOptions,
};
pub use green::{green_identity, green_identity_residual, log_weight_rectangle, GreenIdentity};
pub use polynomial::{BallCap, Graph3, Poly3};
pub use slice::{slice_graph, slice_lower_bound, FnGraph, GraphFunction, SliceBound};
pub use tangent::{
    delta_tau, delta_tau_complex, delta_tau_jet, delta_tau_real, tau_of_jet, tau_of_phi,
    TangentPair,
};
