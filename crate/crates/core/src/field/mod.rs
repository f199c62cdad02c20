//! Grids, gridded scalar fields, finite-difference stencils and quadrature.
//!
//! Coordinates on the three-dimensional parameter space are
//! `xi = (y1, Re z2, Im z2)`. Planar fields live on a square lattice clipped
//! to an open disc.

mod disc;
mod grid;
pub mod io;
pub mod quadrature;
mod scalar_field;
mod stencil;

pub use disc::{circle_mean, DiscField, DiscNode};
pub use grid::{Grid3, Node};
pub use scalar_field::{KinkPlane, Regularity, ScalarField3};
pub use stencil::{complex_wirtinger, fd_gradient, fd_hessian, fd_jet, Jet3, Wirtinger};
