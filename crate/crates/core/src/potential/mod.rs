//! Square Cantor sets, their natural measures, Green potentials on the unit
//! disc and the Hartogs domains built from them.

mod cantor;
mod green;
mod measure;
mod zygmund;

pub use cantor::{build_square_cantor, BoxDimension, Square, SquareCantor, MAX_GENERATION};
pub use green::{
    disc_mass_recovery, laplacian_mass_recovery, union_mass_recovery, Cell, GreenPotential,
    MassRecovery, PotentialSample,
};
pub use measure::{frostman_certificate, frostman_measure, Atom, AtomicMeasure, GrowthCertificate};
pub use zygmund::{
    graph_box_dimension, zygmund_domain, zygmund_seminorm, ZygmundCap, ZygmundEstimate,
};
