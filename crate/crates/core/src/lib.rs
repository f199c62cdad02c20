//! Numerical verification of pseudoconvexity for domains in `C^2` with
//! `C^{1,1}` boundary.
//!
//! The crate provides
//!
//! * [`field`]: grids, gridded fields, finite-difference stencils, quadrature;
//! * [`levi`]: the Levi condition, the tangential operator `Delta_tau` and its
//!   graph form, complex slices and the Green identity on discs;
//! * [`mollify`]: radial mollifiers, convolution, regularized defining
//!   functions and the sign-preservation certificate for mollified data;
//! * [`staircase`]: fat Cantor systems, devil's staircases, the `C^{1,1}`
//!   profile `F` and the Hartogs counterexample built from it;
//! * [`potential`]: square Cantor sets, Frostman measures, Green potentials
//!   on the disc and Zygmund-class Hartogs domains.
//!
//! All analysis types are generic over the scalar type ([`Real`] for floating
//! point, [`Exact`] for the interval construction, which also runs on
//! `BigRational`). The aliases below fix the common `f64` instantiation.

pub mod error;
pub mod field;
pub mod levi;
pub mod mollify;
pub mod potential;
pub mod scalar;
pub mod staircase;

pub use error::{Error, Result};
pub use scalar::{Exact, Real};

pub type Complex64 = num_complex::Complex<f64>;

pub type Grid = field::Grid3<f64>;
pub type Field3 = field::ScalarField3<f64>;
pub type Disc = field::DiscField<f64>;
pub type Tangent = levi::TangentPair<f64>;
pub type Kernel = mollify::BumpKernel<f64>;
pub type Cantor = staircase::CantorSystem<f64>;
pub type ExactCantor = staircase::CantorSystem<num_rational::BigRational>;
pub type Staircase = staircase::StaircaseIterates<f64>;
pub type Profile = staircase::FatF<f64>;
pub type Hartogs = staircase::HartogsDomain<f64>;
pub type SquareSet = potential::SquareCantor<f64>;
pub type Measure = potential::AtomicMeasure<f64>;
pub type Potential = potential::GreenPotential<f64>;
