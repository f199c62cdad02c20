//! Radial mollifiers, 3-D convolution, regularized defining functions and the
//! sign-preservation certificate for mollified data.

mod certificate;
mod convolve;
mod kernel;
mod lifted;
mod regularized;

pub use certificate::{
    delta_sweep, mollifier_certificate, mollifier_certificate_lifted, CertificateParams,
    CertificateReport, SLOPE_FLOOR,
};
pub use convolve::{convolve3, MollifiedField};
pub use kernel::{make_kernel, BumpKernel, MarginalCdf};
pub use lifted::{LiftedProfile, PiecewiseQuadratic};
pub use regularized::{
    containment_sweep, regularized_defining, Containment, RegularizedDefining, SweepPoint,
};
