//! Fat Cantor sets, devil's staircases, the `C^{1,1}` profile `F` built from
//! them, and the Hartogs domain over the disc whose boundary is `C^{1,1}` and
//! Levi-flat-free on a dense set yet fails to be pseudoconvex.

mod cantor;
mod cutoff;
mod fat;
mod hartogs;
mod iterates;

pub use cantor::{build_cantor, default_alphas, CantorSystem, Interval};
pub use cutoff::Cutoff;
pub use fat::{fat_f, find_x0, FatF, QuadraticBound, X0};
pub use hartogs::{
    alpha1_for, ball_domain, hartogs_staircase, subharmonicity_scan, C1Rule, CapKind, CapTag,
    HartogsDomain, HartogsScan, MeanExcess, ScanSettings, StaircaseCap, StaircaseParams,
};
pub use iterates::{staircase_f, StaircaseIterates};
