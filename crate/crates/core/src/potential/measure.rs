use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cantor::SquareCantor;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, lit, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Atom<T> {
    pub z: [T; 2],
    pub mass: T,
}

impl<T: Real> Atom<T> {
    pub fn location(&self) -> Complex<T> {
        Complex::new(self.z[0], self.z[1])
    }
}

/// Finite sum of point masses, ordered by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AtomicMeasure<T> {
    atoms: Vec<Atom<T>>,
    generation: usize,
}

impl<T: Real> AtomicMeasure<T> {
    pub fn new(atoms: Vec<Atom<T>>, generation: usize) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("a measure needs at least one atom".into()));
        }
        if let Some(a) = atoms
            .iter()
            .find(|a| !(a.mass > T::zero()) || !a.z[0].is_finite() || !a.z[1].is_finite())
        {
            return Err(Error::Parameter(format!(
                "atom at ({}, {}) has mass {}",
                to_f64(a.z[0]),
                to_f64(a.z[1]),
                to_f64(a.mass)
            )));
        }
        Ok(Self { atoms, generation })
    }

    /// Unit point mass at `z`.
    pub fn dirac(z: Complex<T>) -> Self {
        Self {
            atoms: vec![Atom {
                z: [z.re, z.im],
                mass: T::one(),
            }],
            generation: 0,
        }
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn total_mass(&self) -> T {
        compensated_sum(self.atoms.iter().map(|a| a.mass))
    }

    /// Mass of the atoms satisfying `inside`.
    pub fn mass_where(&self, inside: impl Fn(Complex<T>) -> bool) -> T {
        compensated_sum(
            self.atoms
                .iter()
                .filter(|a| inside(a.location()))
                .map(|a| a.mass),
        )
    }

    /// `mu(D(z, r))`, closed disc.
    pub fn mass_in_disc(&self, z: Complex<T>, r: T) -> T {
        self.mass_where(|w| (w - z).norm() <= r)
    }
}

/// The self-similar measure of the generation-`n` set: one atom of mass
/// `4^{-n}` at the centre of every square.
pub fn frostman_measure<T: Real>(set: &SquareCantor<T>) -> AtomicMeasure<T> {
    let m = lit::<T>(0.25).powi(set.generation() as i32);
    let atoms = set
        .centres()
        .into_iter()
        .map(|c| Atom {
            z: [c.re, c.im],
            mass: m,
        })
        .collect();
    AtomicMeasure {
        atoms,
        generation: set.generation(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub alpha: f64,
    pub n: usize,
    /// `sup mu(D(z, r)) / r^alpha` over the sampled centres and radii.
    #[serde(rename = "C")]
    pub c: f64,
    pub samples: usize,
    pub argmax_centre: [f64; 2],
    pub argmax_radius: f64,
}

/// Growth constant of `mu` over all atom locations as centres and the dyadic
/// radii `2^{-k}` between the diameter of a generation-`n` square and 1.
///
/// Below that diameter every atom stands for a whole square and the ratio
/// only measures the discretisation.
pub fn frostman_certificate<T: Real>(
    set: &SquareCantor<T>,
    mu: &AtomicMeasure<T>,
) -> GrowthCertificate {
    let alpha = to_f64(set.alpha());
    let diam = to_f64(set.side()) * std::f64::consts::SQRT_2;
    let radii: Vec<f64> = (0..)
        .map(|k| 0.5f64.powi(k))
        .take_while(|r| *r >= diam)
        .collect();
    let atoms: Vec<(Complex<f64>, f64)> = mu
        .atoms()
        .iter()
        .map(|a| (Complex::new(to_f64(a.z[0]), to_f64(a.z[1])), to_f64(a.mass)))
        .collect();
    let best = atoms
        .par_iter()
        .map(|&(z, _)| {
            let mut d: Vec<(f64, f64)> = atoms.iter().map(|&(w, m)| ((w - z).norm(), m)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = (f64::NEG_INFINITY, z, 0.0);
            let (mut k, mut acc) = (0, 0.0);
            for &r in radii.iter().rev() {
                while k < d.len() && d[k].0 <= r {
                    acc += d[k].1;
                    k += 1;
                }
                let ratio = acc / r.powf(alpha);
                if ratio > best.0 {
                    best = (ratio, z, r);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("measure has atoms");
    GrowthCertificate {
        alpha,
        n: set.generation(),
        c: best.0,
        samples: atoms.len() * radii.len(),
        argmax_centre: [best.1.re, best.1.im],
        argmax_radius: best.2,
    }
}
