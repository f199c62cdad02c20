use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::AtomicMeasure;
use crate::error::{Error, Result};
use crate::field::quadrature::gauss_legendre;
use crate::field::DiscField;
use crate::scalar::{compensated_sum, lit, to_f64, CompensatedSum, Real};

/// `u(z) = -sum_j m_j log|(z - w_j) / (1 - z conj(w_j))|`.
#[derive(Debug)]
pub struct GreenPotential<T> {
    measure: AtomicMeasure<T>,
    spacing: OnceLock<f64>,
}

impl<T: Clone> Clone for GreenPotential<T> {
    fn clone(&self) -> Self {
        Self {
            measure: self.measure.clone(),
            spacing: self.spacing.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PotentialSample<T> {
    /// `+infinity` when `at_atom`.
    pub value: T,
    pub at_atom: bool,
}

impl<T: Real> GreenPotential<T> {
    pub fn new(measure: AtomicMeasure<T>) -> Result<Self> {
        if let Some(a) = measure
            .atoms()
            .iter()
            .find(|a| !(a.location().norm() < T::one()))
        {
            return Err(Error::Domain(format!(
                "atom at ({}, {})",
                to_f64(a.z[0]),
                to_f64(a.z[1])
            )));
        }
        Ok(Self {
            measure,
            spacing: OnceLock::new(),
        })
    }

    pub fn measure(&self) -> &AtomicMeasure<T> {
        &self.measure
    }

    /// Green kernel `-log|(z - w) / (1 - z conj(w))|`, symmetric in `z, w`.
    pub fn kernel(z: Complex<T>, w: Complex<T>) -> T {
        -((z - w).norm() / (Complex::new(T::one(), T::zero()) - z * w.conj()).norm()).ln()
    }

    /// `u(z)`; `+infinity` at an atom.
    pub fn value(&self, z: Complex<T>) -> T {
        let mut acc = CompensatedSum::new();
        for a in self.measure.atoms() {
            let w = a.location();
            if z == w {
                return T::infinity();
            }
            acc.add(a.mass * Self::kernel(z, w));
        }
        acc.value()
    }

    pub fn evaluate(&self, z: Complex<T>) -> Result<PotentialSample<T>> {
        if z.norm() > T::one() + lit::<T>(8.0) * T::epsilon() {
            return Err(Error::Domain(format!(
                "z = {} + {}i",
                to_f64(z.re),
                to_f64(z.im)
            )));
        }
        let value = self.value(z);
        Ok(PotentialSample {
            value,
            at_atom: value == T::infinity(),
        })
    }

    /// Smallest distance between two atoms (infinite for a single atom).
    pub fn atom_spacing(&self) -> f64 {
        *self.spacing.get_or_init(|| {
            let pts: Vec<Complex<f64>> = self
                .measure
                .atoms()
                .iter()
                .map(|a| Complex::new(to_f64(a.z[0]), to_f64(a.z[1])))
                .collect();
            pts.par_iter()
                .enumerate()
                .map(|(i, p)| {
                    pts[i + 1..]
                        .iter()
                        .map(|q| (q - p).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .reduce(|| f64::INFINITY, f64::min)
        })
    }

    pub fn field(&self, radius: T, spacing: T) -> Result<DiscField<T>> {
        DiscField::from_fn(radius, spacing, |z| self.value(z))
    }

    fn grad_fd(&self, z: Complex<T>, h: T) -> [T; 2] {
        let two_h = lit::<T>(2.0) * h;
        let ex = Complex::new(h, T::zero());
        let ey = Complex::new(T::zero(), h);
        [
            (self.value(z + ex) - self.value(z - ex)) / two_h,
            (self.value(z + ey) - self.value(z - ey)) / two_h,
        ]
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Cell<T> {
    pub x0: T,
    pub y0: T,
    pub x1: T,
    pub y1: T,
}

impl<T: Real> Cell<T> {
    pub fn centred(c: Complex<T>, side: T) -> Self {
        let h = lit::<T>(0.5) * side;
        Self {
            x0: c.re - h,
            y0: c.im - h,
            x1: c.re + h,
            y1: c.im + h,
        }
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }

    pub fn boundary_distance(&self, z: Complex<T>) -> T {
        let dx = (z.re - self.x0).abs().min((z.re - self.x1).abs());
        let dy = (z.im - self.y0).abs().min((z.im - self.y1).abs());
        let inside_x = z.re >= self.x0 && z.re <= self.x1;
        let inside_y = z.im >= self.y0 && z.im <= self.y1;
        match (inside_x, inside_y) {
            (true, true) => dx.min(dy),
            (true, false) => dy,
            (false, true) => dx,
            (false, false) => dx.hypot(dy),
        }
    }

    fn width(&self) -> T {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassRecovery {
    /// `-(1 / 2 pi)` times the flux of `grad u` out of the region.
    pub recovered: f64,
    /// Mass of the atoms inside the region.
    pub expected: f64,
    /// Relative to `expected`, or to the total mass when the region holds no atom.
    pub relative_error: f64,
    pub atoms: usize,
}

impl MassRecovery {
    fn new(recovered: f64, expected: f64, total: f64, atoms: usize) -> Self {
        let scale = if expected > 0.0 { expected } else { total };
        Self {
            recovered,
            expected,
            relative_error: (recovered - expected).abs() / scale,
            atoms,
        }
    }
}

fn check_spacing<T: Real>(u: &GreenPotential<T>, h: T) -> Result<()> {
    let s = u.atom_spacing();
    if s.is_finite() && to_f64(h) > s / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!(
            "step {} exceeds atom spacing / 8 = {}",
            to_f64(h),
            s / 8.0
        )));
    }
    Ok(())
}

fn panels(len: f64, h: f64) -> usize {
    let q = len / h;
    let r = q.round();
    if (q - r).abs() < 1e-9 * q.max(1.0) {
        (r as usize).max(1)
    } else {
        q.ceil() as usize
    }
}

/// Outward flux of `grad u` through the edges of `cell`: normal derivatives by
/// central differences with step `h`, integrated with 4-point Gauss-Legendre
/// on panels of length at most `h`.
fn cell_flux<T: Real>(u: &GreenPotential<T>, cell: &Cell<T>, h: T) -> T {
    let (gx, gw) = gauss_legendre::<T>(4);
    let half = lit::<T>(0.5);
    let edge = |a: Complex<T>, b: Complex<T>, normal: usize, sign: T| {
        let len = (b - a).norm();
        let n = panels(to_f64(len), to_f64(h));
        let step = (b - a) / lit::<T>(n as f64);
        let mut acc = CompensatedSum::new();
        for p in 0..n {
            for (x, w) in gx.iter().zip(&gw) {
                let t = lit::<T>(p as f64) + half * (*x + T::one());
                let g = u.grad_fd(a + step * t, h);
                acc.add(sign * g[normal] * *w);
            }
        }
        acc.value() * half * len / lit::<T>(n as f64)
    };
    let c = |x, y| Complex::new(x, y);
    let parts = [
        edge(c(cell.x0, cell.y0), c(cell.x1, cell.y0), 1, -T::one()),
        edge(c(cell.x1, cell.y0), c(cell.x1, cell.y1), 0, T::one()),
        edge(c(cell.x0, cell.y1), c(cell.x1, cell.y1), 1, T::one()),
        edge(c(cell.x0, cell.y0), c(cell.x0, cell.y1), 0, -T::one()),
    ];
    compensated_sum(parts)
}

/// Mass of `-Delta u / (2 pi)` in `cell`, recovered from the flux of `grad u`
/// through its boundary and compared with `mu(cell)`.
pub fn laplacian_mass_recovery<T: Real>(
    u: &GreenPotential<T>,
    cell: &Cell<T>,
    h: T,
) -> Result<MassRecovery> {
    let reach = cell
        .x0
        .abs()
        .max(cell.x1.abs())
        .hypot(cell.y0.abs().max(cell.y1.abs()));
    if !(cell.x1 > cell.x0 && cell.y1 > cell.y0) || !(reach + cell.width() <= T::one()) {
        return Err(Error::Domain(
            "cell must keep a cell width from the unit circle".into(),
        ));
    }
    check_spacing(u, h)?;
    let mu = u.measure();
    if let Some(a) = mu
        .atoms()
        .iter()
        .find(|a| cell.boundary_distance(a.location()) <= h)
    {
        return Err(Error::AmbiguousCell(format!(
            "[{}, {}] x [{}, {}] (atom at ({}, {}); shift the cell by h/2)",
            to_f64(cell.x0),
            to_f64(cell.x1),
            to_f64(cell.y0),
            to_f64(cell.y1),
            to_f64(a.z[0]),
            to_f64(a.z[1])
        )));
    }
    let flux = cell_flux(u, cell, h);
    let recovered = -to_f64(flux) / (2.0 * PI);
    let inside: Vec<_> = mu
        .atoms()
        .iter()
        .filter(|a| cell.contains(a.location()))
        .collect();
    let expected = to_f64(compensated_sum(inside.iter().map(|a| a.mass)));
    Ok(MassRecovery::new(
        recovered,
        expected,
        to_f64(mu.total_mass()),
        inside.len(),
    ))
}

/// Recovery over a union of disjoint cells: the sum of the per-cell results.
pub fn union_mass_recovery<T: Real>(
    u: &GreenPotential<T>,
    cells: &[Cell<T>],
    h: T,
) -> Result<MassRecovery> {
    let parts = cells
        .par_iter()
        .map(|c| laplacian_mass_recovery(u, c, h))
        .collect::<Result<Vec<_>>>()?;
    let recovered = compensated_sum(parts.iter().map(|p| p.recovered));
    let expected = compensated_sum(parts.iter().map(|p| p.expected));
    let atoms = parts.iter().map(|p| p.atoms).sum();
    Ok(MassRecovery::new(
        recovered,
        expected,
        to_f64(u.measure().total_mass()),
        atoms,
    ))
}

/// Recovery over the disc `|z| < r`, with the radial derivative by central
/// differences and the periodic trapezoid rule on nodes at most `h` apart.
pub fn disc_mass_recovery<T: Real>(u: &GreenPotential<T>, r: T, h: T) -> Result<MassRecovery> {
    if !(r > T::zero() && r + h < T::one()) {
        return Err(Error::Domain(format!("circle of radius {}", to_f64(r))));
    }
    check_spacing(u, h)?;
    let mu = u.measure();
    if let Some(a) = mu
        .atoms()
        .iter()
        .find(|a| (a.location().norm() - r).abs() <= h)
    {
        return Err(Error::AmbiguousCell(format!(
            "|z| < {} (atom at ({}, {}))",
            to_f64(r),
            to_f64(a.z[0]),
            to_f64(a.z[1])
        )));
    }
    let n = (2.0 * PI * to_f64(r) / to_f64(h)).ceil() as usize;
    let vals: Vec<T> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = lit::<T>(2.0 * PI * k as f64 / n as f64);
            let e = Complex::new(t.cos(), t.sin());
            (u.value(e * (r + h)) - u.value(e * (r - h))) / (lit::<T>(2.0) * h)
        })
        .collect();
    let flux = to_f64(compensated_sum(vals)) * 2.0 * PI * to_f64(r) / n as f64;
    let inside: Vec<_> = mu
        .atoms()
        .iter()
        .filter(|a| a.location().norm() < r)
        .collect();
    let expected = to_f64(compensated_sum(inside.iter().map(|a| a.mass)));
    Ok(MassRecovery::new(
        -flux / (2.0 * PI),
        expected,
        to_f64(mu.total_mass()),
        inside.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{build_square_cantor, frostman_measure};

    #[test]
    fn single_atom_at_origin() {
        let u = GreenPotential::new(AtomicMeasure::dirac(Complex::new(0.0, 0.0))).unwrap();
        assert!((u.value(Complex::new(0.5, 0.0)) - 2f64.ln()).abs() < 1e-12);
        let s = u.evaluate(Complex::new(0.0, 0.0)).unwrap();
        assert!(s.at_atom && s.value == f64::INFINITY);
        assert!(u.evaluate(Complex::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn vanishes_on_unit_circle() {
        let mu = frostman_measure(&build_square_cantor(1.0, 3).unwrap());
        let u = GreenPotential::new(mu).unwrap();
        for k in 0..64 {
            let t = 2.0 * PI * k as f64 / 64.0;
            assert!(u.value(Complex::new(t.cos(), t.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn value_at_origin_by_direct_sum() {
        let mu = frostman_measure(&build_square_cantor(1.0f64, 5).unwrap());
        let direct: f64 = mu
            .atoms()
            .iter()
            .map(|a| -a.mass * a.location().norm().ln())
            .sum();
        let u = GreenPotential::new(mu).unwrap();
        assert!(direct > 0.0);
        assert!((u.value(Complex::new(0.0, 0.0)) - direct).abs() < 1e-12);
    }

    #[test]
    fn empty_cell_recovers_nothing() {
        let mu = frostman_measure(&build_square_cantor(1.0, 3).unwrap());
        let u = GreenPotential::new(mu).unwrap();
        let h = u.atom_spacing() / 8.0;
        let cell = Cell::centred(Complex::new(0.0, 0.0), 0.1);
        let r = laplacian_mass_recovery(&u, &cell, h).unwrap();
        assert_eq!(r.atoms, 0);
        assert!(r.relative_error < 1e-3);
    }

    #[test]
    fn atom_on_edge_is_ambiguous() {
        let u = GreenPotential::new(AtomicMeasure::dirac(Complex::new(0.1, 0.0))).unwrap();
        let cell = Cell {
            x0: 0.1,
            y0: -0.1,
            x1: 0.3,
            y1: 0.1,
        };
        assert!(matches!(
            laplacian_mass_recovery(&u, &cell, 0.01),
            Err(Error::AmbiguousCell(_))
        ));
    }

    #[test]
    fn split_cells_add_up() {
        let mu = frostman_measure(&build_square_cantor(1.0, 2).unwrap());
        let u = GreenPotential::new(mu).unwrap();
        let h = 1.0 / 256.0;
        let big = Cell {
            x0: 0.0,
            y0: 0.0,
            x1: 0.375,
            y1: 0.375,
        };
        let halves = [Cell { x1: 0.25, ..big }, Cell { x0: 0.25, ..big }];
        let whole = laplacian_mass_recovery(&u, &big, h).unwrap();
        let parts = union_mass_recovery(&u, &halves, h).unwrap();
        assert_eq!((whole.atoms, parts.atoms), (4, 4));
        assert!((whole.recovered - parts.recovered).abs() < 1e-10);
        assert!(whole.relative_error < 0.02, "{whole:?}");
    }
}
