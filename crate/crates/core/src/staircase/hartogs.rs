use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cantor::{build_cantor, default_alphas, CantorSystem};
use super::cutoff::Cutoff;
use super::fat::{fat_f, find_x0, FatF, X0};
use crate::error::{Error, Result};
use crate::field::{circle_mean, DiscField};
use crate::levi::{Classification, LeviSample};
use crate::potential::ZygmundCap;
use crate::scalar::{lit, to_f64, Real};

/// Choice of the coefficient `c1` in front of the staircase bump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum C1Rule {
    /// `1 / (32 sup |chi''|)`, valid for any `F` with `|F| <= 1`.
    Conservative,
    /// `1 / (16 sup|F| sup|chi''|)`, the largest value keeping
    /// `Delta phi <= c1 F'' chi - 1`.
    Admissible,
    Fixed {
        value: f64,
    },
}

impl C1Rule {
    pub fn value(&self, sup_f: f64, sup_chi2: f64) -> f64 {
        match *self {
            C1Rule::Conservative => 1.0 / (32.0 * sup_chi2),
            C1Rule::Admissible => 1.0 / (16.0 * sup_f * sup_chi2),
            C1Rule::Fixed { value } => value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseParams {
    /// Requested constant `L = ((1 - alpha_1)^{-1} - 1) / 2` of the quadratic bound.
    pub l_target: f64,
    pub generations: usize,
    pub c1_rule: C1Rule,
    /// Radius of the sampled disc (the cap tends to `-infinity` at `|z| = 1`).
    pub radius: f64,
    pub spacing: f64,
    pub cutoff: Cutoff,
}

impl Default for StaircaseParams {
    fn default() -> Self {
        Self {
            l_target: 49.5,
            generations: 10,
            c1_rule: C1Rule::Admissible,
            radius: 0.9,
            spacing: 1.0 / 512.0,
            cutoff: Cutoff::default(),
        }
    }
}

/// `alpha_1` with `((1 - alpha_1)^{-1} - 1) / 2 = l`.
pub fn alpha1_for(l: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Parameter(format!("L must be positive, got {l}")));
    }
    Ok(1.0 - 1.0 / (2.0 * l + 1.0))
}

/// `phi(z) = log(1 - |z|^2) / 2 + c1 F(x + 1/2) chi(4y)`.
#[derive(Clone, Debug)]
pub struct StaircaseCap<T> {
    pub profile: FatF<T>,
    pub system: CantorSystem<f64>,
    pub cutoff: Cutoff,
    pub c1: f64,
    pub c1_rule: C1Rule,
    pub x0: X0,
}

impl<T: Real> StaircaseCap<T> {
    pub fn bump(&self, z: Complex<T>) -> T {
        let chi = self.cutoff.value(4.0 * to_f64(z.im));
        if chi == 0.0 {
            return T::zero();
        }
        self.profile.value(z.re + lit(0.5)) * lit(self.c1 * chi)
    }

    pub fn evaluate(&self, z: Complex<T>) -> T {
        lit::<T>(0.5) * (T::one() - z.norm_sqr()).ln() + self.bump(z)
    }

    /// The point `x0 - 1/2` of the disc where the quadratic lower bound holds.
    pub fn z0(&self) -> f64 {
        self.x0.x0 - 0.5
    }

    /// Distance from `z` to the segment `{y = 0, x + 1/2 in E}` with `E` the
    /// last generation of retained intervals.
    pub fn segment_distance(&self, z: Complex<f64>) -> f64 {
        self.system.distance_to_retained(z.re + 0.5).hypot(z.im)
    }

    pub fn near_kink(&self, z: Complex<f64>, h: f64) -> bool {
        if 4.0 * z.im.abs() >= self.cutoff.outer + 4.0 * h {
            return false;
        }
        let x = z.re + 0.5;
        let ks = self.profile.kinks();
        let k = ks.partition_point(|b| to_f64(*b) < x - h);
        k < ks.len() && to_f64(ks[k]) <= x + h
    }
}

#[derive(Clone, Debug)]
pub enum CapKind<T> {
    Ball,
    Staircase(Box<StaircaseCap<T>>),
    Zygmund(Box<ZygmundCap<T>>),
}

impl<T: Real> CapKind<T> {
    /// Distance from `z` to the set where the cap fails to be smooth: the
    /// segment over the staircase's Cantor set, or the square Cantor set.
    pub fn singular_distance(&self, z: Complex<T>) -> Option<f64> {
        match self {
            CapKind::Ball => None,
            CapKind::Staircase(s) => {
                Some(s.segment_distance(Complex::new(to_f64(z.re), to_f64(z.im))))
            }
            CapKind::Zygmund(c) => Some(to_f64(c.set.distance(z))),
        }
    }
}

/// Serializable summary of a [`CapKind`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapTag {
    Ball,
    Staircase {
        c1: f64,
        c1_rule: C1Rule,
        l: f64,
        alpha1: f64,
        generations: usize,
        x0: f64,
        z0: f64,
        sup_f: f64,
        sup_chi2: f64,
    },
    Zygmund {
        alpha: f64,
        generation: usize,
        atoms: usize,
    },
}

/// Hartogs domain `{|z| < 1, log|w| < phi(z)}` with the cap `phi` sampled on a disc.
#[derive(Clone, Debug)]
pub struct HartogsDomain<T> {
    cap: DiscField<T>,
    kind: CapKind<T>,
}

impl<T: Real> HartogsDomain<T> {
    pub fn new(cap: DiscField<T>, kind: CapKind<T>) -> Self {
        Self { cap, kind }
    }

    pub fn cap(&self) -> &DiscField<T> {
        &self.cap
    }

    pub fn kind(&self) -> &CapKind<T> {
        &self.kind
    }

    pub fn tag(&self) -> CapTag {
        match &self.kind {
            CapKind::Ball => CapTag::Ball,
            CapKind::Zygmund(z) => CapTag::Zygmund {
                alpha: to_f64(z.set.alpha()),
                generation: z.set.generation(),
                atoms: z.set.len(),
            },
            CapKind::Staircase(s) => CapTag::Staircase {
                c1: s.c1,
                c1_rule: s.c1_rule,
                l: s.x0.l,
                alpha1: to_f64(s.profile.alpha1()),
                generations: s.profile.generations(),
                x0: s.x0.x0,
                z0: s.z0(),
                sup_f: to_f64(s.profile.sup_norm()),
                sup_chi2: s.cutoff.sup_second(),
            },
        }
    }

    /// Membership of `(z, w)`, with `phi` interpolated bilinearly.
    pub fn contains(&self, z: Complex<T>, w: Complex<T>) -> Result<bool> {
        Ok(w.norm().ln() < self.cap.bilinear(z)?)
    }
}

/// The unit ball as a Hartogs domain: `phi = log(1 - |z|^2) / 2`.
pub fn ball_domain<T: Real>(radius: T, spacing: T) -> Result<HartogsDomain<T>> {
    if !(radius < T::one()) {
        return Err(Error::Domain("the cap is finite only on |z| < 1".into()));
    }
    let cap = DiscField::from_fn(radius, spacing, |z: Complex<T>| {
        lit::<T>(0.5) * (T::one() - z.norm_sqr()).ln()
    })?;
    Ok(HartogsDomain::new(cap, CapKind::Ball))
}

/// The staircase counterexample: `phi = log(1 - |z|^2)/2 + c1 F(x + 1/2) chi(4y)`.
pub fn hartogs_staircase<T: Real>(params: &StaircaseParams) -> Result<HartogsDomain<T>> {
    if !(params.radius < 1.0) {
        return Err(Error::Domain("the cap is finite only on |z| < 1".into()));
    }
    let alpha1 = alpha1_for(params.l_target)?;
    let n = params.generations;
    let system = build_cantor(&default_alphas(alpha1, n), n)?;
    let profile: FatF<T> = fat_f(&system, n)?;
    let x0 = find_x0(&profile, 1000)?;
    let sup_chi2 = params.cutoff.sup_second();
    let c1 = params.c1_rule.value(to_f64(profile.sup_norm()), sup_chi2);
    let cap = StaircaseCap {
        profile,
        system,
        cutoff: params.cutoff,
        c1,
        c1_rule: params.c1_rule,
        x0,
    };
    let field = DiscField::from_fn(lit(params.radius), lit(params.spacing), |z| cap.evaluate(z))?;
    Ok(HartogsDomain::new(field, CapKind::Staircase(Box::new(cap))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// `Delta phi` above this value marks a node as violating.
    pub laplacian_tol: f64,
    /// Circle-mean excess above this value marks a node as violating.
    pub mean_tol: f64,
    /// Radii, in cells, of the circle-mean tests at kink-adjacent nodes.
    pub radii_cells: Vec<usize>,
    /// Nodes farther than this from the singular segment are checked against `far_threshold`.
    pub far_radius: f64,
    pub far_threshold: f64,
    /// Radii of the circle means of the exact cap around `z0`, as fractions
    /// of the radius on which the quadratic bound holds.
    pub z0_fractions: Vec<f64>,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            laplacian_tol: 1e-6,
            mean_tol: 1e-12,
            radii_cells: vec![2, 4],
            far_radius: 0.1,
            far_threshold: -0.5,
            z0_fractions: vec![0.5, 0.25, 0.125],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanExcess {
    pub r: f64,
    /// `mean_{|zeta|=r} phi(z0 + zeta) - phi(z0)`; positive means `phi` is not superharmonic there.
    pub excess: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HartogsScan<T> {
    pub cap: CapTag,
    pub spacing: f64,
    pub nodes: usize,
    pub violating: usize,
    pub kink_adjacent: usize,
    pub circle_violations: usize,
    pub max_laplacian: f64,
    /// Largest distance from a violating node to the singular set.
    pub max_violation_distance: Option<f64>,
    pub violations_within_2h: Option<bool>,
    /// Largest `Delta phi` over nodes farther than `far_radius` from the singular set.
    pub far_max_laplacian: Option<f64>,
    pub far_ok: Option<bool>,
    /// Half the largest Hessian eigenvalue modulus of the log term within the
    /// quadratic-bound radius of `z0`.
    pub c3: Option<f64>,
    /// `2 c3 / c1`: below this `L` the quadratic bound cannot beat the log term.
    pub l_threshold: Option<f64>,
    pub l_below_threshold: Option<bool>,
    pub z0_excess: Vec<MeanExcess>,
    #[serde(skip)]
    pub samples: Vec<LeviSample<T>>,
}

/// Half the largest Hessian eigenvalue modulus of `log(1 - |z|^2) / 2` on
/// `|z| <= r`: the radial eigenvalue `-(1 + r^2) / (1 - r^2)^2` dominates and
/// grows with `r`.
fn log_term_c3(r: f64) -> f64 {
    let q = r * r;
    0.5 * (1.0 + q) / (1.0 - q).powi(2)
}

fn exact_circle_mean(f: impl Fn(Complex<f64>) -> f64, c: Complex<f64>, r: f64) -> f64 {
    let n = 4096;
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            f(c + Complex::new(r * t.cos(), r * t.sin()))
        })
        .sum::<f64>()
        / n as f64
}

/// Classifies each interior node of the cap by the sign of the 5-point
/// Laplacian and, next to the kinks of the staircase bump, by circle means.
pub fn subharmonicity_scan<T: Real>(
    domain: &HartogsDomain<T>,
    settings: &ScanSettings,
) -> Result<HartogsScan<T>> {
    let cap = domain.cap();
    let h = to_f64(cap.spacing());
    let stair = match domain.kind() {
        CapKind::Staircase(s) => Some(s.as_ref()),
        _ => None,
    };
    let nodes: Vec<[usize; 2]> = cap
        .defined_nodes()
        .filter(|&n| cap.laplacian(n).is_some())
        .collect();
    let rows: Vec<(LeviSample<T>, bool, bool, f64)> = nodes
        .par_iter()
        .map(|&n| {
            let lap = cap.laplacian(n).expect("filtered");
            let z = cap.coord(n);
            let zf = Complex::new(to_f64(z.re), to_f64(z.im));
            let kink = stair.is_some_and(|s| s.near_kink(zf, h));
            let mut circle_bad = false;
            if kink {
                let centre = cap.get(n).expect("defined");
                for &c in &settings.radii_cells {
                    let r = lit::<T>(c as f64 * h);
                    if let Ok(m) = circle_mean(cap, z, r) {
                        if to_f64(m - centre) > settings.mean_tol {
                            circle_bad = true;
                        }
                    }
                }
            }
            let lap_f = to_f64(lap);
            let mut class = Classification::of(-lap_f, settings.laplacian_tol);
            if circle_bad {
                class = Classification::Violating;
            }
            let dist = domain.kind().singular_distance(z).unwrap_or(f64::INFINITY);
            let sample = LeviSample {
                node: [n[0], n[1], 0],
                point: [z.re, z.im, T::zero()],
                levi_value: -lap,
                delta_tau_value: lap,
                classification: class,
            };
            (sample, kink, circle_bad, dist)
        })
        .collect();
    let mut scan = HartogsScan {
        cap: domain.tag(),
        spacing: h,
        nodes: rows.len(),
        violating: 0,
        kink_adjacent: 0,
        circle_violations: 0,
        max_laplacian: f64::NEG_INFINITY,
        max_violation_distance: None,
        violations_within_2h: None,
        far_max_laplacian: None,
        far_ok: None,
        c3: None,
        l_threshold: None,
        l_below_threshold: None,
        z0_excess: Vec::new(),
        samples: Vec::with_capacity(rows.len()),
    };
    let mut far_max = f64::NEG_INFINITY;
    let mut far_seen = false;
    let mut max_dist = f64::NEG_INFINITY;
    for (s, kink, circle_bad, dist) in rows {
        let lap = to_f64(s.delta_tau_value);
        scan.max_laplacian = scan.max_laplacian.max(lap);
        scan.kink_adjacent += kink as usize;
        scan.circle_violations += circle_bad as usize;
        if s.classification == Classification::Violating {
            scan.violating += 1;
            max_dist = max_dist.max(dist);
        }
        if dist.is_finite() && dist > settings.far_radius {
            far_seen = true;
            far_max = far_max.max(lap);
        }
        scan.samples.push(s);
    }
    if !matches!(domain.kind(), CapKind::Ball) {
        if scan.violating > 0 {
            scan.max_violation_distance = Some(max_dist);
            scan.violations_within_2h = Some(max_dist <= 2.0 * h);
        }
        if far_seen {
            scan.far_max_laplacian = Some(far_max);
            scan.far_ok = Some(far_max <= settings.far_threshold);
        }
    }
    if let Some(s) = stair {
        let c3 = log_term_c3(s.z0().abs() + s.x0.bound.delta0);
        scan.c3 = Some(c3);
        scan.l_threshold = Some(2.0 * c3 / s.c1);
        scan.l_below_threshold = Some(s.x0.l < 2.0 * c3 / s.c1);
        let eval =
            |z: Complex<f64>| to_f64(s.evaluate(Complex::new(lit::<T>(z.re), lit::<T>(z.im))));
        let z0 = Complex::new(s.z0(), 0.0);
        let centre = eval(z0);
        scan.z0_excess = settings
            .z0_fractions
            .iter()
            .map(|&q| {
                let r = q * s.x0.bound.delta0;
                MeanExcess {
                    r,
                    excess: exact_circle_mean(eval, z0, r) - centre,
                }
            })
            .collect();
    }
    Ok(scan)
}
