use std::f64::consts::{LN_2, TAU};

use num_complex::Complex;
use pseudoconvex::potential::{
    build_square_cantor, disc_mass_recovery, frostman_certificate, frostman_measure,
    graph_box_dimension, laplacian_mass_recovery, zygmund_seminorm, AtomicMeasure, Cell,
    GreenPotential, ZygmundCap,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "cantor-potential",
    description: "Square Cantor set, Frostman measure, Green potential, mass recovery and dimension estimates",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub generation: usize,
    pub boundary_samples: usize,
    pub disc_radius: f64,
    /// Flux grid spacing as a fraction of the atom spacing.
    pub cells_per_spacing: f64,
    /// Recover the mass of every occupied cell, not only the disc.
    pub per_cell: bool,
    pub certificate_generations: Vec<usize>,
    pub box_generation: usize,
    pub graph_generation: usize,
    pub zygmund_spacing: f64,
    pub zygmund_radius: f64,
    pub zygmund_budget: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            generation: 5,
            boundary_samples: 512,
            disc_radius: 0.9,
            cells_per_spacing: 8.0,
            per_cell: true,
            certificate_generations: vec![4, 5, 6],
            box_generation: 8,
            graph_generation: 5,
            zygmund_spacing: 1.0 / 128.0,
            zygmund_radius: 0.95,
            zygmund_budget: 4096,
        }
    }
}

fn run(v: &Value, cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let mut out = Outcome::default();
    let set = build_square_cantor(p.alpha, p.generation)?;
    let mu = frostman_measure(&set);
    out.check(
        "unit_mass",
        "potential/AtomicMeasure total mass",
        (mu.total_mass() - 1.0).abs() <= 1e-12,
        format!("total mass {}", mu.total_mass()),
    );
    let u = GreenPotential::new(mu)?;

    let boundary = (0..p.boundary_samples)
        .map(|k| {
            let t = TAU * k as f64 / p.boundary_samples as f64;
            u.value(Complex::new(t.cos(), t.sin())).abs()
        })
        .fold(0.0, f64::max);
    out.check(
        "boundary_vanishing",
        "potential/u = 0 on the unit circle",
        boundary <= 1e-10,
        format!("max |u| = {boundary:e} over {} samples", p.boundary_samples),
    );
    let mut lowest = f64::INFINITY;
    for i in 1..20 {
        for k in 0..64 {
            let (r, t) = (0.05 * i as f64, TAU * k as f64 / 64.0);
            lowest = lowest.min(u.value(Complex::from_polar(r, t)));
        }
    }
    let centre = u.value(Complex::new(0.0, 0.0));
    out.check(
        "positivity",
        "potential/u >= 0 in the disc",
        lowest >= -1e-12 && centre > 0.0,
        format!("min u = {lowest:e} on a polar grid, u(0) = {centre}"),
    );
    let single = GreenPotential::new(AtomicMeasure::dirac(Complex::new(0.0, 0.0)))?;
    let half = single.value(Complex::new(0.5, 0.0));
    out.check(
        "single_atom",
        "potential/u(1/2) = log 2 for a unit atom at 0",
        (half - LN_2).abs() <= 1e-12,
        format!("u(1/2) = {half}"),
    );

    let spacing = u.atom_spacing();
    let h = spacing / p.cells_per_spacing;
    let disc = disc_mass_recovery(&u, p.disc_radius, h)?;
    out.check(
        "disc_mass_recovery",
        "potential/Delta u = -mu, whole disc",
        disc.relative_error <= 0.02,
        format!("recovered {} of {}", disc.recovered, disc.expected),
    );
    let mut worst_cell = None;
    if p.per_cell {
        let cells: Vec<Cell<f64>> = set
            .centres()
            .into_iter()
            .map(|c| Cell::centred(c, spacing))
            .collect();
        let rec = cells
            .par_iter()
            .map(|c| laplacian_mass_recovery(&u, c, h))
            .collect::<pseudoconvex::Result<Vec<_>>>()?;
        let worst = rec.iter().map(|r| r.relative_error).fold(0.0, f64::max);
        out.check(
            "cell_mass_recovery",
            "potential/Delta u = -mu, per occupied cell",
            worst <= 0.05,
            format!("worst relative error {worst:e} over {} cells", rec.len()),
        );
        worst_cell = Some(worst);
    }

    let certs: Vec<_> = p
        .certificate_generations
        .iter()
        .map(|&n| {
            let s = build_square_cantor(p.alpha, n)?;
            Ok(frostman_certificate(&s, &frostman_measure(&s)))
        })
        .collect::<pseudoconvex::Result<_>>()?;
    let ratios: Vec<f64> = certs.windows(2).map(|w| w[1].c / w[0].c).collect();
    out.check(
        "frostman_growth",
        "potential/frostman growth constant stable across generations",
        ratios.iter().all(|r| (0.5..=2.0).contains(r)),
        format!("C(n) = {:?}", certs.iter().map(|c| c.c).collect::<Vec<_>>()),
    );

    let planar = build_square_cantor(p.alpha, p.box_generation)?.box_dimension()?;
    out.check(
        "planar_box_dimension",
        "potential/box dimension of the square Cantor set",
        (planar.slope - p.alpha).abs() <= 0.1,
        format!("slope {} against alpha = {}", planar.slope, p.alpha),
    );
    let graph = graph_box_dimension(&ZygmundCap::new(p.alpha, p.graph_generation)?)?;
    out.check(
        "graph_box_dimension",
        "potential/box dimension of the boundary graph set",
        (graph.slope - (1.0 + p.alpha)).abs() <= 0.15,
        format!(
            "slope {} against 1 + alpha = {}",
            graph.slope,
            1.0 + p.alpha
        ),
    );

    let field = u.field(p.zygmund_radius, p.zygmund_spacing)?;
    let m1 = zygmund_seminorm(&field, p.alpha, p.zygmund_budget, cfg.seed)?;
    let m2 = zygmund_seminorm(&field, p.alpha, 2 * p.zygmund_budget, cfg.seed)?;
    let drift = (m2.m - m1.m).abs() / m1.m;
    out.check(
        "zygmund_seminorm_stable",
        "potential/zygmund seminorm finite and stable under budget doubling",
        m1.m.is_finite() && drift <= 0.2,
        format!("M = {} then {} with twice the samples", m1.m, m2.m),
    );

    let mut table = Table::new("box_counts.csv", &["set", "scale", "count"]);
    for (set_id, b) in [(0.0, &planar), (1.0, &graph)] {
        for (s, c) in b.scales.iter().zip(&b.counts) {
            table.push(&[set_id, *s, *c as f64]);
        }
    }
    out.tables.push(table);
    let mut table = Table::new("frostman.csv", &["n", "C", "argmax_radius"]);
    for c in &certs {
        table.push(&[c.n as f64, c.c, c.argmax_radius]);
    }
    out.tables.push(table);

    out.result("atom_spacing", spacing);
    out.result("flux_spacing", h);
    out.result("u_at_origin", centre);
    out.result("boundary_max", boundary);
    out.result("disc_recovery", &disc);
    out.result("worst_cell_error", worst_cell);
    out.result("frostman", &certs);
    out.result("planar_dimension", &planar);
    out.result("graph_dimension", &graph);
    out.result("zygmund", [&m1, &m2]);
    Ok(out)
}
