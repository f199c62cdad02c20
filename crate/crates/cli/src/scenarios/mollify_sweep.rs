use pseudoconvex::field::Grid3;
use pseudoconvex::mollify::{containment_sweep, mollifier_certificate_lifted, CertificateParams};
use pseudoconvex::staircase::{build_cantor, default_alphas, fat_f, FatF};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "mollify-sweep",
    description: "Sign preservation under mollification on the lifted staircase and containment of the regularized domains",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub p: f64,
    pub epsilon: f64,
    pub sweep_len: usize,
    /// First Cantor ratio of the lifted staircase profile.
    pub alpha1: f64,
    pub generations: usize,
    pub half_width: f64,
    pub spacing: f64,
    /// Values of `eps` for the containment sweep along `delta = eps^2`.
    pub containment_epsilons: Vec<f64>,
    pub containment_half_width: f64,
    pub containment_max_spacing: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            p: 6.0,
            epsilon: 1e-2,
            sweep_len: 7,
            alpha1: 0.5,
            generations: 8,
            half_width: 0.25,
            spacing: 1.0 / 128.0,
            containment_epsilons: vec![0.3, 0.2, 0.15],
            containment_half_width: 0.1,
            containment_max_spacing: 0.01,
        }
    }
}

fn ball_cap(x: [f64; 3]) -> f64 {
    (1.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]).sqrt() - 1.0
}

fn run(v: &Value, _cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let mut out = Outcome::default();

    let system = build_cantor(&default_alphas(p.alpha1, p.generations), p.generations)?;
    let f: FatF<f64> = fat_f(&system, p.generations)?;
    let (lifted_v, lifted_phi) = f.lifted_certificate_case();
    let grid = Grid3::centered_cube([0.0; 3], p.half_width, p.spacing)?;
    let cert_params = CertificateParams {
        alpha: p.alpha,
        p: p.p,
        epsilon: p.epsilon,
        sweep_len: p.sweep_len,
        ..CertificateParams::default()
    };
    let cert = mollifier_certificate_lifted(&lifted_v, &lifted_phi, &grid, &cert_params)?;
    out.check(
        "certificate_inequality",
        "mollify/m(delta) >= -eps",
        cert.pass,
        format!(
            "min m(delta) = {:e} over {} radii <= {:e}",
            cert.m_values.iter().cloned().fold(f64::INFINITY, f64::min),
            cert.deltas.len(),
            cert.delta_max
        ),
    );
    let mut table = Table::new("certificate.csv", &["delta", "m"]);
    for (d, m) in cert.deltas.iter().zip(&cert.m_values) {
        table.push(&[*d, *m]);
    }
    out.tables.push(table);

    let sweep = containment_sweep(
        ball_cap,
        &p.containment_epsilons,
        p.containment_half_width,
        p.containment_max_spacing,
    )?;
    let contained = sweep.iter().filter(|s| s.containment.contained).count();
    out.check(
        "regularized_containment",
        "mollify/regularized_defining containment",
        contained == sweep.len(),
        format!("{contained} of {} sweep points contained", sweep.len()),
    );
    let monotone = sweep
        .windows(2)
        .all(|w| w[1].containment.max_distance <= w[0].containment.max_distance);
    out.check(
        "containment_monotone",
        "mollify/regularized_defining sweep convergence",
        monotone,
        format!(
            "max distances {:?}",
            sweep
                .iter()
                .map(|s| s.containment.max_distance)
                .collect::<Vec<_>>()
        ),
    );
    let mut table = Table::new(
        "containment.csv",
        &["epsilon", "delta", "spacing", "max_excess", "max_distance"],
    );
    for s in &sweep {
        table.push(&[
            s.epsilon,
            s.delta,
            s.spacing,
            s.containment.max_excess,
            s.containment.max_distance,
        ]);
    }
    out.tables.push(table);

    out.result("certificate", &cert);
    out.result("containment", &sweep);
    Ok(out)
}
