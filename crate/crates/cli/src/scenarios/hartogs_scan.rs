use pseudoconvex::levi::Classification;
use pseudoconvex::potential::zygmund_domain;
use pseudoconvex::staircase::{
    ball_domain, hartogs_staircase, subharmonicity_scan, C1Rule, HartogsDomain, ScanSettings,
    StaircaseParams,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "hartogs-scan",
    description:
        "Subharmonicity scan of -phi for the Hartogs domain over a ball, staircase or Zygmund cap",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cap {
    Ball,
    Staircase,
    Zygmund,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub cap: Cap,
    pub radius: f64,
    pub spacing: f64,
    /// Staircase cap: constant of the quadratic bound, fixing `alpha_1`.
    pub l_target: f64,
    pub generations: usize,
    pub c1_rule: C1Rule,
    /// Zygmund cap: exponent and generation of the square Cantor set.
    pub alpha: f64,
    pub zygmund_generation: usize,
    pub settings: ScanSettings,
}

impl Default for Params {
    fn default() -> Self {
        let s = StaircaseParams::default();
        Self {
            cap: Cap::Ball,
            radius: s.radius,
            spacing: s.spacing,
            l_target: s.l_target,
            generations: s.generations,
            c1_rule: s.c1_rule,
            alpha: 1.0,
            zygmund_generation: 4,
            settings: ScanSettings::default(),
        }
    }
}

fn run(v: &Value, cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let domain: HartogsDomain<f64> = match p.cap {
        Cap::Ball => ball_domain(p.radius, p.spacing)?,
        Cap::Staircase => hartogs_staircase(&StaircaseParams {
            l_target: p.l_target,
            generations: p.generations,
            c1_rule: p.c1_rule,
            radius: p.radius,
            spacing: p.spacing,
            ..StaircaseParams::default()
        })?,
        Cap::Zygmund => zygmund_domain(p.alpha, p.zygmund_generation, p.radius, p.spacing)?,
    };
    let scan = subharmonicity_scan(&domain, &p.settings)?;
    let mut out = Outcome::default();
    let counts = format!("{} of {} nodes violating", scan.violating, scan.nodes);
    if !cfg.expect_violation {
        out.check(
            "no_violating_nodes",
            "staircase/subharmonicity of -phi",
            scan.violating == 0,
            counts,
        );
    } else {
        out.check(
            "violating_set_nonempty",
            "staircase/subharmonicity of -phi",
            scan.violating > 0,
            counts,
        );
        if let Some(within) = scan.violations_within_2h {
            out.check(
                "violations_near_singular_set",
                "staircase/violations localize within 2h of the singular set",
                within,
                format!(
                    "largest distance {:?} against 2h = {}",
                    scan.max_violation_distance,
                    2.0 * p.spacing
                ),
            );
        }
        if let Some(far_ok) = scan.far_ok {
            out.check(
                "far_field_laplacian",
                "staircase/Delta phi bounded above away from the singular set",
                far_ok,
                format!(
                    "max Delta phi = {:?} beyond {} against {}",
                    scan.far_max_laplacian, p.settings.far_radius, p.settings.far_threshold
                ),
            );
        }
        if !scan.z0_excess.is_empty() {
            out.check(
                "mean_excess_at_z0",
                "staircase/sub-mean-value property fails at z0",
                scan.z0_excess.iter().all(|m| m.excess > 0.0),
                format!(
                    "excesses {:?}",
                    scan.z0_excess.iter().map(|m| m.excess).collect::<Vec<_>>()
                ),
            );
        }
    }
    let mut table = Table::new("violations.csv", &["x", "y", "laplacian", "distance"]);
    for s in scan
        .samples
        .iter()
        .filter(|s| s.classification == Classification::Violating)
    {
        let z = num_complex::Complex::new(s.point[0], s.point[1]);
        let d = domain.kind().singular_distance(z).unwrap_or(f64::NAN);
        table.push(&[s.point[0], s.point[1], s.delta_tau_value, d]);
    }
    out.tables.push(table);
    out.result("scan", &scan);
    Ok(out)
}
