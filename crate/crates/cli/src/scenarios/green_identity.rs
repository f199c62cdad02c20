use pseudoconvex::field::DiscField;
use pseudoconvex::levi::green_identity;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "green-identity",
    description: "Mean-value form of Green's formula on discs, normalized convention",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `Re zeta`
    Re,
    /// `|zeta|^2`
    Abs2,
    /// `|zeta|^4`
    Abs4,
    Constant,
}

impl TestFunction {
    fn eval(self, z: num_complex::Complex<f64>) -> f64 {
        match self {
            TestFunction::Re => z.re,
            TestFunction::Abs2 => z.norm_sqr(),
            TestFunction::Abs4 => z.norm_sqr().powi(2),
            TestFunction::Constant => 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub spacing: f64,
    pub radii: Vec<f64>,
    pub functions: Vec<TestFunction>,
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            spacing: 1.0 / 256.0,
            radii: vec![0.25, 0.5, 1.0],
            functions: vec![
                TestFunction::Re,
                TestFunction::Abs2,
                TestFunction::Abs4,
                TestFunction::Constant,
            ],
            tolerance: 1e-5,
        }
    }
}

fn run(v: &Value, _cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let mut out = Outcome::default();
    let reach = p.radii.iter().cloned().fold(0.0, f64::max) + 4.0 * p.spacing;
    let mut table = Table::new(
        "green_identity.csv",
        &[
            "function",
            "r",
            "circle_mean",
            "normalized_rhs",
            "raw_lhs",
            "raw_rhs",
            "residual",
        ],
    );
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &f in &p.functions {
        let u = DiscField::from_fn(reach, p.spacing, |z| f.eval(z))?;
        for &r in &p.radii {
            let g = green_identity(&u, r)?;
            worst = worst.max(g.residual);
            let mut row = vec![serde_json::to_value(f)?
                .as_str()
                .unwrap_or_default()
                .to_string()];
            row.extend(
                [
                    r,
                    g.circle_mean,
                    g.normalized_rhs,
                    g.raw_lhs,
                    g.raw_rhs,
                    g.residual,
                ]
                .iter()
                .map(|v| format!("{v:e}")),
            );
            table.push_cells(row);
            rows.push(serde_json::json!({ "function": f, "identity": g }));
        }
    }
    out.check(
        "green_identity_residual",
        "levi/green identity, normalized convention",
        worst <= p.tolerance,
        format!("largest residual {worst:e} against {:e}", p.tolerance),
    );
    out.tables.push(table);
    out.result("identities", rows);
    out.result("max_residual", worst);
    Ok(out)
}
