use num_complex::Complex;
use pseudoconvex::field::{Grid3, Regularity, ScalarField3};
use pseudoconvex::levi::{
    graph_levi_jet, levi_condition_2d, levi_scan, Ball, BallCap, Classification, Defining2,
    G2Model, Graph3, GraphDefining, Hyperplane, LeviSummary, Poly3, SampledDefining, ScanOptions,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{defaults_of, normalize_of, params, Scenario};
use crate::config::ScenarioConfig;
use crate::report::{Outcome, Table};

pub const SCENARIO: Scenario = Scenario {
    name: "levi-check",
    description: "Levi condition of a built-in domain by the graph scan and the ambient routes",
    defaults: defaults_of::<Params>,
    normalize: normalize_of::<Params>,
    run,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Ball,
    G2,
    Hyperplane,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub domain: Domain,
    pub spacing: f64,
    pub half_width: f64,
    /// Step of the finite-difference ambient route.
    pub fd_step: f64,
    pub c0: f64,
    /// Near-zero tolerance; `null` uses `10 h` times the regularity constant.
    pub tolerance: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            domain: Domain::Ball,
            spacing: 1.0 / 128.0,
            half_width: 0.125,
            fd_step: 1e-3,
            c0: 1e-6,
            tolerance: None,
        }
    }
}

struct Case<G, D> {
    graph: G,
    lipschitz: f64,
    ambient: D,
    sampled: fn([f64; 4]) -> f64,
    anchor: [Complex<f64>; 2],
    expected: f64,
}

fn run(v: &Value, cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p: Params = params(v)?;
    let zero = Complex::new(0.0, 0.0);
    let squares = Poly3::new(vec![(1.0, [0, 2, 0]), (1.0, [0, 0, 2])]);
    match p.domain {
        Domain::Ball => check(
            &p,
            cfg,
            Case {
                graph: BallCap,
                lipschitz: 1.1,
                ambient: Ball,
                sampled: |x| x.iter().map(|v| v * v).sum::<f64>() - 1.0,
                anchor: [Complex::new(1.0, 0.0), zero],
                expected: 1.0,
            },
        ),
        Domain::G2 => check(
            &p,
            cfg,
            Case {
                graph: squares,
                lipschitz: 2.0,
                ambient: G2Model,
                sampled: |x| x[0] - x[2] * x[2] - x[3] * x[3],
                anchor: [zero, zero],
                expected: -0.25,
            },
        ),
        Domain::Hyperplane => check(
            &p,
            cfg,
            Case {
                graph: Poly3::new(vec![]),
                lipschitz: 0.0,
                ambient: Hyperplane,
                sampled: |x| x[0],
                anchor: [zero, zero],
                expected: 0.0,
            },
        ),
    }
}

fn check<G, D>(p: &Params, cfg: &ScenarioConfig, case: Case<G, D>) -> anyhow::Result<Outcome>
where
    G: Graph3<f64> + Clone,
    D: Defining2<f64>,
{
    let mut out = Outcome::default();

    let symbolic = levi_condition_2d(&case.ambient, case.anchor, p.c0)?;
    out.check(
        "symbolic_anchor",
        "levi/levi_condition_2d",
        symbolic == case.expected,
        format!(
            "Levi expression {symbolic} at the anchor, expected {}",
            case.expected
        ),
    );
    let sampled = SampledDefining::new(case.sampled, p.fd_step)?;
    let fd = levi_condition_2d(&sampled, case.anchor, p.c0)?;
    out.check(
        "fd_anchor",
        "levi/levi_condition_2d",
        (fd - case.expected).abs() <= 1e-6,
        format!("difference route gives {fd} at step {}", p.fd_step),
    );

    let origin = [0.0; 3];
    let graph_origin = graph_levi_jet(&case.graph.jet(origin))?;
    let ambient_origin = levi_condition_2d(
        &GraphDefining::new(case.graph.clone()),
        [Complex::new(0.0, 0.0); 2],
        p.c0,
    )?;
    out.check(
        "graph_matches_ambient",
        "levi/graph-ambient-agreement",
        (graph_origin - ambient_origin).abs() <= 1e-8,
        format!("graph form {graph_origin}, ambient form of x1 - phi {ambient_origin}"),
    );

    let grid = Grid3::centered_cube([0.0; 3], p.half_width, p.spacing)?;
    let regularity = Regularity::Smooth {
        constant: case.lipschitz,
    };
    let graph = case.graph;
    let field = ScalarField3::from_fn(grid, regularity, |x| graph.value(x))?;
    let opts = ScanOptions {
        tolerance: p.tolerance,
        margin: 1,
    };
    let samples = levi_scan(&field, &opts)?;
    let summary = LeviSummary::from_samples(&samples)
        .ok_or_else(|| anyhow::anyhow!("grid has no interior nodes"))?;
    let dual = samples
        .iter()
        .map(|s| (s.levi_value + s.delta_tau_value).abs())
        .fold(0.0, f64::max);
    out.check(
        "dual_route_agreement",
        "levi/graph_levi = -delta_tau",
        dual <= 1e-9,
        format!("max |graph_levi + delta_tau| = {dual:e}"),
    );

    let centre = field
        .grid()
        .nearest_node(origin)
        .ok_or_else(|| anyhow::anyhow!("origin outside the grid"))?;
    let at_origin = samples.iter().find(|s| s.node == centre);
    if cfg.expect_violation {
        let (passed, detail) = match at_origin {
            Some(s) => (
                s.classification == Classification::Violating
                    && (s.levi_value - symbolic).abs() <= 1e-8,
                format!(
                    "origin value {} classified {}",
                    s.levi_value,
                    s.classification.label()
                ),
            ),
            None => (false, "origin node not scanned".to_string()),
        };
        out.check(
            "violating_node_at_origin",
            "levi/sign-correctness",
            passed,
            detail,
        );
    } else {
        out.check(
            "no_violating_nodes",
            "levi/sign-correctness",
            summary.violating == 0,
            format!("{} of {} nodes violating", summary.violating, summary.count),
        );
    }

    out.result("symbolic_anchor", symbolic);
    out.result("fd_anchor", fd);
    out.result("graph_origin", graph_origin);
    out.result("ambient_origin", ambient_origin);
    out.result("origin_value", at_origin.map(|s| s.levi_value));
    out.result("max_dual_difference", dual);
    out.result("summary", &summary);

    let mut table = Table::new(
        "levi_samples.csv",
        &["xi1", "xi2", "xi3", "levi_value", "classification"],
    );
    for s in &samples {
        let mut row: Vec<String> = s
            .point
            .iter()
            .chain([&s.levi_value])
            .map(|v| format!("{v:e}"))
            .collect();
        row.push(s.classification.label().to_string());
        table.push_cells(row);
    }
    out.tables.push(table);
    Ok(out)
}
