//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::{LN_2, TAU};
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;
use pseudoconvex::field::{DiscField, Grid3};
use pseudoconvex::levi::{
    delta_tau_jet, graph_levi_jet, green_identity, levi_condition_2d, tau_of_jet, G2Model, Graph3,
    GraphDefining, Poly3, SampledDefining,
};
use pseudoconvex::mollify::{mollifier_certificate_lifted, CertificateParams};
use pseudoconvex::potential::{
    build_square_cantor, disc_mass_recovery, frostman_certificate, frostman_measure,
    graph_box_dimension, laplacian_mass_recovery, AtomicMeasure, Cell, GreenPotential, ZygmundCap,
};
use pseudoconvex::staircase::{
    ball_domain, build_cantor, default_alphas, fat_f, find_x0, hartogs_staircase,
    subharmonicity_scan, FatF, ScanSettings, StaircaseParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn random_poly(rng: &mut ChaCha8Rng) -> Poly3<f64> {
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(2..8) {
        let mut e = [0u32; 3];
        let degree = rng.random_range(2..=4);
        for _ in 0..degree {
            e[rng.random_range(0..3)] += 1;
        }
        terms.push((rng.random_range(-2.0..2.0), e));
    }
    Poly3::new(terms)
}

fn levi_dual_route() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_dual, mut sab, mut sbb) = (0.0f64, 0.0, 0.0);
    let mut pairs = Vec::new();
    for _ in 0..1000 {
        let phi = random_poly(&mut rng);
        let xi = [
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
        ];
        let jet = phi.jet(xi);
        let graph = match graph_levi_jet(&jet) {
            Ok(v) => v,
            Err(e) => return verdict(false, format!("graph route failed: {e}")),
        };
        let dual = -delta_tau_jet(&jet.hess, &tau_of_jet(&jet)).unwrap();
        worst_dual = worst_dual.max((graph - dual).abs());
        let z = [
            Complex::new(phi.value(xi), xi[0]),
            Complex::new(xi[1], xi[2]),
        ];
        let ambient = levi_condition_2d(&GraphDefining::new(phi), z, 1e-12).unwrap();
        sab += ambient * graph;
        sbb += graph * graph;
        pairs.push((ambient, graph));
    }
    let c = sab / sbb;
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let residual = pairs
        .iter()
        .map(|(a, g)| (a - c * g).abs())
        .fold(0.0, f64::max)
        / scale;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst_dual <= 1e-9 && c > 0.0 && residual <= 1e-6 && secs <= 10.0,
        format!("max |graph + delta_tau| = {worst_dual:.1e}, fitted scalar {c}, residual {residual:.1e}, {secs:.2} s"),
    )
}

fn g2_anchor() -> Verdict {
    let zero = [Complex::new(0.0, 0.0); 2];
    let symbolic = levi_condition_2d(&G2Model, zero, 1e-6).unwrap();
    let sampled =
        SampledDefining::new(|x: [f64; 4]| x[0] - x[2] * x[2] - x[3] * x[3], 1e-3).unwrap();
    let fd = levi_condition_2d(&sampled, zero, 1e-6).unwrap();
    verdict(
        symbolic == -0.25 && (fd + 0.25).abs() <= 1e-6,
        format!("symbolic {symbolic}, finite differences {fd}"),
    )
}

fn mollifier_certificate() -> Verdict {
    let start = Instant::now();
    let system = build_cantor(&default_alphas(0.5, 8), 8).unwrap();
    let f: FatF<f64> = fat_f(&system, 8).unwrap();
    let (v, phi) = f.lifted_certificate_case();
    let grid = Grid3::centered_cube([0.0; 3], 0.25, 1.0 / 128.0).unwrap();
    let params = CertificateParams::default();
    let r = match mollifier_certificate_lifted(&v, &phi, &grid, &params) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("certificate failed: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let slope_ok = (r.fitted_slope - r.rate).abs() <= 0.2;
    let min_m = r.m_values.iter().cloned().fold(f64::INFINITY, f64::min);
    verdict(
        r.pass && r.deltas.len() == 7 && slope_ok && secs <= 300.0,
        format!(
            "inequality {} (min m = {min_m:e}), fitted slope {} against {} +- 0.2, {secs:.1} s",
            if r.pass { "holds" } else { "fails" },
            r.fitted_slope,
            r.rate
        ),
    )
}

fn staircase_identities() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for (alpha1, exact_alpha) in [
        (0.5, BigRational::new(1.into(), 2.into())),
        (0.9, BigRational::new(9.into(), 10.into())),
    ] {
        let exact = build_cantor(&default_alphas(exact_alpha.clone(), 10), 10).unwrap();
        let mut len = BigRational::one();
        let mut a = exact_alpha;
        let quarter = BigRational::new(1.into(), 4.into());
        let mut bad = 0;
        for n in 0..=10 {
            if n > 0 {
                len = len * (BigRational::one() - &a) / BigRational::from_integer(BigInt::from(2));
                a = a * &quarter;
            }
            bad += exact
                .retained(n)
                .iter()
                .filter(|iv| iv.length() != len)
                .count();
        }
        let system = build_cantor(&default_alphas(alpha1, 12), 12).unwrap();
        let f: FatF<f64> = fat_f(&system, 12).unwrap();
        let mut gap_err = 0.0f64;
        for n in 0..12 {
            for gap in system.removed(n) {
                for k in 1..4 {
                    gap_err =
                        gap_err.max((f.second(gap.a + gap.length() * k as f64 / 4.0) + 1.0).abs());
                }
            }
        }
        let ends = f
            .profile()
            .value(0.0)
            .abs()
            .max(f.profile().value(1.0).abs());
        let x0 = find_x0(&f, 1000).unwrap();
        let l = 0.5 * (1.0 / (1.0 - alpha1) - 1.0);
        let ok = bad == 0
            && gap_err <= 1e-4
            && ends <= 1e-12
            && x0.bound.passed
            && x0.bound.samples == 1000
            && (x0.l - l).abs() <= 1e-12;
        pass &= ok;
        notes.push(format!(
            "alpha1 = {alpha1}: {bad} length mismatches, |F''+1| <= {gap_err:.0e}, |F(0)|,|F(1)| <= {ends:.0e}, L = {} bound {}",
            x0.l,
            if x0.bound.passed { "holds" } else { "fails" }
        ));
    }
    verdict(pass, notes.join("; "))
}

fn hartogs_scan() -> Verdict {
    let start = Instant::now();
    let ball = subharmonicity_scan(
        &ball_domain(0.9, 1.0 / 512.0).unwrap(),
        &ScanSettings::default(),
    )
    .unwrap();
    let params = StaircaseParams {
        l_target: 49.5,
        generations: 10,
        spacing: 1.0 / 512.0,
        ..StaircaseParams::default()
    };
    let domain = hartogs_staircase::<f64>(&params).unwrap();
    let s = subharmonicity_scan(&domain, &ScanSettings::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = ball.violating == 0
        && s.violating > 0
        && s.violations_within_2h == Some(true)
        && s.far_ok == Some(true)
        && secs <= 120.0;
    verdict(
        pass,
        format!(
            "ball {} violating; staircase {} violating, farthest at {:?} (2h = {}), max Delta phi beyond 0.1 = {:?}, {secs:.1} s",
            ball.violating,
            s.violating,
            s.max_violation_distance,
            2.0 / 512.0,
            s.far_max_laplacian
        ),
    )
}

fn green_potential() -> Verdict {
    let set = build_square_cantor(1.0, 5).unwrap();
    let u = GreenPotential::new(frostman_measure(&set)).unwrap();
    let boundary = (0..512)
        .map(|k| {
            u.value(Complex::from_polar(1.0, TAU * k as f64 / 512.0))
                .abs()
        })
        .fold(0.0, f64::max);
    let single = GreenPotential::new(AtomicMeasure::dirac(Complex::new(0.0, 0.0))).unwrap();
    let half = (single.value(Complex::new(0.5, 0.0)) - LN_2).abs();
    let spacing = u.atom_spacing();
    let h = spacing / 8.0;
    let disc = disc_mass_recovery(&u, 0.9, h).unwrap();
    let cells: Vec<Cell<f64>> = set
        .centres()
        .into_iter()
        .map(|c| Cell::centred(c, spacing))
        .collect();
    let worst = cells
        .par_iter()
        .map(|c| laplacian_mass_recovery(&u, c, h).unwrap().relative_error)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    verdict(
        boundary <= 1e-10 && half <= 1e-12 && disc.relative_error <= 0.02 && worst <= 0.05,
        format!(
            "max boundary |u| = {boundary:.1e}, |u(1/2) - log 2| = {half:.1e}, disc error {:.1e}, worst of {} cells {worst:.1e}",
            disc.relative_error,
            cells.len()
        ),
    )
}

fn frostman_growth() -> Verdict {
    let c: Vec<f64> = (4..=6)
        .map(|n| {
            let s = build_square_cantor(1.0, n).unwrap();
            frostman_certificate(&s, &frostman_measure(&s)).c
        })
        .collect();
    let ratios_ok = c.windows(2).all(|w| (0.5..=2.0).contains(&(w[1] / w[0])));
    let planar = build_square_cantor(1.0, 8)
        .unwrap()
        .box_dimension()
        .unwrap()
        .slope;
    let graph = graph_box_dimension(&ZygmundCap::new(1.0, 5).unwrap())
        .unwrap()
        .slope;
    verdict(
        ratios_ok && (planar - 1.0).abs() <= 0.1 && (graph - 2.0).abs() <= 0.15,
        format!("C(4..6) = {c:?}, planar dimension {planar:.3}, graph dimension {graph:.3}"),
    )
}

fn green_identity_residuals() -> Verdict {
    let h = 1.0 / 256.0;
    let fs: [(&str, fn(Complex<f64>) -> f64); 3] = [
        ("Re", |z| z.re),
        ("|z|^2", |z| z.norm_sqr()),
        ("|z|^4", |z| z.norm_sqr().powi(2)),
    ];
    let mut worst = (0.0f64, "", 0.0);
    for (name, f) in fs {
        let u = DiscField::from_fn(1.0 + 4.0 * h, h, f).unwrap();
        for r in [0.25, 0.5, 1.0] {
            let g = green_identity(&u, r).unwrap();
            if g.residual >= worst.0 {
                worst = (g.residual, name, r);
            }
        }
    }
    verdict(
        worst.0 <= 1e-5,
        format!(
            "largest residual {:.2e} for {} at r = {}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_pseudoconvex");
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"scenario": "levi-check", "seed": 5, "params": {"domain": "ball"}}"#,
        r#"{"scenario": "levi-check", "seed": 5, "expect_violation": true, "params": {"domain": "g2"}}"#,
        r#"{"scenario": "mollify-sweep", "seed": 5}"#,
        r#"{"scenario": "staircase-build", "seed": 5}"#,
        r#"{"scenario": "hartogs-scan", "seed": 5, "params": {"cap": "ball", "spacing": 0.00390625}}"#,
        r#"{"scenario": "cantor-potential", "seed": 5, "params": {"per_cell": false}}"#,
        r#"{"scenario": "green-identity", "seed": 5}"#,
        r#"{"scenario": "slice-check", "seed": 5}"#,
    ];
    let mut differing = Vec::new();
    for (k, cfg) in configs.iter().enumerate() {
        let path = dir.path().join(format!("c{k}.json"));
        std::fs::write(&path, cfg).unwrap();
        let mut reports = Vec::new();
        for threads in [1, 4, 8] {
            let out_dir = dir.path().join(format!("out{k}-{threads}"));
            let status = std::process::Command::new(bin)
                .args(["--threads", &threads.to_string(), "run", "--config"])
                .arg(&path)
                .arg("--set")
                .arg(format!("output_dir={}", out_dir.display()))
                .output()
                .unwrap()
                .status;
            if status.code() == Some(2) || status.code().is_none() {
                return verdict(false, format!("config {k} did not run: {status}"));
            }
            reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
        }
        if !reports.windows(2).all(|w| w[0] == w[1]) {
            differing.push(k);
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} scenario configs at 1, 4 and 8 threads, differing: {differing:?}",
            configs.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("Levi engine dual-route agreement", levi_dual_route),
        ("G2 anchor", g2_anchor),
        ("mollification certificate", mollifier_certificate),
        ("staircase identities", staircase_identities),
        ("Hartogs counterexample scan", hartogs_scan),
        ("Green potential anchors", green_potential),
        ("Frostman growth and dimensions", frostman_growth),
        ("Green identity", green_identity_residuals),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({})",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
