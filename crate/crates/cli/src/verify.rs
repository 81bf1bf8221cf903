//! The verification suite: each check pins its tolerances and budgets in
//! code and reports one pass/fail line with the measured values.
//!
//! Exit codes: 0 all pass, 1 any failure, 2 precondition violation (unknown
//! check id), 3 inconclusive (an optimizer budget ran out before a verdict).

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use discenv_core::disc::{infinity_crossings, jensen_defect, Disc};
use discenv_core::optimize::{
    consistency_check, minimize_envelope, EnvelopeKind, EnvelopeProblem, OptimizerConfig,
    CONSISTENCY_TOL_PROJ_AFFINE, CONSISTENCY_TOL_PROJ_WEIGHTED,
};
use discenv_core::oracle::{
    reference_vh, sandwich_certify, ReferenceCase, ReinhardtHullOracle, SandwichVerdict,
};
use discenv_core::poly::from_roots_unit_at_zero;
use discenv_core::quad::QuadratureGrid;
use discenv_core::region::minkowski_gauge;
use discenv_core::roots;
use discenv_core::weight::{HomogenizedWeight, LambdaSearchConfig};
use discenv_core::{Point64, RegionSpec64};

use crate::scenario::{canonical, suite_points, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub status: CheckStatus,
    pub details: String,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        };
        format!(
            "{tag} {}: {} ({:.1}s)",
            self.id,
            self.details,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckContext {
    pub seed: u64,
    pub budget_secs: Option<f64>,
    pub out_dir: Option<std::path::PathBuf>,
}

pub const CHECK_IDS: [&str; 10] = [
    "jensen-riesz",
    "rho-homogeneity",
    "minkowski-agreement",
    "closed-forms",
    "union-improvement",
    "sector-projective",
    "consistency",
    "degree-monotonicity",
    "sandwich-soundness",
    "determinism",
];

/// Runs a named check; oracle case ids (`punctured-ball`, `annulus`, ...)
/// are accepted as well and run the per-case oracle agreement check. `Err`
/// means the id is unknown (a precondition violation at the suite level).
pub fn run_check(id: &str, ctx: &CheckContext) -> Result<CheckOutcome, String> {
    let t0 = Instant::now();
    let mut outcome = match id {
        "jensen-riesz" => jensen_riesz(ctx),
        "rho-homogeneity" => rho_homogeneity(ctx),
        "minkowski-agreement" => minkowski_agreement(ctx),
        "closed-forms" => closed_forms(ctx),
        "union-improvement" => union_improvement(ctx),
        "sector-projective" => sector_projective(ctx),
        "consistency" => consistency(ctx),
        "degree-monotonicity" => degree_monotonicity(ctx),
        "sandwich-soundness" => sandwich_soundness(ctx),
        "determinism" => determinism(ctx),
        other => match ReferenceCase::from_id(other) {
            Ok(case) => oracle_case(case, ctx),
            Err(_) => return Err(format!("unknown check id `{other}`")),
        },
    };
    outcome.elapsed = t0.elapsed();
    Ok(outcome)
}

/// Runs a selection (`all` or a comma-separated id list) and returns the
/// outcomes plus the process exit code.
pub fn run_selection(selection: &str, ctx: &CheckContext) -> (Vec<CheckOutcome>, i32) {
    let ids: Vec<&str> = if selection == "all" {
        CHECK_IDS.to_vec()
    } else {
        selection.split(',').map(str::trim).collect()
    };
    for id in &ids {
        if !CHECK_IDS.contains(id) && ReferenceCase::from_id(id).is_err() {
            return (
                vec![CheckOutcome {
                    id: "selection",
                    status: CheckStatus::Fail,
                    details: format!("unknown check id `{id}`"),
                    elapsed: Duration::ZERO,
                }],
                2,
            );
        }
    }
    let mut outcomes = Vec::new();
    for id in ids {
        match run_check(id, ctx) {
            Ok(o) => outcomes.push(o),
            Err(msg) => {
                outcomes.push(CheckOutcome {
                    id: "selection",
                    status: CheckStatus::Fail,
                    details: msg,
                    elapsed: Duration::ZERO,
                });
                return (outcomes, 2);
            }
        }
    }
    let any_fail = outcomes.iter().any(|o| o.status == CheckStatus::Fail);
    let any_inconclusive = outcomes
        .iter()
        .any(|o| o.status == CheckStatus::Inconclusive);
    let code = if any_fail {
        1
    } else if any_inconclusive {
        3
    } else {
        0
    };
    (outcomes, code)
}

fn outcome(id: &'static str, pass: bool, details: String) -> CheckOutcome {
    CheckOutcome {
        id,
        status: if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        details,
        elapsed: Duration::ZERO,
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn seeded_point(rng: &mut ChaCha8Rng, dim: usize, r_lo: f64, r_hi: f64) -> Point64 {
    loop {
        let coords: Vec<Complex<f64>> = (0..dim)
            .map(|_| Complex::new(gaussian(rng), gaussian(rng)))
            .collect();
        let n = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        let r = rng.random_range(r_lo.ln()..r_hi.ln()).exp();
        let s = Complex::new(r / n, 0.0);
        return Point64::new(coords.iter().map(|&c| c * s).collect()).unwrap();
    }
}

fn quick_cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        max_degree: 2,
        starts: 4,
        warm_evals: 600,
        start_evals: 400,
        seed,
        ..Default::default()
    }
}

fn apply_budget(mut cfg: OptimizerConfig, ctx: &CheckContext) -> OptimizerConfig {
    cfg.time_budget = ctx.budget_secs.map(Duration::from_secs_f64);
    cfg
}

// ---------------------------------------------------------------------------
// 1. Jensen/Riesz identity.
// ---------------------------------------------------------------------------

fn jensen_riesz(ctx: &CheckContext) -> CheckOutcome {
    const TOL: f64 = 1e-6;
    const NODES: usize = 4096;
    const BUDGET_SECS: f64 = 10.0;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x4a5e);
    let mut worst = 0.0f64;
    let mut near_circle_flags = 0usize;
    for _ in 0..100 {
        let deg = rng.random_range(1..=8usize);
        let roots: Vec<Complex<f64>> = (0..deg)
            .map(|_| {
                // Radii at least 0.05 from the unit circle and away from 0.
                let r = if rng.random::<bool>() {
                    rng.random_range(0.10..0.93)
                } else {
                    rng.random_range(1.07..2.5)
                };
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Complex::from_polar(r, th)
            })
            .collect();
        let p = from_roots_unit_at_zero(&roots);
        match jensen_defect(&p, NODES) {
            Ok(rep) => {
                if rep.near_circle {
                    near_circle_flags += 1;
                }
                worst = worst.max(rep.defect.abs());
            }
            Err(e) => {
                return outcome(
                    "jensen-riesz",
                    false,
                    format!("defect computation failed: {e}"),
                );
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst < TOL && elapsed < BUDGET_SECS && near_circle_flags == 0;
    outcome(
        "jensen-riesz",
        pass,
        format!(
            "max |defect| = {worst:.3e} over 100 seeded polynomials at N={NODES} \
             (tolerance {TOL:.0e}, runtime {elapsed:.2}s < {BUDGET_SECS}s)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Homogeneity of the homogenized weight.
// ---------------------------------------------------------------------------

fn rho_homogeneity(ctx: &CheckContext) -> CheckOutcome {
    const TOL: f64 = 1e-3;
    const BUDGET_SECS: f64 = 60.0;
    let t0 = Instant::now();
    let cases = [
        ReferenceCase::Annulus,
        ReferenceCase::PuncturedBall,
        ReferenceCase::PolydiscUnion,
    ];
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for case in cases {
        let s = canonical(case);
        let hw = HomogenizedWeight::new(
            s.region.clone(),
            s.weight.clone(),
            LambdaSearchConfig::default(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x2b0);
        let mut case_worst = 0.0f64;
        for _ in 0..200 {
            let z = seeded_point(&mut rng, s.region.dim(), 0.3, 3.0);
            let lr: f64 = rng.random_range(-1.5..1.5);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mu = Complex::from_polar(lr.exp(), th);
            match hw.homogeneity_residual(&z, mu) {
                Ok(res) => case_worst = case_worst.max(res),
                Err(e) => {
                    return outcome(
                        "rho-homogeneity",
                        false,
                        format!("{}: residual failed: {e}", case.id()),
                    )
                }
            }
        }
        let _ = write!(detail, "{}: {case_worst:.2e}  ", case.id());
        worst = worst.max(case_worst);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst < TOL && elapsed < BUDGET_SECS;
    outcome(
        "rho-homogeneity",
        pass,
        format!(
            "max residual {worst:.3e} over 200 pairs x 3 scenarios [{}] \
             (tolerance {TOL:.0e}, runtime {elapsed:.1}s < {BUDGET_SECS}s)",
            detail.trim_end()
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Agreement with the Minkowski gauge on balanced regions.
// ---------------------------------------------------------------------------

fn minkowski_agreement(ctx: &CheckContext) -> CheckOutcome {
    const TOL: f64 = 1e-3;
    const BUDGET_SECS: f64 = 30.0;
    let t0 = Instant::now();
    let cases = [
        ReferenceCase::PuncturedBall,
        ReferenceCase::PuncturedPolydisc,
        ReferenceCase::PolydiscUnion,
    ];
    let mut worst = 0.0f64;
    for case in cases {
        let s = canonical(case);
        let hw = HomogenizedWeight::new(
            s.region.clone(),
            s.weight.clone(),
            LambdaSearchConfig::default(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x313);
        for _ in 0..100 {
            let z = seeded_point(&mut rng, s.region.dim(), 0.2, 2.0);
            let rho = match hw.rho(&z) {
                Ok(r) => r,
                Err(e) => {
                    return outcome(
                        "minkowski-agreement",
                        false,
                        format!("{}: rho failed: {e}", case.id()),
                    )
                }
            };
            let gauge = match minkowski_gauge(&s.region, &z) {
                Ok(g) => g,
                Err(e) => {
                    return outcome(
                        "minkowski-agreement",
                        false,
                        format!("{}: gauge failed: {e}", case.id()),
                    )
                }
            };
            worst = worst.max((rho - gauge).abs() / gauge);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst < TOL && elapsed < BUDGET_SECS;
    outcome(
        "minkowski-agreement",
        pass,
        format!(
            "max relative gap {worst:.3e} over 100 points x 3 balanced scenarios \
             (tolerance {TOL:.0e}, runtime {elapsed:.1}s < {BUDGET_SECS}s)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. Closed-form envelopes at degree zero.
// ---------------------------------------------------------------------------

fn closed_forms(ctx: &CheckContext) -> CheckOutcome {
    const TOL: f64 = 5e-3;
    const BUDGET_PER_POINT_SECS: f64 = 10.0;
    let cases = [
        ReferenceCase::PuncturedBall,
        ReferenceCase::Annulus,
        ReferenceCase::PuncturedPolydisc,
    ];
    let mut worst = 0.0f64;
    let mut worst_point_secs = 0.0f64;
    let mut budget_hit = false;
    for case in cases {
        let s = canonical(case);
        let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
        let grid = QuadratureGrid::new(256).unwrap();
        let cfg = apply_budget(quick_cfg(ctx.seed), ctx);
        for z in suite_points(case) {
            let tp = Instant::now();
            match minimize_envelope(&problem, &z, EnvelopeKind::Affine, &cfg, &grid) {
                Ok(res) => {
                    if !res.converged {
                        budget_hit = true;
                    }
                    let reference = reference_vh(case, &z).unwrap();
                    worst = worst.max((res.value - reference).abs());
                }
                Err(discenv_core::Error::BudgetExhausted) => {
                    budget_hit = true;
                }
                Err(e) => {
                    return outcome(
                        "closed-forms",
                        false,
                        format!("{} at {:?}: {e}", case.id(), z.coords()),
                    )
                }
            }
            worst_point_secs = worst_point_secs.max(tp.elapsed().as_secs_f64());
        }
    }
    if budget_hit {
        return CheckOutcome {
            id: "closed-forms",
            status: CheckStatus::Inconclusive,
            details: "optimizer budget exhausted before a verdict".into(),
            elapsed: Duration::ZERO,
        };
    }
    let pass = worst < TOL && worst_point_secs < BUDGET_PER_POINT_SECS;
    outcome(
        "closed-forms",
        pass,
        format!(
            "max |envelope - reference| = {worst:.3e} over 10 points x 3 closed-form scenarios \
             (tolerance {TOL:.0e}, slowest point {worst_point_secs:.2}s < {BUDGET_PER_POINT_SECS}s)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. Strict improvement over the gauge on the union of polydiscs.
// ---------------------------------------------------------------------------

fn union_improvement(ctx: &CheckContext) -> CheckOutcome {
    const UPPER: f64 = 0.30;
    const LOWER: f64 = 0.236;
    const HULL_VALUE: f64 = 0.24116;
    const HULL_WINDOW: f64 = 0.06;
    const MIN_IMPROVEMENT: f64 = 0.25;
    const BUDGET_SECS: f64 = 120.0;
    let t0 = Instant::now();
    let s = canonical(ReferenceCase::PolydiscUnion);
    let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
    let z = Point64::from_re(&[0.9, 0.9]).unwrap();
    let grid = QuadratureGrid::new(512).unwrap();
    let cfg = apply_budget(
        OptimizerConfig {
            max_degree: 8,
            starts: 16,
            seed: ctx.seed,
            ..Default::default()
        },
        ctx,
    );
    let res = match minimize_envelope(&problem, &z, EnvelopeKind::Affine, &cfg, &grid) {
        Ok(r) => r,
        Err(discenv_core::Error::BudgetExhausted) => {
            return CheckOutcome {
                id: "union-improvement",
                status: CheckStatus::Inconclusive,
                details: "budget exhausted before any feasible disc".into(),
                elapsed: Duration::ZERO,
            }
        }
        Err(e) => return outcome("union-improvement", false, format!("optimizer failed: {e}")),
    };
    if !res.converged {
        return CheckOutcome {
            id: "union-improvement",
            status: CheckStatus::Inconclusive,
            details: format!("budget exhausted; best value so far {:.4}", res.value),
            elapsed: Duration::ZERO,
        };
    }
    let log_gauge = minkowski_gauge(&s.region, &z).unwrap().ln();
    let hull = ReinhardtHullOracle::<f64>::build(&[[1.0, 0.5], [0.5, 1.0]])
        .and_then(|o| o.gauge(&z))
        .map(f64::ln);
    let elapsed = t0.elapsed().as_secs_f64();
    let v = res.value;
    let improvement = log_gauge - v;
    let hull_ok = hull.as_ref().is_ok_and(|h| (h - HULL_VALUE).abs() < 5e-3);
    let pass = (LOWER..=UPPER).contains(&v)
        && improvement >= MIN_IMPROVEMENT
        && (v - HULL_VALUE).abs() <= HULL_WINDOW
        && hull_ok
        && elapsed < BUDGET_SECS;
    outcome(
        "union-improvement",
        pass,
        format!(
            "value {v:.4} in [{LOWER}, {UPPER}] at degree {}, log gauge {log_gauge:.4}, \
             improvement {improvement:.4} >= {MIN_IMPROVEMENT}, hull oracle {} (target {HULL_VALUE} +- {HULL_WINDOW}), \
             runtime {elapsed:.1}s < {BUDGET_SECS}s",
            res.degree_used,
            hull.map(|h| format!("{h:.5}")).unwrap_or_else(|_| "failed".into()),
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Projective envelope on the sector.
// ---------------------------------------------------------------------------

fn sector_projective(ctx: &CheckContext) -> CheckOutcome {
    const GAP_TOL: f64 = 0.05;
    const BUDGET_SECS: f64 = 180.0;
    let t0 = Instant::now();
    let s = canonical(ReferenceCase::Sector);
    let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
    let z = Point64::from_re(&[0.5, 1.0]).unwrap();
    let grid = QuadratureGrid::new(512).unwrap();
    let cfg = apply_budget(
        OptimizerConfig {
            max_degree: 8,
            starts: 16,
            seed: ctx.seed,
            ..Default::default()
        },
        ctx,
    );
    let res = match minimize_envelope(&problem, &z, EnvelopeKind::Projective, &cfg, &grid) {
        Ok(r) => r,
        Err(discenv_core::Error::BudgetExhausted) => {
            return CheckOutcome {
                id: "sector-projective",
                status: CheckStatus::Inconclusive,
                details: "budget exhausted before any feasible disc".into(),
                elapsed: Duration::ZERO,
            }
        }
        Err(e) => return outcome("sector-projective", false, format!("optimizer failed: {e}")),
    };
    if !res.converged {
        return CheckOutcome {
            id: "sector-projective",
            status: CheckStatus::Inconclusive,
            details: format!("budget exhausted; best value so far {:.4}", res.value),
            elapsed: Duration::ZERO,
        };
    }
    let lower = -(2.0f64.ln());
    let gap = res.value - lower;
    let (crossings, chart_zero) = match &res.best_disc {
        Disc::Projective(p) => {
            let cr = infinity_crossings(p).map(|r| r.roots.len()).unwrap_or(0);
            // Diagnostic: the first chart coordinate must vanish in the disc
            // for any near-optimal disc at this center.
            let z1_zeros = roots::roots_in_unit_disc(&p.components()[1])
                .map(|r| r.roots.len())
                .unwrap_or(0);
            (cr, z1_zeros)
        }
        _ => (0, 0),
    };
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (-1e-3..GAP_TOL).contains(&gap) && crossings > 0 && elapsed < BUDGET_SECS;
    outcome(
        "sector-projective",
        pass,
        format!(
            "value {:.5} vs certified lower {lower:.5} (gap {gap:.2e} < {GAP_TOL}), \
             scale-component crossings {crossings} (required nonempty), \
             first chart coordinate zeros in disc: {chart_zero}, \
             runtime {elapsed:.1}s < {BUDGET_SECS}s",
            res.value
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. Consistency of the three envelope routes.
// ---------------------------------------------------------------------------

fn consistency(ctx: &CheckContext) -> CheckOutcome {
    let suite = [
        (ReferenceCase::Annulus, 4usize),
        (ReferenceCase::PuncturedBall, 3),
        (ReferenceCase::PuncturedPolydisc, 3),
    ];
    let mut worst_ab = 0.0f64;
    let mut worst_ac = f64::NEG_INFINITY;
    let mut checked = 0usize;
    for (case, count) in suite {
        let s = canonical(case);
        let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
        let grid = QuadratureGrid::new(256).unwrap();
        let cfg = apply_budget(quick_cfg(ctx.seed), ctx);
        for z in suite_points(case).into_iter().take(count) {
            match consistency_check(&problem, &z, &cfg, &grid) {
                Ok(rep) => {
                    if let Some(g) = rep.proj_weighted_gap {
                        worst_ab = worst_ab.max(g);
                    }
                    if let Some(d) = rep.proj_minus_affine {
                        worst_ac = worst_ac.max(d);
                    }
                    checked += 1;
                }
                Err(e) => {
                    return outcome(
                        "consistency",
                        false,
                        format!("{} at {:?}: {e}", case.id(), z.coords()),
                    )
                }
            }
        }
    }
    let pass = checked == 10
        && worst_ab < CONSISTENCY_TOL_PROJ_WEIGHTED
        && worst_ac <= CONSISTENCY_TOL_PROJ_AFFINE;
    outcome(
        "consistency",
        pass,
        format!(
            "{checked} suite points: max |projective - weighted| = {worst_ab:.3e} \
             (tolerance {CONSISTENCY_TOL_PROJ_WEIGHTED:.0e}), \
             max (projective - affine) = {worst_ac:.3e} (tolerance {CONSISTENCY_TOL_PROJ_AFFINE:.0e})"
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Exact degree monotonicity across the suite.
// ---------------------------------------------------------------------------

fn degree_monotonicity(ctx: &CheckContext) -> CheckOutcome {
    let mut traces = 0usize;
    for case in ReferenceCase::ALL {
        let s = canonical(case);
        let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
        let grid = QuadratureGrid::new(256).unwrap();
        let kind = s.kind;
        let cfg = apply_budget(
            OptimizerConfig {
                max_degree: 5,
                starts: 4,
                warm_evals: 600,
                start_evals: 400,
                seed: ctx.seed,
                ..Default::default()
            },
            ctx,
        );
        for z in suite_points(case).into_iter().take(2) {
            match minimize_envelope(&problem, &z, kind, &cfg, &grid) {
                Ok(res) => {
                    traces += 1;
                    for w in res.trace.windows(2) {
                        if w[1].1 > w[0].1 {
                            return outcome(
                                "degree-monotonicity",
                                false,
                                format!(
                                    "{} at {:?}: trace rose from {:.6} (degree {}) to {:.6} (degree {})",
                                    case.id(),
                                    z.coords(),
                                    w[0].1,
                                    w[0].0,
                                    w[1].1,
                                    w[1].0
                                ),
                            );
                        }
                    }
                }
                Err(discenv_core::Error::NoFeasibleDisc { .. })
                | Err(discenv_core::Error::BudgetExhausted) => continue,
                Err(e) => {
                    return outcome(
                        "degree-monotonicity",
                        false,
                        format!("{} at {:?}: {e}", case.id(), z.coords()),
                    )
                }
            }
        }
    }
    outcome(
        "degree-monotonicity",
        true,
        format!("{traces} per-degree traces nonincreasing (exact comparison)"),
    )
}

// ---------------------------------------------------------------------------
// 9. Sandwich soundness on every scenario with a validated lower candidate.
// ---------------------------------------------------------------------------

fn sandwich_soundness(ctx: &CheckContext) -> CheckOutcome {
    const SLACK: f64 = 1e-3;
    let mut min_gap = f64::INFINITY;
    let mut certified = 0usize;
    let mut evaluated = 0usize;
    for case in ReferenceCase::ALL {
        let s = canonical(case);
        let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
        let grid = QuadratureGrid::new(256).unwrap();
        let kind = s.kind;
        let cfg = apply_budget(
            OptimizerConfig {
                max_degree: 3,
                starts: 4,
                warm_evals: 600,
                start_evals: 400,
                seed: ctx.seed,
                ..Default::default()
            },
            ctx,
        );
        let cand = &s.lower_candidates[0];
        for z in suite_points(case) {
            let res = match minimize_envelope(&problem, &z, kind, &cfg, &grid) {
                Ok(r) => r,
                Err(discenv_core::Error::NoFeasibleDisc { .. })
                | Err(discenv_core::Error::BudgetExhausted) => continue,
                Err(e) => {
                    return outcome(
                        "sandwich-soundness",
                        false,
                        format!("{} at {:?}: {e}", case.id(), z.coords()),
                    )
                }
            };
            let rep = sandwich_certify(&s.region, &s.weight, &z, Some(cand), &res, 0.5);
            match rep.verdict {
                SandwichVerdict::LowerInvalid(reason) => {
                    return outcome(
                        "sandwich-soundness",
                        false,
                        format!("{} at {:?}: {reason}", case.id(), z.coords()),
                    )
                }
                SandwichVerdict::Certified => certified += 1,
                _ => {}
            }
            if let Some(g) = rep.gap {
                evaluated += 1;
                min_gap = min_gap.min(g);
            }
        }
    }
    let pass = evaluated > 0 && min_gap >= -SLACK;
    outcome(
        "sandwich-soundness",
        pass,
        format!(
            "{evaluated} points across 5 scenarios: min (upper - lower) = {min_gap:.3e} \
             >= -{SLACK:.0e}; {certified} certified within 0.5"
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. Determinism of grid outputs.
// ---------------------------------------------------------------------------

fn determinism(ctx: &CheckContext) -> CheckOutcome {
    let mut scenario = small_grid_scenario(ctx.seed);
    scenario.optimizer.time_budget = None; // wall-clock budgets break determinism
    let a = crate::gridrun::eval_scenario_grid(&scenario, crate::gridrun::RunMode::Envelope);
    let b = crate::gridrun::eval_scenario_grid(&scenario, crate::gridrun::RunMode::Envelope);
    let (csv_a, csv_b) = (a.to_csv(), b.to_csv());
    let (discs_a, discs_b) = (a.disc_records(), b.disc_records());
    if let Some(dir) = &ctx.out_dir {
        let _ = std::fs::create_dir_all(dir);
        let _ = std::fs::write(dir.join("determinism-run1.csv"), &csv_a);
        let _ = std::fs::write(dir.join("determinism-run2.csv"), &csv_b);
    }
    let pass = csv_a == csv_b && discs_a == discs_b;
    outcome(
        "determinism",
        pass,
        format!(
            "two seeded runs over {} points: CSV bytes {} ({} bytes), disc records {}",
            a.rows.len(),
            if csv_a == csv_b { "identical" } else { "differ" },
            csv_a.len(),
            if discs_a == discs_b { "identical" } else { "differ" },
        ),
    )
}

fn small_grid_scenario(seed: u64) -> Scenario {
    let mut s = canonical(ReferenceCase::PuncturedBall);
    s.grid_points.truncate(6);
    s.optimizer = OptimizerConfig {
        max_degree: 2,
        starts: 4,
        warm_evals: 400,
        start_evals: 300,
        seed,
        ..Default::default()
    };
    s.report_nodes = 256;
    s
}

// ---------------------------------------------------------------------------
// Per-case oracle agreement (addressable by case id).
// ---------------------------------------------------------------------------

fn oracle_case(case: ReferenceCase, ctx: &CheckContext) -> CheckOutcome {
    let id: &'static str = case.id();
    let s = canonical(case);
    // The fixture's lower candidate must validate.
    let validation =
        discenv_core::oracle::validate_candidate(&s.region, &s.weight, &s.lower_candidates[0]);
    if let Some(reason) = validation.failure {
        return CheckOutcome {
            id,
            status: CheckStatus::Fail,
            details: format!("reference candidate failed validation: {reason}"),
            elapsed: Duration::ZERO,
        };
    }
    // The log homogenized weight dominates the reference everywhere in the
    // punctured cone (it majorizes the envelope); on the pseudoconvex cases
    // it matches the reference outright.
    let hw = HomogenizedWeight::new(
        s.region.clone(),
        s.weight.clone(),
        LambdaSearchConfig::default(),
    );
    let exact_rho = case != ReferenceCase::PolydiscUnion;
    let mut worst_rho = 0.0f64;
    for z in suite_points(case) {
        if let Ok(lr) = hw.log_rho(&z) {
            let reference = reference_vh(case, &z).unwrap();
            let gap = if exact_rho {
                (lr.value - reference).abs()
            } else {
                reference - lr.value
            };
            worst_rho = worst_rho.max(gap);
        }
    }
    let rho_tol = 1e-3;
    // A short envelope run at two points against the reference. The union
    // needs a few degrees of continuation to close in on the hull value.
    let problem = EnvelopeProblem::new(s.region.clone(), s.weight.clone());
    let grid = QuadratureGrid::new(256).unwrap();
    let cfg = apply_budget(
        OptimizerConfig {
            max_degree: 4,
            starts: 6,
            warm_evals: 800,
            start_evals: 500,
            seed: ctx.seed,
            ..Default::default()
        },
        ctx,
    );
    let mut worst_env = 0.0f64;
    for z in suite_points(case).into_iter().take(2) {
        match minimize_envelope(&problem, &z, s.kind, &cfg, &grid) {
            Ok(res) => {
                let reference = reference_vh(case, &z).unwrap();
                let gap = res.value - reference;
                if gap < -1e-3 {
                    return CheckOutcome {
                        id,
                        status: CheckStatus::Fail,
                        details: format!(
                            "envelope {:.5} undercuts the reference {reference:.5} at {:?}",
                            res.value,
                            z.coords()
                        ),
                        elapsed: Duration::ZERO,
                    };
                }
                worst_env = worst_env.max(gap);
            }
            Err(discenv_core::Error::BudgetExhausted) => {
                return CheckOutcome {
                    id,
                    status: CheckStatus::Inconclusive,
                    details: "budget exhausted".into(),
                    elapsed: Duration::ZERO,
                }
            }
            Err(e) => {
                return CheckOutcome {
                    id,
                    status: CheckStatus::Fail,
                    details: format!("envelope failed at {:?}: {e}", z.coords()),
                    elapsed: Duration::ZERO,
                }
            }
        }
    }
    let env_tol = 0.05;
    let pass = worst_rho < rho_tol && worst_env < env_tol;
    CheckOutcome {
        id,
        status: if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        details: format!(
            "[{}] {} | {} = {worst_rho:.2e} (< {rho_tol:.0e}), \
             max envelope overshoot {worst_env:.2e} (< {env_tol})",
            discenv_core::oracle::reference_label(case),
            region_probe_report(&s.region),
            if exact_rho {
                "max |log rho - reference|"
            } else {
                "max (reference - log rho), hull below the raw gauge"
            },
        ),
        elapsed: Duration::ZERO,
    }
}

/// Probe reports for a region: author claims next to probe verdicts, never
/// adjudicated.
pub fn region_probe_report(region: &RegionSpec64) -> String {
    let probe = discenv_core::region::cone_connectivity_probe(region, 2048);
    format!(
        "claims: balanced={} cone_connected={} full_cone={} | connectivity probe: {:?} ({} samples, {} components)",
        region.flags().balanced,
        region.flags().cone_connected,
        region.flags().full_cone,
        probe.verdict,
        probe.samples,
        probe.components
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_selection_is_a_precondition_violation() {
        let (outcomes, code) = run_selection("no-such-check", &CheckContext::default());
        assert_eq!(code, 2);
        assert_eq!(outcomes.len(), 1);
    }

    #[test]
    fn jensen_check_passes() {
        let o = run_check("jensen-riesz", &CheckContext::default()).unwrap();
        assert_eq!(o.status, CheckStatus::Pass, "{}", o.line());
    }

    #[test]
    fn truncated_budget_reports_inconclusive() {
        let ctx = CheckContext {
            seed: 0,
            budget_secs: Some(0.0),
            out_dir: None,
        };
        let o = run_check("sector-projective", &ctx).unwrap();
        assert_eq!(o.status, CheckStatus::Inconclusive, "{}", o.line());
    }
}
