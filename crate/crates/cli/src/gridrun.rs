//! Grid evaluation driver: fans scenario grid points out to a worker pool,
//! assembles a fixed-schema CSV table and a sidecar file with the best discs.
//!
//! Output is deterministic under a fixed seed regardless of worker count:
//! every per-point computation is seeded from the point value, and rows are
//! assembled in point order.

use rayon::prelude::*;

use discenv_core::optimize::{minimize_envelope, EnvelopeProblem};
use discenv_core::oracle::validate_candidate;
use discenv_core::quad::QuadratureGrid;
use discenv_core::weight::LambdaSearchConfig;
use discenv_core::CandidateFunction64;

use crate::scenario::Scenario;

pub const CSV_SIG_DIGITS: usize = 12;

/// One output row per grid point.
#[derive(Debug, Clone)]
pub struct Row {
    pub point: Vec<(f64, f64)>,
    pub rho: Option<f64>,
    pub vh_upper: Option<f64>,
    pub vh_lower: Option<f64>,
    pub gap: Option<f64>,
    pub degree: Option<usize>,
    pub penalty_residual: Option<f64>,
    pub status: String,
    pub disc_record: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridTable {
    pub dim: usize,
    pub rows: Vec<Row>,
}

/// Evaluation mode: the homogenized weight alone, or the full envelope run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    RhoOnly,
    Envelope,
}

/// Candidates that survive validation (log-homogeneity and domination on
/// sampled members); the per-point lower bound maxes over these.
fn validated_candidates(s: &Scenario) -> Vec<&CandidateFunction64> {
    s.lower_candidates
        .iter()
        .filter(|cand| validate_candidate(&s.region, &s.weight, cand).is_valid())
        .collect()
}

pub fn eval_scenario_grid(s: &Scenario, mode: RunMode) -> GridTable {
    let problem = EnvelopeProblem::with_searches(
        s.region.clone(),
        s.weight.clone(),
        LambdaSearchConfig::default(),
        LambdaSearchConfig::fast(),
    );
    let grid = QuadratureGrid::new(s.report_nodes).expect("validated at build");
    let candidates = validated_candidates(s);

    let rows: Vec<Row> = s
        .grid_points
        .par_iter()
        .map(|z| {
            let point: Vec<(f64, f64)> = z.coords().iter().map(|c| (c.re, c.im)).collect();
            let mut row = Row {
                point,
                rho: None,
                vh_upper: None,
                vh_lower: None,
                gap: None,
                degree: None,
                penalty_residual: None,
                status: "ok".to_string(),
                disc_record: None,
            };
            match problem.report_weight().rho(z) {
                Ok(r) => row.rho = Some(r),
                Err(e) => {
                    row.status = format!("error:{}", error_tag(&e));
                }
            }
            if mode == RunMode::Envelope {
                match minimize_envelope(&problem, z, s.kind, &s.optimizer, &grid) {
                    Ok(res) => {
                        row.vh_upper = Some(res.value);
                        row.degree = Some(res.degree_used);
                        row.penalty_residual = Some(res.penalty_residual);
                        row.disc_record = Some(res.best_disc.to_record());
                        if !res.converged && row.status == "ok" {
                            row.status = "budget-exhausted".to_string();
                        }
                    }
                    Err(e) => {
                        row.status = format!("error:{}", error_tag(&e));
                    }
                }
            }
            if !candidates.is_empty() {
                let lower = candidates
                    .iter()
                    .map(|c| c.eval(z))
                    .fold(f64::NEG_INFINITY, f64::max);
                if lower.is_finite() {
                    row.vh_lower = Some(lower);
                    if let Some(u) = row.vh_upper {
                        row.gap = Some(u - lower);
                    }
                }
            }
            row
        })
        .collect();

    GridTable {
        dim: s.region.dim(),
        rows,
    }
}

fn error_tag(e: &discenv_core::Error) -> &'static str {
    use discenv_core::Error::*;
    match e {
        NotInCone { .. } => "NotInCone",
        NoFeasibleDisc { .. } => "NoFeasibleDisc",
        InfeasibleBoundary { .. } => "InfeasibleBoundary",
        Precondition(_) => "Precondition",
        ZeroPoint => "ZeroPoint",
        DimensionMismatch { .. } => "DimensionMismatch",
        InvalidConfig(_) => "InvalidConfig",
        BudgetExhausted => "BudgetExhausted",
        _ => "Internal",
    }
}

/// Fixed-significance formatting: 12 significant digits in scientific form.
pub fn fmt_sig(x: f64) -> String {
    format!("{:.*e}", CSV_SIG_DIGITS - 1, x)
}

impl GridTable {
    /// CSV with the fixed column order: point coords interleaved re/im, rho,
    /// vh_upper, vh_lower, gap, degree, penalty_residual, status.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            out.push_str(&format!("re{0},im{0},", i + 1));
        }
        out.push_str("rho,vh_upper,vh_lower,gap,degree,penalty_residual,status\n");
        for row in &self.rows {
            for &(re, im) in &row.point {
                out.push_str(&fmt_sig(re));
                out.push(',');
                out.push_str(&fmt_sig(im));
                out.push(',');
            }
            let opt = |v: &Option<f64>| v.map(fmt_sig).unwrap_or_default();
            out.push_str(&opt(&row.rho));
            out.push(',');
            out.push_str(&opt(&row.vh_upper));
            out.push(',');
            out.push_str(&opt(&row.vh_lower));
            out.push(',');
            out.push_str(&opt(&row.gap));
            out.push(',');
            out.push_str(&row.degree.map(|d| d.to_string()).unwrap_or_default());
            out.push(',');
            out.push_str(&opt(&row.penalty_residual));
            out.push(',');
            out.push_str(&row.status);
            out.push('\n');
        }
        out
    }

    /// Sidecar file with one best-disc record per point.
    pub fn disc_records(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            match &row.disc_record {
                Some(rec) => out.push_str(&format!("point {i} {rec}\n")),
                None => out.push_str(&format!("point {i} none\n")),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use discenv_core::optimize::OptimizerConfig;
    use discenv_core::oracle::ReferenceCase;

    fn small_scenario() -> Scenario {
        let mut s = crate::scenario::canonical(ReferenceCase::PuncturedBall);
        s.grid_points.truncate(4);
        s.optimizer = OptimizerConfig {
            max_degree: 1,
            starts: 2,
            warm_evals: 200,
            start_evals: 150,
            ..Default::default()
        };
        s.report_nodes = 128;
        s
    }

    #[test]
    fn grid_rows_match_points() {
        let s = small_scenario();
        let t = eval_scenario_grid(&s, RunMode::Envelope);
        assert_eq!(t.rows.len(), 4);
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("re1,im1,re2,im2,rho,"));
        for row in &t.rows {
            assert_eq!(row.status, "ok");
            assert!(row.vh_upper.is_some());
            assert!(row.vh_lower.is_some());
        }
    }

    #[test]
    fn rerun_is_byte_identical() {
        let s = small_scenario();
        let a = eval_scenario_grid(&s, RunMode::Envelope).to_csv();
        let b = eval_scenario_grid(&s, RunMode::Envelope).to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn single_point_run_matches_batch_row() {
        let s = small_scenario();
        let batch = eval_scenario_grid(&s, RunMode::Envelope).to_csv();
        let batch_lines: Vec<&str> = batch.lines().collect();
        for k in 0..4 {
            let mut single = small_scenario();
            single.grid_points = vec![single.grid_points[k].clone()];
            let one = eval_scenario_grid(&single, RunMode::Envelope).to_csv();
            let line = one.lines().nth(1).unwrap();
            assert_eq!(line, batch_lines[k + 1], "row {k} differs");
        }
    }

    #[test]
    fn formatting_is_twelve_digits() {
        assert_eq!(fmt_sig(1.0), "1.00000000000e0");
        assert_eq!(fmt_sig(-0.5), "-5.00000000000e-1");
    }
}
