//! Scenario configuration: a JSON document describing region, weight, flags,
//! lower candidates, evaluation grid and optimizer budget, plus the built-in
//! fixture scenarios used by the verification suite.

use std::sync::Arc;
use std::time::Duration;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use discenv_core::optimize::{EnvelopeKind, OptimizerConfig};
use discenv_core::oracle::{reference_candidate, ReferenceCase};
use discenv_core::region::{
    annulus, polydisc_union, punctured_ball, punctured_polydisc, sector, InequalityFn,
    RegionFlags, RegionSpec,
};
use discenv_core::weight::{WeightFn, WeightSpec, DEFAULT_FLOOR};
use discenv_core::{CandidateFunction64, Point64, RegionSpec64, WeightSpec64};

use crate::expr::Expr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expression `{src}`: {err}")]
    Expr {
        src: String,
        err: crate::expr::ParseError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] discenv_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    /// Free-form annotation; ignored by the tools.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub dimension: usize,
    pub region: RegionCfg,
    pub weight: WeightCfg,
    /// Structural claims; defaults come from the built-in region kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<FlagsCfg>,
    #[serde(default)]
    pub lower_candidates: Vec<String>,
    pub grid: GridCfg,
    #[serde(default)]
    pub optimizer: OptCfg,
    /// `affine`, `projective`, `weighted` or `auto` (default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionCfg {
    /// Punctured ball `{0 < |z| < radius}`.
    Ball { radius: f64 },
    /// Annulus in C^1.
    Annulus { r_in: f64, r_out: f64 },
    /// Punctured polydisc with the given radii.
    Polydisc { radii: Vec<f64> },
    /// Punctured union of polydiscs; each member lists its radii.
    PolydiscUnion { members: Vec<Vec<f64>> },
    /// `{ |z2| < |z1|, r_in < |z1| < r_out }` in C^2.
    Sector { r_in: f64, r_out: f64 },
    /// Custom region from defining inequalities `g_i < 0`.
    Custom {
        inequalities: Vec<String>,
        sample_annulus: [f64; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightCfg {
    Zero,
    Constant { value: f64 },
    LogNorm,
    Expr { expr: String },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsCfg {
    #[serde(default)]
    pub balanced: bool,
    #[serde(default)]
    pub cone_connected: bool,
    #[serde(default)]
    pub full_cone: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridCfg {
    /// Explicit points, interleaved re/im per coordinate.
    Points { points: Vec<Vec<f64>> },
    /// `count` points along the ray through `direction` (interleaved re/im),
    /// radii from `r_start` to `r_stop`, geometric spacing when asked.
    RadialRay {
        direction: Vec<f64>,
        r_start: f64,
        r_stop: f64,
        count: usize,
        #[serde(default)]
        geometric: bool,
    },
    /// 2-D modulus grid: real points `(r1, r2)` with `start, stop, count`
    /// per axis.
    ModulusGrid { axis1: [f64; 3], axis2: [f64; 3] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptCfg {
    pub max_degree: usize,
    pub starts: usize,
    pub inner_nodes: usize,
    pub warm_evals: usize,
    pub start_evals: usize,
    pub penalty_initial: f64,
    pub penalty_factor: f64,
    pub penalty_stages: usize,
    /// Reporting quadrature nodes (power of two).
    pub quadrature_nodes: usize,
}

impl Default for OptCfg {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            max_degree: d.max_degree,
            starts: d.starts,
            inner_nodes: d.inner_nodes,
            warm_evals: d.warm_evals,
            start_evals: d.start_evals,
            penalty_initial: d.penalty_initial,
            penalty_factor: d.penalty_factor,
            penalty_stages: d.penalty_stages,
            quadrature_nodes: discenv_core::quad::DEFAULT_NODES,
        }
    }
}

/// A fully built scenario ready for evaluation.
pub struct Scenario {
    pub name: String,
    pub region: Arc<RegionSpec64>,
    pub weight: WeightSpec64,
    pub lower_candidates: Vec<CandidateFunction64>,
    pub grid_points: Vec<Point64>,
    pub optimizer: OptimizerConfig,
    pub report_nodes: usize,
    pub kind: EnvelopeKind,
    pub output: Option<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Self::build(file)
    }

    pub fn build(file: ScenarioFile) -> Result<Self, ConfigError> {
        let dim = file.dimension;
        if dim == 0 {
            return Err(ConfigError::Invalid("dimension must be positive".into()));
        }
        let region = build_region(&file.region, dim, file.flags)?;
        let weight = build_weight(&file.weight, dim)?;
        let lower_candidates = file
            .lower_candidates
            .iter()
            .map(|src| build_candidate(src, dim))
            .collect::<Result<Vec<_>, _>>()?;
        let grid_points = build_grid(&file.grid, dim)?;
        if !file.optimizer.quadrature_nodes.is_power_of_two() {
            return Err(ConfigError::Invalid(
                "optimizer.quadrature_nodes must be a power of two".into(),
            ));
        }
        if file.optimizer.max_degree > discenv_core::disc::DEFAULT_MAX_DEGREE {
            return Err(ConfigError::Invalid(format!(
                "optimizer.max_degree exceeds the per-component cap of {}",
                discenv_core::disc::DEFAULT_MAX_DEGREE
            )));
        }
        let kind = match file.envelope_kind.as_deref() {
            None | Some("auto") => {
                if region.flags().full_cone {
                    EnvelopeKind::Affine
                } else {
                    EnvelopeKind::Projective
                }
            }
            Some("affine") => EnvelopeKind::Affine,
            Some("projective") => EnvelopeKind::Projective,
            Some("weighted") => EnvelopeKind::WeightedHomog,
            Some(other) => {
                return Err(ConfigError::Invalid(format!(
                    "unknown envelope kind `{other}`"
                )))
            }
        };
        let optimizer = OptimizerConfig {
            max_degree: file.optimizer.max_degree,
            starts: file.optimizer.starts,
            inner_nodes: file.optimizer.inner_nodes,
            warm_evals: file.optimizer.warm_evals,
            start_evals: file.optimizer.start_evals,
            penalty_initial: file.optimizer.penalty_initial,
            penalty_factor: file.optimizer.penalty_factor,
            penalty_stages: file.optimizer.penalty_stages,
            seed: file.seed,
            ..Default::default()
        };
        Ok(Scenario {
            name: file.name,
            region,
            weight,
            lower_candidates,
            grid_points,
            optimizer,
            report_nodes: file.optimizer.quadrature_nodes,
            kind,
            output: file.output,
        })
    }

    pub fn with_budget(mut self, secs: Option<f64>) -> Self {
        self.optimizer.time_budget = secs.map(Duration::from_secs_f64);
        self
    }
}

fn build_region(
    cfg: &RegionCfg,
    dim: usize,
    flags: Option<FlagsCfg>,
) -> Result<Arc<RegionSpec64>, ConfigError> {
    let expect_dim = |d: usize| -> Result<(), ConfigError> {
        if dim == d {
            Ok(())
        } else {
            Err(ConfigError::Invalid(format!(
                "region kind needs dimension {d}, config says {dim}"
            )))
        }
    };
    let mut region: RegionSpec64 = match cfg {
        RegionCfg::Ball { radius } => punctured_ball(dim, *radius)?,
        RegionCfg::Annulus { r_in, r_out } => {
            expect_dim(1)?;
            annulus(*r_in, *r_out)?
        }
        RegionCfg::Polydisc { radii } => {
            expect_dim(radii.len())?;
            punctured_polydisc(radii)?
        }
        RegionCfg::PolydiscUnion { members } => {
            if members.iter().any(|m| m.len() != dim) {
                return Err(ConfigError::Invalid(
                    "union member dimensions disagree with the config".into(),
                ));
            }
            polydisc_union(members)?
        }
        RegionCfg::Sector { r_in, r_out } => {
            expect_dim(2)?;
            sector(*r_in, *r_out)?
        }
        RegionCfg::Custom {
            inequalities,
            sample_annulus,
        } => {
            let mut parsed = Vec::with_capacity(inequalities.len());
            for src in inequalities {
                let e = Expr::parse(src).map_err(|err| ConfigError::Expr {
                    src: src.clone(),
                    err,
                })?;
                if e.min_dimension() > dim {
                    return Err(ConfigError::Invalid(format!(
                        "inequality `{src}` uses coordinates beyond dimension {dim}"
                    )));
                }
                parsed.push(e);
            }
            let phase_invariant = parsed.iter().all(Expr::phase_invariant);
            let ineqs: Vec<Arc<InequalityFn<f64>>> = parsed
                .into_iter()
                .map(|e| {
                    let f: Arc<InequalityFn<f64>> =
                        Arc::new(move |z: &[Complex<f64>]| e.eval(z));
                    f
                })
                .collect();
            RegionSpec::from_inequalities(
                dim,
                ineqs,
                (sample_annulus[0], sample_annulus[1]),
                RegionFlags::default(),
                phase_invariant,
                "custom",
            )?
        }
    };
    if let Some(f) = flags {
        region = override_flags(region, f)?;
    }
    Ok(Arc::new(region))
}

/// Applies explicit flags on top of a built region. Regions are immutable, so
/// this rebuilds the custom region; built-ins carry their own correct flags
/// and only custom regions normally need this.
fn override_flags(region: RegionSpec64, f: FlagsCfg) -> Result<RegionSpec64, ConfigError> {
    let region = region.with_flags(RegionFlags {
        balanced: f.balanced,
        cone_connected: f.cone_connected,
        full_cone: f.full_cone,
    });
    Ok(region)
}

fn build_weight(cfg: &WeightCfg, dim: usize) -> Result<WeightSpec64, ConfigError> {
    Ok(match cfg {
        WeightCfg::Zero => WeightSpec::zero(),
        WeightCfg::Constant { value } => WeightSpec::constant(*value),
        WeightCfg::LogNorm => WeightSpec::log_norm(),
        WeightCfg::Expr { expr } => {
            let e = Expr::parse(expr).map_err(|err| ConfigError::Expr {
                src: expr.clone(),
                err,
            })?;
            if e.min_dimension() > dim {
                return Err(ConfigError::Invalid(format!(
                    "weight `{expr}` uses coordinates beyond dimension {dim}"
                )));
            }
            let phase_invariant = e.phase_invariant();
            let label = expr.clone();
            let f: Arc<WeightFn<f64>> = Arc::new(move |z: &[Complex<f64>]| e.eval(z));
            WeightSpec::from_fn(f, DEFAULT_FLOOR, phase_invariant, label)
        }
    })
}

fn build_candidate(src: &str, dim: usize) -> Result<CandidateFunction64, ConfigError> {
    let e = Expr::parse(src).map_err(|err| ConfigError::Expr {
        src: src.to_string(),
        err,
    })?;
    if e.min_dimension() > dim {
        return Err(ConfigError::Invalid(format!(
            "candidate `{src}` uses coordinates beyond dimension {dim}"
        )));
    }
    let label = src.to_string();
    Ok(CandidateFunction64::new(
        Arc::new(move |z: &[Complex<f64>]| e.eval(z)),
        label,
    ))
}

fn build_grid(cfg: &GridCfg, dim: usize) -> Result<Vec<Point64>, ConfigError> {
    match cfg {
        GridCfg::Points { points } => points
            .iter()
            .map(|row| {
                if row.len() != 2 * dim {
                    return Err(ConfigError::Invalid(format!(
                        "grid point has {} numbers, expected {}",
                        row.len(),
                        2 * dim
                    )));
                }
                let parts: Vec<(f64, f64)> = row.chunks(2).map(|c| (c[0], c[1])).collect();
                Ok(Point64::from_parts(&parts)?)
            })
            .collect(),
        GridCfg::RadialRay {
            direction,
            r_start,
            r_stop,
            count,
            geometric,
        } => {
            if direction.len() != 2 * dim {
                return Err(ConfigError::Invalid(
                    "ray direction length must be twice the dimension".into(),
                ));
            }
            if *count == 0 || *r_start <= 0.0 || *r_stop < *r_start {
                return Err(ConfigError::Invalid("bad ray parameters".into()));
            }
            let parts: Vec<(f64, f64)> = direction.chunks(2).map(|c| (c[0], c[1])).collect();
            let d = Point64::from_parts(&parts)?;
            let dn = d.norm();
            if dn == 0.0 {
                return Err(ConfigError::Invalid("ray direction is zero".into()));
            }
            (0..*count)
                .map(|k| {
                    let t = if *count == 1 {
                        0.0
                    } else {
                        k as f64 / (*count - 1) as f64
                    };
                    let r = if *geometric {
                        r_start * (r_stop / r_start).powf(t)
                    } else {
                        r_start + (r_stop - r_start) * t
                    };
                    let s = Complex::new(r / dn, 0.0);
                    Ok(d.scaled(s))
                })
                .collect()
        }
        GridCfg::ModulusGrid { axis1, axis2 } => {
            if dim != 2 {
                return Err(ConfigError::Invalid(
                    "modulus-grid requires dimension 2".into(),
                ));
            }
            let steps = |a: &[f64; 3]| -> Result<Vec<f64>, ConfigError> {
                let n = a[2] as usize;
                if n == 0 {
                    return Err(ConfigError::Invalid("axis count must be positive".into()));
                }
                Ok((0..n)
                    .map(|k| {
                        let t = if n == 1 {
                            0.0
                        } else {
                            k as f64 / (n - 1) as f64
                        };
                        a[0] + (a[1] - a[0]) * t
                    })
                    .collect())
            };
            let xs = steps(axis1)?;
            let ys = steps(axis2)?;
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    out.push(Point64::from_re(&[x, y])?);
                }
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical fixture scenarios.
// ---------------------------------------------------------------------------

/// Deterministic evaluation points for each fixture case. All points are
/// nonzero; the sector list leads with the off-cone point that makes the
/// projective route essential.
pub fn suite_points(case: ReferenceCase) -> Vec<Point64> {
    let mk2 = |rows: &[[f64; 4]]| -> Vec<Point64> {
        rows.iter()
            .map(|r| Point64::from_parts(&[(r[0], r[1]), (r[2], r[3])]).unwrap())
            .collect()
    };
    match case {
        ReferenceCase::PuncturedBall => mk2(&[
            [0.3, 0.0, 0.4, 0.0],
            [0.1, 0.2, -0.3, 0.1],
            [0.6, 0.0, 0.0, 0.5],
            [-0.2, 0.4, 0.3, -0.3],
            [1.5, 0.0, 0.2, 0.1],
            [0.05, -0.02, 0.01, 0.03],
            [2.0, 1.0, -1.0, 0.5],
            [0.7, 0.7, 0.1, -0.6],
            [-0.9, 0.0, 0.0, 0.0],
            [0.25, 0.25, 0.25, 0.25],
        ]),
        ReferenceCase::Annulus => [
            (1.0, 0.0),
            (0.3, 0.0),
            (2.5, 0.0),
            (0.0, 0.7),
            (-1.2, 0.5),
            (0.05, 0.0),
            (4.0, -3.0),
            (-0.6, -0.6),
            (0.0, -2.2),
            (1.7, 1.7),
        ]
        .iter()
        .map(|&(re, im)| Point64::from_parts(&[(re, im)]).unwrap())
        .collect(),
        ReferenceCase::PuncturedPolydisc => mk2(&[
            [0.9, 0.0, 0.45, 0.0],
            [0.2, 0.1, 0.8, -0.1],
            [1.4, 0.0, 0.3, 0.3],
            [-0.5, 0.5, 0.5, 0.5],
            [0.1, 0.0, 0.05, 0.0],
            [2.0, 0.0, -2.0, 0.0],
            [0.33, -0.44, 0.55, 0.66],
            [-1.1, 0.2, 0.9, -0.9],
            [0.0, 0.8, 0.8, 0.0],
            [0.6, 0.6, -0.6, 0.6],
        ]),
        ReferenceCase::PolydiscUnion => mk2(&[
            [0.9, 0.0, 0.9, 0.0],
            [0.5, 0.0, 0.2, 0.0],
            [1.2, 0.0, 0.1, 0.1],
            [0.4, 0.4, 0.4, -0.4],
            [0.05, 0.0, 1.5, 0.0],
            [0.8, -0.3, 0.6, 0.2],
            [-0.7, 0.0, 0.0, 0.7],
            [1.0, 1.0, 0.5, 0.5],
            [0.2, 0.0, 0.3, 0.0],
            [0.95, 0.1, -0.85, 0.2],
        ]),
        ReferenceCase::Sector => mk2(&[
            [0.5, 0.0, 1.0, 0.0],
            [1.5, 0.0, 0.3, 0.0],
            [2.0, 0.0, -0.5, 0.5],
            [1.0, 1.0, 0.5, -0.5],
            [0.8, 0.0, 0.0, 0.0],
            [-1.3, 0.2, 0.4, 0.4],
            [3.0, 0.0, 1.0, 0.0],
            [0.6, -0.6, 0.2, 0.3],
            [1.1, 0.0, 1.05, 0.0],
            [0.9, 0.4, -0.3, 0.8],
        ]),
    }
}

/// Builds the canonical scenario for a fixture case: built-in region, zero
/// weight, the reference lower candidate and the standard suite points.
pub fn canonical(case: ReferenceCase) -> Scenario {
    let (region, dim): (RegionSpec64, usize) = match case {
        ReferenceCase::PuncturedBall => (punctured_ball(2, 1.0).unwrap(), 2),
        ReferenceCase::Annulus => (annulus(0.5, 2.0).unwrap(), 1),
        ReferenceCase::PuncturedPolydisc => (punctured_polydisc(&[1.0, 1.0]).unwrap(), 2),
        ReferenceCase::PolydiscUnion => (
            polydisc_union(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap(),
            2,
        ),
        ReferenceCase::Sector => (sector(1.0, 2.0).unwrap(), 2),
    };
    let _ = dim;
    let kind = if region.flags().full_cone {
        EnvelopeKind::Affine
    } else {
        EnvelopeKind::Projective
    };
    Scenario {
        name: case.id().to_string(),
        region: Arc::new(region),
        weight: WeightSpec::zero(),
        lower_candidates: vec![reference_candidate(case)],
        grid_points: suite_points(case),
        optimizer: OptimizerConfig::default(),
        report_nodes: discenv_core::quad::DEFAULT_NODES,
        kind,
        output: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_config() {
        let text = r#"{
            "name": "demo",
            "dimension": 1,
            "region": {"kind": "annulus", "r_in": 0.5, "r_out": 2.0},
            "weight": {"kind": "zero"},
            "grid": {"kind": "points", "points": [[1.0, 0.0], [0.0, 0.7]]}
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.grid_points.len(), 2);
        assert_eq!(s.kind, EnvelopeKind::Affine);
        assert!(s.region.flags().full_cone);
    }

    #[test]
    fn custom_region_with_expressions() {
        let text = r#"{
            "name": "custom-annulus",
            "dimension": 1,
            "region": {
                "kind": "custom",
                "inequalities": ["abs(z1) - 2", "0.5 - abs(z1)"],
                "sample_annulus": [0.5, 2.0]
            },
            "flags": {"cone_connected": true, "full_cone": true},
            "weight": {"kind": "expr", "expr": "log(abs(z1))"},
            "grid": {"kind": "radial-ray", "direction": [1.0, 0.0], "r_start": 0.5, "r_stop": 2.0, "count": 4},
            "seed": 3
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.grid_points.len(), 4);
        assert!(s.region.is_phase_invariant());
        assert!(s.region.flags().full_cone);
        let inside = s
            .region
            .contains(&Point64::from_parts(&[(1.0, 0.0)]).unwrap())
            .unwrap();
        assert!(inside);
    }

    #[test]
    fn unknown_field_rejected() {
        let text = r#"{
            "name": "demo",
            "dimension": 1,
            "regionn": {"kind": "annulus", "r_in": 0.5, "r_out": 2.0},
            "weight": {"kind": "zero"},
            "grid": {"kind": "points", "points": [[1.0, 0.0]]}
        }"#;
        assert!(Scenario::from_json(text).is_err());
    }

    #[test]
    fn modulus_grid() {
        let text = r#"{
            "name": "grid",
            "dimension": 2,
            "region": {"kind": "polydisc", "radii": [1.0, 1.0]},
            "weight": {"kind": "zero"},
            "grid": {"kind": "modulus-grid", "axis1": [0.2, 0.8, 3.0], "axis2": [0.2, 0.8, 2.0]}
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.grid_points.len(), 6);
    }

    #[test]
    fn canonical_scenarios_have_points_in_reach() {
        for case in ReferenceCase::ALL {
            let s = canonical(case);
            assert!(!s.grid_points.is_empty());
            for p in &s.grid_points {
                assert!(!p.is_zero());
                assert_eq!(p.dim(), s.region.dim());
            }
        }
    }
}
