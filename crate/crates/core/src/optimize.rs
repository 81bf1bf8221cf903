//! Envelope minimization over polynomial discs: degree continuation with
//! warm-start embedding, seeded multistart Nelder-Mead descents on a
//! penalized functional, and deterministic min-reduction of the results.

// Coefficient packing walks degree indices in lockstep across buffers, where
// plain index loops stay readable.
#![allow(clippy::needless_range_loop)]

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::disc::{Disc, PolyDisc, ProjDisc};
use crate::error::{Error, Result};
use crate::functional::{
    affine_functional, crossing_term, projective_functional, weighted_homog_functional,
};
use crate::nelder::{self, NelderMeadOptions};
use crate::point::{quantized_key, Point};
use crate::quad::QuadratureGrid;
use crate::region::RegionSpec;
use crate::scalar::Real;
use crate::weight::{HomogenizedWeight, LambdaSearchConfig, WeightSpec};

/// Which disc functional the envelope is minimized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// Discs into C^n; requires the full-cone claim.
    Affine,
    /// Projective discs integrating the lift; requires the connected-cone claim.
    Projective,
    /// Projective discs under the weighted form with the cone as region and
    /// the log homogenized weight as weight; same preconditions as projective.
    WeightedHomog,
}

impl std::fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvelopeKind::Affine => write!(f, "affine"),
            EnvelopeKind::Projective => write!(f, "projective"),
            EnvelopeKind::WeightedHomog => write!(f, "weighted"),
        }
    }
}

/// Optimizer budget and behavior.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Degree continuation runs 0..=max_degree.
    pub max_degree: usize,
    /// Fresh random starts per degree, on top of the warm start.
    pub starts: usize,
    pub penalty_initial: f64,
    pub penalty_factor: f64,
    pub penalty_stages: usize,
    pub seed: u64,
    /// Quadrature nodes for inner descents (power of two). Reported values
    /// are always recomputed on the caller's grid.
    pub inner_nodes: usize,
    /// Evaluation budget for the warm-start descent at each degree.
    pub warm_evals: usize,
    /// Evaluation budget per random start.
    pub start_evals: usize,
    pub feasibility_tol: f64,
    /// Gaussian scale for fresh random coefficients, as a multiple of |z|.
    pub start_scale: f64,
    /// Wall-clock budget; checked between degrees. When exhausted the result
    /// carries `converged = false`.
    pub time_budget: Option<Duration>,
    /// Freeze the projective scale component to 1, which makes the projective
    /// path coincide with the affine one.
    pub freeze_scale: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_degree: 8,
            starts: 16,
            penalty_initial: 10.0,
            penalty_factor: 10.0,
            penalty_stages: 4,
            seed: 0,
            inner_nodes: 32,
            warm_evals: 2600,
            start_evals: 1000,
            feasibility_tol: 1e-8,
            start_scale: 0.25,
            time_budget: None,
            freeze_scale: false,
        }
    }
}

/// Envelope value with its witness disc and convergence metadata. The value
/// is an upper bound of the envelope: the scaling search under-approximates
/// nothing and the disc class is restricted to polynomials.
#[derive(Debug, Clone)]
pub struct EnvelopeResult<R: Real> {
    pub value: R,
    pub best_disc: Disc<R>,
    pub degree_used: usize,
    pub penalty_residual: R,
    /// Running-best value per degree, paired with the degree.
    pub trace: Vec<(usize, R)>,
    pub converged: bool,
    pub kind: EnvelopeKind,
    pub evals: usize,
}

/// A region-weight pair prepared for envelope minimization: one evaluator at
/// the reporting budget and one at a reduced budget for inner descents.
pub struct EnvelopeProblem<R: Real> {
    hw_report: HomogenizedWeight<R>,
    hw_inner: HomogenizedWeight<R>,
}

impl<R: Real> EnvelopeProblem<R> {
    pub fn new(region: Arc<RegionSpec<R>>, weight: WeightSpec<R>) -> Self {
        Self::with_searches(
            region,
            weight,
            LambdaSearchConfig::default(),
            LambdaSearchConfig::fast(),
        )
    }

    pub fn with_searches(
        region: Arc<RegionSpec<R>>,
        weight: WeightSpec<R>,
        report: LambdaSearchConfig,
        inner: LambdaSearchConfig,
    ) -> Self {
        Self {
            hw_report: HomogenizedWeight::new(region.clone(), weight.clone(), report),
            hw_inner: HomogenizedWeight::new(region, weight, inner),
        }
    }

    pub fn report_weight(&self) -> &HomogenizedWeight<R> {
        &self.hw_report
    }

    pub fn region(&self) -> &Arc<RegionSpec<R>> {
        self.hw_report.region()
    }
}

/// Coefficient layout of the free parameters at a given degree.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n: usize,
    degree: usize,
    projective: bool,
    freeze_scale: bool,
}

impl Layout {
    fn free_complex(&self) -> usize {
        let coord = self.n * self.degree;
        if self.projective && !self.freeze_scale {
            coord + self.degree
        } else {
            coord
        }
    }

    fn dims(&self) -> usize {
        2 * self.free_complex()
    }

    /// Components in storage order: the scale component first for projective
    /// discs, then the coordinates. Free coefficients are packed coordinate
    /// blocks first, scale block last, so a frozen-scale projective layout
    /// packs exactly like the affine one.
    fn unpack<R: Real>(&self, center: &[Complex<R>], x: &[R]) -> Vec<Vec<Complex<R>>> {
        let zero = Complex::new(R::zero(), R::zero());
        let mut comps: Vec<Vec<Complex<R>>> = Vec::with_capacity(self.n + usize::from(self.projective));
        if self.projective {
            comps.push(vec![zero; self.degree + 1]);
        }
        for _ in 0..self.n {
            comps.push(vec![zero; self.degree + 1]);
        }
        let (scale_idx, coord_base) = if self.projective { (0, 1) } else { (usize::MAX, 0) };
        if self.projective {
            comps[scale_idx][0] = Complex::new(R::one(), R::zero());
        }
        for (i, &c) in center.iter().enumerate() {
            comps[coord_base + i][0] = c;
        }
        let mut k = 0;
        for i in 0..self.n {
            for d in 1..=self.degree {
                comps[coord_base + i][d] = Complex::new(x[k], x[k + 1]);
                k += 2;
            }
        }
        if self.projective && !self.freeze_scale {
            for d in 1..=self.degree {
                comps[scale_idx][d] = Complex::new(x[k], x[k + 1]);
                k += 2;
            }
        }
        comps
    }

    fn pack<R: Real>(&self, comps: &[Vec<Complex<R>>]) -> Vec<R> {
        let mut x = Vec::with_capacity(self.dims());
        let coord_base = usize::from(self.projective);
        for i in 0..self.n {
            for d in 1..=self.degree {
                let c = comps[coord_base + i]
                    .get(d)
                    .copied()
                    .unwrap_or_else(|| Complex::new(R::zero(), R::zero()));
                x.push(c.re);
                x.push(c.im);
            }
        }
        if self.projective && !self.freeze_scale {
            for d in 1..=self.degree {
                let c = comps[0]
                    .get(d)
                    .copied()
                    .unwrap_or_else(|| Complex::new(R::zero(), R::zero()));
                x.push(c.re);
                x.push(c.im);
            }
        }
        x
    }
}

/// Relative floor on the scale component magnitude along the boundary;
/// descents are steered away from scale components degenerating on the circle.
const SCALE_BARRIER: f64 = 1e-2;

/// Penalized objective evaluated on two interleaved boundary grids. The value
/// part takes the worse of the two quadratures; descents cannot profit from
/// integrand spikes aligned with a single node set.
fn penalized_objective<R: Real>(
    hw: &HomogenizedWeight<R>,
    kind: EnvelopeKind,
    layout: Layout,
    comps: &[Vec<Complex<R>>],
    node_sets: &[&[Complex<R>]; 2],
    row: &mut [Complex<R>],
    weight: R,
) -> R {
    let mut value = R::neg_infinity();
    let mut penalty = R::zero();
    let coord_base = usize::from(layout.projective);

    for nodes in node_sets {
        let mut acc = R::zero();
        for &x in nodes.iter() {
            let f0 = if layout.projective {
                crate::poly::eval(&comps[0], x)
            } else {
                Complex::new(R::one(), R::zero())
            };
            for i in 0..layout.n {
                row[i] = crate::poly::eval(&comps[coord_base + i], x);
            }
            if kind == EnvelopeKind::WeightedHomog {
                // Chart coordinates; the barrier below keeps f0 usable.
                let safe = if f0.norm() > R::lit(1e-12) {
                    f0
                } else {
                    Complex::new(R::lit(1e-12), R::zero())
                };
                for c in row.iter_mut() {
                    *c /= safe;
                }
            }
            match hw.log_rho_or_violation(row) {
                Ok(lr) => acc += lr.value,
                Err(v) => penalty += v.max(R::zero()) + R::lit(1e-3),
            }
            if layout.projective {
                let barrier = R::lit(SCALE_BARRIER) - f0.norm();
                if barrier > R::zero() {
                    penalty += barrier / R::lit(SCALE_BARRIER);
                }
            }
        }
        acc /= R::lit(nodes.len() as f64);
        if acc > value {
            value = acc;
        }
    }
    if kind == EnvelopeKind::WeightedHomog {
        if let Ok(ct) = crossing_term(&ProjDiscView { comps }.to_disc()) {
            value += ct;
        } else {
            penalty += R::one();
        }
    }
    value + weight * penalty
}

/// Cheap wrapper so the crossing term can reuse the ProjDisc-based root code
/// without revalidating the center each evaluation.
struct ProjDiscView<'a, R: Real> {
    comps: &'a [Vec<Complex<R>>],
}

impl<'a, R: Real> ProjDiscView<'a, R> {
    fn to_disc(&self) -> ProjDisc<R> {
        ProjDisc::new(self.comps.to_vec()).expect("layout produces a valid projective disc")
    }
}

/// Quadrature values on the two interleaved reporting grids must agree this
/// closely for a candidate to be trusted.
pub const REPORT_STABILITY_TOL: f64 = 1e-4;

fn report_value<R: Real>(
    problem: &EnvelopeProblem<R>,
    kind: EnvelopeKind,
    comps: Vec<Vec<Complex<R>>>,
    grid: &QuadratureGrid<R>,
    grid_mid: &QuadratureGrid<R>,
) -> (std::result::Result<R, f64>, Disc<R>) {
    let one_grid = |g: &QuadratureGrid<R>, disc: &Disc<R>| -> Result<R> {
        match (kind, disc) {
            (EnvelopeKind::Affine, Disc::Affine(d)) => affine_functional(&problem.hw_report, d, g),
            (EnvelopeKind::Projective, Disc::Projective(d)) => {
                projective_functional(&problem.hw_report, d, g)
            }
            (EnvelopeKind::WeightedHomog, Disc::Projective(d)) => {
                weighted_homog_functional(&problem.hw_report, d, g)
            }
            _ => unreachable!("layout matches the kind"),
        }
    };
    let disc = match kind {
        EnvelopeKind::Affine => {
            Disc::Affine(PolyDisc::new(comps).expect("layout produces a valid disc"))
        }
        _ => Disc::Projective(ProjDisc::new(comps).expect("layout produces a valid disc")),
    };
    let a = flatten_report(one_grid(grid, &disc));
    let b = flatten_report(one_grid(grid_mid, &disc));
    let res = match (a, b) {
        (Ok(va), Ok(vb)) => {
            // A disagreement between the interleaved grids means the boundary
            // integrand is under-resolved; such candidates are not trusted.
            if (va - vb).abs().as_f64() > REPORT_STABILITY_TOL {
                Err(f64::INFINITY)
            } else {
                Ok(va.max(vb))
            }
        }
        (Err(ra), Err(rb)) => Err(ra + rb),
        (Err(r), Ok(_)) | (Ok(_), Err(r)) => Err(r),
    };
    (res, disc)
}

fn flatten_report<R: Real>(v: Result<R>) -> std::result::Result<R, f64> {
    match v {
        Ok(x) => Ok(x),
        Err(Error::InfeasibleBoundary {
            total_violation, ..
        }) => Err(total_violation.max(1e-30)),
        Err(_) => Err(f64::INFINITY),
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable stream id from the seed, the quantized point, the degree and the
/// start index; a single-point run reproduces the matching batch row.
fn start_seed<R: Real>(seed: u64, z: &Point<R>, degree: usize, start: usize) -> u64 {
    let mut h = splitmix(seed ^ 0x5a5a_0f0f_3c3c_a5a5);
    for (a, b) in quantized_key(z.coords()) {
        h = splitmix(h ^ a);
        h = splitmix(h ^ b);
    }
    h = splitmix(h ^ degree as u64);
    splitmix(h ^ ((start as u64) << 32))
}

fn gaussian_complex<R: Real>(rng: &mut ChaCha8Rng, sigma: R) -> Complex<R> {
    let re = crate::region::gaussian(rng);
    let im = crate::region::gaussian(rng);
    Complex::new(
        sigma * R::lit(re * std::f64::consts::FRAC_1_SQRT_2),
        sigma * R::lit(im * std::f64::consts::FRAC_1_SQRT_2),
    )
}

/// Minimizes the chosen disc functional over polynomial discs centered at `z`
/// by degree continuation. The reported per-degree trace is the running best
/// at the reporting budget, so it is nonincreasing by construction, and the
/// warm-start embedding guarantees the value never exceeds the constant-disc
/// value when that disc is feasible.
pub fn minimize_envelope<R: Real>(
    problem: &EnvelopeProblem<R>,
    z: &Point<R>,
    kind: EnvelopeKind,
    cfg: &OptimizerConfig,
    grid: &QuadratureGrid<R>,
) -> Result<EnvelopeResult<R>> {
    let region = problem.region();
    if z.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: z.dim(),
        });
    }
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }
    if cfg.max_degree > crate::disc::DEFAULT_MAX_DEGREE {
        return Err(Error::InvalidConfig(format!(
            "degree schedule exceeds the per-component cap of {}",
            crate::disc::DEFAULT_MAX_DEGREE
        )));
    }
    match kind {
        EnvelopeKind::Affine => {
            if !region.flags().full_cone {
                return Err(Error::Precondition(
                    "affine envelope requires the full-cone claim".into(),
                ));
            }
        }
        EnvelopeKind::Projective | EnvelopeKind::WeightedHomog => {
            if !region.flags().cone_connected {
                return Err(Error::Precondition(
                    "projective envelope requires the connected-cone claim".into(),
                ));
            }
        }
    }

    let inner_grid = QuadratureGrid::<R>::new(cfg.inner_nodes)?;
    let inner_grid_mid = QuadratureGrid::<R>::midpoint(cfg.inner_nodes)?;
    let report_grid_mid = QuadratureGrid::<R>::midpoint(grid.len())?;
    let projective = kind != EnvelopeKind::Affine;
    let start = Instant::now();
    let sigma = R::lit(cfg.start_scale) * z.norm();

    let mut trace: Vec<(usize, R)> = Vec::new();
    let mut best: Option<(R, Disc<R>, usize)> = None;
    let mut best_residual = f64::INFINITY;
    let mut warm: Option<Vec<Vec<Complex<R>>>> = None;
    let mut total_evals = 0usize;
    let mut converged = true;

    let penalty_weights: Vec<f64> = (0..cfg.penalty_stages.max(1))
        .map(|k| cfg.penalty_initial * cfg.penalty_factor.powi(k as i32))
        .collect();

    for degree in 0..=cfg.max_degree {
        if let Some(budget) = cfg.time_budget {
            if start.elapsed() > budget {
                converged = false;
                break;
            }
        }
        let layout = Layout {
            n: z.dim(),
            degree,
            projective,
            freeze_scale: cfg.freeze_scale,
        };

        let mut candidates: Vec<Vec<Vec<Complex<R>>>> = Vec::new();
        if degree == 0 {
            let comps = layout.unpack(z.coords(), &[]);
            candidates.push(comps);
        } else {
            let warm_comps: Vec<Vec<Complex<R>>> = match &warm {
                Some(w) => pad_components(w, degree),
                None => layout.unpack(z.coords(), &vec![R::zero(); layout.dims()]),
            };
            let mut starts: Vec<(usize, Vec<R>, usize)> = Vec::new();
            starts.push((0, layout.pack(&warm_comps), cfg.warm_evals));
            for s in 1..=cfg.starts {
                let mut rng = ChaCha8Rng::seed_from_u64(start_seed(cfg.seed, z, degree, s));
                let mut x = Vec::with_capacity(layout.dims());
                for _ in 0..layout.free_complex() {
                    let c = gaussian_complex(&mut rng, sigma);
                    x.push(c.re);
                    x.push(c.im);
                }
                starts.push((s, x, cfg.start_evals));
            }

            let descended: Vec<(usize, Vec<R>, usize)> = starts
                .into_par_iter()
                .map(|(idx, x0, evals)| {
                    let mut comps_scratch = layout.unpack(z.coords(), &x0);
                    let mut row = vec![Complex::new(R::zero(), R::zero()); layout.n];
                    let node_sets = [inner_grid.nodes(), inner_grid_mid.nodes()];
                    let step = if idx == 0 {
                        sigma * R::lit(0.125)
                    } else {
                        sigma * R::lit(0.5)
                    };
                    let steps = vec![step; layout.dims()];
                    let mut x = x0;
                    let mut used = 0usize;
                    let per_stage = (evals / penalty_weights.len().max(1)).max(64);
                    for &w in &penalty_weights {
                        let wr = R::lit(w);
                        let mut f = |v: &[R]| {
                            fill_components(&layout, z.coords(), v, &mut comps_scratch);
                            penalized_objective(
                                &problem.hw_inner,
                                kind,
                                layout,
                                &comps_scratch,
                                &node_sets,
                                &mut row,
                                wr,
                            )
                        };
                        let opts = NelderMeadOptions {
                            max_evals: per_stage,
                            restarts: 1,
                            ..Default::default()
                        };
                        let r = nelder::minimize(&mut f, &x, &steps, &opts);
                        x = r.x;
                        used += r.evals;
                    }
                    (idx, x, used)
                })
                .collect();

            for (_, x, used) in &descended {
                total_evals += used;
                candidates.push(layout.unpack(z.coords(), x));
            }
        }

        // Evaluate every candidate at the reporting budget; deterministic
        // min-reduction ordered by candidate index.
        let mut degree_best: Option<(R, Disc<R>)> = None;
        for comps in candidates {
            let (res, disc) = report_value(problem, kind, comps, grid, &report_grid_mid);
            match res {
                Ok(v) => {
                    if degree_best.as_ref().is_none_or(|(b, _)| v < *b) {
                        degree_best = Some((v, disc));
                    }
                }
                Err(residual) => {
                    if residual < best_residual {
                        best_residual = residual;
                    }
                }
            }
        }

        if let Some((v, disc)) = degree_best {
            let improved = best.as_ref().is_none_or(|(b, _, _)| v < *b);
            if improved {
                best = Some((v, disc.clone(), degree));
                if projective {
                    if let Disc::Projective(p) = &disc {
                        warm = Some(p.components().to_vec());
                    }
                } else if let Disc::Affine(a) = &disc {
                    warm = Some(a.components().to_vec());
                }
            } else if warm.is_none() {
                // Keep some feasible disc to embed even without improvement.
                warm = Some(match &disc {
                    Disc::Projective(p) => p.components().to_vec(),
                    Disc::Affine(a) => a.components().to_vec(),
                });
            }
            let running = best.as_ref().map(|(b, _, _)| *b).unwrap();
            trace.push((degree, running));
        } else if best.is_none() {
            // No feasible disc yet; keep the best infeasible one as a warm
            // seed so the next degree can repair it.
            warm = None;
        }
    }

    match best {
        Some((value, best_disc, degree_used)) => {
            // Accepted discs are exactly boundary-feasible, so the residual
            // sits well under the declared feasibility tolerance.
            let penalty_residual = R::zero();
            debug_assert!(penalty_residual.as_f64() <= cfg.feasibility_tol);
            Ok(EnvelopeResult {
                value,
                best_disc,
                degree_used,
                penalty_residual,
                trace,
                converged,
                kind,
                evals: total_evals,
            })
        }
        None if !converged => Err(Error::BudgetExhausted),
        None => Err(Error::NoFeasibleDisc {
            residual: best_residual,
        }),
    }
}

fn pad_components<R: Real>(comps: &[Vec<Complex<R>>], degree: usize) -> Vec<Vec<Complex<R>>> {
    let zero = Complex::new(R::zero(), R::zero());
    comps
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.resize((degree + 1).max(v.len()), zero);
            v
        })
        .collect()
}

fn fill_components<R: Real>(
    layout: &Layout,
    center: &[Complex<R>],
    x: &[R],
    comps: &mut [Vec<Complex<R>>],
) {
    let coord_base = usize::from(layout.projective);
    if layout.projective {
        comps[0][0] = Complex::new(R::one(), R::zero());
    }
    for (i, &c) in center.iter().enumerate() {
        comps[coord_base + i][0] = c;
    }
    let mut k = 0;
    for i in 0..layout.n {
        for d in 1..=layout.degree {
            comps[coord_base + i][d] = Complex::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    if layout.projective {
        for d in 1..=layout.degree {
            if layout.freeze_scale {
                comps[0][d] = Complex::new(R::zero(), R::zero());
            } else {
                comps[0][d] = Complex::new(x[k], x[k + 1]);
                k += 2;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Consistency of the three envelope routes.
// ---------------------------------------------------------------------------

pub const CONSISTENCY_TOL_PROJ_WEIGHTED: f64 = 1e-2;
pub const CONSISTENCY_TOL_PROJ_AFFINE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ConsistencyReport<R: Real> {
    pub projective: Option<R>,
    pub weighted: Option<R>,
    pub affine: Option<R>,
    pub skipped: Vec<(EnvelopeKind, String)>,
    pub proj_weighted_gap: Option<R>,
    pub proj_minus_affine: Option<R>,
    pub pass_proj_weighted: Option<bool>,
    pub pass_proj_le_affine: Option<bool>,
}

impl<R: Real> ConsistencyReport<R> {
    pub fn passed(&self) -> bool {
        self.pass_proj_weighted.unwrap_or(true) && self.pass_proj_le_affine.unwrap_or(true)
    }
}

/// Computes the projective, weighted and (where the full-cone claim holds)
/// affine envelopes at `z` and reports the pairwise gaps: the projective and
/// weighted routes must agree, and the projective value cannot exceed the
/// affine one beyond tolerance since affine discs embed into the projective
/// class.
pub fn consistency_check<R: Real>(
    problem: &EnvelopeProblem<R>,
    z: &Point<R>,
    cfg: &OptimizerConfig,
    grid: &QuadratureGrid<R>,
) -> Result<ConsistencyReport<R>> {
    let flags = problem.region().flags();
    let mut skipped = Vec::new();

    let projective = if flags.cone_connected {
        Some(minimize_envelope(problem, z, EnvelopeKind::Projective, cfg, grid)?.value)
    } else {
        skipped.push((
            EnvelopeKind::Projective,
            "connected-cone claim missing".to_string(),
        ));
        None
    };
    let weighted = if flags.cone_connected {
        Some(minimize_envelope(problem, z, EnvelopeKind::WeightedHomog, cfg, grid)?.value)
    } else {
        skipped.push((
            EnvelopeKind::WeightedHomog,
            "connected-cone claim missing".to_string(),
        ));
        None
    };
    let affine = if flags.full_cone {
        Some(minimize_envelope(problem, z, EnvelopeKind::Affine, cfg, grid)?.value)
    } else {
        skipped.push((EnvelopeKind::Affine, "full-cone claim missing".to_string()));
        None
    };

    let proj_weighted_gap = match (projective, weighted) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    let proj_minus_affine = match (projective, affine) {
        (Some(a), Some(c)) => Some(a - c),
        _ => None,
    };
    Ok(ConsistencyReport {
        projective,
        weighted,
        affine,
        skipped,
        proj_weighted_gap,
        proj_minus_affine,
        pass_proj_weighted: proj_weighted_gap
            .map(|g| g.as_f64() <= CONSISTENCY_TOL_PROJ_WEIGHTED),
        pass_proj_le_affine: proj_minus_affine
            .map(|d| d.as_f64() <= CONSISTENCY_TOL_PROJ_AFFINE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{annulus, punctured_ball};

    fn quick_cfg() -> OptimizerConfig {
        OptimizerConfig {
            max_degree: 2,
            starts: 4,
            warm_evals: 600,
            start_evals: 300,
            ..Default::default()
        }
    }

    #[test]
    fn constant_disc_is_optimal_on_the_annulus() {
        let problem = EnvelopeProblem::new(
            Arc::new(annulus(0.5f64, 2.0).unwrap()),
            WeightSpec::zero(),
        );
        let z = Point::from_re(&[1.0f64]).unwrap();
        let grid = QuadratureGrid::new(256).unwrap();
        let r = minimize_envelope(&problem, &z, EnvelopeKind::Affine, &quick_cfg(), &grid).unwrap();
        let expect = -(2.0f64.ln());
        assert!((r.value - expect).abs() < 5e-3, "value {}", r.value);
        assert!(r.converged);
        // Trace is nonincreasing.
        for w in r.trace.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn punctured_ball_degree_zero() {
        let problem = EnvelopeProblem::new(
            Arc::new(punctured_ball(2, 1.0f64).unwrap()),
            WeightSpec::zero(),
        );
        let z = Point::from_re(&[0.3f64, 0.4]).unwrap();
        let grid = QuadratureGrid::new(256).unwrap();
        let r = minimize_envelope(&problem, &z, EnvelopeKind::Affine, &quick_cfg(), &grid).unwrap();
        assert!((r.value - 0.5f64.ln()).abs() < 5e-3, "value {}", r.value);
    }

    #[test]
    fn projective_frozen_scale_matches_affine() {
        let problem = EnvelopeProblem::new(
            Arc::new(punctured_ball(2, 1.0f64).unwrap()),
            WeightSpec::zero(),
        );
        let z = Point::from_re(&[0.3f64, 0.4]).unwrap();
        let grid = QuadratureGrid::new(128).unwrap();
        let cfg = quick_cfg();
        let a = minimize_envelope(&problem, &z, EnvelopeKind::Affine, &cfg, &grid).unwrap();
        let frozen = OptimizerConfig {
            freeze_scale: true,
            ..cfg
        };
        let p = minimize_envelope(&problem, &z, EnvelopeKind::Projective, &frozen, &grid).unwrap();
        assert!(
            (a.value - p.value).abs() < 1e-9,
            "affine {} vs frozen projective {}",
            a.value,
            p.value
        );
    }

    #[test]
    fn zero_center_rejected() {
        let problem = EnvelopeProblem::new(
            Arc::new(punctured_ball(2, 1.0f64).unwrap()),
            WeightSpec::zero(),
        );
        let z = Point::from_re(&[0.0f64, 0.0]).unwrap();
        let grid = QuadratureGrid::new(64).unwrap();
        assert!(matches!(
            minimize_envelope(&problem, &z, EnvelopeKind::Affine, &quick_cfg(), &grid),
            Err(Error::ZeroPoint)
        ));
    }

    #[test]
    fn consistency_on_annulus() {
        let problem = EnvelopeProblem::new(
            Arc::new(annulus(0.5f64, 2.0).unwrap()),
            WeightSpec::zero(),
        );
        let z = Point::from_re(&[1.0f64]).unwrap();
        let grid = QuadratureGrid::new(256).unwrap();
        let rep = consistency_check(&problem, &z, &quick_cfg(), &grid).unwrap();
        assert!(rep.passed(), "consistency failed: {rep:?}");
        let expect = -(2.0f64.ln());
        assert!((rep.projective.unwrap() - expect).abs() < 1e-2);
        assert!((rep.weighted.unwrap() - expect).abs() < 1e-2);
        assert!((rep.affine.unwrap() - expect).abs() < 1e-2);
    }
}
