//! Reference solutions, a brute-force Reinhardt hull oracle, Lelong-class
//! validators and sandwich certification of envelope outputs.

use std::sync::Arc;

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optimize::EnvelopeResult;
use crate::point::{norm_of, Point};
use crate::region::{gaussian, RegionSpec};
use crate::scalar::Real;
use crate::weight::WeightSpec;

pub type CandidateFn<R> = dyn Fn(&[Complex<R>]) -> R + Send + Sync;

/// A candidate lower bound: evaluable at all nonzero points.
#[derive(Clone)]
pub struct CandidateFunction<R: Real> {
    pub u: Arc<CandidateFn<R>>,
    pub label: String,
}

impl<R: Real> std::fmt::Debug for CandidateFunction<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CandidateFunction({})", self.label)
    }
}

impl<R: Real> CandidateFunction<R> {
    pub fn new(u: Arc<CandidateFn<R>>, label: impl Into<String>) -> Self {
        Self {
            u,
            label: label.into(),
        }
    }

    pub fn eval(&self, z: &Point<R>) -> R {
        (self.u)(z.coords())
    }
}

/// The validation fixtures with known or derived envelope values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceCase {
    PuncturedBall,
    Annulus,
    PuncturedPolydisc,
    PolydiscUnion,
    Sector,
}

impl ReferenceCase {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "punctured-ball" => Ok(Self::PuncturedBall),
            "annulus" => Ok(Self::Annulus),
            "punctured-polydisc" => Ok(Self::PuncturedPolydisc),
            "polydisc-union" => Ok(Self::PolydiscUnion),
            "sector" => Ok(Self::Sector),
            other => Err(Error::UnknownCase(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::PuncturedBall => "punctured-ball",
            Self::Annulus => "annulus",
            Self::PuncturedPolydisc => "punctured-polydisc",
            Self::PolydiscUnion => "polydisc-union",
            Self::Sector => "sector",
        }
    }

    pub const ALL: [ReferenceCase; 5] = [
        Self::PuncturedBall,
        Self::Annulus,
        Self::PuncturedPolydisc,
        Self::PolydiscUnion,
        Self::Sector,
    ];
}

/// Provenance of a fixture value, carried into reports.
pub fn reference_label(case: ReferenceCase) -> &'static str {
    match case {
        ReferenceCase::PuncturedBall | ReferenceCase::Annulus | ReferenceCase::PuncturedPolydisc => {
            "classical closed form"
        }
        ReferenceCase::PolydiscUnion => "derived (log-convex hull oracle)",
        ReferenceCase::Sector => "conjectured fixture backed by sandwich",
    }
}

/// Closed-form (or derived) envelope value for a fixture case.
pub fn reference_vh<R: Real>(case: ReferenceCase, z: &Point<R>) -> Result<R> {
    let c = z.coords();
    let expect_dim = |d: usize| -> Result<()> {
        if c.len() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: d,
                got: c.len(),
            })
        }
    };
    match case {
        ReferenceCase::PuncturedBall => Ok(norm_of(c).ln()),
        ReferenceCase::Annulus => {
            expect_dim(1)?;
            Ok(c[0].norm().ln() - R::lit(2.0).ln())
        }
        ReferenceCase::PuncturedPolydisc => Ok(c
            .iter()
            .map(|v| v.norm())
            .fold(R::neg_infinity(), R::max)
            .ln()),
        ReferenceCase::PolydiscUnion => {
            expect_dim(2)?;
            let (a, b) = (c[0].norm(), c[1].norm());
            let hull = a.max(b).max((R::lit(2.0) * a * b).sqrt());
            Ok(hull.ln())
        }
        ReferenceCase::Sector => {
            expect_dim(2)?;
            let m = c[0].norm().ln().max(c[1].norm().ln());
            Ok(m - R::lit(2.0).ln())
        }
    }
}

/// The candidate lower bound associated with each fixture (it equals the
/// reference value itself, which is logarithmically homogeneous).
pub fn reference_candidate<R: Real>(case: ReferenceCase) -> CandidateFunction<R> {
    let u: Arc<CandidateFn<R>> = match case {
        ReferenceCase::PuncturedBall => Arc::new(|c| norm_of(c).ln()),
        ReferenceCase::Annulus => Arc::new(|c: &[Complex<R>]| c[0].norm().ln() - R::lit(2.0).ln()),
        ReferenceCase::PuncturedPolydisc => Arc::new(|c: &[Complex<R>]| {
            c.iter()
                .map(|v| v.norm())
                .fold(R::neg_infinity(), R::max)
                .ln()
        }),
        ReferenceCase::PolydiscUnion => Arc::new(|c: &[Complex<R>]| {
            let (a, b) = (c[0].norm(), c[1].norm());
            a.max(b).max((R::lit(2.0) * a * b).sqrt()).ln()
        }),
        ReferenceCase::Sector => {
            Arc::new(|c: &[Complex<R>]| c[0].norm().ln().max(c[1].norm().ln()) - R::lit(2.0).ln())
        }
    };
    CandidateFunction::new(u, format!("reference:{}", case.id()))
}

// ---------------------------------------------------------------------------
// Brute-force hull oracle for 2-D Reinhardt unions of polydiscs.
// ---------------------------------------------------------------------------

/// Gauge of the log-convexified union of polydiscs, computed independently of
/// the main build: dense sampling of the log-domain plus support-function
/// evaluation over a fan of half-plane normals.
#[derive(Debug, Clone)]
pub struct ReinhardtHullOracle<R: Real> {
    angles: Vec<f64>,
    support: Vec<f64>,
    max_log_r1: f64,
    max_log_r2: f64,
    _marker: std::marker::PhantomData<R>,
}

/// Log-grid window and resolution. The corners of the member quadrants sit
/// well inside the window; gauge error stays below 1e-3.
const HULL_WINDOW: (f64, f64) = (-6.0, 1.0);
const HULL_RES: usize = 2048;
const HULL_ANGLES: usize = 4097;

impl<R: Real> ReinhardtHullOracle<R> {
    /// Builds the oracle for a union of 2-D polydiscs given as radius pairs.
    pub fn build(members: &[[f64; 2]]) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig("hull oracle needs members".into()));
        }
        let corners: Vec<(f64, f64)> = members
            .iter()
            .map(|m| (m[0].ln(), m[1].ln()))
            .collect();
        let (lo, hi) = HULL_WINDOW;
        if corners
            .iter()
            .any(|&(x, y)| x <= lo || x >= hi || y <= lo || y >= hi)
        {
            return Err(Error::InvalidConfig(
                "member radii fall outside the hull oracle window".into(),
            ));
        }
        let step = (hi - lo) / (HULL_RES - 1) as f64;
        let inside =
            |x: f64, y: f64| corners.iter().any(|&(cx, cy)| x < cx && y < cy);

        // Dense column scan: for each x the largest sampled y inside the
        // union. The staircase of these points carries the support data; the
        // quadrant corners, where the support is attained exactly, are
        // appended so grid resolution does not bias the gauge outward.
        let mut frontier: Vec<(f64, f64)> = Vec::with_capacity(HULL_RES + corners.len());
        for i in 0..HULL_RES {
            let x = lo + step * i as f64;
            let mut j = HULL_RES - 1;
            loop {
                let y = lo + step * j as f64;
                if inside(x, y) {
                    frontier.push((x, y));
                    break;
                }
                if j == 0 {
                    break;
                }
                j -= 1;
            }
        }
        frontier.extend(corners.iter().copied());
        if frontier.is_empty() {
            return Err(Error::InvalidConfig("hull sampling found no members".into()));
        }

        let mut angles = Vec::with_capacity(HULL_ANGLES);
        let mut support = Vec::with_capacity(HULL_ANGLES);
        for k in 0..HULL_ANGLES {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / (HULL_ANGLES - 1) as f64;
            let (a, b) = (t.cos(), t.sin());
            let h = frontier
                .iter()
                .map(|&(x, y)| a * x + b * y)
                .fold(f64::NEG_INFINITY, f64::max);
            angles.push(t);
            support.push(h);
        }
        Ok(Self {
            angles,
            support,
            max_log_r1: corners.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max),
            max_log_r2: corners.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max),
            _marker: std::marker::PhantomData,
        })
    }

    /// Gauge of the hulled balanced domain at `z`.
    pub fn gauge(&self, z: &Point<R>) -> Result<R> {
        if z.dim() != 2 {
            return Err(Error::HullDimension(z.dim()));
        }
        if z.is_zero() {
            return Err(Error::ZeroPoint);
        }
        let a1 = z.coords()[0].norm().as_f64();
        let a2 = z.coords()[1].norm().as_f64();
        // Axis points are governed by the axis half-planes alone.
        if a2 == 0.0 {
            return Ok(R::lit((a1.ln() - self.max_log_r1).exp()));
        }
        if a1 == 0.0 {
            return Ok(R::lit((a2.ln() - self.max_log_r2).exp()));
        }
        let (q1, q2) = (a1.ln(), a2.ln());
        let mut log_t = f64::NEG_INFINITY;
        for (t, h) in self.angles.iter().zip(self.support.iter()) {
            let (a, b) = (t.cos(), t.sin());
            let v = (a * q1 + b * q2 - h) / (a + b);
            if v > log_t {
                log_t = v;
            }
        }
        Ok(R::lit(log_t.exp()))
    }
}

// ---------------------------------------------------------------------------
// Lelong-class validators.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    Bounded,
    UnboundedEvidence,
}

#[derive(Debug, Clone)]
pub struct LelongReport<R: Real> {
    pub max_defect: R,
    pub per_radius: Vec<(R, R)>,
    pub verdict: GrowthVerdict,
}

/// Samples `u(z) - log+|z|` on spheres of increasing radii. A growing running
/// maximum is evidence against membership in the Lelong class.
pub fn lelong_defect<R: Real>(
    c: &CandidateFunction<R>,
    dim: usize,
    radii: &[R],
) -> Result<LelongReport<R>> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] < R::one() {
        return Err(Error::InvalidConfig(
            "radii must be increasing and at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e10);
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut max_defect = R::neg_infinity();
    for &r in radii {
        let mut worst = R::neg_infinity();
        for _ in 0..64 {
            let mut coords: Vec<Complex<R>> = (0..dim)
                .map(|_| Complex::new(R::lit(gaussian(&mut rng)), R::lit(gaussian(&mut rng))))
                .collect();
            let n = norm_of(&coords);
            if n.is_zero() {
                continue;
            }
            for v in coords.iter_mut() {
                *v *= r / n;
            }
            let d = (c.u)(&coords) - r.ln().max(R::zero());
            if d > worst {
                worst = d;
            }
        }
        if worst > max_defect {
            max_defect = worst;
        }
        per_radius.push((r, worst));
    }
    let growth = per_radius.last().unwrap().1 - per_radius.first().unwrap().1;
    Ok(LelongReport {
        max_defect,
        per_radius,
        verdict: if growth > R::lit(0.5) {
            GrowthVerdict::UnboundedEvidence
        } else {
            GrowthVerdict::Bounded
        },
    })
}

/// `| u(lambda z) - u(z) - log|lambda| |`: zero for logarithmically
/// homogeneous candidates.
pub fn loghomog_residual<R: Real>(
    c: &CandidateFunction<R>,
    z: &Point<R>,
    lambda: Complex<R>,
) -> Result<R> {
    if z.is_zero() || lambda.norm().is_zero() {
        return Err(Error::ZeroPoint);
    }
    let a = (c.u)(z.scaled(lambda).coords());
    let b = (c.u)(z.coords());
    Ok((a - b - lambda.norm().ln()).abs())
}

// ---------------------------------------------------------------------------
// Sandwich certification.
// ---------------------------------------------------------------------------

pub const LOGHOMOG_VALIDATION_TOL: f64 = 1e-8;
pub const DOMINATION_TOL: f64 = 1e-9;
pub const SOUNDNESS_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum SandwichVerdict {
    Certified,
    UpperBoundOnly,
    GapExceedsTolerance,
    LowerInvalid(String),
}

#[derive(Debug, Clone)]
pub struct SandwichReport<R: Real> {
    pub lower_value: Option<R>,
    pub upper_value: R,
    pub gap: Option<R>,
    pub verdict: SandwichVerdict,
    pub loghomog_max: Option<R>,
    pub domination_margin: Option<R>,
}

/// Outcome of standalone candidate validation.
#[derive(Debug, Clone)]
pub struct CandidateValidation<R: Real> {
    pub loghomog_max: R,
    pub domination_margin: Option<R>,
    pub failure: Option<String>,
}

impl<R: Real> CandidateValidation<R> {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks a lower candidate: log-homogeneity on seeded (point, scaling)
/// pairs, and domination by the weight on sampled members of the region.
pub fn validate_candidate<R: Real>(
    region: &RegionSpec<R>,
    weight: &WeightSpec<R>,
    cand: &CandidateFunction<R>,
) -> CandidateValidation<R> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca17);
    let mut loghomog_max = R::zero();
    for _ in 0..32 {
        let coords: Vec<Complex<R>> = (0..region.dim())
            .map(|_| Complex::new(R::lit(gaussian(&mut rng)), R::lit(gaussian(&mut rng))))
            .collect();
        let w = match Point::new(coords) {
            Ok(p) if !p.is_zero() => p,
            _ => continue,
        };
        let lr: f64 = rng.random_range(-2.0..2.0);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let lambda = Complex::from_polar(R::lit(lr.exp()), R::lit(th));
        if let Ok(res) = loghomog_residual(cand, &w, lambda) {
            if res > loghomog_max {
                loghomog_max = res;
            }
        }
    }
    if loghomog_max > R::lit(LOGHOMOG_VALIDATION_TOL) {
        return CandidateValidation {
            loghomog_max,
            domination_margin: None,
            failure: Some(format!(
                "log-homogeneity residual {loghomog_max:.3e} exceeds {LOGHOMOG_VALIDATION_TOL:.1e}"
            )),
        };
    }

    let (r_min, r_max) = region.sample_annulus();
    let (lr_min, lr_max) = (r_min.as_f64().ln(), r_max.as_f64().ln());
    let mut margin = R::neg_infinity();
    let mut found = 0;
    for _ in 0..4096 {
        if found >= 128 {
            break;
        }
        let mut coords: Vec<Complex<R>> = (0..region.dim())
            .map(|_| Complex::new(R::lit(gaussian(&mut rng)), R::lit(gaussian(&mut rng))))
            .collect();
        let n = norm_of(&coords);
        if n.is_zero() {
            continue;
        }
        let r: f64 = rng.random_range(lr_min..=lr_max);
        let s = R::lit(r.exp()) / n;
        for v in coords.iter_mut() {
            *v *= s;
        }
        if region.contains_slice(&coords) {
            found += 1;
            let (phi, _) = weight.eval_clamped(&coords);
            let d = (cand.u)(&coords) - phi;
            if d > margin {
                margin = d;
            }
        }
    }
    if found == 0 {
        return CandidateValidation {
            loghomog_max,
            domination_margin: None,
            failure: Some("no members sampled for domination".into()),
        };
    }
    if margin > R::lit(DOMINATION_TOL) {
        return CandidateValidation {
            loghomog_max,
            domination_margin: Some(margin),
            failure: Some(format!(
                "candidate exceeds the weight on members by {margin:.3e}"
            )),
        };
    }
    CandidateValidation {
        loghomog_max,
        domination_margin: Some(margin),
        failure: None,
    }
}

/// Validates a lower candidate (log-homogeneity on sampled pairs, domination
/// by the weight on sampled members) and brackets the envelope between it and
/// the optimized upper bound.
pub fn sandwich_certify<R: Real>(
    region: &RegionSpec<R>,
    weight: &WeightSpec<R>,
    z: &Point<R>,
    lower: Option<&CandidateFunction<R>>,
    upper: &EnvelopeResult<R>,
    tol: f64,
) -> SandwichReport<R> {
    let lower = match lower {
        Some(l) => l,
        None => {
            return SandwichReport {
                lower_value: None,
                upper_value: upper.value,
                gap: None,
                verdict: SandwichVerdict::UpperBoundOnly,
                loghomog_max: None,
                domination_margin: None,
            }
        }
    };

    let validation = validate_candidate(region, weight, lower);
    if let Some(reason) = validation.failure {
        return SandwichReport {
            lower_value: None,
            upper_value: upper.value,
            gap: None,
            verdict: SandwichVerdict::LowerInvalid(reason),
            loghomog_max: Some(validation.loghomog_max),
            domination_margin: validation.domination_margin,
        };
    }

    let lower_value = lower.eval(z);
    let gap = upper.value - lower_value;
    let verdict = if gap.as_f64() < -SOUNDNESS_SLACK {
        SandwichVerdict::LowerInvalid(format!(
            "upper bound {:.6} fell below the validated lower bound {:.6}",
            upper.value.as_f64(),
            lower_value.as_f64()
        ))
    } else if gap.as_f64() < tol {
        SandwichVerdict::Certified
    } else {
        SandwichVerdict::GapExceedsTolerance
    };
    SandwichReport {
        lower_value: Some(lower_value),
        upper_value: upper.value,
        gap: Some(gap),
        verdict,
        loghomog_max: Some(validation.loghomog_max),
        domination_margin: validation.domination_margin,
    }
}
