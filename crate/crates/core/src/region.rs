//! Open sets E in C^n minus the origin, their complex cones, membership and
//! penalty queries, and structural probes.
//!
//! Membership follows open-set semantics: when defining inequalities are
//! present, a point is inside iff every `g_i < -1e-12`, so points within
//! `1e-12` of a defining boundary count as outside.

use std::sync::Arc;

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::{norm_of, scale_into, Point};
use crate::scalar::Real;

/// Boundary exclusion margin for inequality-defined membership.
pub const BOUNDARY_EPS: f64 = 1e-12;

pub type MembershipFn<R> = dyn Fn(&[Complex<R>]) -> bool + Send + Sync;
pub type InequalityFn<R> = dyn Fn(&[Complex<R>]) -> R + Send + Sync;

/// Structural claims asserted by the scenario author. Probes report evidence
/// but never overturn these.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegionFlags {
    pub balanced: bool,
    pub cone_connected: bool,
    pub full_cone: bool,
}

/// An open subset of C^n minus the origin, described by oracles.
pub struct RegionSpec<R: Real> {
    dim: usize,
    membership: Option<Arc<MembershipFn<R>>>,
    inequalities: Vec<Arc<InequalityFn<R>>>,
    sample_annulus: (R, R),
    flags: RegionFlags,
    phase_invariant: bool,
    label: String,
}

impl<R: Real> std::fmt::Debug for RegionSpec<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegionSpec")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("sample_annulus", &self.sample_annulus)
            .field("flags", &self.flags)
            .field("phase_invariant", &self.phase_invariant)
            .finish()
    }
}

impl<R: Real> RegionSpec<R> {
    /// Region from defining inequalities: `z` is inside iff all `g_i(z) < 0`
    /// (with the boundary margin).
    pub fn from_inequalities(
        dim: usize,
        inequalities: Vec<Arc<InequalityFn<R>>>,
        sample_annulus: (R, R),
        flags: RegionFlags,
        phase_invariant: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        if inequalities.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one defining inequality is required".into(),
            ));
        }
        Self::validate(dim, sample_annulus)?;
        Ok(Self {
            dim,
            membership: None,
            inequalities,
            sample_annulus,
            flags,
            phase_invariant,
            label: label.into(),
        })
    }

    /// Region from a raw membership oracle (no inequality structure).
    pub fn from_membership(
        dim: usize,
        membership: Arc<MembershipFn<R>>,
        sample_annulus: (R, R),
        flags: RegionFlags,
        phase_invariant: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::validate(dim, sample_annulus)?;
        Ok(Self {
            dim,
            membership: Some(membership),
            inequalities: Vec::new(),
            sample_annulus,
            flags,
            phase_invariant,
            label: label.into(),
        })
    }

    fn validate(dim: usize, annulus: (R, R)) -> Result<()> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if !(annulus.0 > R::zero() && annulus.0 <= annulus.1) {
            return Err(Error::InvalidConfig(
                "sample annulus must satisfy 0 < r_min <= r_max".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample_annulus(&self) -> (R, R) {
        self.sample_annulus
    }

    pub fn flags(&self) -> RegionFlags {
        self.flags
    }

    /// The same region under different structural claims. Flags are the
    /// scenario author's assertions, so overriding them is legitimate.
    pub fn with_flags(mut self, flags: RegionFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when membership is invariant under a common phase rotation of all
    /// coordinates. Lets the scaling search drop its angular dimension.
    pub fn is_phase_invariant(&self) -> bool {
        self.phase_invariant
    }

    pub fn has_inequalities(&self) -> bool {
        !self.inequalities.is_empty()
    }

    /// Membership test. The origin is never a member.
    pub fn contains(&self, z: &Point<R>) -> Result<bool> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        Ok(self.contains_slice(z.coords()))
    }

    /// Membership on a raw coordinate slice (dimension assumed checked).
    pub(crate) fn contains_slice(&self, coords: &[Complex<R>]) -> bool {
        if coords.iter().all(|c| c.re.is_zero() && c.im.is_zero()) {
            return false;
        }
        if !self.inequalities.is_empty() {
            return self.violation_slice(coords) < -R::lit(BOUNDARY_EPS);
        }
        match &self.membership {
            Some(m) => m(coords),
            None => false,
        }
    }

    /// `max_i g_i(z)` when inequalities exist; meaningless otherwise.
    pub(crate) fn violation_slice(&self, coords: &[Complex<R>]) -> R {
        let mut worst = R::neg_infinity();
        for g in &self.inequalities {
            let v = g(coords);
            // NaN from an oracle counts as outside.
            if v.is_nan() {
                return R::infinity();
            }
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    /// Log-radial search window for scalings `lambda` with `lambda * z` probed
    /// against the sample annulus, padded by two e-folds on each side.
    pub(crate) fn lambda_window(&self, z_norm: R) -> (R, R) {
        let pad = R::lit(2.0);
        let lo = (self.sample_annulus.0 / z_norm).ln() - pad;
        let hi = (self.sample_annulus.1 / z_norm).ln() + pad;
        (lo, hi)
    }
}

/// Search budget for scaling enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ScalingSearchConfig {
    pub radial: usize,
    pub angular: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
    /// Cap on the number of scalings kept in a sample.
    pub max_kept: usize,
}

impl Default for ScalingSearchConfig {
    fn default() -> Self {
        Self {
            radial: 64,
            angular: 64,
            refine_rounds: 3,
            shrink: 8.0,
            max_kept: 128,
        }
    }
}

/// Scalings `lambda` with `lambda * z` inside E, found by sampling. An empty
/// list with `exhausted_budget` means "none found", not "proved empty".
#[derive(Debug, Clone)]
pub struct ScalingSample<R: Real> {
    pub scalings: Vec<Complex<R>>,
    pub exhausted_budget: bool,
}

/// Samples the admissible scaling set `{lambda in C^* : lambda z in E}` on a
/// log-polar grid, refined near found members.
pub fn admissible_scalings<R: Real>(
    region: &RegionSpec<R>,
    z: &Point<R>,
    cfg: &ScalingSearchConfig,
) -> Result<ScalingSample<R>> {
    if z.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: z.dim(),
        });
    }
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let angular = effective_angular(region.is_phase_invariant(), cfg.angular);
    let (lo, hi) = region.lambda_window(z.norm());
    let two_pi = R::lit(std::f64::consts::TAU);

    struct ScanState<R: Real> {
        found: Vec<Complex<R>>,
        best: Option<(R, R)>, // (log|lambda|, arg) of first member
        scratch: Vec<Complex<R>>,
    }
    let mut st = ScanState {
        found: Vec::new(),
        best: None,
        scratch: vec![Complex::new(R::zero(), R::zero()); z.dim()],
    };

    #[allow(clippy::too_many_arguments)]
    fn scan<R: Real>(
        region: &RegionSpec<R>,
        z: &Point<R>,
        st: &mut ScanState<R>,
        max_kept: usize,
        (lr_lo, lr_hi): (R, R),
        (th_lo, th_hi): (R, R),
        nr: usize,
        na: usize,
    ) {
        for i in 0..nr {
            let t = if nr == 1 {
                R::lit(0.5)
            } else {
                R::lit(i as f64 / (nr - 1) as f64)
            };
            let lr = lr_lo + (lr_hi - lr_lo) * t;
            for j in 0..na {
                let th = th_lo + (th_hi - th_lo) * R::lit(j as f64 / na as f64);
                let lambda = Complex::from_polar(lr.exp(), th);
                scale_into(z.coords(), lambda, &mut st.scratch);
                if region.contains_slice(&st.scratch) {
                    if st.found.len() < max_kept {
                        st.found.push(lambda);
                    }
                    if st.best.is_none() {
                        st.best = Some((lr, th));
                    }
                }
            }
        }
    }

    scan(
        region,
        z,
        &mut st,
        cfg.max_kept,
        (lo, hi),
        (R::zero(), two_pi),
        cfg.radial,
        angular,
    );

    // Densify around the first member found; adds nearby members to the
    // sample and sharpens the picture of the admissible set.
    if let Some((blr, bth)) = st.best {
        let mut half_r = (hi - lo) / R::lit(2.0 * cfg.shrink);
        let mut half_t = two_pi / R::lit(2.0 * cfg.shrink);
        for _ in 0..cfg.refine_rounds {
            if st.found.len() >= cfg.max_kept {
                break;
            }
            scan(
                region,
                z,
                &mut st,
                cfg.max_kept,
                (blr - half_r, blr + half_r),
                (bth - half_t, bth + half_t),
                (cfg.radial / 4).max(4),
                (angular / 4).max(1),
            );
            half_r /= R::lit(cfg.shrink);
            half_t /= R::lit(cfg.shrink);
        }
    }

    Ok(ScalingSample {
        exhausted_budget: st.found.is_empty(),
        scalings: st.found,
    })
}

pub(crate) fn effective_angular(phase_invariant: bool, angular: usize) -> usize {
    if phase_invariant {
        1
    } else {
        angular.max(1)
    }
}

/// Minkowski gauge `inf { t > 0 : z/t in E }` for a claimed-balanced region,
/// by bracketing and bisection along the ray, to relative tolerance 1e-9.
pub fn minkowski_gauge<R: Real>(region: &RegionSpec<R>, z: &Point<R>) -> Result<R> {
    if !region.flags().balanced {
        return Err(Error::NotBalanced);
    }
    if z.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: z.dim(),
        });
    }
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let zn = z.norm();
    let (r_min, r_max) = region.sample_annulus();
    let inside = |t: R| {
        let inv = Complex::new(t.recip(), R::zero());
        region.contains_slice(z.scaled(inv).coords())
    };

    // z/t has norm zn/t; membership certainly fails for t below zn/r_max.
    let mut lo = zn / r_max * R::lit(0.5);
    let mut hi = zn / r_min * R::lit(2.0);
    let mut tries = 0;
    while !inside(hi) {
        hi *= R::lit(4.0);
        tries += 1;
        if tries > 8 {
            return Err(Error::BracketingFailed);
        }
    }
    while inside(lo) {
        lo *= R::lit(0.25);
        tries += 1;
        if tries > 16 {
            return Err(Error::BracketingFailed);
        }
    }
    let tol = R::lit(1e-9);
    for _ in 0..200 {
        if (hi - lo) <= tol * hi {
            break;
        }
        let mid = (hi + lo) * R::lit(0.5);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi + lo) * R::lit(0.5))
}

/// Continuous violation measure of `z` against the cone C^*E. Zero when a
/// sampled scaling places `z` strictly inside, positive otherwise; total on
/// all inputs.
pub fn boundary_penalty<R: Real>(region: &RegionSpec<R>, z: &Point<R>) -> R {
    if z.dim() != region.dim() || z.is_zero() {
        return R::one();
    }
    penalty_slice(region, z.coords(), &PenaltySearch::default())
}

/// Light search budget for penalty evaluation; shared with the inner
/// optimization loop.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PenaltySearch {
    pub radial: usize,
    pub angular: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
}

impl Default for PenaltySearch {
    fn default() -> Self {
        Self {
            radial: 32,
            angular: 16,
            refine_rounds: 2,
            shrink: 6.0,
        }
    }
}

pub(crate) fn penalty_slice<R: Real>(
    region: &RegionSpec<R>,
    coords: &[Complex<R>],
    cfg: &PenaltySearch,
) -> R {
    let zn = norm_of(coords);
    if zn.is_zero() {
        return R::one();
    }
    let angular = effective_angular(region.is_phase_invariant(), cfg.angular);
    let (mut lo, mut hi) = region.lambda_window(zn);
    let mut th_lo = R::zero();
    let mut th_hi = R::lit(std::f64::consts::TAU);
    let mut scratch = vec![Complex::new(R::zero(), R::zero()); coords.len()];
    let has_ineq = region.has_inequalities();

    let mut best_viol = R::infinity();
    let mut any_member = false;
    let mut best_at = (lo, R::zero());

    for round in 0..=cfg.refine_rounds {
        let nr = if round == 0 {
            cfg.radial
        } else {
            (cfg.radial / 2).max(4)
        };
        let na = if round == 0 { angular } else { (angular / 2).max(1) };
        for i in 0..nr {
            let t = if nr == 1 {
                R::lit(0.5)
            } else {
                R::lit(i as f64 / (nr - 1) as f64)
            };
            let lr = lo + (hi - lo) * t;
            for j in 0..na {
                let th = th_lo + (th_hi - th_lo) * R::lit(j as f64 / na as f64);
                let lambda = Complex::from_polar(lr.exp(), th);
                scale_into(coords, lambda, &mut scratch);
                if has_ineq {
                    let v = region.violation_slice(&scratch);
                    if v < best_viol {
                        best_viol = v;
                        best_at = (lr, th);
                    }
                } else if region.contains_slice(&scratch) {
                    any_member = true;
                }
            }
        }
        if !has_ineq {
            break;
        }
        if best_viol < R::zero() {
            // Already strictly inside somewhere; penalty is zero.
            break;
        }
        let half_r = (hi - lo) / R::lit(2.0 * cfg.shrink);
        let half_t = (th_hi - th_lo) / R::lit(2.0 * cfg.shrink);
        lo = best_at.0 - half_r;
        hi = best_at.0 + half_r;
        th_lo = best_at.1 - half_t;
        th_hi = best_at.1 + half_t;
    }

    if has_ineq {
        if best_viol.is_infinite() {
            R::one()
        } else {
            best_viol.max(R::zero())
        }
    } else if any_member {
        R::zero()
    } else {
        R::one()
    }
}

/// Verdict of the cone connectivity probe. Evidence only, never a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeVerdict {
    ConnectedEvidence,
    DisconnectedEvidence,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ConeProbe {
    pub verdict: ConeVerdict,
    pub samples: usize,
    pub components: usize,
}

/// Samples C^*E representatives scaled to the unit sphere, builds an
/// epsilon-neighborhood graph under the phase-invariant sphere metric, and
/// reports the component count as evidence.
pub fn cone_connectivity_probe<R: Real>(region: &RegionSpec<R>, budget: usize) -> ConeProbe {
    let n = region.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let (r_min, r_max) = region.sample_annulus();
    let (lr_min, lr_max) = (r_min.as_f64().ln(), r_max.as_f64().ln());
    let target = budget.clamp(16, 256);
    let mut reps: Vec<Vec<Complex<R>>> = Vec::new();

    for _ in 0..budget.max(target * 8) {
        if reps.len() >= target {
            break;
        }
        // Random direction from 2n Gaussians, radius log-uniform in the annulus.
        let mut coords: Vec<Complex<R>> = (0..n)
            .map(|_| Complex::new(R::lit(gaussian(&mut rng)), R::lit(gaussian(&mut rng))))
            .collect();
        let norm = norm_of(&coords);
        if norm.is_zero() {
            continue;
        }
        let r: f64 = rng.random_range(lr_min..=lr_max);
        let s = R::lit(r.exp()) / norm;
        for c in coords.iter_mut() {
            *c *= s;
        }
        if region.contains_slice(&coords) {
            let m = norm_of(&coords);
            reps.push(coords.iter().map(|&c| c / m).collect());
        }
    }

    if reps.len() < 8 {
        return ConeProbe {
            verdict: ConeVerdict::Inconclusive,
            samples: reps.len(),
            components: 0,
        };
    }

    // Union-find over the epsilon graph; distance ignores a common phase.
    let eps = 0.35f64;
    let mut parent: Vec<usize> = (0..reps.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            let inner: Complex<R> = reps[i]
                .iter()
                .zip(reps[j].iter())
                .map(|(a, b)| a * b.conj())
                .fold(Complex::new(R::zero(), R::zero()), |s, x| s + x);
            let d2 = (R::lit(2.0) - R::lit(2.0) * inner.norm()).max(R::zero());
            if d2.sqrt().as_f64() < eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..reps.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();
    ConeProbe {
        verdict: if components == 1 {
            ConeVerdict::ConnectedEvidence
        } else {
            ConeVerdict::DisconnectedEvidence
        },
        samples: reps.len(),
        components,
    }
}

/// Standard normal via Box-Muller on the rng's uniform doubles.
pub(crate) fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

// ---------------------------------------------------------------------------
// Built-in region kinds.
// ---------------------------------------------------------------------------

/// Punctured ball `{ 0 < |z| < radius }` in C^n.
pub fn punctured_ball<R: Real>(dim: usize, radius: R) -> Result<RegionSpec<R>> {
    let g: Arc<InequalityFn<R>> = Arc::new(move |z| norm_of(z) - radius);
    RegionSpec::from_inequalities(
        dim,
        vec![g],
        (radius * R::lit(0.01), radius * R::lit(0.99)),
        RegionFlags {
            balanced: true,
            cone_connected: true,
            full_cone: true,
        },
        true,
        format!("punctured-ball(r={radius})"),
    )
}

/// Annulus `{ r_in < |z| < r_out }` in C^1.
pub fn annulus<R: Real>(r_in: R, r_out: R) -> Result<RegionSpec<R>> {
    if !(R::zero() < r_in && r_in < r_out) {
        return Err(Error::InvalidConfig(
            "annulus requires 0 < r_in < r_out".into(),
        ));
    }
    let g1: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| z[0].norm() - r_out);
    let g2: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| r_in - z[0].norm());
    RegionSpec::from_inequalities(
        1,
        vec![g1, g2],
        (r_in, r_out),
        RegionFlags {
            balanced: false,
            cone_connected: true,
            full_cone: true,
        },
        true,
        format!("annulus({r_in},{r_out})"),
    )
}

/// Punctured polydisc `{ |z_i| < radii_i } \ {0}` in C^n.
pub fn punctured_polydisc<R: Real>(radii: &[R]) -> Result<RegionSpec<R>> {
    if radii.is_empty() || radii.iter().any(|r| *r <= R::zero()) {
        return Err(Error::InvalidConfig(
            "polydisc radii must be positive and nonempty".into(),
        ));
    }
    let radii = radii.to_vec();
    let dim = radii.len();
    let r_min = radii.iter().cloned().fold(R::infinity(), R::min);
    let rs = radii.clone();
    let g: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| {
        z.iter()
            .zip(rs.iter())
            .map(|(c, &r)| c.norm() - r)
            .fold(R::neg_infinity(), R::max)
    });
    RegionSpec::from_inequalities(
        dim,
        vec![g],
        (r_min * R::lit(0.01), r_min * R::lit(0.99)),
        RegionFlags {
            balanced: true,
            cone_connected: true,
            full_cone: true,
        },
        true,
        "punctured-polydisc".to_string(),
    )
}

/// Punctured union of polydiscs in C^n; each entry lists the n radii of one
/// polydisc. The defining inequality is the min over members of the max over
/// coordinates.
pub fn polydisc_union<R: Real>(members: &[Vec<R>]) -> Result<RegionSpec<R>> {
    if members.is_empty() {
        return Err(Error::InvalidConfig("union needs at least one member".into()));
    }
    let dim = members[0].len();
    if dim == 0 || members.iter().any(|m| m.len() != dim) {
        return Err(Error::InvalidConfig(
            "union members must share a positive dimension".into(),
        ));
    }
    if members.iter().flatten().any(|r| *r <= R::zero()) {
        return Err(Error::InvalidConfig("union radii must be positive".into()));
    }
    let max_r = members
        .iter()
        .map(|m| {
            m.iter()
                .map(|r| *r * *r)
                .fold(R::zero(), |a, b| a + b)
                .sqrt()
        })
        .fold(R::zero(), R::max);
    let ms = members.to_vec();
    let g: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| {
        ms.iter()
            .map(|m| {
                z.iter()
                    .zip(m.iter())
                    .map(|(c, &r)| c.norm() - r)
                    .fold(R::neg_infinity(), R::max)
            })
            .fold(R::infinity(), R::min)
    });
    RegionSpec::from_inequalities(
        dim,
        vec![g],
        (max_r * R::lit(0.02), max_r),
        RegionFlags {
            balanced: true,
            cone_connected: true,
            full_cone: true,
        },
        true,
        "polydisc-union".to_string(),
    )
}

/// Sector `{ (z_1, z_2) : |z_2| < |z_1|, r_in < |z_1| < r_out }` in C^2.
/// Its complex cone is not all of C^2.
pub fn sector<R: Real>(r_in: R, r_out: R) -> Result<RegionSpec<R>> {
    if !(R::zero() < r_in && r_in < r_out) {
        return Err(Error::InvalidConfig(
            "sector requires 0 < r_in < r_out".into(),
        ));
    }
    let g1: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| z[1].norm() - z[0].norm());
    let g2: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| z[0].norm() - r_out);
    let g3: Arc<InequalityFn<R>> = Arc::new(move |z: &[Complex<R>]| r_in - z[0].norm());
    RegionSpec::from_inequalities(
        2,
        vec![g1, g2, g3],
        (r_in, r_out * R::lit(1.4)),
        RegionFlags {
            balanced: false,
            cone_connected: true,
            full_cone: false,
        },
        true,
        format!("sector({r_in},{r_out})"),
    )
}
