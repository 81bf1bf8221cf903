//! Weights and their homogenization.
//!
//! The homogenized weight at `z` is the infimum of `phi(lambda z) - log|lambda|`
//! over scalings with `lambda z` inside the region. It is computed by sampling
//! and refining a log-polar grid of scalings, so the numerical value is an
//! upper bound of the true infimum; all downstream envelope values inherit
//! that one-sided semantics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::point::{norm_of, quantized_key, quantized_point, scale_into, Point};
use crate::region::{effective_angular, RegionSpec};
use crate::scalar::Real;

pub type WeightFn<R> = dyn Fn(&[Complex<R>]) -> R + Send + Sync;

/// Default clamp floor for weight values of minus infinity or deep underflow.
pub const DEFAULT_FLOOR: f64 = -1e6;

/// A weight oracle on the region. Only queried at member points.
#[derive(Clone)]
pub struct WeightSpec<R: Real> {
    phi: Arc<WeightFn<R>>,
    floor: R,
    phase_invariant: bool,
    label: String,
}

impl<R: Real> std::fmt::Debug for WeightSpec<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightSpec")
            .field("label", &self.label)
            .field("floor", &self.floor)
            .field("phase_invariant", &self.phase_invariant)
            .finish()
    }
}

impl<R: Real> WeightSpec<R> {
    pub fn from_fn(
        phi: Arc<WeightFn<R>>,
        floor: R,
        phase_invariant: bool,
        label: impl Into<String>,
    ) -> Self {
        Self {
            phi,
            floor,
            phase_invariant,
            label: label.into(),
        }
    }

    /// The zero weight.
    pub fn zero() -> Self {
        Self::from_fn(Arc::new(|_| R::zero()), R::lit(DEFAULT_FLOOR), true, "zero")
    }

    /// A constant weight.
    pub fn constant(c: R) -> Self {
        Self::from_fn(
            Arc::new(move |_| c),
            R::lit(DEFAULT_FLOOR),
            true,
            format!("constant({c})"),
        )
    }

    /// The weight `log |z|` (Euclidean norm).
    pub fn log_norm() -> Self {
        Self::from_fn(
            Arc::new(|z| norm_of(z).ln()),
            R::lit(DEFAULT_FLOOR),
            true,
            "log-norm",
        )
    }

    pub fn floor(&self) -> R {
        self.floor
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_phase_invariant(&self) -> bool {
        self.phase_invariant
    }

    /// Raw weight value clamped at the floor; NaN counts as the floor.
    pub fn eval_clamped(&self, coords: &[Complex<R>]) -> (R, bool) {
        let v = (self.phi)(coords);
        if v.is_nan() || v < self.floor {
            (self.floor, true)
        } else {
            (v, false)
        }
    }
}

/// Budget and geometry of the scaling search behind the homogenized weight.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSearchConfig {
    pub radial: usize,
    pub angular: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
    /// Golden-section polish steps along the radial (and, when sampled,
    /// angular) direction after the grid rounds.
    pub polish_iters: usize,
}

impl Default for LambdaSearchConfig {
    fn default() -> Self {
        Self {
            radial: 64,
            angular: 64,
            refine_rounds: 3,
            shrink: 8.0,
            polish_iters: 48,
        }
    }
}

impl LambdaSearchConfig {
    /// Cheap budget for inner optimization loops. Values it produces are still
    /// upper bounds; reported values are recomputed at the default budget.
    pub fn fast() -> Self {
        Self {
            radial: 24,
            angular: 8,
            refine_rounds: 2,
            shrink: 6.0,
            polish_iters: 20,
        }
    }

    /// A doubled budget whose base grid contains the original one, so the
    /// sampled infimum can only improve.
    pub fn doubled(&self) -> Self {
        Self {
            radial: 2 * self.radial - 1,
            angular: 2 * self.angular,
            refine_rounds: self.refine_rounds,
            shrink: self.shrink,
            polish_iters: self.polish_iters,
        }
    }
}

/// Log of the homogenized weight at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRho<R: Real> {
    pub value: R,
    /// True when the value sits at the clamp floor; the corresponding rho of
    /// zero is reported as clamped rather than exact.
    pub clamped: bool,
}

/// Golden-section minimization over `[center - h, center + h]`; infeasible
/// evaluations return infinity. Returns the best point seen, including the
/// center, so polishing never loses the incumbent.
fn golden_polish<R: Real>(center: R, h: R, iters: usize, mut f: impl FnMut(R) -> R) -> (R, R) {
    let inv_phi = R::lit(0.618_033_988_749_894_9);
    let mut a = center - h;
    let mut b = center + h;
    let fc = f(center);
    let mut best = (center, fc);
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = f(x2);
        }
    }
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    best
}

type CacheShard<R> = Mutex<HashMap<Vec<(u64, u64)>, (R, bool, f64)>>;

const CACHE_SHARDS: usize = 64;
const CACHE_CAP_PER_SHARD: usize = 65_536;

/// Cached evaluator of the homogenized weight over a fixed region, weight and
/// search budget. Pure modulo the cache; cache writes are idempotent because
/// values are a function of the quantized key alone, so it is safe to share
/// across evaluation workers.
pub struct HomogenizedWeight<R: Real> {
    region: Arc<RegionSpec<R>>,
    weight: WeightSpec<R>,
    search: LambdaSearchConfig,
    cache: Vec<CacheShard<R>>,
}

impl<R: Real> std::fmt::Debug for HomogenizedWeight<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogenizedWeight")
            .field("region", &self.region.label())
            .field("weight", &self.weight.label())
            .field("search", &self.search)
            .finish()
    }
}

impl<R: Real> HomogenizedWeight<R> {
    pub fn new(region: Arc<RegionSpec<R>>, weight: WeightSpec<R>, search: LambdaSearchConfig) -> Self {
        let cache = (0..CACHE_SHARDS).map(|_| Mutex::new(HashMap::new())).collect();
        Self {
            region,
            weight,
            search,
            cache,
        }
    }

    pub fn region(&self) -> &Arc<RegionSpec<R>> {
        &self.region
    }

    pub fn weight(&self) -> &WeightSpec<R> {
        &self.weight
    }

    pub fn search(&self) -> LambdaSearchConfig {
        self.search
    }

    /// Same weight under a different search budget, with a fresh cache.
    pub fn with_search(&self, search: LambdaSearchConfig) -> Self {
        Self::new(self.region.clone(), self.weight.clone(), search)
    }

    /// Log of the homogenized weight, `log rho`.
    pub fn log_rho(&self, z: &Point<R>) -> Result<LogRho<R>> {
        if z.dim() != self.region.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.region.dim(),
                got: z.dim(),
            });
        }
        self.log_rho_slice(z.coords())
    }

    /// The homogenized weight `rho` itself; zero encodes a clamped value.
    pub fn rho(&self, z: &Point<R>) -> Result<R> {
        self.log_rho(z).map(|lr| lr.value.exp())
    }

    /// Diagnostic: samples the log homogenized weight on the unit sphere and
    /// reports the largest value seen plus the count of directions outside
    /// the punctured cone. A finite maximum is sampling evidence that the
    /// homogenization is bounded above there; no claim beyond the samples.
    pub fn sphere_bound_probe(&self, samples: usize) -> (R, usize) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5b0b);
        let dim = self.region.dim();
        let mut max_seen = R::neg_infinity();
        let mut misses = 0usize;
        for _ in 0..samples {
            let coords: Vec<Complex<R>> = (0..dim)
                .map(|_| {
                    Complex::new(
                        R::lit(crate::region::gaussian(&mut rng)),
                        R::lit(crate::region::gaussian(&mut rng)),
                    )
                })
                .collect();
            let n = norm_of(&coords);
            if n.is_zero() {
                misses += 1;
                continue;
            }
            let unit: Vec<Complex<R>> = coords.iter().map(|&c| c / n).collect();
            match self.log_rho_slice(&unit) {
                Ok(lr) => {
                    if lr.value > max_seen {
                        max_seen = lr.value;
                    }
                }
                Err(_) => misses += 1,
            }
        }
        (max_seen, misses)
    }

    /// `| log rho(mu z) - log rho(z) - log|mu| |`.
    pub fn homogeneity_residual(&self, z: &Point<R>, mu: Complex<R>) -> Result<R> {
        if mu.norm().is_zero() {
            return Err(Error::ZeroPoint);
        }
        let a = self.log_rho(&z.scaled(mu))?;
        let b = self.log_rho(z)?;
        Ok((a.value - b.value - mu.norm().ln()).abs())
    }

    pub(crate) fn log_rho_slice(&self, coords: &[Complex<R>]) -> Result<LogRho<R>> {
        if coords.iter().all(|c| c.re.is_zero() && c.im.is_zero()) {
            return Err(Error::ZeroPoint);
        }
        let key = quantized_key(coords);
        let shard = {
            let mut h: u64 = 0xcbf2_9ce4_8422_2325;
            for (a, b) in &key {
                h = (h ^ a).wrapping_mul(0x1000_0000_01b3);
                h = (h ^ b).wrapping_mul(0x1000_0000_01b3);
            }
            (h % CACHE_SHARDS as u64) as usize
        };
        if let Some(&(value, clamped, _)) = self.cache[shard].lock().unwrap().get(&key) {
            return Ok(LogRho { value, clamped });
        }
        let rep = quantized_point(coords);
        let out = self.search_log_rho(&rep);
        if let Ok(lr) = &out {
            let mut guard = self.cache[shard].lock().unwrap();
            if guard.len() < CACHE_CAP_PER_SHARD {
                guard.insert(key, (lr.value, lr.clamped, 0.0));
            }
        }
        out
    }

    /// Like `log_rho_slice` but reports the best sampled cone violation on
    /// failure instead of just an error, for penalty handling.
    pub(crate) fn log_rho_or_violation(&self, coords: &[Complex<R>]) -> std::result::Result<LogRho<R>, R> {
        match self.log_rho_slice(coords) {
            Ok(lr) => Ok(lr),
            Err(Error::NotInCone { violation }) => Err(R::lit(violation)),
            Err(_) => Err(R::one()),
        }
    }

    fn search_log_rho(&self, coords: &[Complex<R>]) -> Result<LogRho<R>> {
        let zn = norm_of(coords);
        let angular = effective_angular(
            self.region.is_phase_invariant() && self.weight.is_phase_invariant(),
            self.search.angular,
        );
        let (lo0, hi0) = self.region.lambda_window(zn);
        let two_pi = R::lit(std::f64::consts::TAU);
        let mut scratch = vec![Complex::new(R::zero(), R::zero()); coords.len()];
        let has_ineq = self.region.has_inequalities();

        // (objective, log|lambda|, arg, phi clamped at that sample)
        let mut best: Option<(R, R, R, bool)> = None;
        let mut best_viol = R::infinity();
        let mut best_viol_at = ((lo0 + hi0) * R::lit(0.5), R::zero());

        let mut lo = lo0;
        let mut hi = hi0;
        let mut th_lo = R::zero();
        let mut th_hi = two_pi;

        for round in 0..=self.search.refine_rounds {
            let nr = self.search.radial;
            let na = angular;
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
                    if self.region.contains_slice(&scratch) {
                        let (phi, cl) = self.weight.eval_clamped(&scratch);
                        let obj = phi - lr;
                        if best.is_none_or(|(b, _, _, _)| obj < b) {
                            best = Some((obj, lr, th, cl));
                        }
                    } else if best.is_none() && has_ineq {
                        let v = self.region.violation_slice(&scratch);
                        if v < best_viol {
                            best_viol = v;
                            best_viol_at = (lr, th);
                        }
                    }
                }
            }
            if round == self.search.refine_rounds {
                break;
            }
            // Zoom in on the incumbent; when nothing is feasible yet, zoom on
            // the least-violating sample so a thin admissible set can still be
            // discovered.
            let (clr, cth) = match best {
                Some((_, lr, th, _)) => (lr, th),
                None => best_viol_at,
            };
            let shrink = R::lit(self.search.shrink);
            let half_r = (hi - lo) / (R::lit(2.0) * shrink);
            let half_t = (th_hi - th_lo) / (R::lit(2.0) * shrink);
            lo = clr - half_r;
            hi = clr + half_r;
            th_lo = cth - half_t;
            th_hi = cth + half_t;
        }

        match best {
            Some((obj, blr, bth, phi_clamped)) => {
                // Golden-section polish around the incumbent removes the
                // residual grid jitter; the result stays an upper bound.
                let final_hr = (hi - lo) / R::lit((self.search.radial.max(2) - 1) as f64);
                let mut obj = obj;
                let mut blr = blr;
                if self.search.polish_iters > 0 {
                    let eval_r = |lr: R, scratch: &mut Vec<Complex<R>>| -> R {
                        let lambda = Complex::from_polar(lr.exp(), bth);
                        scale_into(coords, lambda, scratch);
                        if self.region.contains_slice(scratch) {
                            self.weight.eval_clamped(scratch).0 - lr
                        } else {
                            R::infinity()
                        }
                    };
                    let (plr, pobj) = golden_polish(
                        blr,
                        final_hr,
                        self.search.polish_iters,
                        |x| eval_r(x, &mut scratch),
                    );
                    if pobj < obj {
                        obj = pobj;
                        blr = plr;
                    }
                    if angular > 1 {
                        let final_ht = (th_hi - th_lo) / R::lit(angular as f64);
                        let eval_t = |th: R, scratch: &mut Vec<Complex<R>>| -> R {
                            let lambda = Complex::from_polar(blr.exp(), th);
                            scale_into(coords, lambda, scratch);
                            if self.region.contains_slice(scratch) {
                                self.weight.eval_clamped(scratch).0 - blr
                            } else {
                                R::infinity()
                            }
                        };
                        let (_, pobj) = golden_polish(
                            bth,
                            final_ht,
                            self.search.polish_iters,
                            |x| eval_t(x, &mut scratch),
                        );
                        if pobj < obj {
                            obj = pobj;
                        }
                    }
                }
                // Clamp at the floor on the |z| scale so the clamp itself is
                // 1-homogeneous.
                let floor = self.weight.floor() + zn.ln();
                if obj <= floor {
                    Ok(LogRho {
                        value: floor,
                        clamped: true,
                    })
                } else {
                    Ok(LogRho {
                        value: obj,
                        clamped: phi_clamped,
                    })
                }
            }
            None => Err(Error::NotInCone {
                violation: if best_viol.is_finite() {
                    best_viol.as_f64().max(0.0)
                } else {
                    1.0
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{annulus, polydisc_union, punctured_ball, punctured_polydisc};

    fn pt(parts: &[f64]) -> Point<f64> {
        let coords: Vec<Complex<f64>> = parts
            .chunks(2)
            .map(|c| Complex::new(c[0], *c.get(1).unwrap_or(&0.0)))
            .collect();
        Point::new(coords).unwrap()
    }

    fn hw_annulus(weight: WeightSpec<f64>) -> HomogenizedWeight<f64> {
        HomogenizedWeight::new(
            Arc::new(annulus(0.5, 2.0).unwrap()),
            weight,
            LambdaSearchConfig::default(),
        )
    }

    #[test]
    fn annulus_zero_weight() {
        let hw = hw_annulus(WeightSpec::zero());
        let r = hw.rho(&pt(&[1.0, 0.0])).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "rho = {r}");
        let lr = hw.log_rho(&pt(&[1.0, 0.0])).unwrap();
        assert!((lr.value - 0.5f64.ln()).abs() < 2e-3, "log rho = {}", lr.value);
        assert!(!lr.clamped);
    }

    #[test]
    fn punctured_ball_zero_weight() {
        let hw = HomogenizedWeight::new(
            Arc::new(punctured_ball(2, 1.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let z = pt(&[0.3, 0.0, 0.4, 0.0]);
        let r = hw.rho(&z).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "rho = {r}");
        let lr = hw.log_rho(&z).unwrap();
        assert!((lr.value - 0.5f64.ln()).abs() < 2e-3);
    }

    #[test]
    fn annulus_log_weight_gives_norm() {
        // With phi = log|w| the objective is constant: rho(z) = |z|.
        let hw = hw_annulus(WeightSpec::log_norm());
        for parts in [[1.0, 0.0], [0.3, 0.4], [-2.0, 1.0]] {
            let z = pt(&parts);
            let r = hw.rho(&z).unwrap();
            assert!(
                (r - z.norm()).abs() < 1e-6 * z.norm().max(1.0),
                "rho {r} vs |z| {}",
                z.norm()
            );
        }
    }

    #[test]
    fn annulus_constant_weight_shifts_log_rho() {
        let c = 0.7;
        let hw0 = hw_annulus(WeightSpec::zero());
        let hwc = hw_annulus(WeightSpec::constant(c));
        for parts in [[1.0, 0.0], [3.0, -1.0]] {
            let z = pt(&parts);
            let a = hw0.log_rho(&z).unwrap().value;
            let b = hwc.log_rho(&z).unwrap().value;
            assert!((b - a - c).abs() < 1e-9, "constant must factor out");
        }
    }

    #[test]
    fn rho_matches_gauge_on_balanced_regions() {
        let regions: Vec<Arc<RegionSpec<f64>>> = vec![
            Arc::new(punctured_ball(2, 1.0).unwrap()),
            Arc::new(punctured_polydisc(&[1.0, 1.0]).unwrap()),
            Arc::new(polydisc_union(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap()),
        ];
        for region in regions {
            let hw = HomogenizedWeight::new(region.clone(), WeightSpec::zero(), LambdaSearchConfig::default());
            for parts in [[0.3, 0.0, 0.4, 0.0], [0.9, 0.0, 0.9, 0.0], [1.5, -0.2, 0.1, 0.7]] {
                let z = pt(&parts);
                let rho = hw.rho(&z).unwrap();
                let gauge = crate::region::minkowski_gauge(&region, &z).unwrap();
                let rel = (rho - gauge).abs() / gauge;
                assert!(rel < 1e-3, "{}: rho {rho} vs gauge {gauge}", region.label());
            }
        }
    }

    #[test]
    fn not_in_cone_reported() {
        let hw = HomogenizedWeight::new(
            Arc::new(crate::region::sector(1.0, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let z = pt(&[0.5, 0.0, 1.0, 0.0]);
        match hw.log_rho(&z) {
            Err(Error::NotInCone { violation }) => assert!(violation > 0.0),
            other => panic!("expected NotInCone, got {other:?}"),
        }
        // Inside the cone the sector has rho = |z_1| / r_out.
        let z = pt(&[1.0, 0.0, 0.2, 0.0]);
        let r = hw.rho(&z).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "sector rho = {r}");
    }

    #[test]
    fn homogeneity_residual_small() {
        let hw = hw_annulus(WeightSpec::zero());
        let z = pt(&[1.0, 0.0]);
        assert_eq!(
            hw.homogeneity_residual(&z, Complex::new(1.0, 0.0)).unwrap(),
            0.0
        );
        let r = hw.homogeneity_residual(&z, Complex::new(2.0, 0.0)).unwrap();
        assert!(r < 1e-8, "radial scaling residual {r}");

        let union = HomogenizedWeight::new(
            Arc::new(polydisc_union(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let z = pt(&[0.6, 0.2, -0.3, 0.8]);
        for mu in [Complex::new(1.7, 0.3), Complex::new(0.2, -0.6)] {
            let r = union.homogeneity_residual(&z, mu).unwrap();
            assert!(r < 1e-3, "residual {r} for mu {mu}");
        }
    }

    #[test]
    fn weight_monotonicity() {
        // phi1 <= phi2 pointwise implies rho1 <= rho2 on the same grid.
        let hw1 = hw_annulus(WeightSpec::constant(-0.5));
        let hw2 = hw_annulus(WeightSpec::constant(0.25));
        for parts in [[1.0, 0.0], [0.4, 1.2], [-2.5, 0.1]] {
            let z = pt(&parts);
            let a = hw1.rho(&z).unwrap();
            let b = hw2.rho(&z).unwrap();
            assert!(a <= b + 1e-15, "monotonicity violated: {a} > {b}");
        }
    }

    #[test]
    fn doubling_budget_never_increases_rho() {
        // With no refinement rounds the doubled base grid contains the
        // original, so the sampled infimum is exactly monotone.
        let base = LambdaSearchConfig {
            radial: 33,
            angular: 8,
            refine_rounds: 0,
            shrink: 8.0,
            polish_iters: 0,
        };
        let region: Arc<RegionSpec<f64>> =
            Arc::new(polydisc_union(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap());
        let hw = HomogenizedWeight::new(region.clone(), WeightSpec::log_norm(), base);
        let hw2 = hw.with_search(base.doubled());
        for parts in [[0.9, 0.0, 0.9, 0.0], [0.2, 0.5, 1.4, -0.3]] {
            let z = pt(&parts);
            let a = hw.rho(&z).unwrap();
            let b = hw2.rho(&z).unwrap();
            assert!(b <= a, "doubled budget increased rho: {b} > {a}");
        }
        // Default configs with refinement: monotone up to refinement jitter.
        let hw = hw_annulus(WeightSpec::zero());
        let hw2 = hw.with_search(hw.search().doubled());
        let z = pt(&[1.0, 0.0]);
        let a = hw.rho(&z).unwrap();
        let b = hw2.rho(&z).unwrap();
        assert!(b <= a + 1e-9);
    }

    #[test]
    fn cache_reproduces_values() {
        let hw = hw_annulus(WeightSpec::zero());
        let z = pt(&[1.2345678901234, 0.4]);
        let a = hw.log_rho(&z).unwrap();
        let b = hw.log_rho(&z).unwrap();
        assert_eq!(a, b);
        // A point that quantizes to the same key reuses the cached value.
        let z2 = pt(&[1.23456789012341, 0.4]);
        let c = hw.log_rho(&z2).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn sphere_probe_bounded_on_annulus_unbounded_off_cone() {
        let hw = hw_annulus(WeightSpec::zero());
        let (max_seen, misses) = hw.sphere_bound_probe(64);
        // On C^1 every unit direction is in the cone; log rho = -log 2.
        assert_eq!(misses, 0);
        assert!((max_seen + 2.0f64.ln()).abs() < 1e-6, "max {max_seen}");

        let sector = HomogenizedWeight::new(
            Arc::new(crate::region::sector(1.0, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let (_, misses) = sector.sphere_bound_probe(64);
        assert!(misses > 0, "off-cone directions must be reported");
    }

    #[test]
    fn floor_clamps_deep_minus_infinity() {
        let phi: Arc<WeightFn<f64>> = Arc::new(|_| f64::NEG_INFINITY);
        let w = WeightSpec::from_fn(phi, -1e6, true, "minus-infinity");
        let hw = hw_annulus(w);
        let lr = hw.log_rho(&pt(&[1.0, 0.0])).unwrap();
        assert!(lr.clamped);
        assert_eq!(hw.rho(&pt(&[1.0, 0.0])).unwrap(), 0.0);
    }
}
