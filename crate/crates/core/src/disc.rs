//! Polynomial analytic discs: affine n-tuples and projective (n+1)-tuples
//! with a unit scale component at the center, boundary traces, Jensen-defect
//! verification and infinity-crossing accounting.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::poly;
use crate::roots::{self, RootSet};
use crate::scalar::Real;

/// Default per-component degree cap. Coefficient-space dimension stays
/// tractable for derivative-free search.
pub const DEFAULT_MAX_DEGREE: usize = 16;

/// Tolerance under which roots of all components count as common.
pub const COMMON_ROOT_TOL: f64 = 1e-6;

/// An affine polynomial disc `f : closed unit disc -> C^n` with `f(0)` equal
/// to its center.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDisc<R: Real> {
    components: Vec<Vec<Complex<R>>>,
}

impl<R: Real> PolyDisc<R> {
    /// A disc from per-component coefficient lists (ascending powers). The
    /// constant coefficients are the center.
    pub fn new(components: Vec<Vec<Complex<R>>>) -> Result<Self> {
        if components.is_empty() || components.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidConfig(
                "disc components must be nonempty".into(),
            ));
        }
        Ok(Self { components })
    }

    /// The constant disc at `z`.
    pub fn constant(z: &Point<R>) -> Self {
        Self {
            components: z.coords().iter().map(|&c| vec![c]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<Complex<R>>] {
        &self.components
    }

    pub fn center(&self) -> Point<R> {
        Point::new(self.components.iter().map(|c| c[0]).collect()).expect("components nonempty")
    }

    pub fn max_degree(&self) -> usize {
        self.components.iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }

    /// The same disc viewed at a higher degree, padded with zero leading
    /// coefficients. Evaluation is bit-identical.
    pub fn padded_to(&self, degree: usize) -> Self {
        let zero = Complex::new(R::zero(), R::zero());
        Self {
            components: self
                .components
                .iter()
                .map(|c| {
                    let mut v = c.clone();
                    v.resize(degree + 1, zero);
                    v
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: Complex<R>) -> Vec<Complex<R>> {
        self.components.iter().map(|c| poly::eval(c, x)).collect()
    }
}

/// A projective polynomial disc `[f_0 : ... : f_n]` with `f_0(0) = 1` and
/// `(f_1(0), ..., f_n(0))` equal to its center.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjDisc<R: Real> {
    /// n+1 coefficient lists; index 0 is the scale component f_0.
    components: Vec<Vec<Complex<R>>>,
}

impl<R: Real> ProjDisc<R> {
    pub fn new(components: Vec<Vec<Complex<R>>>) -> Result<Self> {
        if components.len() < 2 || components.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidConfig(
                "projective disc needs a scale component and at least one coordinate".into(),
            ));
        }
        let one = Complex::new(R::one(), R::zero());
        if (components[0][0] - one).norm() > R::lit(1e-12) {
            return Err(Error::CenterMismatch);
        }
        Ok(Self { components })
    }

    /// The constant disc `[1 : z]`.
    pub fn constant(z: &Point<R>) -> Self {
        let mut components = Vec::with_capacity(z.dim() + 1);
        components.push(vec![Complex::new(R::one(), R::zero())]);
        components.extend(z.coords().iter().map(|&c| vec![c]));
        Self { components }
    }

    /// Coordinate dimension n (not counting the scale component).
    pub fn dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Vec<Complex<R>>] {
        &self.components
    }

    pub fn scale_component(&self) -> &[Complex<R>] {
        &self.components[0]
    }

    /// Chart center `(f_1(0), ..., f_n(0))`.
    pub fn center(&self) -> Point<R> {
        Point::new(self.components[1..].iter().map(|c| c[0]).collect())
            .expect("coordinate components nonempty")
    }

    pub fn max_degree(&self) -> usize {
        self.components.iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }

    pub fn padded_to(&self, degree: usize) -> Self {
        let zero = Complex::new(R::zero(), R::zero());
        Self {
            components: self
                .components
                .iter()
                .map(|c| {
                    let mut v = c.clone();
                    v.resize(degree + 1, zero);
                    v
                })
                .collect(),
        }
    }

    /// Lift values `(f_0, ..., f_n)(x)`.
    pub fn eval_lift(&self, x: Complex<R>) -> Vec<Complex<R>> {
        self.components.iter().map(|c| poly::eval(c, x)).collect()
    }
}

/// Exact polynomial evaluation at the N-th roots of unity. For projective
/// discs the lift values `(f_0, ..., f_n)` are returned.
pub fn boundary_trace<R: Real>(components: &[Vec<Complex<R>>], n: usize) -> Vec<Vec<Complex<R>>> {
    (0..n)
        .map(|k| {
            let th = R::lit(std::f64::consts::TAU * k as f64 / n as f64);
            let x = Complex::from_polar(R::one(), th);
            components.iter().map(|c| poly::eval(c, x)).collect()
        })
        .collect()
}

/// Jensen defect report: the residual of the Riesz identity
/// `sum m(a) log|a| + mean_T log|p| = 0` for `p(0) = 1`.
#[derive(Debug, Clone, Copy)]
pub struct JensenReport<R: Real> {
    pub defect: R,
    /// Set when a root lies within 1e-3 of the unit circle, which makes the
    /// boundary quadrature unreliable.
    pub near_circle: bool,
}

/// Computes the Jensen defect of a polynomial with `p(0) = 1` at an N-node
/// boundary quadrature. The defect contracts to zero as N grows.
pub fn jensen_defect<R: Real>(coeffs: &[Complex<R>], n: usize) -> Result<JensenReport<R>> {
    let one = Complex::new(R::one(), R::zero());
    if (coeffs[0] - one).norm() > R::lit(1e-12) {
        return Err(Error::CenterMismatch);
    }
    let inside = roots::roots_in_unit_disc(coeffs)?;
    let near_circle = roots::min_circle_distance(coeffs)?
        .is_some_and(|d| d < R::lit(1e-3));

    let mut sum_roots = R::zero();
    for &(a, m) in &inside.roots {
        sum_roots += R::lit(m as f64) * a.norm().ln();
    }
    let mut quad = R::zero();
    for k in 0..n {
        let th = R::lit(std::f64::consts::TAU * k as f64 / n as f64);
        let x = Complex::from_polar(R::one(), th);
        quad += poly::eval(coeffs, x).norm().ln();
    }
    quad /= R::lit(n as f64);
    Ok(JensenReport {
        defect: sum_roots + quad,
        near_circle,
    })
}

/// Crossings of the hyperplane at infinity: zeros of the scale component in
/// the unit disc.
pub fn infinity_crossings<R: Real>(disc: &ProjDisc<R>) -> Result<RootSet<R>> {
    roots::roots_in_unit_disc(disc.scale_component())
}

/// Removes common roots of all components in the closed unit disc, then
/// rescales so the scale component is 1 at the origin. The projective
/// boundary map is unchanged; the disc functional can only decrease.
pub fn normalize_reduced<R: Real>(disc: &ProjDisc<R>) -> Result<ProjDisc<R>> {
    let tol = R::lit(COMMON_ROOT_TOL);
    let mut comps: Vec<Vec<Complex<R>>> = disc.components().to_vec();

    loop {
        if comps.iter().any(|c| poly::degree(c).unwrap_or(0) == 0) {
            break;
        }
        let candidates = roots::all_roots(&comps[0])?;
        let mut removed = false;
        'cand: for &a in &candidates {
            if a.norm() > R::one() + R::lit(1e-9) {
                continue;
            }
            for comp in comps.iter().skip(1) {
                let others = roots::all_roots(comp)?;
                if !others.iter().any(|&b| (a - b).norm() < tol) {
                    continue 'cand;
                }
            }
            for comp in comps.iter_mut() {
                *comp = poly::deflate(comp, a);
            }
            removed = true;
            break;
        }
        if !removed {
            break;
        }
    }

    let c0 = comps[0][0];
    if c0.norm() < R::lit(1e-9) {
        return Err(Error::DegenerateReduction);
    }
    let inv = c0.inv();
    for comp in comps.iter_mut() {
        for c in comp.iter_mut() {
            *c *= inv;
        }
    }
    // Pin the normalization exactly.
    comps[0][0] = Complex::new(R::one(), R::zero());
    ProjDisc::new(comps)
}

// ---------------------------------------------------------------------------
// Plain-text records: dimension, degree, interleaved real/imag coefficients
// per component. Emitted into result files so best discs are reproducible.
// ---------------------------------------------------------------------------

fn record_components<R: Real>(kind: &str, components: &[Vec<Complex<R>>], dim: usize) -> String {
    let degree = components.iter().map(|c| c.len() - 1).max().unwrap_or(0);
    let mut out = format!("{kind} {dim} {degree}");
    for comp in components {
        out.push_str(" |");
        for k in 0..=degree {
            let c = comp
                .get(k)
                .copied()
                .unwrap_or_else(|| Complex::new(R::zero(), R::zero()));
            out.push_str(&format!(" {:.17e} {:.17e}", c.re.as_f64(), c.im.as_f64()));
        }
    }
    out
}

impl<R: Real> PolyDisc<R> {
    pub fn to_record(&self) -> String {
        record_components("affine", &self.components, self.dim())
    }
}

impl<R: Real> ProjDisc<R> {
    pub fn to_record(&self) -> String {
        record_components("projective", &self.components, self.dim())
    }
}

/// Either kind of disc, as produced by the envelope minimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum Disc<R: Real> {
    Affine(PolyDisc<R>),
    Projective(ProjDisc<R>),
}

impl<R: Real> Disc<R> {
    pub fn to_record(&self) -> String {
        match self {
            Disc::Affine(d) => d.to_record(),
            Disc::Projective(d) => d.to_record(),
        }
    }

    pub fn max_degree(&self) -> usize {
        match self {
            Disc::Affine(d) => d.max_degree(),
            Disc::Projective(d) => d.max_degree(),
        }
    }
}

/// Parses a disc record written by `to_record`.
pub fn parse_record<R: Real>(text: &str) -> Result<Disc<R>> {
    let mut parts = text.split('|');
    let head = parts.next().unwrap_or("").trim();
    let mut fields = head.split_whitespace();
    let kind = fields
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty disc record".into()))?;
    let dim: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidConfig("bad disc dimension".into()))?;
    let degree: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidConfig("bad disc degree".into()))?;
    let mut components = Vec::new();
    for chunk in parts {
        let nums: Vec<f64> = chunk
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("bad coefficient: {e}")))?;
        if nums.len() != 2 * (degree + 1) {
            return Err(Error::InvalidConfig(
                "coefficient count does not match the declared degree".into(),
            ));
        }
        components.push(
            nums.chunks(2)
                .map(|p| Complex::new(R::lit(p[0]), R::lit(p[1])))
                .collect::<Vec<_>>(),
        );
    }
    match kind {
        "affine" => {
            if components.len() != dim {
                return Err(Error::InvalidConfig("component count mismatch".into()));
            }
            Ok(Disc::Affine(PolyDisc::new(components)?))
        }
        "projective" => {
            if components.len() != dim + 1 {
                return Err(Error::InvalidConfig("component count mismatch".into()));
            }
            Ok(Disc::Projective(ProjDisc::new(components)?))
        }
        other => Err(Error::InvalidConfig(format!("unknown disc kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn constant_disc_trace() {
        let z = Point::from_re(&[0.3f64, 0.4]).unwrap();
        let d = PolyDisc::constant(&z);
        let tr = boundary_trace(d.components(), 8);
        assert_eq!(tr.len(), 8);
        for row in tr {
            assert_eq!(row, z.coords().to_vec());
        }
    }

    #[test]
    fn identity_disc_trace_hits_roots_of_unity() {
        // f(x) = x in C^1, N = 4 -> {1, i, -1, -i}
        let d = PolyDisc::new(vec![vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let tr = boundary_trace(d.components(), 4);
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (row, e) in tr.iter().zip(expect.iter()) {
            assert!((row[0] - e).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_matches_powersum_on_random_discs() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let comp: Vec<Complex<f64>> = (0..11)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let d = PolyDisc::new(vec![comp.clone()]).unwrap();
            for (k, row) in boundary_trace(d.components(), 16).iter().enumerate() {
                let th = std::f64::consts::TAU * k as f64 / 16.0;
                let x = Complex::from_polar(1.0, th);
                let direct = poly::eval_powersum(&comp, x);
                assert!((row[0] - direct).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn jensen_defect_trivial_and_linear() {
        let one = vec![c(1.0, 0.0)];
        let r = jensen_defect(&one, 64).unwrap();
        assert_eq!(r.defect, 0.0);

        // p = 1 - 2x: root 1/2 contributes log(1/2), boundary integral log 2.
        let p = vec![c(1.0, 0.0), c(-2.0, 0.0)];
        let r = jensen_defect(&p, 4096).unwrap();
        assert!(r.defect.abs() < 1e-9, "defect {}", r.defect);
        assert!(!r.near_circle);
    }

    #[test]
    fn jensen_defect_contracts_with_n() {
        let planted = [c(0.4, 0.3), c(-0.7, 0.0), c(1.3, 0.5), c(0.0, -0.6)];
        let p = poly::from_roots_unit_at_zero(&planted);
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256, 512] {
            let d = jensen_defect(&p, n).unwrap().defect.abs();
            assert!(d <= prev + 1e-12, "defect grew from {prev} to {d} at N={n}");
            prev = d;
        }
        assert!(jensen_defect(&p, 4096).unwrap().defect.abs() < 1e-8);
    }

    #[test]
    fn jensen_flags_near_circle_roots() {
        let p = poly::from_roots_unit_at_zero(&[c(0.9995, 0.0)]);
        assert!(jensen_defect(&p, 256).unwrap().near_circle);
    }

    #[test]
    fn jensen_requires_unit_constant_term() {
        let p = vec![c(2.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(jensen_defect(&p, 64), Err(Error::CenterMismatch)));
    }

    #[test]
    fn crossings_of_scale_component() {
        let z = Point::from_re(&[0.5f64]).unwrap();
        let d = ProjDisc::constant(&z);
        assert!(infinity_crossings(&d).unwrap().is_empty());

        let d = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-2.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let rs = infinity_crossings(&d).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0].0 - c(0.5, 0.0)).norm() < 1e-10);
        assert_eq!(rs.roots[0].1, 1);

        // (1 - 2x)^2 has a double crossing at 1/2.
        let d = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-4.0, 0.0), c(4.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let rs = infinity_crossings(&d).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].1, 2);
    }

    #[test]
    fn reduction_removes_common_factor() {
        // [(1 - 2x) : z (1 - 2x)] reduces to [1 : z].
        let z = c(0.7, -0.2);
        let d = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-2.0, 0.0)],
            vec![z, z * c(-2.0, 0.0)],
        ])
        .unwrap();
        let r = normalize_reduced(&d).unwrap();
        assert_eq!(poly::degree(r.scale_component()), Some(0));
        assert!((r.components()[1][0] - z).norm() < 1e-12);
        assert!(infinity_crossings(&r).unwrap().is_empty());
    }

    #[test]
    fn reduction_keeps_projective_boundary_map() {
        // Plant a common root at 0.3 across all components.
        let base = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(0.2, 0.1)],
            vec![c(0.5, 0.0), c(-0.3, 0.0)],
            vec![c(1.0, 0.0), c(0.4, -0.2)],
        ])
        .unwrap();
        let factor = [c(1.0, 0.0), c(-1.0 / 0.3, 0.0)]; // vanishes at 0.3
        let planted: Vec<Vec<Complex<f64>>> = base
            .components()
            .iter()
            .map(|comp| {
                let mut out = vec![c(0.0, 0.0); comp.len() + 1];
                for (i, &a) in comp.iter().enumerate() {
                    for (j, &b) in factor.iter().enumerate() {
                        out[i + j] += a * b;
                    }
                }
                out
            })
            .collect();
        let unreduced = ProjDisc::new(planted).unwrap();
        let reduced = normalize_reduced(&unreduced).unwrap();
        // Ratios on the boundary agree wherever the scale component is nonzero.
        for k in 0..16 {
            let th = std::f64::consts::TAU * k as f64 / 16.0;
            let x = Complex::from_polar(1.0, th);
            let a = unreduced.eval_lift(x);
            let b = reduced.eval_lift(x);
            for i in 1..a.len() {
                let ra = a[i] / a[0];
                let rb = b[i] / b[0];
                assert!((ra - rb).norm() < 1e-10, "projective point changed");
            }
        }
        // An already reduced disc is unchanged.
        let again = normalize_reduced(&base).unwrap();
        assert_eq!(again, base);
    }

    #[test]
    fn record_roundtrip() {
        let d = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-0.25, 0.125)],
            vec![c(0.5, 0.0), c(0.1, -0.7)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let rec = d.to_record();
        match parse_record::<f64>(&rec).unwrap() {
            Disc::Projective(p) => assert_eq!(p, d),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn padding_is_evaluation_exact() {
        let d = PolyDisc::new(vec![vec![c(0.3, 0.0), c(0.5, -0.2)]]).unwrap();
        let p = d.padded_to(6);
        for k in 0..8 {
            let th = std::f64::consts::TAU * k as f64 / 8.0;
            let x = Complex::from_polar(1.0, th);
            assert_eq!(d.eval(x), p.eval(x));
        }
    }
}
