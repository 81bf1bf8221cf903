//! Dense univariate polynomials with complex coefficients, ascending powers.

use num_complex::Complex;

use crate::scalar::Real;

/// Horner evaluation.
pub fn eval<R: Real>(coeffs: &[Complex<R>], x: Complex<R>) -> Complex<R> {
    let mut acc = Complex::new(R::zero(), R::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Power-sum evaluation, kept as an independent cross-check of `eval`.
pub fn eval_powersum<R: Real>(coeffs: &[Complex<R>], x: Complex<R>) -> Complex<R> {
    let mut acc = Complex::new(R::zero(), R::zero());
    let mut p = Complex::new(R::one(), R::zero());
    for &c in coeffs.iter() {
        acc += c * p;
        p *= x;
    }
    acc
}

/// Formal derivative.
pub fn derivative<R: Real>(coeffs: &[Complex<R>]) -> Vec<Complex<R>> {
    if coeffs.len() <= 1 {
        return vec![Complex::new(R::zero(), R::zero())];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * R::lit(k as f64))
        .collect()
}

/// Effective degree: index of the last coefficient that is not negligible
/// relative to the largest one. Returns `None` for the zero polynomial.
pub fn degree<R: Real>(coeffs: &[Complex<R>]) -> Option<usize> {
    let max = coeffs
        .iter()
        .map(|c| c.norm())
        .fold(R::zero(), R::max);
    if max.is_zero() {
        return None;
    }
    let tiny = max * R::lit(1e-14);
    coeffs.iter().rposition(|c| c.norm() > tiny)
}

/// Synthetic division by `(x - root)`; returns the quotient and drops the
/// remainder (callers only deflate at known roots).
pub fn deflate<R: Real>(coeffs: &[Complex<R>], root: Complex<R>) -> Vec<Complex<R>> {
    let d = match degree(coeffs) {
        Some(d) if d >= 1 => d,
        _ => return vec![Complex::new(R::zero(), R::zero())],
    };
    let mut q = vec![Complex::new(R::zero(), R::zero()); d];
    let mut acc = coeffs[d];
    for k in (0..d).rev() {
        q[k] = acc;
        acc = coeffs[k] + acc * root;
    }
    q
}

/// Monic-by-construction polynomial with the given roots, scaled so that
/// p(0) = 1 (requires no root at the origin). Test fixture helper.
pub fn from_roots_unit_at_zero<R: Real>(roots: &[Complex<R>]) -> Vec<Complex<R>> {
    let one = Complex::new(R::one(), R::zero());
    let mut coeffs = vec![one];
    for &r in roots {
        // multiply by (1 - x/r)
        let inv = -one / r;
        let mut next = vec![Complex::new(R::zero(), R::zero()); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * inv;
        }
        coeffs = next;
    }
    coeffs
}
