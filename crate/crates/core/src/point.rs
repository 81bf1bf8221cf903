//! Points of C^n and small helpers shared by the region and weight modules.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of C^n, n >= 1, with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<R: Real> {
    coords: Vec<Complex<R>>,
}

impl<R: Real> Point<R> {
    pub fn new(coords: Vec<Complex<R>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if coords
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinitePoint);
        }
        Ok(Self { coords })
    }

    /// Builds a point from interleaved `(re, im)` pairs.
    pub fn from_parts(parts: &[(R, R)]) -> Result<Self> {
        Self::new(parts.iter().map(|&(re, im)| Complex::new(re, im)).collect())
    }

    /// Builds a real point (all imaginary parts zero).
    pub fn from_re(res: &[R]) -> Result<Self> {
        Self::new(res.iter().map(|&re| Complex::new(re, R::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex<R>] {
        &self.coords
    }

    /// Euclidean norm.
    pub fn norm(&self) -> R {
        norm_of(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.re.is_zero() && c.im.is_zero())
    }

    /// The scaled point `lambda * z`.
    pub fn scaled(&self, lambda: Complex<R>) -> Self {
        Self {
            coords: self.coords.iter().map(|&c| c * lambda).collect(),
        }
    }
}

/// Euclidean norm of a coordinate slice.
pub fn norm_of<R: Real>(coords: &[Complex<R>]) -> R {
    coords
        .iter()
        .map(|c| c.norm_sqr())
        .fold(R::zero(), |a, b| a + b)
        .sqrt()
}

/// Writes `lambda * z` into `out` without allocating.
pub(crate) fn scale_into<R: Real>(z: &[Complex<R>], lambda: Complex<R>, out: &mut [Complex<R>]) {
    for (o, &c) in out.iter_mut().zip(z.iter()) {
        *o = c * lambda;
    }
}

/// Rounds `x` to 12 significant decimal digits. Used for cache keys so that
/// repeat queries reproduce values without float-identity fragility.
pub(crate) fn quantize(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let exp = x.abs().log10().floor();
    let scale = 10f64.powf(11.0 - exp);
    (x * scale).round() / scale
}

/// Cache key: bit patterns of the 12-digit-quantized coordinates.
pub(crate) fn quantized_key<R: Real>(coords: &[Complex<R>]) -> Vec<(u64, u64)> {
    coords
        .iter()
        .map(|c| {
            (
                quantize(c.re.as_f64()).to_bits(),
                quantize(c.im.as_f64()).to_bits(),
            )
        })
        .collect()
}

/// The quantized representative of a point: the point whose coordinates are
/// exactly the 12-digit roundings. Values computed on the representative are
/// a pure function of the cache key.
pub(crate) fn quantized_point<R: Real>(coords: &[Complex<R>]) -> Vec<Complex<R>> {
    coords
        .iter()
        .map(|c| {
            Complex::new(
                R::lit(quantize(c.re.as_f64())),
                R::lit(quantize(c.im.as_f64())),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::new(vec![Complex::new(f64::NAN, 0.0)]).is_err());
        assert!(Point::new(vec![Complex::new(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn quantize_is_idempotent() {
        for &x in &[1.0, -0.333_333_333_333_333_3, 2.718281828459045e-7, 1e12] {
            let q = quantize(x);
            assert_eq!(quantize(q), q);
            assert!((q - x).abs() <= 1e-11 * x.abs());
        }
        assert_eq!(quantize(0.0), 0.0);
    }

    #[test]
    fn scaled_point() {
        let z = Point::from_re(&[3.0f64, 4.0]).unwrap();
        assert_eq!(z.norm(), 5.0);
        let w = z.scaled(Complex::new(0.0, 1.0));
        assert_eq!(w.coords()[0], Complex::new(0.0, 3.0));
        assert_eq!(w.norm(), 5.0);
    }
}
