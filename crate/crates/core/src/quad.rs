//! Uniform quadrature on the unit circle with the arc-length measure
//! normalized to one. Trapezoidal on a periodic integrand, so spectrally
//! accurate away from boundary singularities.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct QuadratureGrid<R: Real> {
    nodes: Vec<Complex<R>>,
}

pub const DEFAULT_NODES: usize = 512;

impl<R: Real> QuadratureGrid<R> {
    /// N-th roots of unity with weight 1/N each; N must be a power of two.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::BadQuadratureSize(n));
        }
        let nodes = (0..n)
            .map(|k| {
                let th = R::lit(std::f64::consts::TAU * k as f64 / n as f64);
                Complex::from_polar(R::one(), th)
            })
            .collect();
        Ok(Self { nodes })
    }

    /// The same rule on half-step-rotated nodes `e^{i pi (2k+1)/N}`. Pairing
    /// this grid with the standard one detects integrands that look small
    /// only in the immediate vicinity of the standard nodes.
    pub fn midpoint(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::BadQuadratureSize(n));
        }
        let nodes = (0..n)
            .map(|k| {
                let th = R::lit(std::f64::consts::PI * (2 * k + 1) as f64 / n as f64);
                Complex::from_polar(R::one(), th)
            })
            .collect();
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex<R>] {
        &self.nodes
    }

    /// Mean of a function over the nodes.
    pub fn mean<F: FnMut(Complex<R>) -> R>(&self, mut f: F) -> R {
        let mut acc = R::zero();
        for &x in &self.nodes {
            acc += f(x);
        }
        acc / R::lit(self.nodes.len() as f64)
    }
}

impl<R: Real> Default for QuadratureGrid<R> {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("default node count is a power of two")
    }
}
