//! Polynomial root localization by Aberth-Ehrlich simultaneous iteration,
//! with cluster-based multiplicities.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly;
use crate::scalar::Real;

/// Roots inside the open unit disc with multiplicities from clustering.
#[derive(Debug, Clone)]
pub struct RootSet<R: Real> {
    pub roots: Vec<(Complex<R>, usize)>,
}

impl<R: Real> RootSet<R> {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }
}

/// Residual target for the simultaneous iteration.
const RESIDUAL_TOL: f64 = 1e-12;
/// Roots closer than this are merged with summed multiplicity.
const CLUSTER_TOL: f64 = 1e-6;
/// Roots must be this far inside the circle to count as interior.
const INTERIOR_MARGIN: f64 = 1e-9;
const MAX_ITERS: usize = 400;

/// All complex roots of the polynomial (exact zero roots factored first).
pub fn all_roots<R: Real>(coeffs: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
    let deg = poly::degree(coeffs).ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut work: Vec<Complex<R>> = coeffs[..=deg].to_vec();

    // Factor exact zero roots so clustered multiplicities at the origin are
    // reported exactly.
    let scale = work.iter().map(|c| c.norm()).fold(R::zero(), R::max);
    let zero_tol = scale * R::lit(1e-15);
    let mut zeros_at_origin = 0;
    while work.len() > 1 && work[0].norm() <= zero_tol {
        work.remove(0);
        zeros_at_origin += 1;
    }

    let d = work.len() - 1;
    let mut roots: Vec<Complex<R>> =
        vec![Complex::new(R::zero(), R::zero()); zeros_at_origin];
    if d == 0 {
        return Ok(roots);
    }

    let deriv = poly::derivative(&work);

    // Initial guesses on a circle sized by the geometric mean of the
    // constant-to-leading ratio, with an angular offset to break symmetry.
    let r0 = (work[0].norm() / work[d].norm()).powf(R::one() / R::lit(d as f64));
    let r0 = if r0.is_finite() && r0 > R::zero() {
        r0
    } else {
        R::one()
    };
    let mut xs: Vec<Complex<R>> = (0..d)
        .map(|j| {
            let th = R::lit(std::f64::consts::TAU * j as f64 / d as f64 + 0.45);
            Complex::from_polar(r0, th)
        })
        .collect();

    let mut best_residual = R::infinity();
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let mut max_step = R::zero();
        for i in 0..d {
            let p = poly::eval(&work, xs[i]);
            let dp = poly::eval(&deriv, xs[i]);
            if p.norm().is_zero() {
                continue;
            }
            let newton = if dp.norm().is_zero() {
                Complex::new(R::lit(1e-8), R::lit(1e-8))
            } else {
                p / dp
            };
            let mut sum = Complex::new(R::zero(), R::zero());
            for j in 0..d {
                if j != i {
                    let diff = xs[i] - xs[j];
                    if diff.norm() > R::lit(1e-300) {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex::new(R::one(), R::zero()) - newton * sum;
            let step = if denom.norm() > R::lit(1e-300) {
                newton / denom
            } else {
                newton
            };
            xs[i] -= step;
            let rel = step.norm() / xs[i].norm().max(R::one());
            if rel > max_step {
                max_step = rel;
            }
        }
        let residual = xs
            .iter()
            .map(|&x| poly::eval(&work, x).norm())
            .fold(R::zero(), R::max)
            / scale;
        if residual < best_residual {
            best_residual = residual;
        }
        if residual < R::lit(RESIDUAL_TOL) || max_step < R::lit(1e-15) {
            converged = true;
            break;
        }
    }
    if !converged && best_residual > R::lit(RESIDUAL_TOL * 1e3) {
        return Err(Error::RootsDidNotConverge {
            residual: best_residual.as_f64(),
        });
    }

    roots.extend(xs);
    Ok(roots)
}

/// Clusters a root list (merge within the clustering tolerance) and keeps the
/// cluster means with summed multiplicities.
pub fn cluster<R: Real>(roots: &[Complex<R>]) -> Vec<(Complex<R>, usize)> {
    let tol = R::lit(CLUSTER_TOL);
    let mut out: Vec<(Complex<R>, usize)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(c, _)| (*c - r).norm() < tol) {
            Some((c, m)) => {
                // Running mean keeps the cluster center stable.
                let w = R::lit(*m as f64);
                *c = (*c * w + r) / (w + R::one());
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out
}

/// Roots strictly inside the unit disc, clustered with multiplicities.
pub fn roots_in_unit_disc<R: Real>(coeffs: &[Complex<R>]) -> Result<RootSet<R>> {
    let all = all_roots(coeffs)?;
    let roots = cluster(&all)
        .into_iter()
        .filter(|(c, _)| c.norm() < R::one() - R::lit(INTERIOR_MARGIN))
        .collect();
    Ok(RootSet { roots })
}

/// Smallest distance from any root to the unit circle; `None` for constants.
pub fn min_circle_distance<R: Real>(coeffs: &[Complex<R>]) -> Result<Option<R>> {
    let all = all_roots(coeffs)?;
    Ok(all
        .iter()
        .map(|c| (c.norm() - R::one()).abs())
        .fold(None, |acc: Option<R>, d| {
            Some(acc.map_or(d, |a| a.min(d)))
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn two_real_roots_one_inside() {
        // (x - 1/2)(x - 3), scaled so p(0) = 1.
        let p = poly::from_roots_unit_at_zero(&[c(0.5, 0.0), c(3.0, 0.0)]);
        let rs = roots_in_unit_disc(&p).unwrap();
        assert_eq!(rs.roots.len(), 1);
        let (a, m) = rs.roots[0];
        assert_eq!(m, 1);
        assert!((a - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn pure_power_has_origin_multiplicity() {
        // x^3
        let p = vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let rs = roots_in_unit_disc(&p).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].1, 3);
        assert_eq!(rs.roots[0].0.norm(), 0.0);
    }

    #[test]
    fn double_root_clusters() {
        // (1 - 2x)^2 = 1 - 4x + 4x^2
        let p = vec![c(1.0, 0.0), c(-4.0, 0.0), c(4.0, 0.0)];
        let rs = roots_in_unit_disc(&p).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].1, 2);
        assert!((rs.roots[0].0 - c(0.5, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn recovers_planted_roots_degree_ten() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let planted: Vec<Complex<f64>> = (0..10)
                .map(|_| {
                    // Radii away from both the origin and the circle.
                    let r = if rng.random::<bool>() {
                        rng.random_range(0.15..0.9)
                    } else {
                        rng.random_range(1.1..3.0)
                    };
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    Complex::from_polar(r, th)
                })
                .collect();
            let p = poly::from_roots_unit_at_zero(&planted);
            let rs = roots_in_unit_disc(&p).unwrap();
            let inside: Vec<&Complex<f64>> =
                planted.iter().filter(|z| z.norm() < 1.0).collect();
            assert_eq!(rs.total_multiplicity(), inside.len());
            for z in inside {
                let hit = rs
                    .roots
                    .iter()
                    .map(|(a, _)| (a - z).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(hit < 1e-8, "planted root {z} recovered to {hit:.2e} only");
            }
        }
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(matches!(
            roots_in_unit_disc::<f64>(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::ZeroPolynomial)
        ));
    }
}
