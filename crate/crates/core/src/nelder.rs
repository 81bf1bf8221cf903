//! Nelder-Mead simplex descent with dimension-adaptive coefficients and
//! oriented restarts. The objectives it sees are produced by an inner
//! sampling search, so gradients are unreliable and the solver never asks
//! for them.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions<R: Real> {
    pub max_evals: usize,
    pub ftol_abs: R,
    pub ftol_rel: R,
    pub xtol: R,
    /// Oriented restarts around the incumbent with a shrunken simplex.
    pub restarts: usize,
}

impl<R: Real> Default for NelderMeadOptions<R> {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            ftol_abs: R::lit(1e-12),
            ftol_rel: R::lit(1e-10),
            xtol: R::lit(1e-10),
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult<R: Real> {
    pub x: Vec<R>,
    pub value: R,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with initial per-coordinate steps `steps`.
pub fn minimize<R: Real, F: FnMut(&[R]) -> R>(
    f: &mut F,
    x0: &[R],
    steps: &[R],
    opts: &NelderMeadOptions<R>,
) -> NelderMeadResult<R> {
    let mut evals = 0usize;
    let mut best = run_simplex(f, x0, steps, opts.max_evals, opts, &mut evals);
    for _ in 0..opts.restarts {
        if evals >= opts.max_evals {
            break;
        }
        let shrunk: Vec<R> = steps.iter().map(|&s| s * R::lit(0.25)).collect();
        let budget = opts.max_evals - evals;
        let again = run_simplex(f, &best.x, &shrunk, budget, opts, &mut evals);
        if again.value < best.value {
            best = again;
        }
    }
    best.evals = evals;
    best
}

fn run_simplex<R: Real, F: FnMut(&[R]) -> R>(
    f: &mut F,
    x0: &[R],
    steps: &[R],
    budget: usize,
    opts: &NelderMeadOptions<R>,
    evals: &mut usize,
) -> NelderMeadResult<R> {
    let n = x0.len();
    if n == 0 {
        let v = f(x0);
        *evals += 1;
        return NelderMeadResult {
            x: x0.to_vec(),
            value: v,
            evals: *evals,
            converged: true,
        };
    }

    // Dimension-adaptive coefficients.
    let nf = R::lit(n as f64);
    let alpha = R::one();
    let gamma = R::one() + R::lit(2.0) / nf;
    let beta = R::lit(0.75) - (R::lit(2.0) * nf).recip();
    let delta = R::one() - nf.recip();

    let mut simplex: Vec<Vec<R>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        let s = steps[i];
        v[i] += if s.is_zero() { R::lit(0.02) } else { s };
        simplex.push(v);
    }
    let mut values: Vec<R> = simplex
        .iter()
        .map(|v| {
            *evals += 1;
            f(v)
        })
        .collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;

    while *evals < budget {
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best_i = order[0];
        let worst_i = order[n];
        let second_worst_i = order[n - 1];

        let spread = values[worst_i] - values[best_i];
        if spread <= opts.ftol_abs + opts.ftol_rel * values[best_i].abs() {
            converged = true;
            break;
        }
        let diam = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(simplex[best_i].iter())
                    .map(|(a, b)| (*a - *b).abs())
                    .fold(R::zero(), R::max)
            })
            .fold(R::zero(), R::max);
        if diam <= opts.xtol {
            converged = true;
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![R::zero(); n];
        for (i, v) in simplex.iter().enumerate() {
            if i != worst_i {
                for (c, &x) in centroid.iter_mut().zip(v.iter()) {
                    *c += x;
                }
            }
        }
        for c in centroid.iter_mut() {
            *c /= nf;
        }

        let combine = |t: R, c: &[R], w: &[R]| -> Vec<R> {
            c.iter()
                .zip(w.iter())
                .map(|(&ci, &wi)| ci + t * (ci - wi))
                .collect()
        };

        let reflected = combine(alpha, &centroid, &simplex[worst_i]);
        let fr = {
            *evals += 1;
            f(&reflected)
        };

        if fr < values[best_i] {
            let expanded = combine(gamma, &centroid, &simplex[worst_i]);
            let fe = {
                *evals += 1;
                f(&expanded)
            };
            if fe < fr {
                simplex[worst_i] = expanded;
                values[worst_i] = fe;
            } else {
                simplex[worst_i] = reflected;
                values[worst_i] = fr;
            }
        } else if fr < values[second_worst_i] {
            simplex[worst_i] = reflected;
            values[worst_i] = fr;
        } else {
            // Contract, outside or inside.
            let (point, fp) = if fr < values[worst_i] {
                let p = combine(beta, &centroid, &simplex[worst_i]);
                let v = {
                    *evals += 1;
                    f(&p)
                };
                (p, v)
            } else {
                let p = combine(-beta, &centroid, &simplex[worst_i]);
                let v = {
                    *evals += 1;
                    f(&p)
                };
                (p, v)
            };
            if fp < values[worst_i].min(fr) {
                simplex[worst_i] = point;
                values[worst_i] = fp;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[best_i].clone();
                for (i, v) in simplex.iter_mut().enumerate() {
                    if i == best_i {
                        continue;
                    }
                    for (x, &a) in v.iter_mut().zip(anchor.iter()) {
                        *x = a + delta * (*x - a);
                    }
                    values[i] = {
                        *evals += 1;
                        f(v)
                    };
                    if *evals >= budget {
                        break;
                    }
                }
            }
        }
    }

    let best_i = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    NelderMeadResult {
        x: simplex[best_i].clone(),
        value: values[best_i],
        evals: *evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let mut f = |x: &[f64]| x.iter().map(|v| (v - 1.5) * (v - 1.5)).sum::<f64>();
        let r = minimize(&mut f, &[0.0, 0.0, 0.0], &[0.5, 0.5, 0.5], &NelderMeadOptions::default());
        assert!(r.converged);
        for v in &r.x {
            assert!((v - 1.5).abs() < 1e-5, "component {v}");
        }
    }

    #[test]
    fn rosenbrock_two_dim() {
        let mut f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let opts = NelderMeadOptions {
            max_evals: 4000,
            restarts: 2,
            ..Default::default()
        };
        let r = minimize(&mut f, &[-1.2, 1.0], &[0.3, 0.3], &opts);
        assert!(r.value < 1e-6, "rosenbrock value {}", r.value);
    }

    #[test]
    fn respects_eval_budget() {
        let mut count = 0usize;
        let mut f = |x: &[f64]| {
            count += 1;
            x.iter().map(|v| v * v).sum::<f64>()
        };
        let opts = NelderMeadOptions {
            max_evals: 100,
            restarts: 0,
            ..Default::default()
        };
        let r = minimize(&mut f, &[3.0; 8], &[0.5; 8], &opts);
        assert!(count <= 110, "eval count {count}");
        assert!(r.evals <= 110);
    }

    #[test]
    fn zero_dimensional_input() {
        let mut f = |_: &[f64]| 7.0;
        let r = minimize(&mut f, &[], &[], &NelderMeadOptions::default());
        assert_eq!(r.value, 7.0);
        assert!(r.converged);
    }
}
