//! The three disc functionals: the affine and projective forms integrate the
//! log of the homogenized weight over the boundary circle; the weighted form
//! adds the infinity-crossing correction against a raw weight on a region.

use std::sync::Arc;

use num_complex::Complex;

use crate::disc::{infinity_crossings, PolyDisc, ProjDisc};
use crate::error::{Error, Result};
use crate::quad::QuadratureGrid;
use crate::region::RegionSpec;
use crate::roots;
use crate::scalar::Real;
use crate::weight::{HomogenizedWeight, WeightFn};

/// Minimum distance of scale-component roots from the unit circle for the
/// projective functional to be trusted.
pub const CIRCLE_ROOT_TOL: f64 = 1e-6;

fn mean_log_rho<R: Real>(
    hw: &HomogenizedWeight<R>,
    rows: impl Iterator<Item = Vec<Complex<R>>>,
    nodes: usize,
) -> Result<R> {
    let mut acc = R::zero();
    let mut violating = 0usize;
    let mut total_violation = 0.0f64;
    for row in rows {
        match hw.log_rho_or_violation(&row) {
            Ok(lr) => acc += lr.value,
            Err(v) => {
                violating += 1;
                total_violation += v.as_f64().max(0.0);
            }
        }
    }
    if violating > 0 {
        return Err(Error::InfeasibleBoundary {
            violating_nodes: violating,
            nodes,
            total_violation,
        });
    }
    Ok(acc / R::lit(nodes as f64))
}

/// Affine disc functional: the mean of `log rho` over the boundary trace.
/// Requires the full-cone claim; boundary nodes outside the cone produce a
/// feasibility error rather than a value.
pub fn affine_functional<R: Real>(
    hw: &HomogenizedWeight<R>,
    disc: &PolyDisc<R>,
    grid: &QuadratureGrid<R>,
) -> Result<R> {
    if !hw.region().flags().full_cone {
        return Err(Error::Precondition(
            "affine functional requires the full-cone claim on the region".into(),
        ));
    }
    if disc.dim() != hw.region().dim() {
        return Err(Error::DimensionMismatch {
            expected: hw.region().dim(),
            got: disc.dim(),
        });
    }
    let rows = grid.nodes().iter().map(|&x| disc.eval(x));
    mean_log_rho(hw, rows, grid.len())
}

/// Projective disc functional: the mean of `log rho` of the lift coordinates
/// `(f_1, ..., f_n)` over the boundary. By 1-homogeneity this equals the
/// chart integral plus the Jensen correction automatically.
pub fn projective_functional<R: Real>(
    hw: &HomogenizedWeight<R>,
    disc: &ProjDisc<R>,
    grid: &QuadratureGrid<R>,
) -> Result<R> {
    if disc.dim() != hw.region().dim() {
        return Err(Error::DimensionMismatch {
            expected: hw.region().dim(),
            got: disc.dim(),
        });
    }
    check_scale_component(disc)?;
    let rows = grid
        .nodes()
        .iter()
        .map(|&x| disc.eval_lift(x)[1..].to_vec());
    mean_log_rho(hw, rows, grid.len())
}

fn check_scale_component<R: Real>(disc: &ProjDisc<R>) -> Result<()> {
    if crate::poly::degree(disc.scale_component()).unwrap_or(0) == 0 {
        return Ok(());
    }
    match roots::min_circle_distance(disc.scale_component())? {
        Some(d) if d < R::lit(CIRCLE_ROOT_TOL) => Err(Error::RootNearCircle {
            tol: CIRCLE_ROOT_TOL,
        }),
        _ => Ok(()),
    }
}

/// Weighted non-homogeneous disc functional on a region X with weight psi:
/// the crossing term `-sum m(a) log|a|` plus the mean of `psi` on the chart
/// trace. Boundary chart points must lie in X.
pub fn weighted_functional<R: Real>(
    x_region: &RegionSpec<R>,
    psi: &Arc<WeightFn<R>>,
    disc: &ProjDisc<R>,
    grid: &QuadratureGrid<R>,
) -> Result<R> {
    if disc.dim() != x_region.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_region.dim(),
            got: disc.dim(),
        });
    }
    check_scale_component(disc)?;
    let crossing = crossing_term(disc)?;
    let mut acc = R::zero();
    let mut violating = 0usize;
    for &x in grid.nodes() {
        let lift = disc.eval_lift(x);
        let f0 = lift[0];
        let chart: Vec<Complex<R>> = lift[1..].iter().map(|&c| c / f0).collect();
        if x_region.contains_slice(&chart) {
            acc += psi(&chart);
        } else {
            violating += 1;
        }
    }
    if violating > 0 {
        return Err(Error::InfeasibleBoundary {
            violating_nodes: violating,
            nodes: grid.len(),
            total_violation: violating as f64,
        });
    }
    Ok(crossing + acc / R::lit(grid.len() as f64))
}

/// Weighted functional with X = C^*E and psi the log of the homogenized
/// weight, the form used by the consistency checks. Chart membership in the
/// cone and the weight value come from the same scaling search.
pub fn weighted_homog_functional<R: Real>(
    hw: &HomogenizedWeight<R>,
    disc: &ProjDisc<R>,
    grid: &QuadratureGrid<R>,
) -> Result<R> {
    if disc.dim() != hw.region().dim() {
        return Err(Error::DimensionMismatch {
            expected: hw.region().dim(),
            got: disc.dim(),
        });
    }
    check_scale_component(disc)?;
    let crossing = crossing_term(disc)?;
    let rows = grid.nodes().iter().map(|&x| {
        let lift = disc.eval_lift(x);
        let f0 = lift[0];
        lift[1..].iter().map(|&c| c / f0).collect::<Vec<_>>()
    });
    let chart_mean = mean_log_rho(hw, rows, grid.len())?;
    Ok(crossing + chart_mean)
}

pub(crate) fn crossing_term<R: Real>(disc: &ProjDisc<R>) -> Result<R> {
    let crossings = infinity_crossings(disc)?;
    let mut term = R::zero();
    for &(a, m) in &crossings.roots {
        term -= R::lit(m as f64) * a.norm().ln();
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;
    use crate::region::{annulus, punctured_ball, sector};
    use crate::weight::{LambdaSearchConfig, WeightSpec};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn hw_annulus() -> HomogenizedWeight<f64> {
        HomogenizedWeight::new(
            Arc::new(annulus(0.5, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        )
    }

    #[test]
    fn constant_disc_reduces_to_log_rho() {
        let hw = hw_annulus();
        let grid = QuadratureGrid::new(64).unwrap();
        let z = Point::from_re(&[1.0f64]).unwrap();
        let disc = PolyDisc::constant(&z);
        let v = affine_functional(&hw, &disc, &grid).unwrap();
        let lr = hw.log_rho(&z).unwrap().value;
        assert!((v - lr).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_value_property() {
        // f(x) = 1 + 0.1 x on the annulus: mean of log|1 + 0.1 x| is zero,
        // so the functional equals log(1/2).
        let hw = hw_annulus();
        let grid = QuadratureGrid::new(512).unwrap();
        let disc = PolyDisc::new(vec![vec![c(1.0, 0.0), c(0.1, 0.0)]]).unwrap();
        let v = affine_functional(&hw, &disc, &grid).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 2e-3, "value {v}");
    }

    #[test]
    fn affine_requires_full_cone() {
        let hw = HomogenizedWeight::new(
            Arc::new(sector(1.0, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let grid = QuadratureGrid::new(32).unwrap();
        let z = Point::from_re(&[1.5f64, 0.1]).unwrap();
        let disc = PolyDisc::constant(&z);
        assert!(matches!(
            affine_functional(&hw, &disc, &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn projective_constant_disc() {
        let hw = hw_annulus();
        let grid = QuadratureGrid::new(128).unwrap();
        let z = Point::from_re(&[0.8f64]).unwrap();
        let disc = ProjDisc::constant(&z);
        let v = projective_functional(&hw, &disc, &grid).unwrap();
        assert!((v - (0.8f64.ln() - 2.0f64.ln())).abs() < 2e-3, "value {v}");
    }

    #[test]
    fn unreduced_lift_overestimates_by_jensen() {
        // [(1-2x) : z(1-2x)] carries an extra log 2 relative to [1 : z].
        let hw = hw_annulus();
        let grid = QuadratureGrid::new(512).unwrap();
        let z = c(0.8, 0.0);
        let unreduced = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-2.0, 0.0)],
            vec![z, z * c(-2.0, 0.0)],
        ])
        .unwrap();
        let v_un = projective_functional(&hw, &unreduced, &grid).unwrap();
        let reduced = crate::disc::normalize_reduced(&unreduced).unwrap();
        let v_red = projective_functional(&hw, &reduced, &grid).unwrap();
        let expect_red = 0.8f64.ln() - 2.0f64.ln();
        assert!((v_red - expect_red).abs() < 2e-3, "reduced {v_red}");
        assert!(
            (v_un - (expect_red + 2.0f64.ln())).abs() < 2e-3,
            "unreduced {v_un}"
        );
        assert!(v_red <= v_un);
    }

    #[test]
    fn sector_degree_one_lift() {
        // f = [1 : 0.5 + alpha x : 1 + gamma x] with |alpha| > 1.5 + |gamma|
        // is feasible; the value is log|alpha| - log 2.
        let hw = HomogenizedWeight::new(
            Arc::new(sector(1.0, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let grid = QuadratureGrid::new(512).unwrap();
        let (alpha, gamma) = (1.7, 0.1);
        let disc = ProjDisc::new(vec![
            vec![c(1.0, 0.0)],
            vec![c(0.5, 0.0), c(alpha, 0.0)],
            vec![c(1.0, 0.0), c(gamma, 0.0)],
        ])
        .unwrap();
        // Dense boundary check of the feasibility that the claim relies on.
        for k in 0..4096 {
            let th = std::f64::consts::TAU * k as f64 / 4096.0;
            let x = Complex::from_polar(1.0, th);
            let lift = disc.eval_lift(x);
            assert!(lift[2].norm() < lift[1].norm());
        }
        let v = projective_functional(&hw, &disc, &grid).unwrap();
        assert!(
            (v - (alpha.ln() - 2.0f64.ln())).abs() < 2e-3,
            "sector lift value {v}"
        );
    }

    #[test]
    fn infeasible_boundary_reported() {
        let hw = HomogenizedWeight::new(
            Arc::new(sector(1.0, 2.0).unwrap()),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        let grid = QuadratureGrid::new(64).unwrap();
        let z = Point::from_re(&[0.5f64, 1.0]).unwrap();
        let disc = ProjDisc::constant(&z);
        match projective_functional(&hw, &disc, &grid) {
            Err(Error::InfeasibleBoundary {
                violating_nodes, ..
            }) => assert_eq!(violating_nodes, 64),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn weighted_matches_projective_via_riesz() {
        // For X = C^*E and psi = log rho, the crossing term cancels the
        // scale-component integral: both routes agree on any disc.
        let hw = hw_annulus();
        let grid = QuadratureGrid::new(512).unwrap();
        let z = c(0.8, 0.0);
        // Disc with a genuine crossing: f0 = 1 - 2x vanishes at 1/2.
        let disc = ProjDisc::new(vec![
            vec![c(1.0, 0.0), c(-2.0, 0.0)],
            vec![z, c(0.05, 0.0)],
        ])
        .unwrap();
        let a = projective_functional(&hw, &disc, &grid).unwrap();
        let b = weighted_homog_functional(&hw, &disc, &grid).unwrap();
        assert!((a - b).abs() < 5e-3, "routes disagree: {a} vs {b}");
    }

    #[test]
    fn weighted_zero_weight_on_ball() {
        // psi = 0 on the unit ball, constant disc: value 0, no crossings.
        let ball = punctured_ball(2, 1.0).unwrap();
        let psi: Arc<WeightFn<f64>> = Arc::new(|_| 0.0);
        let grid = QuadratureGrid::new(64).unwrap();
        let z = Point::from_re(&[0.3f64, 0.4]).unwrap();
        let disc = ProjDisc::constant(&z);
        let v = weighted_functional(&ball, &psi, &disc, &grid).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn quadrature_stability_under_refinement() {
        let hw = hw_annulus();
        let disc = PolyDisc::new(vec![vec![c(1.0, 0.0), c(0.15, 0.05)]]).unwrap();
        let v1 = affine_functional(&hw, &disc, &QuadratureGrid::new(256).unwrap()).unwrap();
        let v2 = affine_functional(&hw, &disc, &QuadratureGrid::new(512).unwrap()).unwrap();
        assert!((v1 - v2).abs() < 1e-6, "|{v1} - {v2}|");
    }
}
