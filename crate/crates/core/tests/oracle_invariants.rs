//! Reference-value invariants tying the oracles, the gauge and the
//! homogenized weight together on the balanced fixtures.

use std::sync::Arc;

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use discenv_core::oracle::{reference_vh, ReferenceCase, ReinhardtHullOracle};
use discenv_core::point::Point;
use discenv_core::region::{minkowski_gauge, punctured_ball, punctured_polydisc};
use discenv_core::weight::{HomogenizedWeight, LambdaSearchConfig, WeightSpec};
use discenv_core::RegionSpec64;

fn sample_points(seed: u64, n: usize) -> Vec<Point<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let coords: Vec<Complex<f64>> = (0..2)
                .map(|_| {
                    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
                .collect();
            Point::new(coords).unwrap()
        })
        .filter(|p| p.norm() > 0.05)
        .collect()
}

#[test]
fn reference_equals_gauge_and_rho_on_pseudoconvex_cases() {
    let cases: [(ReferenceCase, RegionSpec64); 2] = [
        (ReferenceCase::PuncturedBall, punctured_ball(2, 1.0).unwrap()),
        (
            ReferenceCase::PuncturedPolydisc,
            punctured_polydisc(&[1.0, 1.0]).unwrap(),
        ),
    ];
    for (case, region) in cases {
        let region = Arc::new(region);
        let hw = HomogenizedWeight::new(
            region.clone(),
            WeightSpec::zero(),
            LambdaSearchConfig::default(),
        );
        for z in sample_points(17, 24) {
            let reference = reference_vh(case, &z).unwrap();
            let gauge = minkowski_gauge(&region, &z).unwrap();
            assert!(
                (reference - gauge.ln()).abs() < 1e-9,
                "{case:?}: reference {reference} vs log gauge {}",
                gauge.ln()
            );
            let lr = hw.log_rho(&z).unwrap().value;
            assert!(
                (reference - lr).abs() < 1e-4,
                "{case:?}: reference {reference} vs log rho {lr}"
            );
        }
    }
}

#[test]
fn hull_gauge_is_absolutely_homogeneous() {
    let o = ReinhardtHullOracle::<f64>::build(&[[1.0, 0.5], [0.5, 1.0]]).unwrap();
    let z = Point::from_parts(&[(0.7, 0.1), (0.3, -0.4)]).unwrap();
    let g0 = o.gauge(&z).unwrap();
    for &(re, im) in &[(2.0, 0.0), (0.0, -0.5), (1.3, 0.7)] {
        let mu = Complex::new(re, im);
        let g1 = o.gauge(&z.scaled(mu)).unwrap();
        let rel = (g1 - mu.norm() * g0).abs() / g1;
        assert!(rel < 1e-10, "hull gauge homogeneity violated: {rel}");
    }
}
