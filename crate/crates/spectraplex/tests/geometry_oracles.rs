//! Oracle tests for the exploration geometry: the traceless orthonormal
//! basis, the safety radius around the uniform reference, pivoted plays,
//! and the uniformity of direction sampling.

use spectraplex::basis::{perturb, pivot, safety_params, BasisSet};
use spectraplex::error::Error;
use spectraplex::game::random_density;
use spectraplex::hermitian::DensityMatrix;
use spectraplex::seeding::stream_rng;

#[test]
fn basis_has_one_element_per_degree_of_freedom() {
    for dim in 2..=6 {
        let basis = BasisSet::new(dim);
        assert_eq!(basis.len(), dim * dim - 1);
        for w in basis.elements() {
            assert!(w.trace().abs() < 1e-14, "element not traceless");
            assert!((w.frob_norm() - 1.0).abs() < 1e-14, "element not unit norm");
        }
    }
}

#[test]
fn basis_elements_are_orthonormal() {
    for dim in 2..=5 {
        let basis = BasisSet::new(dim);
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let inner = basis
                    .element(a)
                    .matrix()
                    .trace_product(basis.element(b).matrix())
                    .unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (inner.re - expect).abs() < 1e-12 && inner.im.abs() < 1e-12,
                    "gram defect at ({a}, {b}) in dim {dim}"
                );
            }
        }
    }
}

#[test]
fn safety_radius_is_the_largest_feasible_one() {
    for dim in 2..=5 {
        let params = safety_params(dim).unwrap();
        let basis = BasisSet::new(dim);
        let r = params.radius();

        // At the stated radius every signed perturbation of the reference
        // is still positive semidefinite (the extreme eigenvalue touches 0).
        let mut worst_min = f64::INFINITY;
        for w in basis.elements() {
            for sign in [-1.0, 1.0] {
                let mut m = params.reference().hermitian().clone();
                m.axpy(sign * r, w).unwrap();
                let min = m.eigh().unwrap().min_value();
                assert!(min > -1e-12, "dim {dim}: radius infeasible, eig {min}");
                worst_min = worst_min.min(min);
            }
        }
        assert!(worst_min.abs() < 1e-12, "dim {dim}: radius not tight");

        // Two percent past the radius some direction leaves the cone.
        let mut escaped = false;
        for w in basis.elements() {
            for sign in [-1.0, 1.0] {
                let mut m = params.reference().hermitian().clone();
                m.axpy(sign * r * 1.02, w).unwrap();
                if m.eigh().unwrap().min_value() < -1e-12 {
                    escaped = true;
                }
            }
        }
        assert!(escaped, "dim {dim}: inflated radius still feasible");
    }
}

#[test]
fn pivoted_plays_admit_every_perturbation() {
    let mut rng = stream_rng(0x9E0, 0);
    for dim in 2..=4 {
        let params = safety_params(dim).unwrap();
        let basis = BasisSet::new(dim);
        let r = params.radius();
        for _ in 0..10 {
            let x = random_density(dim, &mut rng);
            for delta in [0.0, r / 4.0, r / 2.0, 0.99 * r] {
                let pivoted = pivot(&x, &params, delta).unwrap();
                assert!((pivoted.hermitian().trace() - 1.0).abs() < 1e-12);

                // The pivot moves at most delta / r of the way to the center.
                let moved = pivoted
                    .hermitian()
                    .sub(x.hermitian())
                    .unwrap()
                    .frob_norm();
                let full = params
                    .reference()
                    .hermitian()
                    .sub(x.hermitian())
                    .unwrap()
                    .frob_norm();
                assert!(moved <= (delta / r) * full + 1e-12);

                for index in 0..basis.len() {
                    for sign in [-1i8, 1] {
                        let dir = spectraplex::basis::TangentDirection {
                            matrix: basis.element(index).clone(),
                            index,
                            sign,
                        };
                        let played = perturb(&pivoted, &dir, delta);
                        assert!(
                            played.is_ok(),
                            "dim {dim} delta {delta} index {index} sign {sign}: {played:?}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn pivot_rejects_radii_outside_the_feasible_interval() {
    let params = safety_params(2).unwrap();
    let x = DensityMatrix::basis_state(2, 0);
    let r = params.radius();
    assert!(matches!(
        pivot(&x, &params, r),
        Err(Error::RadiusOutOfRange { .. })
    ));
    assert!(matches!(
        pivot(&x, &params, -0.1),
        Err(Error::RadiusOutOfRange { .. })
    ));
    let wrong_dim = DensityMatrix::basis_state(3, 0);
    assert!(matches!(
        pivot(&wrong_dim, &params, 0.1),
        Err(Error::DimMismatch(_))
    ));
}

#[test]
fn sampling_a_point_spectraplex_fails() {
    let basis = BasisSet::new(1);
    let mut rng = stream_rng(7, 0);
    assert!(matches!(
        basis.sample_direction(&mut rng, false),
        Err(Error::EmptyBasis)
    ));
}

#[test]
fn unsigned_sampling_is_uniform_over_elements_with_fair_signs() {
    let basis = BasisSet::new(2);
    let mut rng = stream_rng(0x5A11, 0);
    let draws = 300_000usize;
    let mut element_counts = [0usize; 3];
    let mut plus = 0usize;
    for _ in 0..draws {
        let dir = basis.sample_direction(&mut rng, false).unwrap();
        element_counts[dir.index] += 1;
        if dir.sign > 0 {
            plus += 1;
        }
        // The signed view really is the sign times the stored element.
        let signed = dir.signed_matrix();
        let expect = basis.element(dir.index).scale(dir.sign as f64);
        assert!(signed.matrix().max_abs_diff(expect.matrix()).unwrap() < 1e-15);
    }
    for count in element_counts {
        let freq = count as f64 / draws as f64;
        assert!((freq - 1.0 / 3.0).abs() < 0.01, "element freq {freq}");
    }
    let plus_freq = plus as f64 / draws as f64;
    assert!((plus_freq - 0.5).abs() < 0.01, "sign freq {plus_freq}");
}

#[test]
fn signed_sampling_is_uniform_over_signed_elements() {
    let basis = BasisSet::new(2);
    let mut rng = stream_rng(0x5A12, 0);
    let draws = 300_000usize;
    let mut counts = [0usize; 6];
    for _ in 0..draws {
        let dir = basis.sample_direction(&mut rng, true).unwrap();
        let slot = dir.index + if dir.sign > 0 { 0 } else { 3 };
        counts[slot] += 1;
    }
    for count in counts {
        let freq = count as f64 / draws as f64;
        assert!((freq - 1.0 / 6.0).abs() < 0.01, "signed freq {freq}");
    }
}
