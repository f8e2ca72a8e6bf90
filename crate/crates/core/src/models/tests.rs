use proptest::prelude::*;

use super::*;
use crate::dilation_data::{extract_candidates, gen_compressed_tuple, gen_diagonal_model_data, verify_pure};
use crate::fixtures;
use crate::linalg::ComplexMatrix;
use crate::random::{random_matrix, seeded};
use rand::Rng as _;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn half() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.5]])
}

fn random_point(rng: &mut crate::random::Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, TAU * rng.random::<f64>())
}

#[test]
fn scalar_half_gives_blaschke_factor() {
    let mut rng = seeded(1);
    for _ in 0..64 {
        let z = random_point(&mut rng, 0.99);
        let s = theta(&half(), z, tol()).unwrap();
        let expected = (z * 2.0 - 1.0) / (-z + 2.0);
        assert!((s.theta[(0, 0)] - expected).norm() <= 1e-12);
        assert!(s.mapping_residual <= 1e-12);
    }
    for k in 0..16 {
        let z = C64::from_polar(1.0, TAU * k as f64 / 16.0);
        assert!((theta(&half(), z, tol()).unwrap().theta[(0, 0)].norm() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn zero_operator_gives_z_identity() {
    let z = C64::new(0.3, -0.4);
    let s = theta(&ComplexMatrix::zeros(2, 2), z, tol()).unwrap();
    assert!(s.theta.max_abs_diff(&ComplexMatrix::identity(2).scale(z)) < 1e-15);
}

#[test]
fn value_at_origin_is_minus_t() {
    let t = fixtures::first_example().tuple();
    let x = t.op(0);
    let s = theta(x, C64::new(0.0, 0.0), tol()).unwrap();
    let d = defects(x, tol()).unwrap();
    let expected = -&(&(&d.row.basis.adjoint() * x) * &d.col.basis);
    assert!(s.theta.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn singular_resolvent_is_reported() {
    let x = ComplexMatrix::diag_real(&[1.0, 0.5]);
    let err = theta(&x, C64::new(1.0, 0.0), tol()).unwrap_err();
    assert!(matches!(err, Error::SingularResolvent { .. }));
    match delta_grid(&ComplexMatrix::diag(&[C64::from_polar(1.0, 0.3), C64::new(0.2, 0.0)]), 8, tol()) {
        Err(Error::SingularResolvent { re, im }) => {
            assert!((C64::new(re, im) - C64::from_polar(1.0, 0.3)).norm() < 1e-12)
        }
        other => panic!("expected SingularResolvent, got {other:?}"),
    }
}

#[test]
fn inner_functions_have_zero_delta() {
    for x in [half(), ComplexMatrix::zeros(2, 2), fixtures::exmp_06().tuple().op(0).clone()] {
        let g = delta_grid(&x, DEFAULT_GRID_SIZE, tol()).unwrap();
        assert_eq!(g.points.len(), DEFAULT_GRID_SIZE);
        assert_eq!(g.max_rank, 0);
        for p in &g.points {
            assert!(op_norm(&p.delta) < 1e-6);
        }
    }
}

#[test]
fn truncation_degree_selection() {
    assert_eq!(auto_truncation(&ComplexMatrix::zeros(2, 2)).unwrap().0, 1);
    assert_eq!(auto_truncation(fixtures::first_example().tuple().op(0)).unwrap().0, 2);
    let (n, achieved) = auto_truncation(&half()).unwrap();
    assert_eq!(n, 34);
    assert!((achieved - 0.5f64.powi(34)).abs() < 1e-20);
    assert!(matches!(
        auto_truncation(&ComplexMatrix::identity(2)),
        Err(Error::TruncationTooLarge { max: 256, .. })
    ));
}

#[test]
fn zero_operator_model_space_is_constants() {
    let ms = model_space(&ComplexMatrix::zeros(2, 2), 2, tol()).unwrap();
    assert_eq!(ms.ambient_dim, 4);
    assert!(ms.projector.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0])) < 1e-15);
    assert_eq!(ms.dim(), 2);
    assert!(ms.identity_residual < 1e-15);
}

#[test]
fn scalar_model_space_is_one_dimensional() {
    let ms = model_space(&half(), 40, tol()).unwrap();
    assert_eq!(ms.dim(), 1);
    assert!(ms.identity_residual <= ms.bound(tol()));
}

#[test]
fn non_c0_is_rejected() {
    let x = ComplexMatrix::diag_real(&[1.0, 0.0]);
    assert!(matches!(model_space(&x, 4, tol()), Err(Error::NotC0 { .. })));
}

#[test]
fn first_example_model_is_exact() {
    let t = fixtures::first_example().tuple();
    let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol()).unwrap();
    assert!(crate::dilation_data::overall_pass(&verify_pure(&t, &d, tol()).unwrap()));
    let r = verify_model(&t, &d, 3, tol()).unwrap();
    assert!(r.passes && r.max_residual < 1e-12, "{:#?}", r.reports);
}

#[test]
fn model_needs_adjoint_space() {
    let t = fixtures::first_example().tuple();
    let d = extract_candidates(&t, Space::DefectOfT, tol()).unwrap();
    assert!(matches!(verify_model(&t, &d, 3, tol()), Err(Error::WrongSpace { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_is_contractive(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, dim, dim);
        let x = a.scale_real(0.95 / op_norm(&a));
        for _ in 0..8 {
            let z = random_point(&mut rng, 0.99);
            let s = theta(&x, z, tol()).unwrap();
            prop_assert!(op_norm(&s.theta) <= 1.0 + 1e-10);
            prop_assert!(s.mapping_residual <= 1e-9);
        }
    }

    #[test]
    fn taylor_series_matches_samples(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, dim, dim);
        let x = a.scale_real(0.9 / op_norm(&a));
        let n = 60;
        let coeffs = theta_taylor(&x, n, tol()).unwrap();
        let z = random_point(&mut rng, 0.7);
        let mut sum = ComplexMatrix::zeros(coeffs[0].nrows(), coeffs[0].ncols());
        let mut power = C64::new(1.0, 0.0);
        for c in &coeffs {
            sum = &sum + &c.scale(power);
            power *= z;
        }
        let bound = z.norm().powi(n as i32) / (1.0 - z.norm()) + 1e-12;
        prop_assert!(diff_norm(&sum, &theta(&x, z, tol()).unwrap().theta) <= bound);
    }

    #[test]
    fn generated_tuples_match_model(rank in 1usize..=3, n in 1usize..=3, m in 1usize..=3, seed in any::<u64>()) {
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        let t = gen_compressed_tuple(&data, m, tol()).unwrap();
        let ms = model_space(t.product(), m + 1, tol()).unwrap();
        prop_assert_eq!(ms.dim(), m * rank);
        let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol()).unwrap();
        let r = verify_model(&t, &d, m + 1, tol()).unwrap();
        prop_assert!(r.passes && r.max_residual < 1e-9, "{:#?}", r.reports);
    }
}
