use proptest::prelude::*;

use super::*;
use crate::dilation_data::{
    extract_candidates, gen_compressed_tuple, gen_diagonal_model_data, DilationData, Space,
};
use crate::fixtures;
use crate::linalg::ComplexMatrix;
use crate::random::{random_matrix, random_unitary, seeded};

fn exact() -> Tolerance {
    Tolerance::exact()
}

fn stated(fx: &fixtures::Fixture) -> DilationData {
    let s = fx.stated.clone().unwrap();
    DilationData::from_full_space(&fx.tuple(), Space::DefectOfT, s.u, s.p, fx.tol).unwrap()
}

fn random_schaffer(seed: u64, dim: usize, rank: usize) -> SchafferOperator {
    let mut rng = seeded(seed);
    SchafferOperator::new(
        random_matrix(&mut rng, dim, dim),
        random_matrix(&mut rng, rank, dim),
        random_matrix(&mut rng, rank, rank),
        random_matrix(&mut rng, rank, rank),
    )
    .unwrap()
}

fn report<'a>(r: &'a DilationReport, id: &str) -> &'a ConditionReport {
    r.reports.iter().find(|c| c.condition_id == id).unwrap()
}

#[test]
fn schaffer_dilations_of_main_fixtures() {
    for fx in [fixtures::first_example(), fixtures::exmp_05(), fixtures::eg2()] {
        let t = fx.tuple();
        let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
        let dil = build_schaffer(&t, &d, exact()).unwrap();
        let r = verify_isometric_dilation(&t, &dil, DilationCheck::default(), exact()).unwrap();
        assert!(r.passes, "{} {:#?}", fx.id, r.reports);
    }
}

#[test]
fn eg1_dilates_but_product_is_not_minimal() {
    let fx = fixtures::eg1();
    let t = fx.tuple();
    let dil = build_schaffer(&t, &stated(&fx), exact()).unwrap();
    let check = DilationCheck {
        check_product: false,
        ..DilationCheck::default()
    };
    assert!(verify_isometric_dilation(&t, &dil, check, exact()).unwrap().passes);
    let full = verify_isometric_dilation(&t, &dil, DilationCheck::default(), exact()).unwrap();
    assert!(!report(&full, "product-structure").passes);
    assert!(!report(&full, "product-dilation").passes);
    assert!(report(&full, "isometry").passes);
}

#[test]
fn failing_data_is_rejected() {
    let t = fixtures::exmp_06().tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    match build_schaffer(&t, &d, exact()) {
        Err(Error::ConditionsNotMet(r)) => assert!(!r.passes),
        other => panic!("expected ConditionsNotMet, got {other:?}"),
    }
    let pure = extract_candidates(&t, Space::DefectOfTAdjoint, exact()).unwrap();
    assert!(matches!(build_schaffer(&t, &pure, exact()), Err(Error::WrongSpace { .. })));
}

#[test]
fn zero_degree_is_rejected() {
    let fx = fixtures::eg2();
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    let dil = build_schaffer(&t, &d, exact()).unwrap();
    let check = DilationCheck {
        max_degree: 0,
        ..DilationCheck::default()
    };
    assert!(verify_isometric_dilation(&t, &dil, check, exact()).is_err());
}

#[test]
fn monomial_walk_visits_each_multi_index_once() {
    let mut seen = Vec::new();
    for_each_monomial(3, 2, (), &mut |_, _| (), &mut |k, _| seen.push(k.to_vec()));
    // 1 + 3 + 6 multi-indices of total degree at most 2.
    assert_eq!(seen.len(), 10);
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 10);
}

#[test]
fn monomial_walk_matches_tuple_monomials() {
    let t = fixtures::exmp_05().tuple();
    let start = ComplexMatrix::identity(2);
    let mut worst = 0.0f64;
    for_each_monomial(
        3,
        4,
        start,
        &mut |m, j| t.op(j) * m,
        &mut |k, m| worst = worst.max(m.max_abs_diff(&t.monomial(k))),
    );
    assert!(worst < 1e-15);
}

#[test]
fn psi_symbols_compose() {
    // (P1 + z-part) composition: P1 orthogonal to U1* P2 U1 gives the
    // symbol of (U2 U1, P1 + U1* P2 U1).
    let mut rng = seeded(11);
    let u1 = random_unitary(&mut rng, 3);
    let u2 = random_unitary(&mut rng, 3);
    let p1 = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0]);
    let q = ComplexMatrix::diag_real(&[0.0, 1.0, 0.0]);
    let p2 = &(&u1 * &q) * &u1.adjoint();
    let id = ComplexMatrix::identity(3);
    let psi = |u: &ComplexMatrix, p: &ComplexMatrix| {
        MatrixPolynomial::new(vec![&(&id - p) * &u.adjoint(), p * &u.adjoint()])
    };
    let composed = psi(&u1, &p1).mul(&psi(&u2, &p2));
    let expected = psi(&(&u2 * &u1), &(&p1 + &q));
    assert!(composed.max_coeff_diff(&expected) < 1e-12);
}

#[test]
fn pure_dilation_of_bdf_pair() {
    let t = fixtures::bdf_pair().tuple();
    let tol = Tolerance::default();
    let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol).unwrap();
    let ms = build_pure_dilation(&t, &d, tol).unwrap();
    assert_eq!(ms.len(), 2);
    // T is nilpotent of order 2, so the truncation at 2 is exact.
    let r = verify_intertwining(&t, &d, &ms, 2, 16, 3, tol).unwrap();
    assert!(r.passes && r.max_residual < 1e-12, "{:#?}", r.reports);

    let mut rng = seeded(5);
    let seq: Vec<_> = (0..3).map(|_| crate::random::random_vector(&mut rng, d.rank())).collect();
    for m in &ms {
        let image = m.apply(&seq);
        assert!((sequence_norm(&image) - sequence_norm(&seq)).abs() < 1e-12);
        let back = m.apply_adjoint_truncated(&image);
        assert!(sequence_distance(&back[..3], &seq) < 1e-12);
    }
}

fn sequence_norm(s: &[ComplexVector]) -> f64 {
    s.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

#[test]
fn pure_dilation_needs_adjoint_space() {
    let t = fixtures::exmp_05().tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    assert!(matches!(build_pure_dilation(&t, &d, exact()), Err(Error::WrongSpace { .. })));
}

#[test]
fn embedding_is_isometric_up_to_tail() {
    let t = fixtures::bdf_pair().tuple();
    let mut rng = seeded(2);
    let h = random_unit_vector(&mut rng, t.dim());
    for n in 0..4 {
        let e = embed_w(t.product(), &h, n, exact()).unwrap();
        let total = sequence_norm(&e.coefficients).powi(2) + e.tail_bound.powi(2);
        assert!((total - 1.0).abs() < 1e-12);
    }
    let unitary = ComplexMatrix::identity(2);
    let e = embed_w(&unitary, &random_unit_vector(&mut rng, 2), 3, exact()).unwrap();
    assert!(e.degenerate);
}

#[test]
fn coisometric_extension_restricts_to_adjoint() {
    let tol = Tolerance::default();
    let data = gen_diagonal_model_data(2, 3, 21).unwrap();
    let t = gen_compressed_tuple(&data, 3, tol).unwrap();
    let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol).unwrap();
    let zs = build_coisometric_extension(&t, &d, tol).unwrap();
    let mut rng = seeded(9);
    for (i, z) in zs.iter().enumerate() {
        let h = random_unit_vector(&mut rng, t.dim());
        let x = BlockSupportedVector::from_head(h.clone(), d.rank());
        let image = z.apply_adjoint(&x).unwrap();
        assert!((image.head() - t.op(i).adjoint().apply(&h)).norm() < 1e-12);
        // Z Z* = I.
        let y = BlockSupportedVector::random_unit(&mut rng, t.dim(), d.rank(), 3);
        let back = z.apply(&z.apply_adjoint(&y).unwrap()).unwrap();
        assert!((&back - &y).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_action_matches_dense_truncation(seed in any::<u64>(), dim in 1usize..=3, rank in 0usize..=3, tail in 0usize..=3) {
        let v = random_schaffer(seed, dim, rank);
        let mut rng = seeded(seed ^ 1);
        let x = BlockSupportedVector::random(&mut rng, dim, rank, tail);
        let blocks = tail + 1;
        let dense = v.dense_truncation(blocks).apply(&x.to_dense(blocks));
        prop_assert!((v.apply(&x).unwrap().to_dense(blocks) - &dense).norm() < 1e-12);
        let dense_adj = v.dense_truncation(blocks).adjoint().apply(&x.to_dense(blocks));
        prop_assert!((v.apply_adjoint(&x).unwrap().to_dense(blocks) - &dense_adj).norm() < 1e-12);
    }

    #[test]
    fn adjoint_is_formal_adjoint(seed in any::<u64>(), dim in 1usize..=3, rank in 0usize..=3) {
        let v = random_schaffer(seed, dim, rank);
        let mut rng = seeded(seed ^ 2);
        let x = BlockSupportedVector::random(&mut rng, dim, rank, 3);
        let y = BlockSupportedVector::random(&mut rng, dim, rank, 2);
        let lhs = v.apply(&x).unwrap().inner(&y);
        let rhs = x.inner(&v.apply_adjoint(&y).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn structured_composition_matches_sequential_action(seed in any::<u64>(), dim in 1usize..=3, rank in 1usize..=3) {
        let a = random_schaffer(seed, dim, rank);
        let b = random_schaffer(seed.wrapping_add(1), dim, rank);
        let c = random_schaffer(seed.wrapping_add(2), dim, rank);
        let composed = a.to_structured().compose(&b.to_structured()).compose(&c.to_structured());
        let mut rng = seeded(seed ^ 3);
        let x = BlockSupportedVector::random(&mut rng, dim, rank, 2);
        let seq = a.apply(&b.apply(&c.apply(&x).unwrap()).unwrap()).unwrap();
        let diff = (&composed.apply(&x) - &seq).norm();
        prop_assert!(diff < 1e-10 * (1.0 + seq.norm()));
    }

    #[test]
    fn adjoint_of_generated_tuple_dilates(rank in 1usize..=3, n in 1usize..=3, m in 1usize..=3, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        let t = gen_compressed_tuple(&data, m, tol).unwrap().adjoint();
        let d = extract_candidates(&t, Space::DefectOfT, tol).unwrap();
        let dil = build_schaffer(&t, &d, tol).unwrap();
        let check = DilationCheck { max_degree: 3, trials: 8, seed, check_product: true };
        let r = verify_isometric_dilation(&t, &dil, check, tol).unwrap();
        prop_assert!(r.passes, "{:#?}", r.reports);
    }

    #[test]
    fn generated_tuples_intertwine(rank in 1usize..=3, n in 1usize..=3, m in 1usize..=3, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        let t = gen_compressed_tuple(&data, m, tol).unwrap();
        let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol).unwrap();
        let ms = build_pure_dilation(&t, &d, tol).unwrap();
        let r = verify_intertwining(&t, &d, &ms, m + 1, 8, seed, tol).unwrap();
        prop_assert!(r.passes && r.max_residual < 1e-9, "{:#?}", r.reports);
    }
}

