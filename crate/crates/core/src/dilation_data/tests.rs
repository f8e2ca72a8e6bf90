use proptest::prelude::*;

use super::*;
use crate::fixtures::{self, Fixture};
use crate::linalg::{op_norm, ComplexMatrix};
use crate::random::{random_matrix, seeded};
use crate::tuples::make_tuple;

fn exact() -> Tolerance {
    Tolerance::exact()
}

fn report<'a>(reports: &'a [ConditionReport], id: &str, indices: &[usize]) -> &'a ConditionReport {
    reports
        .iter()
        .find(|r| r.condition_id == id && r.indices == indices)
        .unwrap_or_else(|| panic!("no report {id} {indices:?}"))
}

fn stated(fx: &Fixture) -> DilationData {
    let s = fx.stated.clone().expect("fixture has stated data");
    DilationData::from_full_space(&fx.tuple(), Space::DefectOfT, s.u, s.p, fx.tol).unwrap()
}

/// Extracted data agree with the stated data once both are lifted to `H`.
fn assert_matches_stated(fx: &Fixture) {
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, fx.tol).unwrap();
    let s = fx.stated.as_ref().unwrap();
    for i in 0..t.n() {
        assert!(d.lift(&d.u[i]).max_abs_diff(&s.u[i]) <= 1e-12, "{} U_{i}", fx.id);
        assert!(d.lift(&d.p[i]).max_abs_diff(&s.p[i]) <= 1e-12, "{} P_{i}", fx.id);
    }
}

#[test]
fn first_example_extraction_and_conditions() {
    let fx = fixtures::first_example();
    assert_matches_stated(&fx);
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    let reports = verify_main(&t, &d, exact()).unwrap();
    assert!(overall_pass(&reports), "{reports:#?}");
    for k in 1..=5 {
        assert!(reports.iter().any(|r| r.condition_id == format!("main-{k}")));
    }
    let up = d.lift(&(&d.u[0] * &d.p[1]));
    let pu = d.lift(&(&d.p[1] * &d.u[0]));
    assert!(up.max_abs_diff(&ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])) < 1e-12);
    assert!(pu.max_abs_diff(&ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]])) < 1e-12);
}

#[test]
fn exmp_05_extraction_matches_stated_data() {
    let fx = fixtures::exmp_05();
    assert_matches_stated(&fx);
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    let reports = verify_main(&t, &d, exact()).unwrap();
    assert!(overall_pass(&reports));
    assert!(max_residual(&reports) <= 1e-12);
}

#[test]
fn exmp_06_defect_matching_fails() {
    let fx = fixtures::exmp_06();
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    let reports = verify_main(&t, &d, exact()).unwrap();
    let r = report(&reports, "main-4", &[0]);
    assert!(!r.passes);
    let lhs = r.lhs.as_ref().unwrap();
    let rhs = r.rhs.as_ref().unwrap();
    assert!(lhs.max_abs_diff(&ComplexMatrix::diag_real(&[0.0, 0.0, 1.0 / 3.0])) <= 1e-12);
    assert!(rhs.max_abs_diff(&ComplexMatrix::diag_real(&[8.0 / 9.0, 26.0 / 27.0, 1.0])) <= 1e-12);
    assert!((r.residual - 26.0 / 27.0).abs() <= 1e-12);
    assert!(r.witness.is_some());
}

#[test]
fn eg1_dilates_without_minimal_product() {
    let fx = fixtures::eg1();
    let t = fx.tuple();
    let reports = verify_coromain(&t, &stated(&fx), exact()).unwrap();
    assert!(overall_pass(&reports), "{reports:#?}");

    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    assert!(d.lift(&d.u[0]).max_abs_diff(&t.op(0).adjoint()) < 1e-12);
    let main = verify_main(&t, &d, exact()).unwrap();
    assert!(report(&main, "unitary", &[0]).residual >= 0.5);

    let c = classify(&t, exact()).unwrap();
    assert!(c.in_u_n && !c.in_s_n);
    let data = c.completion.unwrap().data.unwrap();
    for i in 0..3 {
        assert!(data.lift(&data.u[i]).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        let p = &ComplexMatrix::identity(3) - t.op(i);
        assert!(data.lift(&data.p[i]).max_abs_diff(&p) < 1e-12);
    }
}

#[test]
fn eg2_satisfies_all_conditions() {
    let fx = fixtures::eg2();
    assert_matches_stated(&fx);
    let t = fx.tuple();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    assert!(overall_pass(&verify_main(&t, &d, exact()).unwrap()));
    assert!(overall_pass(&verify_main(&t, &stated(&fx), exact()).unwrap()));
}

#[test]
fn eg3_is_outside_both_classes() {
    let fx = fixtures::eg3();
    let t = fx.tuple();
    let c = classify(&t, exact()).unwrap();
    assert!(!c.in_u_n && !c.in_s_n);
    assert_eq!(c.u_membership, Membership::NonMember);
    assert!(report(&c.coromain_reports, "unitary", &[0]).residual >= 1.0 - 1e-12);
    // The forced U_1 sends e_2 to a vector of norm 1/3.
    let u1 = c.extracted.lift(&c.extracted.u[0]);
    let image = u1.apply(&nalgebra::DVector::from_vec(vec![ZERO, ONE, ZERO]));
    assert!((image.norm() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn last_example_fails_main() {
    let c = classify(&fixtures::last_example().tuple(), exact()).unwrap();
    assert!(!c.in_s_n && !c.in_u_n);
}

#[test]
fn single_operator_data_is_identity() {
    let mut rng = seeded(21);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 3, 3);
        let t = make_tuple(vec![a.scale_real(0.9 / op_norm(&a))], Tolerance::default()).unwrap();
        let d = extract_candidates(&t, Space::DefectOfT, Tolerance::default()).unwrap();
        let id = ComplexMatrix::identity(d.rank());
        assert!(d.u[0].max_abs_diff(&id) < 1e-9);
        assert!(d.p[0].max_abs_diff(&id) < 1e-9);
        let forced = DilationData::from_unitaries(Space::DefectOfT, d.defect.clone(), d.basis.clone(), vec![id.clone()], vec![id]);
        assert!(overall_pass(&verify_main(&t, &forced, Tolerance::default()).unwrap()));
    }
}

#[test]
fn zero_tuple_forces_projections_to_identity() {
    for n in 2..=5 {
        let t = make_tuple(vec![ComplexMatrix::zeros(2, 2); n], exact()).unwrap();
        let c = complete_candidates(&t, exact()).unwrap();
        assert_eq!(c.membership, Membership::Member);
        let data = c.data.unwrap();
        let reports = verify_main(&t, &data, exact()).unwrap();
        let r = report(&reports, "main-5", &[]);
        assert!((r.residual - (n as f64 - 1.0)).abs() < 1e-12);
        let extracted = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
        assert!(!report(&verify_main(&t, &extracted, exact()).unwrap(), "main-5", &[]).passes);
    }
}

#[test]
fn unitary_tuple_has_empty_defect() {
    let s = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
    let t = make_tuple(vec![s.clone(), s], exact()).unwrap();
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    assert_eq!(d.rank(), 0);
    assert!(overall_pass(&verify_coromain(&t, &d, exact()).unwrap()));
    let p = extract_candidates(&t, Space::DefectOfTAdjoint, exact()).unwrap();
    assert!(overall_pass(&verify_pure(&t, &p, exact()).unwrap()));
}

#[test]
fn wrong_space_is_rejected() {
    let t = fixtures::first_example().tuple();
    let d = extract_candidates(&t, Space::DefectOfTAdjoint, exact()).unwrap();
    assert!(matches!(verify_main(&t, &d, exact()), Err(Error::WrongSpace { .. })));
    let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
    assert!(matches!(verify_pure(&t, &d, exact()), Err(Error::WrongSpace { .. })));
}

#[test]
fn pure_extraction_on_exmp_05() {
    let t = fixtures::exmp_05().tuple();
    let d = extract_candidates(&t, Space::DefectOfTAdjoint, exact()).unwrap();
    let reports = verify_pure(&t, &d, exact()).unwrap();
    assert!(overall_pass(&reports), "{reports:#?}");
}

#[test]
fn impnote_holds_for_valid_data() {
    for fx in [fixtures::first_example(), fixtures::exmp_05(), fixtures::eg2()] {
        let t = fx.tuple();
        let d = extract_candidates(&t, Space::DefectOfT, exact()).unwrap();
        let reports = verify_main(&t, &d, exact()).unwrap();
        for r in reports.iter().filter(|r| r.condition_id == "note-impnote") {
            assert!(r.informational && r.passes, "{} {r:?}", fx.id);
        }
    }
}

#[test]
fn bdf_examples() {
    let tol = Tolerance::default();
    let d = gen_diagonal_model_data(2, 2, 4).unwrap();
    assert!(overall_pass(&verify_bdf(&d.u, &d.p, tol).unwrap()));

    let pair = fixtures::bdf_pair_data();
    assert!(overall_pass(&verify_bdf(&pair.u, &pair.p, tol).unwrap()));

    let id = ComplexMatrix::identity(2);
    let reports = verify_bdf(&[id.clone(), id.clone(), id.clone()], &[id.clone(), id.clone(), id], tol).unwrap();
    let r = report(&reports, "bdf-4", &[]);
    assert!(!r.passes && (r.residual - 2.0).abs() < 1e-12);
}

#[test]
fn diagonal_generator_small_cases() {
    let d = gen_diagonal_model_data(3, 1, 0).unwrap();
    assert!(d.u[0].max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    assert!(d.p[0].max_abs_diff(&ComplexMatrix::identity(3)) == 0.0);
    let d = gen_diagonal_model_data(1, 3, 8).unwrap();
    let prod = d.u[0][(0, 0)] * d.u[1][(0, 0)] * d.u[2][(0, 0)];
    assert!((prod - ONE).norm() < 1e-15);
    assert_eq!(d.p.iter().filter(|p| p[(0, 0)] == ONE).count(), 1);
}

#[test]
fn compressed_tuple_small_cases() {
    let one = ComplexMatrix::identity(1);
    let data = ModelData {
        u: vec![one.clone(), one.clone()],
        p: vec![one.clone(), ComplexMatrix::zeros(1, 1)],
    };
    let t = gen_compressed_tuple(&data, 2, exact()).unwrap();
    assert_eq!(t.op(0), &ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]));
    assert_eq!(t.op(1), &ComplexMatrix::identity(2));

    let g = gen_diagonal_model_data(2, 3, 5).unwrap();
    let t = gen_compressed_tuple(&g, 1, Tolerance::default()).unwrap();
    let id = ComplexMatrix::identity(2);
    for i in 0..3 {
        assert!(t.op(i).max_abs_diff(&(&g.u[i] * &(&id - &g.p[i]))) < 1e-15);
    }

    let bad = ModelData {
        u: vec![one.clone(), one.clone()],
        p: vec![one.clone(), one],
    };
    assert!(matches!(gen_compressed_tuple(&bad, 2, exact()), Err(Error::InvalidModelData { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_tuples_round_trip(rank in 1usize..=3, n in 1usize..=4, m in 1usize..=4, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        let t = gen_compressed_tuple(&data, m, tol).unwrap();
        let c0 = crate::tuples::c0_diagnostic(t.product(), 1, tol).unwrap();
        prop_assert_eq!(c0.spectral_radius, 0.0);
        let d = extract_candidates(&t, Space::DefectOfTAdjoint, tol).unwrap();
        let reports = verify_pure(&t, &d, tol).unwrap();
        prop_assert!(overall_pass(&reports));
        prop_assert!(max_residual(&reports) <= 1e-8);
        // The generating data reappear on the first coefficient block.
        let b0 = ComplexMatrix::wrap(nalgebra::DMatrix::identity(m * rank, rank));
        for i in 0..n {
            let u = &(&b0.adjoint() * &d.lift(&d.u[i])) * &b0;
            let p = &(&b0.adjoint() * &d.lift(&d.p[i])) * &b0;
            prop_assert!(u.max_abs_diff(&data.u[i]) < 1e-9);
            prop_assert!(p.max_abs_diff(&data.p[i]) < 1e-9);
        }
    }

    #[test]
    fn adjoint_of_generated_tuple_satisfies_main(rank in 1usize..=3, n in 1usize..=4, m in 1usize..=4, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        let t = gen_compressed_tuple(&data, m, tol).unwrap().adjoint();
        let d = extract_candidates(&t, Space::DefectOfT, tol).unwrap();
        let main = verify_main(&t, &d, tol).unwrap();
        prop_assert!(overall_pass(&main));
        prop_assert!(overall_pass(&verify_coromain(&t, &d, tol).unwrap()));
    }

    #[test]
    fn bdf_telescoping_terms_are_orthogonal(rank in 1usize..=4, n in 1usize..=5, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let data = gen_diagonal_model_data(rank, n, seed).unwrap();
        prop_assert!(overall_pass(&verify_bdf(&data.u, &data.p, tol).unwrap()));
        let mut w = ComplexMatrix::identity(rank);
        let mut terms = Vec::new();
        for (u, p) in data.u.iter().zip(&data.p) {
            terms.push(&(&w.adjoint() * p) * &w);
            w = u * &w;
        }
        for a in 0..n {
            for b in a + 1..n {
                prop_assert!(op_norm(&(&terms[a] * &terms[b])) <= tol.atol());
            }
        }
    }

    #[test]
    fn main_pass_implies_coromain_pass(seed in any::<u64>(), scale in 0.1f64..1.0) {
        let tol = Tolerance::default();
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, 2, 2);
        let a = a.scale_real(scale / op_norm(&a));
        let t = make_tuple(vec![a.clone(), a.pow(2)], tol).unwrap();
        let d = extract_candidates(&t, Space::DefectOfT, tol).unwrap();
        if overall_pass(&verify_main(&t, &d, tol).unwrap()) {
            prop_assert!(overall_pass(&verify_coromain(&t, &d, tol).unwrap()));
        }
    }
}

use crate::linalg::{ONE, ZERO};
