//! Closed-form search for data satisfying conditions (1)-(4).
//!
//! With `Dh = B* D_T`, condition (4) forces `U_i P_i U_i* = Q_i` where
//! `Q_i = (Dh*)⁺ D_{T_i}² Dh⁺`, and condition (1) becomes `U_i X_i = R_i`
//! with `X_i = Dh T_i` and `R_i = (I - Q_i) Dh + Q_i Dh T`. A unitary
//! solving the latter exists iff `X_i* X_i = R_i* R_i`. When these forced
//! quantities are consistent, the unitary is fixed on `ran R_i` and chosen
//! closest to the identity on the complement, and (1)-(4) are verified.

use serde::Serialize;

use super::{overall_pass, verify_coromain, ConditionReport, DilationData, Space};
use crate::error::Result;
use crate::linalg::{complement_basis, is_projection, pinv, range_basis, svd, ComplexMatrix, Tolerance};
use crate::tuples::{defect, ContractionTuple, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    /// Data passing (1)-(4) were constructed.
    Member,
    /// A forced identity is violated, so no data can pass (1)-(4).
    NonMember,
    /// Forced identities hold but the constructed data fail verification.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct Completion {
    pub membership: Membership,
    /// Forced-identity checks followed, when reached, by verification of
    /// the constructed data.
    pub reports: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DilationData>,
}

pub fn complete_candidates(t: &ContractionTuple, tol: Tolerance) -> Result<Completion> {
    let d = defect(t.product(), Side::Column, tol)?;
    let r = d.rank();
    let dh = &d.basis.adjoint() * &d.operator;
    let dh_pinv = pinv(&dh, tol);
    let dh_adj_pinv = pinv(&dh.adjoint(), tol);
    let id_h = ComplexMatrix::identity(t.dim());
    let id_r = ComplexMatrix::identity(r);
    let th = &dh * t.product();

    let mut reports = Vec::new();
    let mut forced = Vec::with_capacity(t.n());
    for i in 0..t.n() {
        let ti = t.op(i);
        let d_ti_sq = &id_h - &(&ti.adjoint() * ti);
        let q = &(&dh_adj_pinv * &d_ti_sq) * &dh_pinv;
        let q = q.hermitian_part();
        reports.push(ConditionReport::identity(
            "forced-4-range",
            vec![i],
            &(&dh.adjoint() * &q) * &dh,
            d_ti_sq,
            tol,
        ));
        let proj = is_projection(&q, tol)?;
        reports.push(ConditionReport::scalar("forced-4-projection", vec![i], proj.residual, tol));
        let x = &dh * ti;
        let rr = &(&(&id_r - &q) * &dh) + &(&q * &th);
        reports.push(ConditionReport::identity(
            "forced-1-gram",
            vec![i],
            &x.adjoint() * &x,
            &rr.adjoint() * &rr,
            tol,
        ));
        forced.push((q, x, rr));
    }
    if !overall_pass(&reports) {
        return Ok(Completion {
            membership: Membership::NonMember,
            reports,
            data: None,
        });
    }

    let mut us = Vec::with_capacity(t.n());
    let mut ps = Vec::with_capacity(t.n());
    for (q, x, rr) in &forced {
        let Some(u_adj) = unitary_solution(x, rr, tol) else {
            return Ok(Completion {
                membership: Membership::Undetermined,
                reports,
                data: None,
            });
        };
        let u = u_adj.adjoint();
        ps.push(&(&u_adj * q) * &u);
        us.push(u);
    }
    let data = DilationData::from_unitaries(Space::DefectOfT, d.operator, d.basis, us, ps);
    reports.extend(verify_coromain(t, &data, tol)?);
    let membership = if overall_pass(&reports) {
        Membership::Member
    } else {
        Membership::Undetermined
    };
    Ok(Completion {
        membership,
        reports,
        data: Some(data),
    })
}

/// Unitary `W` with `W R = X`, given `X* X = R* R`: `X R⁺` on `ran R` and
/// the polar factor of the complement overlap elsewhere.
fn unitary_solution(x: &ComplexMatrix, rr: &ComplexMatrix, tol: Tolerance) -> Option<ComplexMatrix> {
    let main = x * &pinv(rr, tol);
    let br = complement_basis(&range_basis(rr, tol), tol);
    let bx = complement_basis(&range_basis(x, tol), tol);
    if br.ncols() != bx.ncols() {
        return None;
    }
    if br.ncols() == 0 {
        return Some(main);
    }
    let s = svd(&(&bx.adjoint() * &br));
    let polar = ComplexMatrix::wrap(&s.u * &s.v_t);
    Some(&main + &(&(&bx * &polar) * &br.adjoint()))
}
