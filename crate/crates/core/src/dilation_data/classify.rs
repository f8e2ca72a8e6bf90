use serde::Serialize;

use super::{
    complete_candidates, extract_candidates, overall_pass, verify_coromain, verify_main, verify_pure, Completion,
    ConditionReport, DilationData, Membership, Space,
};
use crate::error::Result;
use crate::linalg::Tolerance;
use crate::tuples::{
    brehmer_check, c0_diagnostic, first_order_szego, szego_check, BrehmerReport, C0Report, ContractionTuple,
    PositivityReport, MAX_SUBSET_OPERATORS,
};

/// Membership in the class with a dilation on `H²(D_{T*})`.
#[derive(Debug, Clone, Serialize)]
pub struct PureClassification {
    pub passes: bool,
    pub data: DilationData,
    pub reports: Vec<ConditionReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    /// Conditions (1)-(5) hold for the extracted data.
    pub in_s_n: bool,
    /// Some data satisfy conditions (1)-(4).
    pub in_u_n: bool,
    pub u_membership: Membership,
    pub extracted: DilationData,
    pub main_reports: Vec<ConditionReport>,
    pub coromain_reports: Vec<ConditionReport>,
    /// Closed-form completion, run when the extracted data fail (1)-(4).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completion: Option<Completion>,
    /// Present when the product is C·0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pure: Option<PureClassification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub szego: Option<PositivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub szego_first_order: Option<PositivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brehmer: Option<BrehmerReport>,
    pub c0: C0Report,
}

/// Classifies `t` against both condition sets and the positivity classes.
///
/// Positivity reports are omitted beyond the subset enumeration limit.
pub fn classify(t: &ContractionTuple, tol: Tolerance) -> Result<Classification> {
    let extracted = extract_candidates(t, Space::DefectOfT, tol)?;
    let main_reports = verify_main(t, &extracted, tol)?;
    let coromain_reports = verify_coromain(t, &extracted, tol)?;
    let in_s_n = overall_pass(&main_reports);
    let (u_membership, completion) = if overall_pass(&coromain_reports) {
        (Membership::Member, None)
    } else {
        let c = complete_candidates(t, tol)?;
        (c.membership, Some(c))
    };

    let c0 = c0_diagnostic(t.product(), t.dim().max(1), tol)?;
    let pure = if c0.is_c0 {
        let data = extract_candidates(t, Space::DefectOfTAdjoint, tol)?;
        let reports = verify_pure(t, &data, tol)?;
        Some(PureClassification {
            passes: overall_pass(&reports),
            data,
            reports,
        })
    } else {
        None
    };

    let all: Vec<usize> = (0..t.n()).collect();
    let enumerable = t.n() <= MAX_SUBSET_OPERATORS;
    Ok(Classification {
        in_s_n,
        in_u_n: u_membership == Membership::Member,
        u_membership,
        extracted,
        main_reports,
        coromain_reports,
        completion,
        pure,
        szego: enumerable.then(|| szego_check(t, &all)).transpose()?,
        szego_first_order: enumerable.then(|| first_order_szego(t, &all)).transpose()?,
        brehmer: enumerable.then(|| brehmer_check(t)).transpose()?,
        c0,
    })
}
