//! Candidate dilation data `(U_i, P_i)` on a defect space: extraction from a
//! tuple and verification of every condition set.
//!
//! Data are carried in factor form as well: `F_i = P_i^⊥ U_i*` and
//! `F_i' = U_i P_i`, so `U_i = F_i* + F_i'` and `P_i = F_i'* F_i'`. The
//! conditions are evaluated on the factors, which is how they arise from
//! the block structure of the dilation.

mod classify;
mod complete;
mod generate;

pub use classify::{classify, Classification, PureClassification};
pub use complete::{complete_candidates, Completion, Membership};
pub use generate::{gen_compressed_tuple, gen_diagonal_model_data, ModelData};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    diff_norm, is_projection, is_unitary, min_eig_hermitian, pinv, top_right_singular_vector,
    ComplexMatrix, Tolerance, C64,
};
use crate::tuples::{c0_diagnostic, defect, ContractionTuple, Side};

/// The defect space the data act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    /// `D_T`, used by the Schäffer-type construction.
    DefectOfT,
    /// `D_{T*}`, used by the Hardy-space construction and the co-isometric
    /// extension.
    DefectOfTAdjoint,
}

impl Space {
    pub fn label(self) -> &'static str {
        match self {
            Space::DefectOfT => "defect-of-T",
            Space::DefectOfTAdjoint => "defect-of-T-adjoint",
        }
    }

    /// The tuple whose column defect is this space: `t` itself or its
    /// adjoint tuple.
    pub fn frame(self, t: &ContractionTuple) -> ContractionTuple {
        match self {
            Space::DefectOfT => t.clone(),
            Space::DefectOfTAdjoint => t.adjoint(),
        }
    }
}

/// Condition families that can be checked against dilation data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conditions {
    Main,
    Coromain,
    Pure,
    Bdf,
}

impl Conditions {
    pub fn label(self) -> &'static str {
        match self {
            Conditions::Main => "main",
            Conditions::Coromain => "coromain",
            Conditions::Pure => "pure",
            Conditions::Bdf => "bdf",
        }
    }

    pub fn space(self) -> Space {
        match self {
            Conditions::Main | Conditions::Coromain | Conditions::Bdf => Space::DefectOfT,
            Conditions::Pure => Space::DefectOfTAdjoint,
        }
    }
}

/// `(U_i, P_i, F_i, F_i')` in an orthonormal basis `B` of a defect space.
#[derive(Debug, Clone, Serialize)]
pub struct DilationData {
    pub space: Space,
    /// Full-space defect operator whose range is the defect space.
    pub defect: ComplexMatrix,
    pub basis: ComplexMatrix,
    pub u: Vec<ComplexMatrix>,
    pub p: Vec<ComplexMatrix>,
    pub f: Vec<ComplexMatrix>,
    pub fp: Vec<ComplexMatrix>,
}

impl DilationData {
    /// Data determined by the factors: `U = F* + F'`, `P = F'* F'`.
    pub fn from_factors(
        space: Space,
        defect: ComplexMatrix,
        basis: ComplexMatrix,
        f: Vec<ComplexMatrix>,
        fp: Vec<ComplexMatrix>,
    ) -> Self {
        let u = f.iter().zip(&fp).map(|(f, fp)| &f.adjoint() + fp).collect();
        let p = fp.iter().map(|fp| &fp.adjoint() * fp).collect();
        Self {
            space,
            defect,
            basis,
            u,
            p,
            f,
            fp,
        }
    }

    /// Data determined by unitaries and projections: `F = P^⊥ U*`, `F' = U P`.
    pub fn from_unitaries(
        space: Space,
        defect: ComplexMatrix,
        basis: ComplexMatrix,
        u: Vec<ComplexMatrix>,
        p: Vec<ComplexMatrix>,
    ) -> Self {
        let r = basis.ncols();
        let id = ComplexMatrix::identity(r);
        let f = u.iter().zip(&p).map(|(u, p)| &(&id - p) * &u.adjoint()).collect();
        let fp = u.iter().zip(&p).map(|(u, p)| u * p).collect();
        Self {
            space,
            defect,
            basis,
            u,
            p,
            f,
            fp,
        }
    }

    /// Full-space data `(U_i, P_i)` given on the whole of `H`, valid when the
    /// defect space is all of `H`; compressed to the tuple's defect basis.
    pub fn from_full_space(
        t: &ContractionTuple,
        space: Space,
        u_full: Vec<ComplexMatrix>,
        p_full: Vec<ComplexMatrix>,
        tol: Tolerance,
    ) -> Result<Self> {
        if u_full.len() != t.n() || p_full.len() != t.n() {
            return Err(Error::InvalidArgument(format!(
                "expected {} unitaries and projections, got {} and {}",
                t.n(),
                u_full.len(),
                p_full.len()
            )));
        }
        let frame = space.frame(t);
        let d = defect(frame.product(), Side::Column, tol)?;
        for m in u_full.iter().chain(&p_full) {
            if m.shape() != (t.dim(), t.dim()) {
                return Err(Error::DimensionMismatch {
                    context: "full-space candidates",
                    left: (t.dim(), t.dim()),
                    right: m.shape(),
                });
            }
        }
        let b = &d.basis;
        let compress = |m: &ComplexMatrix| &(&b.adjoint() * m) * b;
        Ok(Self::from_unitaries(
            space,
            d.operator.clone(),
            d.basis.clone(),
            u_full.iter().map(compress).collect(),
            p_full.iter().map(compress).collect(),
        ))
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// `B X B*`: an operator on the defect space as a full-space matrix.
    pub fn lift(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis * x) * &self.basis.adjoint()
    }

    fn require(&self, space: Space) -> Result<()> {
        if self.space == space {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected: space.label(),
                found: self.space.label(),
            })
        }
    }

    fn require_tuple(&self, t: &ContractionTuple) -> Result<()> {
        if self.n() != t.n() || self.basis.nrows() != t.dim() {
            return Err(Error::DimensionMismatch {
                context: "dilation data vs tuple",
                left: (t.n(), t.dim()),
                right: (self.n(), self.basis.nrows()),
            });
        }
        Ok(())
    }

    /// `W_k^* P_k W_k` summed over `k`, where `W_k = U_{k-1} ... U_0`.
    pub fn telescoping_sum(&self) -> ComplexMatrix {
        telescoping_sum(&self.u, &self.p)
    }
}

fn telescoping_sum(u: &[ComplexMatrix], p: &[ComplexMatrix]) -> ComplexMatrix {
    let r = p.first().map_or(0, |p| p.nrows());
    let mut w = ComplexMatrix::identity(r);
    let mut acc = ComplexMatrix::zeros(r, r);
    for (u, p) in u.iter().zip(p) {
        acc = &acc + &(&(&w.adjoint() * p) * &w);
        w = u * &w;
    }
    acc
}

/// Candidate data read off the tuple.
///
/// With `D` the defect operator of the frame tuple `X` (the tuple itself or
/// its adjoint), `B` the defect basis and `D⁺` the pseudo-inverse:
/// `F_i' = B* D⁺ (D_{X_i}² X_i') D⁺ B` and `F_i = B* D⁺ (D_{X_i'}² X_i) D⁺ B`.
/// The candidates are returned unverified.
pub fn extract_candidates(t: &ContractionTuple, space: Space, tol: Tolerance) -> Result<DilationData> {
    let x = space.frame(t);
    let d = defect(x.product(), Side::Column, tol)?;
    let id = ComplexMatrix::identity(t.dim());
    let dp = pinv(&d.operator, tol);
    let left = &d.basis.adjoint() * &dp;
    let right = &dp * &d.basis;
    let sandwich = |m: &ComplexMatrix| &(&left * m) * &right;
    let mut f = Vec::with_capacity(t.n());
    let mut fp = Vec::with_capacity(t.n());
    for i in 0..t.n() {
        let xi = x.op(i);
        let xpi = x.coproduct(i);
        let d_xi_sq = &id - &(&xi.adjoint() * xi);
        let d_xpi_sq = &id - &(&xpi.adjoint() * xpi);
        fp.push(sandwich(&(&d_xi_sq * xpi)));
        f.push(sandwich(&(&d_xpi_sq * xi)));
    }
    Ok(DilationData::from_factors(space, d.operator, d.basis, f, fp))
}

/// Residual of one condition instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition_id: String,
    /// Operator indices the instance refers to (0-based).
    pub indices: Vec<usize>,
    pub residual: f64,
    pub passes: bool,
    /// Diagnostic checks that do not decide any verdict.
    pub informational: bool,
    /// Unit vector maximizing `|(lhs - rhs) x|`, present when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<ComplexMatrix>,
}

impl ConditionReport {
    /// Compares `lhs` and `rhs` in operator norm.
    pub fn identity(
        id: impl Into<String>,
        indices: Vec<usize>,
        lhs: ComplexMatrix,
        rhs: ComplexMatrix,
        tol: Tolerance,
    ) -> Self {
        let diff = &lhs - &rhs;
        let residual = crate::linalg::op_norm(&diff);
        let passes = tol.accepts(residual);
        let witness = if passes {
            None
        } else {
            top_right_singular_vector(&diff).map(|v| v.iter().copied().collect())
        };
        Self {
            condition_id: id.into(),
            indices,
            residual,
            passes,
            informational: false,
            witness,
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    }

    /// A check summarized by a single residual.
    pub fn scalar(id: impl Into<String>, indices: Vec<usize>, residual: f64, tol: Tolerance) -> Self {
        Self {
            condition_id: id.into(),
            indices,
            residual,
            passes: tol.accepts(residual),
            informational: false,
            witness: None,
            lhs: None,
            rhs: None,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Every non-informational report passes.
pub fn overall_pass(reports: &[ConditionReport]) -> bool {
    reports.iter().filter(|r| !r.informational).all(|r| r.passes)
}

/// Largest residual among non-informational reports.
pub fn max_residual(reports: &[ConditionReport]) -> f64 {
    reports
        .iter()
        .filter(|r| !r.informational)
        .map(|r| r.residual)
        .fold(0.0, f64::max)
}

fn wellformed(d: &DilationData, product_identity: bool, tol: Tolerance) -> Vec<ConditionReport> {
    let r = d.rank();
    let id = ComplexMatrix::identity(r);
    let mut out = Vec::new();
    for i in 0..d.n() {
        let u = &d.u[i];
        out.push(ConditionReport::identity("unitary", vec![i], &u.adjoint() * u, id.clone(), tol));
    }
    for i in 0..d.n() {
        let pr = is_projection(&d.p[i], tol).expect("square");
        out.push(ConditionReport::scalar("projection", vec![i], pr.residual, tol));
    }
    for i in 0..d.n() {
        let f = &(&id - &d.p[i]) * &d.u[i].adjoint();
        let fp = &d.u[i] * &d.p[i];
        let residual = diff_norm(&d.f[i], &f) + diff_norm(&d.fp[i], &fp);
        out.push(ConditionReport::scalar("factor", vec![i], residual, tol));
    }
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            out.push(ConditionReport::identity(
                "commuting-unitaries",
                vec![i, j],
                &d.u[i] * &d.u[j],
                &d.u[j] * &d.u[i],
                tol,
            ));
        }
    }
    if product_identity {
        let prod = d.u.iter().fold(id.clone(), |acc, u| &acc * u);
        out.push(ConditionReport::identity("product-identity", vec![], prod, id, tol));
    }
    out
}

/// Which of the factor-form conditions a family contains.
struct Family {
    prefix: &'static str,
    defect_matching: bool,
    telescoping: bool,
    product_identity: bool,
}

/// Conditions (1)-(3) and optionally the defect-matching and telescoping
/// identities, for the frame tuple `x` whose column defect carries `d`.
fn factor_conditions(x: &ContractionTuple, d: &DilationData, fam: &Family, tol: Tolerance) -> Vec<ConditionReport> {
    let mut out = wellformed(d, fam.product_identity, tol);
    let dd = &d.defect;
    let prod = x.product();
    let n = d.n();
    let id_r = ComplexMatrix::identity(d.rank());
    let cid = |k: usize| format!("{}-{}", fam.prefix, k);
    for i in 0..n {
        let lhs = dd * x.op(i);
        let rhs = &(&d.lift(&d.f[i]) * dd) + &(&(&d.lift(&d.fp[i].adjoint()) * dd) * prod);
        out.push(ConditionReport::identity(cid(1), vec![i], lhs, rhs, tol));
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(ConditionReport::identity(
                cid(2),
                vec![i, j],
                &d.f[i] * &d.f[j],
                &d.f[j] * &d.f[i],
                tol,
            ));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(ConditionReport::identity(
                cid(3),
                vec![i, j],
                &d.fp[i] * &d.fp[j],
                &d.fp[j] * &d.fp[i],
                tol,
            ));
        }
    }
    let mut next = 4;
    if fam.defect_matching {
        let id = ComplexMatrix::identity(x.dim());
        for i in 0..n {
            let lhs = &(dd * &d.lift(&(&d.fp[i] * &d.fp[i].adjoint()))) * dd;
            let rhs = &id - &(&x.op(i).adjoint() * x.op(i));
            out.push(ConditionReport::identity(cid(next), vec![i], lhs, rhs, tol));
        }
        next += 1;
    }
    if fam.telescoping {
        out.push(ConditionReport::identity(cid(next), vec![], d.telescoping_sum(), id_r, tol));
    }
    for i in 0..n {
        let lhs = dd * x.coproduct(i);
        let rhs = &(&d.lift(&d.fp[i]) * dd) + &(&(&d.lift(&d.f[i].adjoint()) * dd) * prod);
        out.push(ConditionReport::identity("note-impnote", vec![i], lhs, rhs, tol).informational());
    }
    out
}

/// Conditions (1)-(5) for the Schäffer-type dilation with minimal product.
pub fn verify_main(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<Vec<ConditionReport>> {
    d.require(Space::DefectOfT)?;
    d.require_tuple(t)?;
    let fam = Family {
        prefix: "main",
        defect_matching: true,
        telescoping: true,
        product_identity: true,
    };
    Ok(factor_conditions(t, d, &fam, tol))
}

/// Conditions (1)-(4): an isometric dilation on the minimal dilation space
/// of `T`, without requiring the product to be that minimal dilation.
pub fn verify_coromain(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<Vec<ConditionReport>> {
    d.require(Space::DefectOfT)?;
    d.require_tuple(t)?;
    let fam = Family {
        prefix: "coromain",
        defect_matching: true,
        telescoping: false,
        product_identity: false,
    };
    Ok(factor_conditions(t, d, &fam, tol))
}

/// Conditions for a dilation on `H²(D_{T*})` when `T` is C·0: (1)-(3) on
/// the adjoint tuple plus the telescoping identity as (4).
pub fn verify_pure(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<Vec<ConditionReport>> {
    d.require(Space::DefectOfTAdjoint)?;
    d.require_tuple(t)?;
    let fam = Family {
        prefix: "pure",
        defect_matching: false,
        telescoping: true,
        product_identity: true,
    };
    let mut out = factor_conditions(&t.adjoint(), d, &fam, tol);
    let c0 = c0_diagnostic(t.product(), 1, tol)?;
    let mut rep = ConditionReport::scalar("c0-product", vec![], c0.spectral_radius, tol);
    rep.passes = c0.is_c0;
    out.push(rep.informational());
    Ok(out)
}

/// Conditions for the co-isometric extension: (1)-(4) of the defect-of-T
/// family applied to the adjoint tuple on `D_{T*}`.
pub fn verify_coisometric(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<Vec<ConditionReport>> {
    d.require(Space::DefectOfTAdjoint)?;
    d.require_tuple(t)?;
    let fam = Family {
        prefix: "model",
        defect_matching: true,
        telescoping: false,
        product_identity: false,
    };
    Ok(factor_conditions(&t.adjoint(), d, &fam, tol))
}

/// Dispatches to the verifier for `conditions`.
pub fn verify(
    t: &ContractionTuple,
    d: &DilationData,
    conditions: Conditions,
    tol: Tolerance,
) -> Result<Vec<ConditionReport>> {
    match conditions {
        Conditions::Main => verify_main(t, d, tol),
        Conditions::Coromain => verify_coromain(t, d, tol),
        Conditions::Pure => verify_pure(t, d, tol),
        Conditions::Bdf => verify_bdf(&d.u, &d.p, tol),
    }
}

/// Conditions for `M_{U_i P_i^⊥ + z U_i P_i}` to be a commuting tuple of
/// isometries with product `M_z`.
pub fn verify_bdf(u: &[ComplexMatrix], p: &[ComplexMatrix], tol: Tolerance) -> Result<Vec<ConditionReport>> {
    if u.len() != p.len() || u.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need matching nonempty lists, got {} unitaries and {} projections",
            u.len(),
            p.len()
        )));
    }
    let r = u[0].nrows();
    for m in u.iter().chain(p) {
        if m.shape() != (r, r) {
            return Err(Error::DimensionMismatch {
                context: "verify_bdf",
                left: (r, r),
                right: m.shape(),
            });
        }
    }
    let n = u.len();
    let id = ComplexMatrix::identity(r);
    let mut out = Vec::new();
    for (i, ui) in u.iter().enumerate() {
        let pr = is_unitary(ui, tol)?;
        out.push(ConditionReport::scalar("unitary", vec![i], pr.residual, tol));
    }
    for (i, pi) in p.iter().enumerate() {
        let pr = is_projection(pi, tol)?;
        out.push(ConditionReport::scalar("projection", vec![i], pr.residual, tol));
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(ConditionReport::identity("bdf-1", vec![i, j], &u[i] * &u[j], &u[j] * &u[i], tol));
        }
    }
    let prod = u.iter().fold(id.clone(), |acc, x| &acc * x);
    out.push(ConditionReport::identity("bdf-2", vec![], prod, id.clone(), tol));
    for i in 0..n {
        for j in i + 1..n {
            let lhs = &p[j] + &(&(&u[j].adjoint() * &p[i]) * &u[j]);
            let rhs = &p[i] + &(&(&u[i].adjoint() * &p[j]) * &u[i]);
            let bound = min_eig_hermitian(&(&id - &rhs))?;
            out.push(ConditionReport::identity("bdf-3", vec![i, j], lhs, rhs, tol));
            out.push(ConditionReport::scalar("bdf-3-bound", vec![i, j], (-bound).max(0.0), tol));
        }
    }
    out.push(ConditionReport::identity("bdf-4", vec![], telescoping_sum(u, p), id, tol));
    Ok(out)
}

#[cfg(test)]
mod tests;
