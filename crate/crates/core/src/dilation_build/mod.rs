//! Exact dilations acting on finitely supported block vectors, and checks
//! of the dilation properties.

mod operator;
mod vector;

pub use operator::{CoisometricExtension, HardyMultiplier, MatrixPolynomial, SchafferOperator, StructuredOperator};
pub use vector::BlockSupportedVector;

use serde::Serialize;

use crate::dilation_data::{
    max_residual, overall_pass, verify_coisometric, verify_coromain, verify_pure, ConditionReport, DilationData,
    Space,
};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, ComplexVector, Tolerance};
use crate::random::{random_unit_vector, seeded, DEFAULT_SEED};
use crate::tuples::{defect, ContractionTuple, Side};

/// Default largest total degree for the dilation identity.
pub const DEFAULT_MAX_DEGREE: usize = 5;
/// Default number of random vectors per check.
pub const DEFAULT_TRIALS: usize = 32;
/// Largest tail length of random block vectors.
const RANDOM_TAIL: usize = 3;

fn first_failure(reports: &[ConditionReport], skip: &[&str]) -> Option<ConditionReport> {
    reports
        .iter()
        .find(|r| !r.informational && !r.passes && !skip.contains(&r.condition_id.as_str()))
        .cloned()
}

/// The Schäffer-type dilations `V_i` and the Schäffer dilation `V` of `T`.
#[derive(Debug, Clone)]
pub struct SchafferDilation {
    pub ops: Vec<SchafferOperator>,
    pub product: SchafferOperator,
}

/// Builds `V_i` from `(T_i, F_i'* B* D_T, F_i, F_i'*)`, which requires
/// conditions (1)-(4).
pub fn build_schaffer(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<SchafferDilation> {
    let reports = verify_coromain(t, d, tol)?;
    if let Some(r) = first_failure(&reports, &[]) {
        return Err(Error::ConditionsNotMet(Box::new(r)));
    }
    let bd = &d.basis.adjoint() * &d.defect;
    let ops = (0..t.n())
        .map(|i| {
            let fp_adj = d.fp[i].adjoint();
            SchafferOperator::new(t.op(i).clone(), &fp_adj * &bd, d.f[i].clone(), fp_adj)
        })
        .collect::<Result<Vec<_>>>()?;
    let r = d.rank();
    let product = SchafferOperator::new(
        t.product().clone(),
        bd,
        ComplexMatrix::zeros(r, r),
        ComplexMatrix::identity(r),
    )?;
    Ok(SchafferDilation { ops, product })
}

#[derive(Debug, Clone, Copy)]
pub struct DilationCheck {
    pub max_degree: usize,
    pub trials: usize,
    pub seed: u64,
    /// Also compare `Π V_i` with `V`; meaningful when the telescoping
    /// condition holds.
    pub check_product: bool,
}

impl Default for DilationCheck {
    fn default() -> Self {
        Self {
            max_degree: DEFAULT_MAX_DEGREE,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            check_product: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationReport {
    pub passes: bool,
    pub max_residual: f64,
    pub reports: Vec<ConditionReport>,
}

impl DilationReport {
    fn from_reports(reports: Vec<ConditionReport>) -> Self {
        Self {
            passes: overall_pass(&reports),
            max_residual: max_residual(&reports),
            reports,
        }
    }
}

/// Multi-indices with `|k| <= max_degree`, visited depth-first as ordered
/// words `j_1 >= j_2 >= ...`, so that applying the letters left to right
/// realizes `A_0^{k_0} ... A_{n-1}^{k_{n-1}}` on the starting vector.
fn for_each_monomial<S: Clone>(
    n: usize,
    max_degree: usize,
    start: S,
    step: &mut dyn FnMut(&S, usize) -> S,
    visit: &mut dyn FnMut(&[usize], &S),
) {
    fn go<S: Clone>(
        state: &S,
        exps: &mut Vec<usize>,
        top: usize,
        left: usize,
        step: &mut dyn FnMut(&S, usize) -> S,
        visit: &mut dyn FnMut(&[usize], &S),
    ) {
        visit(exps, state);
        if left == 0 {
            return;
        }
        for j in (0..=top).rev() {
            let next = step(state, j);
            exps[j] += 1;
            go(&next, exps, j, left - 1, step, visit);
            exps[j] -= 1;
        }
    }
    let mut exps = vec![0; n];
    if n > 0 {
        go(&start, &mut exps, n - 1, max_degree, step, visit);
    }
}

/// Isometry, commutation, the dilation identity on all multi-indices of
/// total degree at most `max_degree`, and optionally `Π V_i = V`.
pub fn verify_isometric_dilation(
    t: &ContractionTuple,
    dil: &SchafferDilation,
    check: DilationCheck,
    tol: Tolerance,
) -> Result<DilationReport> {
    if check.max_degree == 0 {
        return Err(Error::InvalidArgument("max degree must be at least 1".into()));
    }
    let mut rng = seeded(check.seed);
    let (dim, rank) = (t.dim(), dil.product.rank());
    let n = dil.ops.len();
    let mut reports = Vec::new();

    for (i, v) in dil.ops.iter().enumerate() {
        let mut worst = 0.0f64;
        for _ in 0..check.trials {
            let x = BlockSupportedVector::random_unit(&mut rng, dim, rank, RANDOM_TAIL);
            let y = BlockSupportedVector::random_unit(&mut rng, dim, rank, RANDOM_TAIL);
            let (vx, vy) = (v.apply(&x)?, v.apply(&y)?);
            worst = worst.max((vx.inner(&vy) - x.inner(&y)).norm());
        }
        reports.push(ConditionReport::scalar("isometry", vec![i], worst, tol));
    }

    for i in 0..n {
        for j in i + 1..n {
            let mut worst = 0.0f64;
            for _ in 0..check.trials {
                let x = BlockSupportedVector::random_unit(&mut rng, dim, rank, RANDOM_TAIL);
                let a = dil.ops[i].apply(&dil.ops[j].apply(&x)?)?;
                let b = dil.ops[j].apply(&dil.ops[i].apply(&x)?)?;
                worst = worst.max((&a - &b).norm());
            }
            reports.push(ConditionReport::scalar("commutation", vec![i, j], worst, tol));
        }
    }

    let mut worst = (0.0f64, Vec::new());
    for _ in 0..check.trials {
        let h = random_unit_vector(&mut rng, dim);
        let start = (BlockSupportedVector::from_head(h.clone(), rank), h);
        let mut step = |s: &(BlockSupportedVector, ComplexVector), j: usize| {
            let v = dil.ops[j].apply(&s.0).expect("shapes fixed by construction");
            (v, t.op(j).apply(&s.1))
        };
        let mut visit = |k: &[usize], s: &(BlockSupportedVector, ComplexVector)| {
            let r = (s.0.head() - &s.1).norm();
            if r > worst.0 {
                worst = (r, k.to_vec());
            }
        };
        for_each_monomial(n, check.max_degree, start, &mut step, &mut visit);
    }
    reports.push(ConditionReport::scalar("dilation-identity", worst.1, worst.0, tol));

    if check.check_product {
        let composed = dil
            .ops
            .iter()
            .map(SchafferOperator::to_structured)
            .reduce(|acc, v| acc.compose(&v))
            .expect("nonempty tuple");
        let structural = composed.max_block_diff(&dil.product.to_structured());
        reports.push(ConditionReport::scalar("product-structure", vec![], structural, tol));
        let mut worst = 0.0f64;
        for _ in 0..check.trials {
            let x = BlockSupportedVector::random_unit(&mut rng, dim, rank, RANDOM_TAIL);
            let mut y = x.clone();
            for v in dil.ops.iter().rev() {
                y = v.apply(&y)?;
            }
            worst = worst.max((&y - &dil.product.apply(&x)?).norm());
        }
        reports.push(ConditionReport::scalar("product-dilation", vec![], worst, tol));
    }
    Ok(DilationReport::from_reports(reports))
}

/// Multipliers `M_{U_i P_i^⊥ + z U_i P_i}` on `H²(D_{T*})`; requires every
/// pure condition.
pub fn build_pure_dilation(t: &ContractionTuple, d: &DilationData, tol: Tolerance) -> Result<Vec<HardyMultiplier>> {
    let reports = verify_pure(t, d, tol)?;
    if let Some(r) = first_failure(&reports, &[]) {
        return Err(Error::ConditionsNotMet(Box::new(r)));
    }
    Ok(d.f
        .iter()
        .zip(&d.fp)
        .map(|(f, fp)| HardyMultiplier {
            c0: f.adjoint(),
            c1: fp.clone(),
        })
        .collect())
}

/// Truncation `W_N h` of `W h = Σ_k z^k D_{T*} T*^k h` in defect coordinates.
#[derive(Debug, Clone)]
pub struct EmbeddedVector {
    pub coefficients: Vec<ComplexVector>,
    /// `||T*^N h||`; by telescoping `||W_N h||² = ||h||² - tail_bound²`.
    pub tail_bound: f64,
    /// `D_{T*} = 0`, so `W` is the zero map.
    pub degenerate: bool,
}

/// `W_N h` in the basis of `D_{T*}` computed from `T`.
pub fn embed_w(x: &ComplexMatrix, h: &ComplexVector, n_trunc: usize, tol: Tolerance) -> Result<EmbeddedVector> {
    let d = defect(x, Side::Row, tol)?;
    Ok(embed_w_with(x, &d.operator, &d.basis, h, n_trunc))
}

/// `W_N h` for a given defect operator and basis of its range.
pub fn embed_w_with(
    x: &ComplexMatrix,
    defect_op: &ComplexMatrix,
    basis: &ComplexMatrix,
    h: &ComplexVector,
    n_trunc: usize,
) -> EmbeddedVector {
    let coord = &basis.adjoint() * defect_op;
    let adj = x.adjoint();
    let mut power_h = h.clone();
    let mut coefficients = Vec::with_capacity(n_trunc);
    for _ in 0..n_trunc {
        coefficients.push(coord.apply(&power_h));
        power_h = adj.apply(&power_h);
    }
    EmbeddedVector {
        coefficients,
        tail_bound: power_h.norm(),
        degenerate: basis.ncols() == 0,
    }
}

/// `||T*^N||`.
pub fn adjoint_power_norm(x: &ComplexMatrix, n_trunc: usize) -> f64 {
    op_norm(&x.adjoint().pow(n_trunc))
}

/// Checks `V_i* W = W T_i*` on truncated sequences: the truncation only
/// drops `c1* (W h)_N`, so residuals are bounded by `||T*^N||`.
pub fn verify_intertwining(
    t: &ContractionTuple,
    d: &DilationData,
    multipliers: &[HardyMultiplier],
    n_trunc: usize,
    trials: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<DilationReport> {
    require_adjoint_space(d)?;
    let x = t.product();
    let tail = adjoint_power_norm(x, n_trunc);
    let bound = 10.0 * tail + tol.atol();
    let mut rng = seeded(seed);
    let mut reports = Vec::new();
    for (i, v) in multipliers.iter().enumerate() {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let h = random_unit_vector(&mut rng, t.dim());
            let wh = embed_w_with(x, &d.defect, &d.basis, &h, n_trunc);
            let lhs = v.apply_adjoint_truncated(&wh.coefficients);
            let rhs = embed_w_with(x, &d.defect, &d.basis, &t.op(i).adjoint().apply(&h), n_trunc);
            worst = worst.max(sequence_distance(&lhs, &rhs.coefficients));
        }
        let mut r = ConditionReport::scalar("intertwining", vec![i], worst, tol);
        r.passes = worst <= bound;
        reports.push(r);
    }
    reports.push(ConditionReport::scalar("tail-bound", vec![], tail, tol).informational());
    Ok(DilationReport::from_reports(reports))
}

fn require_adjoint_space(d: &DilationData) -> Result<()> {
    if d.space == Space::DefectOfTAdjoint {
        Ok(())
    } else {
        Err(Error::WrongSpace {
            expected: Space::DefectOfTAdjoint.label(),
            found: d.space.label(),
        })
    }
}

/// Euclidean distance of two coefficient sequences of equal length.
pub(crate) fn sequence_distance(a: &[ComplexVector], b: &[ComplexVector]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// `Z_i = X_i*` where `X_i` is the Schäffer-type operator of the adjoint
/// tuple; requires conditions (1)-(4) for the adjoint tuple on `D_{T*}`.
pub fn build_coisometric_extension(
    t: &ContractionTuple,
    d: &DilationData,
    tol: Tolerance,
) -> Result<Vec<CoisometricExtension>> {
    let reports = verify_coisometric(t, d, tol)?;
    if let Some(r) = first_failure(&reports, &[]) {
        return Err(Error::ConditionsNotMet(Box::new(r)));
    }
    let bd = &d.basis.adjoint() * &d.defect;
    (0..t.n())
        .map(|i| {
            let fp_adj = d.fp[i].adjoint();
            SchafferOperator::new(t.op(i).adjoint(), &fp_adj * &bd, d.f[i].clone(), fp_adj)
                .map(|adjoint| CoisometricExtension { adjoint })
        })
        .collect()
}

#[cfg(test)]
mod tests;
