//! Validated commuting contraction tuples, defect data and positivity
//! classifiers.
//!
//! Operator indices are 0-based everywhere in the API.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    diff_norm, min_eig_hermitian, op_norm, psd_sqrt, range_basis, spectral_radius, ComplexMatrix,
    Tolerance,
};

/// Largest tuple for which subset sums are enumerated.
pub const MAX_SUBSET_OPERATORS: usize = 16;

/// Commuting tuple of contractions with cached product and coproducts.
///
/// The product is `T_0 T_1 ... T_{n-1}` in index order and coproduct `i`
/// is the same product with factor `i` omitted.
#[derive(Debug, Clone)]
pub struct ContractionTuple {
    ops: Vec<ComplexMatrix>,
    product: ComplexMatrix,
    coproducts: Vec<ComplexMatrix>,
    tol: Tolerance,
}

impl ContractionTuple {
    pub fn new(matrices: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let first = matrices.first().ok_or(Error::EmptyTuple)?;
        let dim = first.nrows();
        for m in &matrices {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    context: "tuple operators",
                    left: (dim, dim),
                    right: m.shape(),
                });
            }
        }
        for (index, m) in matrices.iter().enumerate() {
            let norm = op_norm(m);
            if norm > 1.0 + tol.atol() {
                return Err(Error::NotContractive { index, norm });
            }
        }
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                let r = diff_norm(&(&matrices[i] * &matrices[j]), &(&matrices[j] * &matrices[i]));
                if r > tol.atol() && worst.is_none_or(|w| r > w.2) {
                    worst = Some((i, j, r));
                }
            }
        }
        if let Some((i, j, residual)) = worst {
            return Err(Error::NotCommuting { i, j, residual });
        }
        Ok(Self::assemble(matrices, tol))
    }

    fn assemble(ops: Vec<ComplexMatrix>, tol: Tolerance) -> Self {
        let dim = ops[0].nrows();
        let coproducts = (0..ops.len())
            .map(|i| ordered_product(dim, ops.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m)))
            .collect();
        let product = ordered_product(dim, ops.iter());
        Self {
            ops,
            product,
            coproducts,
            tol,
        }
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn dim(&self) -> usize {
        self.product.nrows()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &ComplexMatrix {
        &self.ops[i]
    }

    pub fn product(&self) -> &ComplexMatrix {
        &self.product
    }

    pub fn coproduct(&self, i: usize) -> &ComplexMatrix {
        &self.coproducts[i]
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// The tuple `(T_0*, ..., T_{n-1}*)`; it inherits validity from `self`.
    pub fn adjoint(&self) -> Self {
        Self::assemble(self.ops.iter().map(ComplexMatrix::adjoint).collect(), self.tol)
    }

    /// `T_F`: product over the index set `subset` in index order.
    pub fn product_of(&self, subset: &[usize]) -> ComplexMatrix {
        let mut idx = subset.to_vec();
        idx.sort_unstable();
        ordered_product(self.dim(), idx.iter().map(|&i| &self.ops[i]))
    }

    /// `T_0^{k_0} ... T_{n-1}^{k_{n-1}}`.
    pub fn monomial(&self, exponents: &[usize]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(self.dim());
        for (i, &k) in exponents.iter().enumerate() {
            for _ in 0..k {
                acc = &acc * &self.ops[i];
            }
        }
        acc
    }
}

/// Validates and wraps a list of matrices as a commuting contraction tuple.
pub fn make_tuple(matrices: Vec<ComplexMatrix>, tol: Tolerance) -> Result<ContractionTuple> {
    ContractionTuple::new(matrices, tol)
}

fn ordered_product<'a>(dim: usize, ops: impl Iterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    ops.fold(ComplexMatrix::identity(dim), |acc, m| &acc * m)
}

/// Which defect operator: `D_X` from `I - X*X` or `D_{X*}` from `I - XX*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Column,
    Row,
}

#[derive(Debug, Clone)]
pub struct DefectData {
    pub side: Side,
    /// The defect operator on the full space.
    pub operator: ComplexMatrix,
    /// Orthonormal columns spanning the defect space.
    pub basis: ComplexMatrix,
}

impl DefectData {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

pub fn defect(x: &ComplexMatrix, side: Side, tol: Tolerance) -> Result<DefectData> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            context: "defect",
            left: x.shape(),
            right: (x.ncols(), x.nrows()),
        });
    }
    let norm = op_norm(x);
    if norm > 1.0 + tol.atol() {
        return Err(Error::NotContractive { index: 0, norm });
    }
    let gram = match side {
        Side::Column => &x.adjoint() * x,
        Side::Row => x * &x.adjoint(),
    };
    let operator = psd_sqrt(&(&ComplexMatrix::identity(x.nrows()) - &gram), tol)?;
    let basis = range_basis(&operator, tol);
    Ok(DefectData {
        side,
        operator,
        basis,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub subset: Vec<usize>,
    pub min_eig: f64,
    pub passes: bool,
    pub matrix: ComplexMatrix,
}

fn validate_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset {
            reason: "empty index set".into(),
        });
    }
    if subset.len() > MAX_SUBSET_OPERATORS {
        return Err(Error::TooManyOperators {
            n: subset.len(),
            limit: MAX_SUBSET_OPERATORS,
        });
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != subset.len() {
        return Err(Error::InvalidSubset {
            reason: format!("repeated index in {subset:?}"),
        });
    }
    if let Some(&bad) = s.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidSubset {
            reason: format!("index {bad} out of range for {n} operators"),
        });
    }
    Ok(s)
}

/// Sub-index-sets of `set` paired with their size parity sign.
fn signed_subsets(set: &[usize]) -> impl Iterator<Item = (f64, Vec<usize>)> + '_ {
    (0u32..(1u32 << set.len())).map(move |mask| {
        let sub: Vec<usize> = set
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &i)| i)
            .collect();
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (sign, sub)
    })
}

fn positivity(matrix: ComplexMatrix, subset: Vec<usize>, tol: Tolerance) -> PositivityReport {
    let min_eig = min_eig_hermitian(&matrix).expect("square by construction");
    PositivityReport {
        subset,
        min_eig,
        passes: min_eig >= -tol.atol(),
        matrix,
    }
}

/// Szegő sum `sum_{F subset of S} (-1)^|F| T_F T_F*` over the sub-tuple `S`.
pub fn szego_check(t: &ContractionTuple, subset: &[usize]) -> Result<PositivityReport> {
    let s = validate_subset(t.n(), subset)?;
    let mut acc = ComplexMatrix::zeros(t.dim(), t.dim());
    for (sign, f) in signed_subsets(&s) {
        let tf = t.product_of(&f);
        acc = &acc + &(&tf * &tf.adjoint()).scale_real(sign);
    }
    Ok(positivity(acc, s, t.tol()))
}

/// First-order part `I - sum_{j in S} T_j T_j*` of the Szegő sum.
///
/// Agrees with [`szego_check`] when the products `T_F` over `|F| >= 2`
/// vanish; otherwise the two differ by the higher-order terms.
pub fn first_order_szego(t: &ContractionTuple, subset: &[usize]) -> Result<PositivityReport> {
    let s = validate_subset(t.n(), subset)?;
    let mut acc = ComplexMatrix::identity(t.dim());
    for &j in &s {
        acc = &acc - &(t.op(j) * &t.op(j).adjoint());
    }
    Ok(positivity(acc, s, t.tol()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BrehmerReport {
    pub passes: bool,
    pub subsets: Vec<PositivityReport>,
}

/// Brehmer sums `sum_{F subset of G} (-1)^|F| T_F* T_F` for every nonempty `G`.
pub fn brehmer_check(t: &ContractionTuple) -> Result<BrehmerReport> {
    let n = t.n();
    if n > MAX_SUBSET_OPERATORS {
        return Err(Error::TooManyOperators {
            n,
            limit: MAX_SUBSET_OPERATORS,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    let mut subsets = Vec::new();
    for (_, g) in signed_subsets(&all).skip(1) {
        let mut acc = ComplexMatrix::zeros(t.dim(), t.dim());
        for (sign, f) in signed_subsets(&g) {
            let tf = t.product_of(&f);
            acc = &acc + &(&tf.adjoint() * &tf).scale_real(sign);
        }
        subsets.push(positivity(acc, g, t.tol()));
    }
    Ok(BrehmerReport {
        passes: subsets.iter().all(|s| s.passes),
        subsets,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct C0Report {
    pub spectral_radius: f64,
    /// `||T*^k||` for `k = 1..=max_power`.
    pub norm_decay: Vec<f64>,
    pub is_c0: bool,
}

/// At finite dimension `T` is C·0 exactly when its spectral radius is below 1.
pub fn c0_diagnostic(x: &ComplexMatrix, max_power: usize, tol: Tolerance) -> Result<C0Report> {
    let norm = op_norm(x);
    if norm > 1.0 + tol.atol() {
        return Err(Error::NotContractive { index: 0, norm });
    }
    let rho = spectral_radius(x)?;
    let adj = x.adjoint();
    let mut power = ComplexMatrix::identity(x.nrows());
    let mut norm_decay = Vec::with_capacity(max_power);
    for _ in 0..max_power {
        power = &power * &adj;
        norm_decay.push(op_norm(&power));
    }
    Ok(C0Report {
        spectral_radius: rho,
        norm_decay,
        is_c0: rho < 1.0 - tol.atol(),
    })
}
