//! Dense complex linear algebra with explicit tolerance semantics.
//!
//! Rank decisions use one rule throughout: a singular value (or eigenvalue
//! magnitude) below `atol * max(largest, 1)` counts as zero.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix with finite entries.
///
/// Read access goes through `Deref` to the underlying `nalgebra` matrix.
/// Arithmetic is defined on references and panics on shape mismatch, like
/// `nalgebra`; public entry points validate shapes before computing.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad counts and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::EntryCount {
                rows,
                cols,
                entries: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps an internally computed matrix without re-checking finiteness.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    /// Real matrix from literal rows; intended for fixtures and tests.
    pub fn from_real_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        Self(DMatrix::from_fn(rows.len(), C, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_complex_rows<const C: usize>(rows: &[[C64; C]]) -> Self {
        Self(DMatrix::from_fn(rows.len(), C, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn diag(entries: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self(DMatrix::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Column matrix holding `v`.
    pub fn column(v: &ComplexVector) -> Self {
        Self(DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Hermitian part `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `M^k` for square `M`; `M^0 = I`.
    pub fn pow(&self, k: usize) -> Self {
        let n = self.nrows();
        let mut acc = DMatrix::identity(n, n);
        for _ in 0..k {
            acc = &acc * &self.0;
        }
        Self(acc)
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        &self.0 * v
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn rows_as_vecs(&self) -> Vec<Vec<C64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[&ComplexMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.nrows()).sum();
        let cols = blocks.iter().map(|b| b.ncols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.view_mut((r, c), b.shape()).copy_from(&b.0);
            r += b.nrows();
            c += b.ncols();
        }
        Self(out)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;

    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.0.shape())?;
        f.debug_list().entries(self.rows_as_vecs()).finish()
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Serialize for ComplexMatrix {
    /// Row-major list of rows, each entry an `[re, im]` pair.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows_as_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(rows.len(), cols, entries).map_err(D::Error::custom)
    }
}

/// Absolute tolerance applied to operator norms of residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    atol: f64,
}

impl Tolerance {
    pub const DEFAULT_ATOL: f64 = 1e-10;
    /// For inputs that are exact in rational arithmetic.
    pub const EXACT_ATOL: f64 = 1e-12;

    pub fn new(atol: f64) -> Result<Self> {
        if atol > 0.0 && atol.is_finite() {
            Ok(Self { atol })
        } else {
            Err(Error::InvalidTolerance { atol })
        }
    }

    pub fn exact() -> Self {
        Self {
            atol: Self::EXACT_ATOL,
        }
    }

    pub fn atol(&self) -> f64 {
        self.atol
    }

    /// Zero threshold for values measured against `scale`.
    pub fn cutoff(&self, scale: f64) -> f64 {
        self.atol * scale.max(1.0)
    }

    pub fn accepts(&self, residual: f64) -> bool {
        residual <= self.atol
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: Self::DEFAULT_ATOL,
        }
    }
}

/// Outcome of a matrix predicate such as unitarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predicate {
    pub holds: bool,
    pub residual: f64,
}

/// Thin SVD with singular values in descending order.
pub struct Svd {
    pub u: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub v_t: DMatrix<C64>,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: DMatrix::zeros(r, 0),
            singular_values: Vec::new(),
            v_t: DMatrix::zeros(0, c),
        };
    }
    let s = SVD::try_new(m.0.clone(), true, true, f64::EPSILON, MAX_SWEEPS)
        .expect("SVD converges within the sweep cap");
    Svd {
        u: s.u.expect("u requested"),
        singular_values: s.singular_values.iter().copied().collect(),
        v_t: s.v_t.expect("v_t requested"),
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::try_new(m.0.clone(), false, false, f64::EPSILON, MAX_SWEEPS)
        .expect("SVD converges within the sweep cap")
        .singular_values
        .iter()
        .copied()
        .collect()
}

fn require_square(m: &ComplexMatrix, context: &'static str) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::DimensionMismatch {
            context,
            left: m.shape(),
            right: (m.ncols(), m.nrows()),
        })
    }
}

/// Operator (spectral) norm; zero for empty matrices.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m)[0]
}

/// `op_norm(a - b)`.
pub fn diff_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a - b))
}

/// Multiplies `v` by the conjugate phase of its largest-magnitude entry so
/// that entry becomes real positive. Ties go to the lowest index.
pub fn phase_normalize(v: &mut [C64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}

/// Orthonormal basis (as columns) of the numerical range of `m`.
pub fn range_basis(m: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let s = svd(m);
    let cut = tol.cutoff(s.singular_values.first().copied().unwrap_or(0.0));
    let rank = s.singular_values.iter().filter(|&&x| x > cut).count();
    let mut b = s.u.columns(0, rank).into_owned();
    for mut col in b.column_iter_mut() {
        phase_normalize(col.as_mut_slice());
    }
    ComplexMatrix(b)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `basis`.
pub fn complement_basis(basis: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let n = basis.nrows();
    let proj = basis * &basis.adjoint();
    range_basis(&(&ComplexMatrix::identity(n) - &proj), tol)
}

/// `B* M B`.
pub fn compress(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m, "compress")?;
    if m.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            context: "compress",
            left: m.shape(),
            right: b.shape(),
        });
    }
    Ok(&(&b.adjoint() * m) * b)
}

/// Hermitian eigendecomposition of `(M + M*)/2`, eigenvalues ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let e = SymmetricEigen::try_new(m.hermitian_part().0, f64::EPSILON, MAX_SWEEPS)
        .expect("Hermitian eigensolver converges within the sweep cap");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part; zero for the empty matrix.
pub fn min_eig_hermitian(m: &ComplexMatrix) -> Result<f64> {
    require_square(m, "min_eig_hermitian")?;
    Ok(hermitian_eigen(m).0.first().copied().unwrap_or(0.0))
}

/// Square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues with magnitude below the cutoff are set to zero, so rounding
/// noise of order 1e-16 does not turn into spurious 1e-8 singular values.
pub fn psd_sqrt(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let n = require_square(m, "psd_sqrt")?;
    let scale = op_norm(m);
    let cut = tol.cutoff(scale);
    let skew = diff_norm(m, &m.adjoint());
    if skew > cut {
        return Err(Error::NotHermitian { residual: skew });
    }
    let (values, q) = hermitian_eigen(m);
    if let Some(&lo) = values.first() {
        if lo < -cut {
            return Err(Error::IndefiniteMatrix { min_eigenvalue: lo });
        }
    }
    let roots: Vec<f64> = values
        .iter()
        .map(|&l| if l.abs() <= cut { 0.0 } else { l.max(0.0).sqrt() })
        .collect();
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::new(roots[j], 0.0);
    }
    let r = if n == 0 { q } else { &scaled * q.adjoint() };
    Ok(ComplexMatrix(r).hermitian_part())
}

/// Moore–Penrose pseudo-inverse with the standard rank cutoff.
pub fn pinv(m: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let (r, c) = m.shape();
    let s = svd(m);
    let cut = tol.cutoff(s.singular_values.first().copied().unwrap_or(0.0));
    let mut out = DMatrix::zeros(c, r);
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if sigma > cut {
            let v = s.v_t.row(k).adjoint();
            let u = s.u.column(k).adjoint();
            out += (v * u) * C64::new(1.0 / sigma, 0.0);
        }
    }
    ComplexMatrix(out)
}

pub fn is_unitary(m: &ComplexMatrix, tol: Tolerance) -> Result<Predicate> {
    let n = require_square(m, "is_unitary")?;
    let residual = diff_norm(&(&m.adjoint() * m), &ComplexMatrix::identity(n));
    Ok(Predicate {
        holds: tol.accepts(residual),
        residual,
    })
}

pub fn is_projection(m: &ComplexMatrix, tol: Tolerance) -> Result<Predicate> {
    require_square(m, "is_projection")?;
    let residual = diff_norm(&(m * m), m) + diff_norm(m, &m.adjoint());
    Ok(Predicate {
        holds: tol.accepts(residual),
        residual,
    })
}

/// Phase-normalized right singular vector for the largest singular value.
pub fn top_right_singular_vector(m: &ComplexMatrix) -> Option<ComplexVector> {
    let s = svd(m);
    if s.singular_values.first().copied().unwrap_or(0.0) == 0.0 {
        return None;
    }
    let mut v: Vec<C64> = s.v_t.row(0).iter().map(|z| z.conj()).collect();
    phase_normalize(&mut v);
    Some(DVector::from_vec(v))
}

/// Iteration cap for the QR-type sweeps, which otherwise loop forever on
/// some defective inputs.
const MAX_SWEEPS: usize = 10_000;

fn schur_triangle(m: &ComplexMatrix) -> Option<DMatrix<C64>> {
    Schur::try_new(m.0.clone(), f64::EPSILON, MAX_SWEEPS).map(|s| s.unpack().1)
}

/// Spectral radius: the smaller of the Schur estimate and the power-norm
/// bound `min_k ||M^k||^(1/k)`, which pins nilpotent matrices to exactly 0.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    let n = require_square(m, "spectral_radius")?;
    if n == 0 {
        return Ok(0.0);
    }
    let mut bound = f64::INFINITY;
    let mut power = m.clone();
    for k in 1..=n {
        let nrm = op_norm(&power);
        if nrm == 0.0 {
            return Ok(0.0);
        }
        bound = bound.min(nrm.powf(1.0 / k as f64));
        power = &power * m;
    }
    let schur = schur_triangle(m)
        .map(|t| (0..n).map(|i| t[(i, i)].norm()).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    Ok(schur.min(bound))
}

/// Eigenvalues of a square matrix via complex Schur form; `None` if the
/// iteration does not converge.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Option<Vec<C64>>> {
    let n = require_square(m, "eigenvalues")?;
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    Ok(schur_triangle(m).map(|t| (0..n).map(|i| t[(i, i)]).collect()))
}

/// Solves `A x = B` for square invertible `A`; `None` when the smallest
/// singular value of `A` is below `tol.atol`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix, tol: Tolerance) -> Option<ComplexMatrix> {
    let s = svd(a);
    let smin = s.singular_values.last().copied().unwrap_or(1.0);
    if smin < tol.atol() {
        return None;
    }
    a.0.clone().lu().solve(&b.0).map(ComplexMatrix)
}
