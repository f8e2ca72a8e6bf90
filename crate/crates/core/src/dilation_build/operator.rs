use nalgebra::DVector;

use super::BlockSupportedVector;
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, ComplexVector, ZERO};

/// Block operator on `H ⊕ D ⊕ D ⊕ ...` of the form
///
/// ```text
/// [ corner  0     0     ... ]
/// [ feed    diag  0     ... ]
/// [ 0       sub   diag  ... ]
/// [ 0       0     sub   ... ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SchafferOperator {
    pub corner: ComplexMatrix,
    pub feed: ComplexMatrix,
    pub diag: ComplexMatrix,
    pub sub: ComplexMatrix,
}

impl SchafferOperator {
    pub fn new(corner: ComplexMatrix, feed: ComplexMatrix, diag: ComplexMatrix, sub: ComplexMatrix) -> Result<Self> {
        let dim = corner.nrows();
        let rank = diag.nrows();
        let shapes = [
            (&corner, (dim, dim)),
            (&feed, (rank, dim)),
            (&diag, (rank, rank)),
            (&sub, (rank, rank)),
        ];
        for (m, want) in shapes {
            if m.shape() != want {
                return Err(Error::DimensionMismatch {
                    context: "Schaffer operator blocks",
                    left: want,
                    right: m.shape(),
                });
            }
        }
        Ok(Self {
            corner,
            feed,
            diag,
            sub,
        })
    }

    pub fn dim(&self) -> usize {
        self.corner.nrows()
    }

    pub fn rank(&self) -> usize {
        self.diag.nrows()
    }

    fn check(&self, x: &BlockSupportedVector) -> Result<()> {
        if (x.dim(), x.rank()) != (self.dim(), self.rank()) {
            return Err(Error::DimensionMismatch {
                context: "apply",
                left: (self.dim(), self.rank()),
                right: (x.dim(), x.rank()),
            });
        }
        Ok(())
    }

    /// Exact action; the support grows by at most one block.
    pub fn apply(&self, x: &BlockSupportedVector) -> Result<BlockSupportedVector> {
        self.check(x)?;
        let head = self.corner.apply(x.head());
        let mut tail = Vec::with_capacity(x.tail().len() + 1);
        if self.rank() > 0 {
            tail.push(self.feed.apply(x.head()) + self.diag.apply(&x.block(0)));
            for k in 1..=x.tail().len() {
                tail.push(self.sub.apply(&x.block(k - 1)) + self.diag.apply(&x.block(k)));
            }
        }
        Ok(BlockSupportedVector::from_parts(head, tail, self.rank()))
    }

    /// Exact action of the adjoint; the support does not grow.
    pub fn apply_adjoint(&self, x: &BlockSupportedVector) -> Result<BlockSupportedVector> {
        self.check(x)?;
        let head = self.corner.adjoint().apply(x.head()) + self.feed.adjoint().apply(&x.block(0));
        let (diag_adj, sub_adj) = (self.diag.adjoint(), self.sub.adjoint());
        let tail = (0..x.tail().len())
            .map(|k| diag_adj.apply(&x.block(k)) + sub_adj.apply(&x.block(k + 1)))
            .collect();
        Ok(BlockSupportedVector::from_parts(head, tail, self.rank()))
    }

    /// Same operator in the general structured form.
    pub fn to_structured(&self) -> StructuredOperator {
        StructuredOperator {
            corner: self.corner.clone(),
            feed: MatrixPolynomial::new(vec![self.feed.clone()]),
            symbol: MatrixPolynomial::new(vec![self.diag.clone(), self.sub.clone()]),
        }
    }

    /// Top-left corner of the operator matrix with `blocks` tail blocks.
    /// Used as a reference evaluation in tests.
    pub fn dense_truncation(&self, blocks: usize) -> ComplexMatrix {
        let (d, r) = (self.dim(), self.rank());
        let mut m = ComplexMatrix::zeros(d + blocks * r, d + blocks * r).into_dmatrix();
        m.view_mut((0, 0), (d, d)).copy_from(self.corner.as_dmatrix());
        if blocks > 0 {
            m.view_mut((d, 0), (r, d)).copy_from(self.feed.as_dmatrix());
        }
        for k in 0..blocks {
            m.view_mut((d + k * r, d + k * r), (r, r)).copy_from(self.diag.as_dmatrix());
            if k + 1 < blocks {
                m.view_mut((d + (k + 1) * r, d + k * r), (r, r)).copy_from(self.sub.as_dmatrix());
            }
        }
        ComplexMatrix::wrap(m)
    }
}

/// Polynomial `Σ_k c_k z^k` with matrix coefficients of a common shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&ComplexMatrix> {
        self.coeffs.get(k)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Product `self(z) · other(z)`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::new(Vec::new());
        }
        let (r, c) = (self.coeffs[0].nrows(), other.coeffs[0].ncols());
        let mut out = vec![ComplexMatrix::zeros(r, c); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    /// Every coefficient multiplied on the right by `m`.
    pub fn mul_right(&self, m: &ComplexMatrix) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * m).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        let coeffs = (0..len)
            .map(|k| match (self.coeff(k), other.coeff(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(coeffs)
    }

    /// Largest operator-norm difference of corresponding coefficients, with
    /// missing coefficients read as zero.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|k| match (self.coeff(k), other.coeff(k)) {
                (Some(a), Some(b)) => op_norm(&(a - b)),
                (Some(a), None) | (None, Some(a)) => op_norm(a),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Multiplication on a finitely supported coefficient sequence.
    pub fn apply(&self, seq: &[ComplexVector]) -> Vec<ComplexVector> {
        if seq.is_empty() || self.is_empty() {
            return Vec::new();
        }
        let rows = self.coeffs[0].nrows();
        let mut out = vec![DVector::from_element(rows, ZERO); seq.len() + self.len() - 1];
        for (j, g) in seq.iter().enumerate() {
            for (k, c) in self.coeffs.iter().enumerate() {
                out[j + k] += c.apply(g);
            }
        }
        out
    }

    /// Adjoint multiplication, `(M* g)_k = Σ_j c_j* g_{k+j}`, evaluated on
    /// the given coefficients with everything beyond them read as zero.
    pub fn apply_adjoint_truncated(&self, seq: &[ComplexVector]) -> Vec<ComplexVector> {
        let adj: Vec<ComplexMatrix> = self.coeffs.iter().map(ComplexMatrix::adjoint).collect();
        (0..seq.len())
            .map(|k| {
                let mut acc = DVector::from_element(adj.first().map_or(0, |c| c.nrows()), ZERO);
                for (j, c) in adj.iter().enumerate() {
                    if let Some(g) = seq.get(k + j) {
                        acc += c.apply(g);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Lower-triangular operator on `H ⊕ D ⊕ D ⊕ ...` that leaves the tail
/// invariant: `head ↦ corner·head`, and the tail of the image is the
/// sequence `feed(z)·head + symbol(z)·tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredOperator {
    pub corner: ComplexMatrix,
    pub feed: MatrixPolynomial,
    pub symbol: MatrixPolynomial,
}

impl StructuredOperator {
    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            corner: &self.corner * &other.corner,
            feed: self.feed.mul_right(&other.corner).add(&self.symbol.mul(&other.feed)),
            symbol: self.symbol.mul(&other.symbol),
        }
    }

    pub fn apply(&self, x: &BlockSupportedVector) -> BlockSupportedVector {
        let head = self.corner.apply(x.head());
        let from_head = self.feed.apply(std::slice::from_ref(x.head()));
        let from_tail = self.symbol.apply(x.tail());
        let len = from_head.len().max(from_tail.len());
        let zero = DVector::from_element(x.rank(), ZERO);
        let tail = (0..len)
            .map(|k| from_head.get(k).unwrap_or(&zero) + from_tail.get(k).unwrap_or(&zero))
            .collect();
        BlockSupportedVector::from_parts(head, tail, x.rank())
    }

    /// Largest blockwise difference in operator norm.
    pub fn max_block_diff(&self, other: &Self) -> f64 {
        op_norm(&(&self.corner - &other.corner))
            .max(self.feed.max_coeff_diff(&other.feed))
            .max(self.symbol.max_coeff_diff(&other.symbol))
    }
}

/// Multiplier on `H²(D)` with symbol `c0 + z c1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyMultiplier {
    pub c0: ComplexMatrix,
    pub c1: ComplexMatrix,
}

impl HardyMultiplier {
    pub fn symbol(&self) -> MatrixPolynomial {
        MatrixPolynomial::new(vec![self.c0.clone(), self.c1.clone()])
    }

    pub fn apply(&self, seq: &[ComplexVector]) -> Vec<ComplexVector> {
        self.symbol().apply(seq)
    }

    pub fn apply_adjoint_truncated(&self, seq: &[ComplexVector]) -> Vec<ComplexVector> {
        self.symbol().apply_adjoint_truncated(seq)
    }
}

/// Co-isometric extension `Z = X*` of a tuple member, where `X` is the
/// Schäffer-type operator built for the adjoint tuple on `D_{T*}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoisometricExtension {
    pub adjoint: SchafferOperator,
}

impl CoisometricExtension {
    pub fn apply(&self, x: &BlockSupportedVector) -> Result<BlockSupportedVector> {
        self.adjoint.apply_adjoint(x)
    }

    pub fn apply_adjoint(&self, x: &BlockSupportedVector) -> Result<BlockSupportedVector> {
        self.adjoint.apply(x)
    }
}
