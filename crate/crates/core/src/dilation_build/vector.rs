use std::ops::{Add, Sub};

use nalgebra::DVector;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, C64, ZERO};
use crate::random::{random_vector, Rng};

/// Element of `H ⊕ D ⊕ D ⊕ ...` with finitely many nonzero tail blocks.
///
/// Trailing zero blocks are trimmed, so two equal vectors have equal
/// representations.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSupportedVector {
    head: ComplexVector,
    tail: Vec<ComplexVector>,
    rank: usize,
}

impl BlockSupportedVector {
    pub fn new(head: ComplexVector, tail: Vec<ComplexVector>, rank: usize) -> Result<Self> {
        if let Some(bad) = tail.iter().find(|b| b.len() != rank) {
            return Err(Error::DimensionMismatch {
                context: "tail block",
                left: (rank, 1),
                right: (bad.len(), 1),
            });
        }
        Ok(Self::from_parts(head, tail, rank))
    }

    pub(crate) fn from_parts(head: ComplexVector, tail: Vec<ComplexVector>, rank: usize) -> Self {
        let mut v = Self { head, tail, rank };
        v.trim();
        v
    }

    pub fn from_head(head: ComplexVector, rank: usize) -> Self {
        Self {
            head,
            tail: Vec::new(),
            rank,
        }
    }

    pub fn zero(dim: usize, rank: usize) -> Self {
        Self::from_head(DVector::from_element(dim, ZERO), rank)
    }

    /// Gaussian head and `tail_len` Gaussian tail blocks.
    pub fn random(rng: &mut Rng, dim: usize, rank: usize, tail_len: usize) -> Self {
        let head = random_vector(rng, dim);
        let tail = (0..tail_len).map(|_| random_vector(rng, rank)).collect();
        Self::from_parts(head, tail, rank)
    }

    /// Random vector with up to `max_tail` tail blocks, scaled to unit norm.
    pub fn random_unit(rng: &mut Rng, dim: usize, rank: usize, max_tail: usize) -> Self {
        let len = if rank == 0 { 0 } else { rng.random_range(0..=max_tail) };
        let v = Self::random(rng, dim, rank, len);
        let n = v.norm();
        if n == 0.0 {
            v
        } else {
            v.scale(C64::new(1.0 / n, 0.0))
        }
    }

    fn trim(&mut self) {
        while self.tail.last().is_some_and(|b| b.iter().all(|z| *z == ZERO)) {
            self.tail.pop();
        }
    }

    pub fn head(&self) -> &ComplexVector {
        &self.head
    }

    pub fn tail(&self) -> &[ComplexVector] {
        &self.tail
    }

    pub fn dim(&self) -> usize {
        self.head.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Tail block `k`, zero beyond the stored support.
    pub fn block(&self, k: usize) -> ComplexVector {
        self.tail
            .get(k)
            .cloned()
            .unwrap_or_else(|| DVector::from_element(self.rank, ZERO))
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = self.head.dotc(&other.head);
        for (a, b) in self.tail.iter().zip(&other.tail) {
            acc += a.dotc(b);
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_parts(
            &self.head * c,
            self.tail.iter().map(|b| b * c).collect(),
            self.rank,
        )
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&ComplexVector, &ComplexVector) -> ComplexVector) -> Self {
        assert_eq!((self.dim(), self.rank), (other.dim(), other.rank), "block vector shapes");
        let len = self.tail.len().max(other.tail.len());
        let tail = (0..len).map(|k| f(&self.block(k), &other.block(k))).collect();
        Self::from_parts(f(&self.head, &other.head), tail, self.rank)
    }

    /// Concatenation of the head and the first `blocks` tail blocks.
    pub fn to_dense(&self, blocks: usize) -> ComplexVector {
        let mut out = Vec::with_capacity(self.dim() + blocks * self.rank);
        out.extend(self.head.iter().copied());
        for k in 0..blocks {
            out.extend(self.block(k).iter().copied());
        }
        DVector::from_vec(out)
    }
}

impl Add for &BlockSupportedVector {
    type Output = BlockSupportedVector;
    fn add(self, rhs: &BlockSupportedVector) -> BlockSupportedVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &BlockSupportedVector {
    type Output = BlockSupportedVector;
    fn sub(self, rhs: &BlockSupportedVector) -> BlockSupportedVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}
