//! Seeded random instances for verification trials and tests.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ComplexMatrix, ComplexVector, C64};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x00D1_1A7E;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Complex Gaussian matrix.
pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gaussian(rng);
        }
    }
    ComplexMatrix::wrap(m)
}

pub fn random_vector(rng: &mut Rng, len: usize) -> ComplexVector {
    DVector::from_fn(len, |_, _| gaussian(rng))
}

/// Uniformly distributed unit vector; the zero-length vector when `len == 0`.
pub fn random_unit_vector(rng: &mut Rng, len: usize) -> ComplexVector {
    let v = random_vector(rng, len);
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v / C64::new(n, 0.0)
    }
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix
/// with the diagonal phases of R divided out.
pub fn random_unitary(rng: &mut Rng, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = random_matrix(rng, n, n).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            col *= d / d.norm();
        }
    }
    ComplexMatrix::wrap(q)
}

/// Orthogonal projection of the given rank onto a random subspace.
pub fn random_projection(rng: &mut Rng, n: usize, rank: usize) -> ComplexMatrix {
    let q = random_unitary(rng, n);
    let cols = ComplexMatrix::wrap(q.columns(0, rank.min(n)).into_owned());
    &cols * &cols.adjoint()
}

/// Random unimodular scalar.
pub fn random_phase(rng: &mut Rng) -> C64 {
    let t: f64 = rand::Rng::random_range(rng, 0.0..std::f64::consts::TAU);
    C64::from_polar(1.0, t)
}
