//! Seeded instances built from simultaneously diagonal model data.

use rand::Rng as _;
use serde::Serialize;

use super::{overall_pass, verify_bdf};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance, ONE};
use crate::random::{random_phase, seeded};
use crate::tuples::ContractionTuple;

/// Unitaries and projections on a coefficient space.
#[derive(Debug, Clone, Serialize)]
pub struct ModelData {
    pub u: Vec<ComplexMatrix>,
    pub p: Vec<ComplexMatrix>,
}

/// Diagonal `U_i` with product `I` and diagonal 0/1 `P_i` that partition
/// the coordinates.
pub fn gen_diagonal_model_data(rank: usize, n: usize, seed: u64) -> Result<ModelData> {
    if rank == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "rank and n must be positive, got rank {rank}, n {n}"
        )));
    }
    let mut rng = seeded(seed);
    let mut phases = vec![vec![ONE; rank]; n];
    let mut owner = vec![0usize; rank];
    for a in 0..rank {
        let mut acc = ONE;
        for row in phases.iter_mut().take(n - 1) {
            row[a] = random_phase(&mut rng);
            acc *= row[a];
        }
        phases[n - 1][a] = acc.conj();
        owner[a] = rng.random_range(0..n);
    }
    let u = phases.iter().map(|ph| ComplexMatrix::diag(ph)).collect();
    let p = (0..n)
        .map(|i| {
            let d: Vec<f64> = owner.iter().map(|&o| if o == i { 1.0 } else { 0.0 }).collect();
            ComplexMatrix::diag_real(&d)
        })
        .collect();
    Ok(ModelData { u, p })
}

/// Compresses `M_{U_i P_i^⊥ + z U_i P_i}` to polynomials of degree `< m`.
///
/// Coordinates are coefficient-major: index `k * rank + a` is coordinate
/// `a` of the `z^k` coefficient. Each `T_i` is block lower-bidiagonal with
/// `U_i P_i^⊥` on the diagonal and `U_i P_i` below it, so the product is the
/// truncated shift and is nilpotent.
pub fn gen_compressed_tuple(data: &ModelData, m: usize, tol: Tolerance) -> Result<ContractionTuple> {
    if m == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let reports = verify_bdf(&data.u, &data.p, tol)?;
    if !overall_pass(&reports) {
        let worst = reports
            .iter()
            .filter(|r| !r.passes)
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
            .expect("a failing report exists");
        return Err(Error::InvalidModelData {
            condition: worst.condition_id.clone(),
            residual: worst.residual,
        });
    }
    let rank = data.u[0].nrows();
    let id = ComplexMatrix::identity(rank);
    let ops = data
        .u
        .iter()
        .zip(&data.p)
        .map(|(u, p)| {
            let c0 = u * &(&id - p);
            let c1 = u * p;
            toeplitz_bidiagonal(&c0, &c1, m)
        })
        .collect();
    ContractionTuple::new(ops, tol)
}

fn toeplitz_bidiagonal(c0: &ComplexMatrix, c1: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let r = c0.nrows();
    let mut out = ComplexMatrix::zeros(m * r, m * r).into_dmatrix();
    for k in 0..m {
        out.view_mut((k * r, k * r), (r, r)).copy_from(c0.as_dmatrix());
        if k + 1 < m {
            out.view_mut(((k + 1) * r, k * r), (r, r)).copy_from(c1.as_dmatrix());
        }
    }
    ComplexMatrix::wrap(out)
}
