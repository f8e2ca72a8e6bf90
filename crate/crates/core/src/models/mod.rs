//! Characteristic function, defect kernel and the truncated functional
//! model of a C·0 contraction.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::dilation_build::{build_pure_dilation, embed_w_with, DilationReport};
use crate::dilation_data::{ConditionReport, DilationData, Space};
use crate::error::{Error, Result};
use crate::linalg::{
    diff_norm, hermitian_eigen, op_norm, psd_sqrt, range_basis, solve, ComplexMatrix,
    ComplexVector, Tolerance, C64,
};
use crate::tuples::{c0_diagnostic, defect, ContractionTuple, DefectData, Side};

/// Default number of grid points for [`delta_grid`].
pub const DEFAULT_GRID_SIZE: usize = 64;
/// Largest degree tried by [`auto_truncation`].
pub const MAX_TRUNCATION: usize = 256;
/// Tail target of [`auto_truncation`].
pub const TRUNCATION_TARGET: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicSample {
    pub z: C64,
    /// `Θ_T(z)` from the basis of `D_T` to the basis of `D_{T*}`.
    pub theta: ComplexMatrix,
    /// Norm of the part of `Θ_T(z) D_T` outside `D_{T*}`.
    pub mapping_residual: f64,
}

struct Defects {
    col: DefectData,
    row: DefectData,
}

fn defects(x: &ComplexMatrix, tol: Tolerance) -> Result<Defects> {
    Ok(Defects {
        col: defect(x, Side::Column, tol)?,
        row: defect(x, Side::Row, tol)?,
    })
}

/// `Θ_T(z) = [-T + z D_{T*} (I - z T*)^{-1} D_T]` restricted to `D_T`.
pub fn theta(x: &ComplexMatrix, z: C64, tol: Tolerance) -> Result<CharacteristicSample> {
    let d = defects(x, tol)?;
    theta_with(x, &d, z, tol)
}

fn theta_with(x: &ComplexMatrix, d: &Defects, z: C64, tol: Tolerance) -> Result<CharacteristicSample> {
    let n = x.nrows();
    let id = ComplexMatrix::identity(n);
    let resolvent_arg = &id - &x.adjoint().scale(z);
    let rhs = &d.col.operator * &d.col.basis;
    let solved = solve(&resolvent_arg, &rhs, tol).ok_or(Error::SingularResolvent { re: z.re, im: z.im })?;
    let full = &(&d.row.operator * &solved).scale(z) - &(x * &d.col.basis);
    let theta = &d.row.basis.adjoint() * &full;
    let off_target = &full - &(&d.row.basis * &theta);
    Ok(CharacteristicSample {
        z,
        theta,
        mapping_residual: op_norm(&off_target),
    })
}

/// Taylor coefficients `Θ_0 = -T` and `Θ_k = D_{T*} T*^{k-1} D_T`, for
/// `k < count`, in the defect bases.
pub fn theta_taylor(x: &ComplexMatrix, count: usize, tol: Tolerance) -> Result<Vec<ComplexMatrix>> {
    let d = defects(x, tol)?;
    Ok(taylor_with(x, &d.row.operator, &d.row.basis, &d.col, count))
}

fn taylor_with(
    x: &ComplexMatrix,
    row_op: &ComplexMatrix,
    row_basis: &ComplexMatrix,
    col: &DefectData,
    count: usize,
) -> Vec<ComplexMatrix> {
    let left = &row_basis.adjoint() * row_op;
    let mut right = &col.operator * &col.basis;
    let adj = x.adjoint();
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(-&(&(&row_basis.adjoint() * x) * &col.basis));
    }
    for _ in 1..count {
        out.push(&left * &right);
        right = &adj * &right;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaPoint {
    pub t: f64,
    pub delta: ComplexMatrix,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaGrid {
    pub points: Vec<DeltaPoint>,
    pub max_rank: usize,
}

/// `Δ_T(t) = [I - Θ_T(e^{it})* Θ_T(e^{it})]^{1/2}` at `grid_size`
/// equispaced points of `[0, 2π)`.
///
/// A unimodular eigenvalue `λ` of `T` makes `I - λ T*` singular, and the
/// error names that point even when it is not on the grid.
pub fn delta_grid(x: &ComplexMatrix, grid_size: usize, tol: Tolerance) -> Result<DeltaGrid> {
    let d = defects(x, tol)?;
    if let Some(eigs) = crate::linalg::eigenvalues(x)? {
        if let Some(l) = eigs.iter().find(|l| l.norm() >= 1.0 - tol.atol()) {
            return Err(Error::SingularResolvent { re: l.re, im: l.im });
        }
    }
    let rank = d.col.rank();
    let id = ComplexMatrix::identity(rank);
    let mut points = Vec::with_capacity(grid_size);
    for k in 0..grid_size {
        let t = TAU * k as f64 / grid_size as f64;
        let s = theta_with(x, &d, C64::from_polar(1.0, t), tol)?;
        let gap = (&id - &(&s.theta.adjoint() * &s.theta)).hermitian_part();
        let cut = tol.cutoff(1.0);
        let rank = hermitian_eigen(&gap).0.iter().filter(|&&l| l > cut).count();
        points.push(DeltaPoint {
            t,
            delta: psd_sqrt(&gap, tol)?,
            rank,
        });
    }
    let max_rank = points.iter().map(|p| p.rank).max().unwrap_or(0);
    Ok(DeltaGrid { points, max_rank })
}

/// Smallest `N <= 256` with `||T*^N|| < 1e-10`, with that norm.
pub fn auto_truncation(x: &ComplexMatrix) -> Result<(usize, f64)> {
    let adj = x.adjoint();
    let mut power = adj.clone();
    let mut achieved = f64::INFINITY;
    for n in 1..=MAX_TRUNCATION {
        achieved = op_norm(&power);
        if achieved < TRUNCATION_TARGET {
            return Ok((n, achieved));
        }
        power = &power * &adj;
    }
    Err(Error::TruncationTooLarge {
        max: MAX_TRUNCATION,
        target: TRUNCATION_TARGET,
        achieved,
    })
}

/// Truncation of `H_T = H²(D_{T*}) ⊖ M_Θ H²(D_T)` to the first `n` blocks.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSpace {
    pub n: usize,
    pub ambient_dim: usize,
    /// `I - M_Θ M_Θ*` on the truncation.
    pub projector: ComplexMatrix,
    pub basis: ComplexMatrix,
    /// `W_N`: coefficients of `Σ_k z^k D_{T*} T*^k h` for `k < n`.
    pub embedding: ComplexMatrix,
    /// `||W_N W_N* + M_Θ M_Θ* - I||` on the truncation.
    pub identity_residual: f64,
    /// `||T*^N||`.
    pub tail_bound: f64,
}

impl ModelSpace {
    /// Allowed residual for identities that hold up to the truncation tail.
    pub fn bound(&self, tol: Tolerance) -> f64 {
        10.0 * self.tail_bound + tol.atol()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

pub fn model_space(x: &ComplexMatrix, n: usize, tol: Tolerance) -> Result<ModelSpace> {
    let row = defect(x, Side::Row, tol)?;
    model_space_with(x, &row.operator, &row.basis, n, tol)
}

/// [`model_space`] with a given basis of `D_{T*}`.
fn model_space_with(
    x: &ComplexMatrix,
    row_op: &ComplexMatrix,
    row_basis: &ComplexMatrix,
    n: usize,
    tol: Tolerance,
) -> Result<ModelSpace> {
    let c0 = c0_diagnostic(x, 0, tol)?;
    if !c0.is_c0 {
        return Err(Error::NotC0 {
            spectral_radius: c0.spectral_radius,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation degree must be at least 1".into()));
    }
    let col = defect(x, Side::Column, tol)?;
    let coeffs = taylor_with(x, row_op, row_basis, &col, n);
    let (rs, r) = (row_basis.ncols(), col.rank());
    let mut m = nalgebra::DMatrix::zeros(n * rs, n * r);
    for i in 0..n {
        for j in 0..=i {
            m.view_mut((i * rs, j * r), (rs, r)).copy_from(coeffs[i - j].as_dmatrix());
        }
    }
    let m = ComplexMatrix::from_dmatrix(m)?;
    let ambient = n * rs;
    let projector = &ComplexMatrix::identity(ambient) - &(&m * &m.adjoint());

    let dim = x.nrows();
    let mut w = nalgebra::DMatrix::zeros(ambient, dim);
    for j in 0..dim {
        let e = ComplexVector::from_fn(dim, |k, _| if k == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let emb = embed_w_with(x, row_op, row_basis, &e, n);
        for (k, block) in emb.coefficients.iter().enumerate() {
            w.view_mut((k * rs, j), (rs, 1)).copy_from(block);
        }
    }
    let embedding = ComplexMatrix::from_dmatrix(w)?;
    let identity_residual = diff_norm(&(&embedding * &embedding.adjoint()), &projector);
    let tail_bound = op_norm(&x.adjoint().pow(n));
    Ok(ModelSpace {
        n,
        ambient_dim: ambient,
        basis: range_basis(&projector, tol),
        projector,
        embedding,
        identity_residual,
        tail_bound,
    })
}

/// Checks that `W_N` lands in the truncated model space and that the
/// compressions of the multipliers `M_{U_i P_i^⊥ + z U_i P_i}` act there
/// as the tuple does: `P_{H_T} M_{φ_i} W_N h = W_N T_i h` on a basis of `H`.
pub fn verify_model(t: &ContractionTuple, d: &DilationData, n: usize, tol: Tolerance) -> Result<DilationReport> {
    if d.space != Space::DefectOfTAdjoint {
        return Err(Error::WrongSpace {
            expected: Space::DefectOfTAdjoint.label(),
            found: d.space.label(),
        });
    }
    let multipliers = build_pure_dilation(t, d, tol)?;
    let x = t.product();
    let ms = model_space_with(x, &d.defect, &d.basis, n, tol)?;
    let bound = ms.bound(tol);
    let mut reports = Vec::new();
    let mut push = |id: &str, indices: Vec<usize>, residual: f64| {
        let mut r = ConditionReport::scalar(id, indices, residual, tol);
        r.passes = residual <= bound;
        reports.push(r);
    };
    push("model-identity", vec![], ms.identity_residual);
    let outside = &(&ComplexMatrix::identity(ms.ambient_dim) - &ms.projector) * &ms.embedding;
    push("model-range", vec![], op_norm(&outside));

    let rank = d.rank();
    for (i, phi) in multipliers.iter().enumerate() {
        let mut worst = 0.0f64;
        for j in 0..t.dim() {
            let wh = column_blocks(&ms.embedding, j, rank, n);
            let mut image = phi.apply(&wh);
            image.truncate(n);
            let compressed = ms.projector.apply(&stack(&image));
            let target = ms.embedding.apply(&t.op(i).column(j).into_owned());
            worst = worst.max((compressed - target).norm());
        }
        push("model-intertwining", vec![i], worst);
    }
    let mut tail = ConditionReport::scalar("tail-bound", vec![], ms.tail_bound, tol);
    tail.informational = true;
    reports.push(tail);
    Ok(DilationReport {
        passes: crate::dilation_data::overall_pass(&reports),
        max_residual: crate::dilation_data::max_residual(&reports),
        reports,
    })
}

fn column_blocks(m: &ComplexMatrix, j: usize, rank: usize, n: usize) -> Vec<ComplexVector> {
    (0..n).map(|k| m.column(j).rows(k * rank, rank).into_owned()).collect()
}

fn stack(blocks: &[ComplexVector]) -> ComplexVector {
    ComplexVector::from_iterator(
        blocks.iter().map(|b| b.len()).sum(),
        blocks.iter().flat_map(|b| b.iter().copied()),
    )
}

#[cfg(test)]
mod tests;
