//! Concurrence lower bounds from trace-norm functionals.
//!
//! Each bound has the form `sqrt(2 / (N (N - 1))) * f(rho)` for a convex functional
//! `f` that is dominated on pure states by `2 sum_{i<j} alpha_i alpha_j`. The
//! functionals here are
//!
//! * `f_phi(rho) = ||(I ⊗ Φ) rho|| - (N - 1)` for the positive, not completely
//!   positive map Φ defined in [`phi_map`];
//! * `f_ppt(rho) = ||rho^{T_1}|| - 1`;
//! * `f_r(rho) = ||realign(rho)|| - 1`.
//!
//! Values are never clamped at zero; a negative bound simply certifies nothing.

use std::collections::BTreeSet;

use crate::bipartite::{partial_transpose_first, realign, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{trace_norm, CMatrix};

/// A bound certifies entanglement when it exceeds this value.
pub const DETECTION_TOL: f64 = 1e-9;

/// The map Φ on N x N matrices.
///
/// Off-diagonal entries are negated; diagonal entry `i` becomes
/// `(N - 2) a_ii + a_{i'i'}` with `i' = (i + 1) mod N`.
pub fn phi_map(a: &CMatrix, n: usize) -> Result<CMatrix> {
    if a.rows() != n || a.cols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let nm2 = n as f64 - 2.0;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let k = (i + 1) % n;
            a[(i, i)] * nm2 + a[(k, k)]
        } else {
            -a[(i, j)]
        }
    }))
}

/// `(I_N ⊗ Φ) rho`: Φ applied to every N x N block of rho.
pub fn apply_id_phi(rho: &DensityMatrix) -> CMatrix {
    apply_blockwise(rho.matrix(), rho.dim(), |block| {
        phi_map(block, block.rows()).expect("block is square")
    })
}

/// Applies `map` to every N x N block `(a, a')` of an N^2 x N^2 matrix.
pub fn apply_blockwise(m: &CMatrix, n: usize, map: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for ap in 0..n {
            let block = CMatrix::from_fn(n, n, |b, bp| m[(a * n + b, ap * n + bp)]);
            let image = map(&block);
            for b in 0..n {
                for bp in 0..n {
                    out[(a * n + b, ap * n + bp)] = image[(b, bp)];
                }
            }
        }
    }
    out
}

/// `sqrt(2 / (N (N - 1))) * f`, sign preserved.
pub fn bound_from_functional(f_value: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::BadDimension(n));
    }
    let nf = n as f64;
    Ok((2.0 / (nf * (nf - 1.0))).sqrt() * f_value)
}

pub fn phi_trace_norm(rho: &DensityMatrix) -> Result<f64> {
    trace_norm(&apply_id_phi(rho))
}

pub fn ppt_trace_norm(rho: &DensityMatrix) -> Result<f64> {
    trace_norm(&partial_transpose_first(rho))
}

pub fn realign_trace_norm(rho: &DensityMatrix) -> Result<f64> {
    trace_norm(&realign(rho))
}

pub fn phi_functional(rho: &DensityMatrix) -> Result<f64> {
    Ok(phi_trace_norm(rho)? - (rho.dim() as f64 - 1.0))
}

pub fn ppt_functional(rho: &DensityMatrix) -> Result<f64> {
    Ok(ppt_trace_norm(rho)? - 1.0)
}

pub fn realign_functional(rho: &DensityMatrix) -> Result<f64> {
    Ok(realign_trace_norm(rho)? - 1.0)
}

pub fn phi_bound(rho: &DensityMatrix) -> Result<f64> {
    bound_from_functional(phi_functional(rho)?, rho.dim())
}

pub fn ppt_bound(rho: &DensityMatrix) -> Result<f64> {
    bound_from_functional(ppt_functional(rho)?, rho.dim())
}

pub fn realign_bound(rho: &DensityMatrix) -> Result<f64> {
    bound_from_functional(realign_functional(rho)?, rho.dim())
}

/// All bounds for one state, with the trace norms they were derived from.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub phi_trace_norm: f64,
    pub ppt_trace_norm: f64,
    pub realign_trace_norm: f64,
    pub phi_bound: f64,
    pub ppt_bound: f64,
    pub realign_bound: f64,
    /// Present only for members of the Hou family.
    pub witness_bound: Option<f64>,
    pub detected_by: BTreeSet<&'static str>,
}

impl BoundReport {
    pub fn compute(rho: &DensityMatrix, witness_bound: Option<f64>, detection_tol: f64) -> Result<Self> {
        let n = rho.dim();
        let phi_tn = phi_trace_norm(rho)?;
        let ppt_tn = ppt_trace_norm(rho)?;
        let realign_tn = realign_trace_norm(rho)?;
        let phi = bound_from_functional(phi_tn - (n as f64 - 1.0), n)?;
        let ppt = bound_from_functional(ppt_tn - 1.0, n)?;
        let realign = bound_from_functional(realign_tn - 1.0, n)?;

        let detected_by = [
            ("phi", Some(phi)),
            ("ppt", Some(ppt)),
            ("realign", Some(realign)),
            ("witness", witness_bound),
        ]
        .into_iter()
        .filter(|(_, v)| v.is_some_and(|v| v > detection_tol))
        .map(|(name, _)| name)
        .collect();

        Ok(BoundReport {
            n,
            phi_trace_norm: phi_tn,
            ppt_trace_norm: ppt_tn,
            realign_trace_norm: realign_tn,
            phi_bound: phi,
            ppt_bound: ppt,
            realign_bound: realign,
            witness_bound,
            detected_by,
        })
    }

    pub fn max_bound(&self) -> f64 {
        let mut m = self.phi_bound.max(self.ppt_bound).max(self.realign_bound);
        if let Some(w) = self.witness_bound {
            m = m.max(w);
        }
        m
    }
}
