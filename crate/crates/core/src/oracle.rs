//! Ground truth for the bounds: pure-state concurrence, the spectral structure of
//! `(I ⊗ Φ)|psi><psi|` in Schmidt form, and a sampled upper estimate of the
//! mixed-state concurrence.
//!
//! For `|psi> = sum_i alpha_i |ii>` the matrix `T = (I ⊗ Φ)|psi><psi|` has
//! `N^2 - 2N` zero singular values, the values `alpha_i^2`, and the singular
//! values of the real symmetric matrix `B` from [`b_matrix`]. The checks below
//! verify that structure, the characteristic polynomial of `B`, the root
//! relations it implies, and the functional inequality that makes `f_phi`
//! admissible as a concurrence bound.

use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bipartite::{
    density_from_pure, partial_trace_second, pure_from_schmidt, DensityMatrix, PureState, SchmidtVector,
};
use crate::bounds::{apply_blockwise, phi_map};
use crate::error::Error;
use crate::linalg::{hermitian_eigs, singular_values, trace_norm, CMatrix, C64};
use crate::states::{random_isometry, rng_from_seed};

/// Default number of random decompositions tried by [`convex_roof_upper`].
pub const ROOF_SAMPLES: usize = 200;

const RANK_CUTOFF: f64 = 1e-13;

/// A failed property, with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub alphas: Vec<f64>,
    pub quantity: String,
    pub observed: f64,
    pub limit: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} = {:e} violates limit {:e} at alpha = {:?}",
            self.check, self.quantity, self.observed, self.limit, self.alphas
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("{0}")]
    Violated(Violation),
    #[error(transparent)]
    Numerical(#[from] Error),
}

impl CheckError {
    pub fn violation(&self) -> Option<&Violation> {
        match self {
            CheckError::Violated(v) => Some(v),
            CheckError::Numerical(_) => None,
        }
    }
}

pub type CheckResult<T = ()> = Result<T, CheckError>;

fn violated(check: &'static str, alpha: &SchmidtVector, quantity: impl Into<String>, observed: f64, limit: f64) -> CheckError {
    CheckError::Violated(Violation {
        check,
        alphas: alpha.alphas().to_vec(),
        quantity: quantity.into(),
        observed,
        limit,
    })
}

/// `2 sqrt(sum_{i<j} alpha_i^2 alpha_j^2)`.
pub fn pure_concurrence(alpha: &SchmidtVector) -> f64 {
    let a = alpha.alphas();
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            s += (a[i] * a[j]).powi(2);
        }
    }
    2.0 * s.sqrt()
}

/// `sqrt(2 (1 - tr rho_1^2))` from the reduced state.
pub fn pure_concurrence_from_reduced(psi: &PureState) -> f64 {
    let rho1 = partial_trace_second(&density_from_pure(psi));
    let purity = rho1.matmul(&rho1).expect("square").trace().re;
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// Concurrence of `v / |v|` weighted by `|v|^2`, for an unnormalised vector `v`.
fn weighted_concurrence(v: &[C64], n: usize) -> f64 {
    let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if p == 0.0 {
        return 0.0;
    }
    let c = CMatrix::from_fn(n, n, |a, b| v[a * n + b]);
    let rho1 = c.matmul(&c.dagger()).expect("square");
    let purity = rho1.matmul(&rho1).expect("square").trace().re;
    (2.0 * (p * p - purity)).max(0.0).sqrt()
}

/// Diagonal `(N - 2) alpha_i^2`, off-diagonal `-alpha_i alpha_j`.
pub fn b_matrix(alpha: &SchmidtVector) -> CMatrix {
    let a = alpha.alphas();
    let n = a.len();
    let nm2 = n as f64 - 2.0;
    CMatrix::from_fn(n, n, |i, j| {
        let v = if i == j { nm2 * a[i] * a[i] } else { -a[i] * a[j] };
        C64::new(v, 0.0)
    })
}

/// Eigenvalues of `B`, ascending.
pub fn b_eigenvalues(alpha: &SchmidtVector) -> Result<Vec<f64>, Error> {
    Ok(hermitian_eigs(&b_matrix(alpha), false)?.eigenvalues)
}

/// `T = (I ⊗ Φ)|psi><psi|` for the diagonal embedding of `alpha`.
pub fn t_matrix(alpha: &SchmidtVector) -> CMatrix {
    crate::bounds::apply_id_phi(&density_from_pure(&pure_from_schmidt(alpha)))
}

/// Checks that the singular values of `T` split into zeros, `alpha_i^2`, and `sv(B)`.
pub fn t_structure_check(alpha: &SchmidtVector, tol: f64) -> CheckResult {
    let n = alpha.dim();
    let observed = singular_values(&t_matrix(alpha))?;
    let mut expected = vec![0.0; n * n - 2 * n];
    expected.extend(alpha.alphas().iter().map(|a| a * a));
    expected.extend(singular_values(&b_matrix(alpha))?);
    expected.sort_by(|x, y| y.total_cmp(x));
    for (k, (o, e)) in observed.iter().zip(&expected).enumerate() {
        if (o - e).abs() > tol {
            return Err(violated(
                "t_structure",
                alpha,
                format!("|sv_{k}(T) - expected_{k}| (expected {e})"),
                (o - e).abs(),
                tol,
            ));
        }
    }
    Ok(())
}

/// `e_0 .. e_n` of `values`, from the expansion of `prod_i (1 + v_i t)`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (m, &v) in values.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

/// Monic characteristic polynomial from its roots; entry `k` is the coefficient of `x^{N-k}`.
pub fn charpoly_from_roots(roots: &[f64]) -> Vec<f64> {
    elementary_symmetric(roots)
        .into_iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { e } else { -e })
        .collect()
}

/// Predicted coefficients of `det(x I - B)`:
/// `c_k = (-1)^k (N - 1 - k) (N - 1)^{k-1} e_k(alpha^2)` for `k >= 1`, `c_0 = 1`.
pub fn coefficient_pattern(alpha: &SchmidtVector) -> Vec<f64> {
    let n = alpha.dim();
    let sq: Vec<f64> = alpha.alphas().iter().map(|a| a * a).collect();
    let e = elementary_symmetric(&sq);
    let nm1 = n as f64 - 1.0;
    (0..=n)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * (nm1 - k as f64) * nm1.powi(k as i32 - 1) * e[k]
        })
        .collect()
}

/// `det(x I - A)` of a real matrix by the Leibniz expansion with polynomial entries.
///
/// Factorial cost; meant for N <= 6. Entry `k` of the result is the coefficient of `x^{N-k}`.
pub fn charpoly_brute_force(a: &CMatrix) -> Vec<f64> {
    let n = a.rows();
    // poly[d] = coefficient of x^d
    let mut total = vec![0.0; n + 1];
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut poly = vec![1.0];
        for (i, &j) in p.iter().enumerate() {
            // entry (i, j) of xI - A
            let entry = if i == j { vec![-a[(i, j)].re, 1.0] } else { vec![-a[(i, j)].re] };
            poly = poly_mul(&poly, &entry);
        }
        let s = parity(p);
        for (d, c) in poly.iter().enumerate() {
            total[d] += s * c;
        }
    });
    total.reverse();
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn parity(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Largest N for which [`charpoly_check`] also confirms the pattern by direct expansion.
pub const BRUTE_FORCE_MAX_DIM: usize = 5;

fn coeff_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-13
}

/// Compares the coefficients implied by the eigenvalues of `B` with
/// [`coefficient_pattern`], and for small N also with the Leibniz expansion.
pub fn charpoly_check(alpha: &SchmidtVector, tol: f64) -> CheckResult {
    let roots = b_eigenvalues(alpha)?;
    let from_roots = charpoly_from_roots(&roots);
    let pattern = coefficient_pattern(alpha);
    for (k, (r, p)) in from_roots.iter().zip(&pattern).enumerate() {
        if !coeff_close(*r, *p, tol) {
            return Err(violated("charpoly", alpha, format!("coefficient of x^(N-{k}) from roots vs pattern"), *r, *p));
        }
    }
    if alpha.dim() <= BRUTE_FORCE_MAX_DIM {
        let direct = charpoly_brute_force(&b_matrix(alpha));
        for (k, (d, p)) in direct.iter().zip(&pattern).enumerate() {
            if !coeff_close(*d, *p, tol) {
                return Err(violated("charpoly", alpha, format!("coefficient of x^(N-{k}) by expansion vs pattern"), *d, *p));
            }
        }
    }
    Ok(())
}

/// Root data of the characteristic polynomial of `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    pub alphas: SchmidtVector,
    pub b_eigenvalues: Vec<f64>,
    pub sum_roots: f64,
    pub prod_roots: f64,
    pub min_root: f64,
    /// `prod alpha_i^2`; zero exactly when some Schmidt coefficient vanishes.
    pub beta: f64,
    pub negative_roots: usize,
    /// `-sum_{i<j} alpha_i alpha_j`, the floor for `min_root`.
    pub min_root_floor: f64,
}

const ROOT_SUM_TOL: f64 = 1e-9;
const ROOT_PROD_REL_TOL: f64 = 1e-7;
const NEGATIVE_ROOT_CUTOFF: f64 = 1e-12;

/// Computes the root data and checks the sum, product, sign-count and min-root relations.
pub fn root_relations_check(alpha: &SchmidtVector) -> CheckResult<RootReport> {
    let n = alpha.dim();
    let roots = b_eigenvalues(alpha)?;
    let sum_roots: f64 = roots.iter().sum();
    let prod_roots: f64 = roots.iter().product();
    let beta: f64 = alpha.alphas().iter().map(|a| a * a).product();
    let report = RootReport {
        alphas: alpha.clone(),
        sum_roots,
        prod_roots,
        min_root: roots[0],
        beta,
        negative_roots: roots.iter().filter(|x| **x < -NEGATIVE_ROOT_CUTOFF).count(),
        min_root_floor: -alpha.pair_sum(),
        b_eigenvalues: roots,
    };

    let nf = n as f64;
    if (sum_roots - (nf - 2.0)).abs() > ROOT_SUM_TOL {
        return Err(violated("root_relations", alpha, "sum of roots", sum_roots, nf - 2.0));
    }
    let expected_prod = -(nf - 1.0).powi(n as i32 - 1) * beta;
    if (prod_roots - expected_prod).abs() > ROOT_PROD_REL_TOL * expected_prod.abs() + 1e-14 {
        return Err(violated("root_relations", alpha, "product of roots", prod_roots, expected_prod));
    }
    if report.negative_roots > 1 {
        return Err(violated("root_relations", alpha, "number of negative roots", report.negative_roots as f64, 1.0));
    }
    if report.min_root < report.min_root_floor - ROOT_SUM_TOL {
        return Err(violated("root_relations", alpha, "min root", report.min_root, report.min_root_floor));
    }
    Ok(report)
}

const FUNCTIONAL_TOL: f64 = 1e-9;

/// `||T|| - (N - 1) <= 2 sum_{i<j} alpha_i alpha_j`, checked through both the
/// trace norm of `T` and the spectrum of `B`.
pub fn functional_property_check(alpha: &SchmidtVector) -> CheckResult {
    functional_property_check_with(alpha, |block| phi_map(block, block.rows()).expect("square block"))
}

/// As [`functional_property_check`], with `T` built from an arbitrary block map.
pub fn functional_property_check_with(alpha: &SchmidtVector, map: impl Fn(&CMatrix) -> CMatrix) -> CheckResult {
    let n = alpha.dim();
    let nf = n as f64;
    let rho = density_from_pure(&pure_from_schmidt(alpha));
    let t = apply_blockwise(rho.matrix(), n, map);
    let via_t = trace_norm(&t)? - (nf - 1.0);
    let via_b = b_eigenvalues(alpha)?.iter().map(|x| x.abs()).sum::<f64>() - (nf - 2.0);
    let rhs = 2.0 * alpha.pair_sum();

    if (via_t - via_b).abs() > FUNCTIONAL_TOL {
        return Err(violated("functional_property", alpha, "trace-norm route minus B-spectrum route", via_t - via_b, FUNCTIONAL_TOL));
    }
    if via_t > rhs + FUNCTIONAL_TOL {
        return Err(violated("functional_property", alpha, "||T|| - (N - 1)", via_t, rhs));
    }
    Ok(())
}

/// `sum_{i<j} alpha_i^2 alpha_j^2 >= 2/(N(N-1)) (sum_{i<j} alpha_i alpha_j)^2`.
pub fn chen_inequality_check(alpha: &SchmidtVector) -> CheckResult {
    let n = alpha.dim() as f64;
    let lhs = (pure_concurrence(alpha) / 2.0).powi(2);
    let rhs = if n < 2.0 { 0.0 } else { 2.0 / (n * (n - 1.0)) * alpha.pair_sum().powi(2) };
    if lhs < rhs - 1e-12 {
        return Err(violated("chen_inequality", alpha, "sum_{i<j} alpha_i^2 alpha_j^2", lhs, rhs));
    }
    Ok(())
}

/// Upper estimate of the convex-roof concurrence.
///
/// Every pure-state ensemble of `rho` is `phi_i = sum_k U_ik sqrt(lambda_k) v_k` for an
/// isometry `U`; this tries the eigen-ensemble itself and `n_samples` random
/// isometries with between `rank` and `rank + 2` outputs, returning the smallest
/// average concurrence seen. The result is never below the true concurrence.
pub fn convex_roof_upper(rho: &DensityMatrix, n_samples: usize, seed: u64) -> Result<f64, Error> {
    if n_samples == 0 {
        return Err(Error::InvalidParams("n_samples must be at least 1".into()));
    }
    let n = rho.dim();
    let n2 = n * n;
    let spec = hermitian_eigs(rho.matrix(), true)?;
    let vecs = spec.eigenvectors.expect("requested eigenvectors");
    let ensemble: Vec<Vec<C64>> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| **l > RANK_CUTOFF)
        .map(|(k, l)| vecs.column(k).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let rank = ensemble.len();
    if rank == 0 {
        return Err(Error::NumericalFailure("density matrix has no positive eigenvalue".into()));
    }

    let average = |members: &[Vec<C64>]| -> f64 { members.iter().map(|v| weighted_concurrence(v, n)).sum() };

    let mut best = average(&ensemble);
    let max_out = rank.max((rank + 2).min(n2));
    let mut rng = rng_from_seed(seed);
    for _ in 0..n_samples {
        let out = rng.random_range(rank..=max_out);
        let u = random_isometry(out, rank, &mut rng)?;
        let mixed: Vec<Vec<C64>> = (0..out)
            .map(|i| {
                let mut v = vec![C64::new(0.0, 0.0); n2];
                for (k, member) in ensemble.iter().enumerate() {
                    let w = u[(i, k)];
                    for (dst, src) in v.iter_mut().zip(member) {
                        *dst += w * src;
                    }
                }
                v
            })
            .collect();
        best = best.min(average(&mixed));
    }
    if !best.is_finite() {
        return Err(Error::NumericalFailure("non-finite ensemble average".into()));
    }
    Ok(best)
}
