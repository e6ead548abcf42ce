//! Bipartite N x N states: validated density matrices, pure states and Schmidt
//! vectors, together with the index reshuffles used by the separability criteria.
//!
//! A composite basis label `(a, b)` maps to the flat index `a * N + b` (zero-based,
//! first factor major). Every reshape in this module derives from that convention.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, kron, singular_values, CMatrix, C64};

/// Default tolerance for Hermiticity, unit trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;

const PURE_NORM_TOL: f64 = 1e-12;
const SCHMIDT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` as an N^2 x N^2 density matrix at [`STATE_TOL`].
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(dim, matrix, STATE_TOL)
    }

    /// Same checks as [`DensityMatrix::new`] with a caller-supplied tolerance.
    pub fn with_tolerance(dim: usize, matrix: CMatrix, tol: f64) -> Result<Self> {
        let n2 = dim * dim;
        if dim == 0 || matrix.rows() != n2 || matrix.cols() != n2 {
            return Err(Error::ShapeMismatch {
                expected: format!("{n2}x{n2} for subsystem dimension {dim}"),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::InvalidState {
                invariant: "hermitian",
                detail: format!("max |rho - rho^dagger| = {deviation:e} exceeds {tol:e}"),
            });
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState {
                invariant: "unit trace",
                detail: format!("trace = {} + {}i", trace.re, trace.im),
            });
        }
        let spec = hermitian_eigs(&matrix, false)?;
        let min = spec.eigenvalues[0];
        if min < -tol {
            return Err(Error::InvalidState {
                invariant: "positive semidefinite",
                detail: format!("minimum eigenvalue {min:e} below -{tol:e}"),
            });
        }
        Ok(DensityMatrix { dim, matrix })
    }

    /// Skips validation; only for matrices that are states by construction.
    pub(crate) fn new_unchecked(dim: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), dim * dim);
        DensityMatrix { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch {
                expected: format!("dimension {}", self.dim),
                found: format!("dimension {}", other.dim),
            });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParams(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let m = &self.matrix.scale_real(lambda) + &other.matrix.scale_real(1.0 - lambda);
        Ok(DensityMatrix::new_unchecked(self.dim, m))
    }

    /// `(U ⊗ V) rho (U ⊗ V)^dagger` for N x N unitaries `u`, `v`.
    pub fn local_transform(&self, u: &CMatrix, v: &CMatrix) -> Result<DensityMatrix> {
        for m in [u, v] {
            if m.rows() != self.dim || m.cols() != self.dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("{0}x{0} local operator", self.dim),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        let w = kron(u, v);
        let out = (&w * &self.matrix).matmul(&w.dagger())?;
        Ok(DensityMatrix::new_unchecked(self.dim, out))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Requires exactly N^2 amplitudes with unit norm (within 1e-12).
    pub fn new(dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dim, amplitudes.len())?;
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NormViolation { norm });
        }
        Ok(PureState { dim, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dim, amplitudes.len())?;
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NormViolation { norm });
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(PureState { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// The N x N coefficient matrix `C[a, b] = amplitude(a * N + b)`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n, n, |a, b| self.amplitudes[a * n + b])
    }

    /// `(U ⊗ V) |psi>`.
    pub fn local_transform(&self, u: &CMatrix, v: &CMatrix) -> Result<PureState> {
        let w = kron(u, v);
        if w.cols() != self.amplitudes.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} local operators", self.dim),
                found: format!("{}x{} kron product", w.rows(), w.cols()),
            });
        }
        PureState::normalized(self.dim, w.apply(&self.amplitudes))
    }
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim == 0 || len != dim * dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{} amplitudes", dim * dim),
            found: format!("{len}"),
        });
    }
    Ok(())
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Schmidt coefficients, stored in descending order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SchmidtVector {
    alphas: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(mut alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidSchmidt("empty coefficient list".into()));
        }
        if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidSchmidt(format!("coefficient {a} outside [0, 1]")));
        }
        let s: f64 = alphas.iter().map(|a| a * a).sum();
        if (s - 1.0).abs() > SCHMIDT_TOL {
            return Err(Error::InvalidSchmidt(format!("sum of squares is {s}")));
        }
        alphas.sort_by(|x, y| y.total_cmp(x));
        Ok(SchmidtVector { alphas })
    }

    /// From nonnegative weights `w_i`, taking `alpha_i = sqrt(w_i / sum w)`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidSchmidt("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidSchmidt("weights sum to zero".into()));
        }
        Self::renormalized(weights.iter().map(|w| (w / total).sqrt()).collect())
    }

    fn renormalized(alphas: Vec<f64>) -> Result<Self> {
        let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
        Self::new(alphas.into_iter().map(|a| (a / norm).min(1.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `sum_{i<j} alpha_i alpha_j`.
    pub fn pair_sum(&self) -> f64 {
        let a = &self.alphas;
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                s += a[i] * a[j];
            }
        }
        s
    }
}

pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let m = CMatrix::outer(&psi.amplitudes, &psi.amplitudes);
    DensityMatrix::new_unchecked(psi.dim, m)
}

/// Reduced state on the first factor: `rho_1[a, a'] = sum_b rho[(a,b), (a',b)]`.
pub fn partial_trace_second(rho: &DensityMatrix) -> CMatrix {
    let n = rho.dim;
    let m = &rho.matrix;
    CMatrix::from_fn(n, n, |a, ap| (0..n).map(|b| m[(a * n + b, ap * n + b)]).sum())
}

/// Transposition on the first factor: `((a,b),(a',b')) <- ((a',b),(a,b'))`.
pub fn partial_transpose_first(rho: &DensityMatrix) -> CMatrix {
    partial_transpose_first_raw(&rho.matrix, rho.dim)
}

pub(crate) fn partial_transpose_first_raw(m: &CMatrix, n: usize) -> CMatrix {
    CMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, b) = (row / n, row % n);
        let (ap, bp) = (col / n, col % n);
        m[(ap * n + b, a * n + bp)]
    })
}

/// Realigned matrix: entry `(a*N + a', b*N + b')` is `rho[(a,b), (a',b')]`.
pub fn realign(rho: &DensityMatrix) -> CMatrix {
    let n = rho.dim;
    let m = &rho.matrix;
    CMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, ap) = (row / n, row % n);
        let (b, bp) = (col / n, col % n);
        m[(a * n + b, ap * n + bp)]
    })
}

pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtVector> {
    let sv = singular_values(&psi.coefficient_matrix())?;
    SchmidtVector::renormalized(sv)
}

/// The diagonal embedding `sum_i alpha_i |ii>`.
pub fn pure_from_schmidt(alpha: &SchmidtVector) -> PureState {
    let n = alpha.dim();
    let mut amplitudes = vec![C64::new(0.0, 0.0); n * n];
    for (i, &a) in alpha.alphas.iter().enumerate() {
        amplitudes[i * n + i] = C64::new(a, 0.0);
    }
    PureState { dim: n, amplitudes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_norm;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        PureState::new(2, vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn density_from_basis_and_bell() {
        let e0 = PureState::new(2, vec![c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(
            density_from_pure(&e0).matrix(),
            &CMatrix::from_diag(&[1.0, 0.0, 0.0, 0.0])
        );
        let rho = density_from_pure(&bell());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if [0, 3].contains(&i) && [0, 3].contains(&j) { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(rho.matrix()[(i, j)].re, expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pure_state_norm_is_enforced() {
        let err = PureState::new(2, vec![c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap_err();
        assert!(matches!(err, Error::NormViolation { .. }));
        assert!(PureState::normalized(2, vec![c(0.0); 4]).is_err());
        assert!(matches!(
            PureState::new(2, vec![c(1.0)]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn density_validation_names_the_invariant() {
        let not_herm = CMatrix::from_real(1, 1, &[1.0]).unwrap();
        assert!(DensityMatrix::new(1, not_herm).is_ok());

        let m = CMatrix::from_real(4, 4, &[
            0.5, 0.1, 0.0, 0.0,
            0.0, 0.5, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ]).unwrap();
        let err = DensityMatrix::new(2, m).unwrap_err();
        assert!(matches!(err, Error::InvalidState { invariant: "hermitian", .. }));

        let err = DensityMatrix::new(2, CMatrix::identity(4)).unwrap_err();
        assert!(matches!(err, Error::InvalidState { invariant: "unit trace", .. }));

        let err = DensityMatrix::new(2, CMatrix::from_diag(&[1.5, -0.5, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidState { invariant: "positive semidefinite", .. }));

        let err = DensityMatrix::new(2, CMatrix::identity(3).scale_real(1.0 / 3.0)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn custom_tolerance_accepts_noisy_input() {
        let m = CMatrix::from_diag(&[0.5 + 1e-8, 0.5, 0.0, 0.0]);
        assert!(DensityMatrix::new(2, m.clone()).is_err());
        assert!(DensityMatrix::with_tolerance(2, m, 1e-6).is_ok());
    }

    #[test]
    fn partial_trace_examples() {
        let rho1 = partial_trace_second(&density_from_pure(&bell()));
        assert!(rho1.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);

        // |0><0| ⊗ sigma
        let sigma = CMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let ket0 = CMatrix::from_diag(&[1.0, 0.0]);
        let rho = DensityMatrix::new(2, kron(&ket0, &sigma)).unwrap();
        assert!(partial_trace_second(&rho).max_abs_diff(&ket0) < 1e-15);

        let alpha = SchmidtVector::new(vec![0.8, 0.6, 0.0]).unwrap();
        let rho1 = partial_trace_second(&density_from_pure(&pure_from_schmidt(&alpha)));
        assert!(rho1.max_abs_diff(&CMatrix::from_diag(&[0.64, 0.36, 0.0])) < 1e-15);
    }

    #[test]
    fn partial_transpose_examples() {
        let prod = DensityMatrix::new(2, CMatrix::from_diag(&[0.4, 0.3, 0.2, 0.1])).unwrap();
        assert_eq!(&partial_transpose_first(&prod), prod.matrix());

        let rho = density_from_pure(&bell());
        let pt = partial_transpose_first(&rho);
        let eig = hermitian_eigs(&pt, false).unwrap().eigenvalues;
        for (x, y) in eig.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-14);
        }
        let twice = partial_transpose_first_raw(&pt, 2);
        assert_eq!(&twice, rho.matrix());
    }

    #[test]
    fn realign_examples() {
        // product of two rank-one states
        let u = [c(0.6), C64::new(0.0, 0.8)];
        let v = [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)];
        let rho = DensityMatrix::new(2, kron(&CMatrix::outer(&u, &u), &CMatrix::outer(&v, &v))).unwrap();
        assert_abs_diff_eq!(trace_norm(&realign(&rho)).unwrap(), 1.0, epsilon = 1e-12);

        let bell_rho = density_from_pure(&bell());
        assert_abs_diff_eq!(trace_norm(&realign(&bell_rho)).unwrap(), 2.0, epsilon = 1e-12);

        for n in [2usize, 3] {
            let mixed = DensityMatrix::new(n, CMatrix::identity(n * n).scale_real(1.0 / (n * n) as f64)).unwrap();
            let sv = singular_values(&realign(&mixed)).unwrap();
            // single nonzero singular value 1/N
            assert_abs_diff_eq!(sv[0], 1.0 / n as f64, epsilon = 1e-14);
            assert!(sv[1..].iter().all(|s| s.abs() < 1e-14));
        }
    }

    #[test]
    fn schmidt_examples() {
        let product = PureState::new(2, vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0), c(0.0)]).unwrap();
        let s = schmidt_decompose(&product).unwrap();
        assert_abs_diff_eq!(s.alphas()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.alphas()[1], 0.0, epsilon = 1e-14);

        let s = schmidt_decompose(&bell()).unwrap();
        for a in s.alphas() {
            assert_abs_diff_eq!(*a, FRAC_1_SQRT_2, epsilon = 1e-14);
        }
    }

    #[test]
    fn pure_from_schmidt_examples() {
        let e = pure_from_schmidt(&SchmidtVector::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(e.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let b = pure_from_schmidt(&SchmidtVector::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap());
        assert_eq!(b, bell());
    }

    #[test]
    fn schmidt_vector_validation() {
        assert!(SchmidtVector::new(vec![0.5, 0.5]).is_err());
        assert!(SchmidtVector::new(vec![1.2, 0.0]).is_err());
        assert!(SchmidtVector::new(vec![]).is_err());
        let s = SchmidtVector::new(vec![0.6, 0.8]).unwrap();
        assert_eq!(s.alphas(), &[0.8, 0.6]);
        let w = SchmidtVector::from_weights(&[0.2, 0.8]).unwrap();
        assert_abs_diff_eq!(w.alphas()[0], 0.8f64.sqrt(), epsilon = 1e-15);
    }
}
