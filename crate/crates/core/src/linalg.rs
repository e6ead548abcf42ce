//! Dense complex matrices and the spectral routines built on them.
//!
//! Everything here works on row-major [`CMatrix`] values. Hermitian spectra
//! come from cyclic two-sided Jacobi rotations; singular values of general
//! matrices come from one-sided (Hestenes) Jacobi orthogonalisation of the
//! columns, which never forms `A^dagger A` explicitly.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Inputs whose Hermitian deviation exceeds this are rejected by [`hermitian_eigs`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Sweep cap shared by both Jacobi solvers.
pub const MAX_SWEEPS: usize = 100;

const EIG_REL_TOL: f64 = 1e-13;

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{rows}x{cols} with {} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A^dagger|`, infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows on the right operand", self.cols),
                found: format!("{}", other.rows),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Panics on inner-dimension mismatch; use [`CMatrix::matmul`] for a checked product.
impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian spectrum, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are unit eigenvectors in the order of `eigenvalues`.
    pub eigenvectors: Option<CMatrix>,
}

/// Kronecker product; block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows, b.cols);
    CMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.dagger()
}

/// Rotation that diagonalises the 2x2 Hermitian block `[[app, apq], [conj(apq), aqq]]`.
///
/// Returns the unitary `[[u_pp, u_pq], [u_qp, u_qq]]` together with `t`, where the
/// rotated diagonal is `(app - t|apq|, aqq + t|apq|)`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> ([C64; 4], f64) {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    (
        [C64::new(c, 0.0), C64::new(s, 0.0), -pc * s, pc * c],
        t,
    )
}

/// Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.
pub fn hermitian_eigs(a: &CMatrix, want_vectors: bool) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows, a.cols),
        });
    }
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    let n = a.rows;
    // work on the exactly Hermitian part
    let mut m = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = m.frobenius_norm();

    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        let off = off_diagonal_norm(&m);
        if off <= EIG_REL_TOL * scale {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let (u, t) = jacobi_rotation(app, aqq, apq);
                let r = apq.norm();
                rotate_columns(&mut m, p, q, &u);
                rotate_rows_adjoint(&mut m, p, q, &u);
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(app - t * r, 0.0);
                m[(q, q)] = C64::new(aqq + t * r, 0.0);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, &u);
                }
            }
        }
    }
    debug_assert!(converged);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = v.map(|v| CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `M <- M U` restricted to columns `p`, `q`.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * u[0] + mq * u[2];
        m[(k, q)] = mp * u[1] + mq * u[3];
    }
}

/// `M <- U^dagger M` restricted to rows `p`, `q`.
fn rotate_rows_adjoint(m: &mut CMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = u[0].conj() * mp + u[2].conj() * mq;
        m[(q, k)] = u[1].conj() * mp + u[3].conj() * mq;
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    // one-sided Jacobi wants a tall matrix
    let mut w = if a.rows >= a.cols { a.clone() } else { a.dagger() };
    let (m, n) = (w.rows, w.cols);
    let tol = (m as f64) * f64::EPSILON;
    // column pairs whose overlap is pure rounding noise relative to ||A||
    let floor = (f64::EPSILON * w.frobenius_norm()).powi(2);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for k in 0..m {
                    let x = w[(k, p)];
                    let y = w[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= tol * (alpha * beta).sqrt() || gamma.norm() <= floor {
                    continue;
                }
                rotated = true;
                let (u, _) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &u);
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
    }

    let mut sv: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Sum of singular values. Hermitian arguments go through the eigenvalue path.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    if a.hermitian_deviation() <= HERMITIAN_TOL {
        let spec = hermitian_eigs(a, false)?;
        Ok(spec.eigenvalues.iter().map(|x| x.abs()).sum())
    } else {
        Ok(singular_values(a)?.iter().sum())
    }
}

/// Modified Gram-Schmidt on the columns of `a` (rows >= cols, full column rank).
pub fn orthonormalize_columns(a: &CMatrix) -> Result<CMatrix> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::ShapeMismatch {
            expected: "rows >= cols".into(),
            found: format!("{m}x{n}"),
        });
    }
    let mut q = a.clone();
    for j in 0..n {
        for i in 0..j {
            let proj: C64 = (0..m).map(|k| q[(k, i)].conj() * q[(k, j)]).sum();
            for k in 0..m {
                let qi = q[(k, i)];
                q[(k, j)] -= proj * qi;
            }
        }
        let norm = (0..m).map(|k| q[(k, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::NumericalFailure(format!(
                "column {j} is linearly dependent on its predecessors"
            )));
        }
        for k in 0..m {
            q[(k, j)] /= norm;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_close_slice(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn new_rejects_bad_length_and_nan() {
        assert!(matches!(
            CMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut d = vec![c(0.0, 0.0); 4];
        d[3] = c(f64::NAN, 0.0);
        assert_eq!(
            CMatrix::new(2, 2, d),
            Err(Error::NonFinite { row: 1, col: 1 })
        );
    }

    #[test]
    fn kron_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));
        assert_eq!(
            kron(&CMatrix::from_diag(&[1.0, 2.0]), &i2),
            CMatrix::from_diag(&[1.0, 1.0, 2.0, 2.0])
        );
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e0 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = kron(&x, &x).apply(&e0);
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger(&CMatrix::identity(3)), CMatrix::identity(3));
        let a = CMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let expected =
            CMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(dagger(&a), expected);
    }

    #[test]
    fn eigs_of_small_matrices() {
        let s = hermitian_eigs(&CMatrix::from_diag(&[3.0, 1.0, 2.0]), false).unwrap();
        assert_close_slice(&s.eigenvalues, &[1.0, 2.0, 3.0], 1e-15);

        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = hermitian_eigs(&x, false).unwrap();
        assert_close_slice(&s.eigenvalues, &[-1.0, 1.0], 1e-14);

        // B for alpha = (1/sqrt2, 1/sqrt2): zero diagonal, -1/2 off the diagonal
        let b = CMatrix::from_real(2, 2, &[0.0, -0.5, -0.5, 0.0]).unwrap();
        let s = hermitian_eigs(&b, false).unwrap();
        assert_close_slice(&s.eigenvalues, &[-0.5, 0.5], 1e-14);
    }

    #[test]
    fn eigs_complex_2x2_with_vectors() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = CMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let s = hermitian_eigs(&a, true).unwrap();
        assert_close_slice(&s.eigenvalues, &[1.0, 3.0], 1e-14);
        let q = s.eigenvectors.unwrap();
        let lambda = CMatrix::from_diag(&s.eigenvalues);
        let rebuilt = &(&q * &lambda) * &q.dagger();
        assert!(rebuilt.max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn eigs_rejects_non_hermitian_and_non_square() {
        let a = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigs(&a, false), Err(Error::NonHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigs(&r, false), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn eigs_of_zero_matrix() {
        let s = hermitian_eigs(&CMatrix::zeros(3, 3), true).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
        assert_eq!(s.eigenvectors.unwrap(), CMatrix::identity(3));
    }

    #[test]
    fn singular_value_examples() {
        assert_close_slice(&singular_values(&CMatrix::identity(3)).unwrap(), &[1.0; 3], 1e-15);
        assert_close_slice(
            &singular_values(&CMatrix::from_diag(&[-2.0, 1.0])).unwrap(),
            &[2.0, 1.0],
            1e-15,
        );
        let u = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let v = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let sv = singular_values(&CMatrix::outer(&u, &v)).unwrap();
        assert_close_slice(&sv, &[1.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn singular_values_of_wide_matrix() {
        let a = CMatrix::from_real(2, 3, &[3.0, 0.0, 0.0, 0.0, 0.0, 4.0]).unwrap();
        assert_close_slice(&singular_values(&a).unwrap(), &[4.0, 3.0], 1e-15);
    }

    #[test]
    fn trace_norm_examples() {
        assert_abs_diff_eq!(trace_norm(&CMatrix::identity(4)).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            trace_norm(&CMatrix::from_diag(&[1.0, -1.0])).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        // non-Hermitian: nilpotent Jordan block has a single singular value 1
        let j = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(trace_norm(&j).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_columns() {
        let a = CMatrix::from_real(2, 2, &[1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            orthonormalize_columns(&a),
            Err(Error::NumericalFailure(_))
        ));
    }
}
