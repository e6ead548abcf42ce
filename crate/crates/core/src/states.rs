//! State constructors: the four-parameter Hou family on 4 x 4 systems with its
//! closed-form bounds, the theta slice used for bound comparisons, and seeded
//! random states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bipartite::{DensityMatrix, PureState, SchmidtVector};
use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_columns, CMatrix, C64};

const PARAM_TOL: f64 = 1e-12;

/// Subsystem dimension of the Hou family.
pub const HOU_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HouParams {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
}

impl HouParams {
    pub fn new(q1: f64, q2: f64, q3: f64, q4: f64) -> Result<Self> {
        let q = HouParams { q1, q2, q3, q4 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let qs = self.as_array();
        if let Some(bad) = qs.iter().find(|q| !(q.is_finite() && **q >= 0.0)) {
            return Err(Error::InvalidParams(format!("q = {bad} must be finite and nonnegative")));
        }
        let s: f64 = qs.iter().sum();
        if (s - 1.0).abs() > PARAM_TOL {
            return Err(Error::InvalidParams(format!("q1 + q2 + q3 + q4 = {s}, expected 1")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q1, self.q2, self.q3, self.q4]
    }
}

/// The slice `q1 = (1 - q2 - q4) sin^2 θ`, `q3 = (1 - q2 - q4) cos^2 θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSlice {
    pub q2: f64,
    pub q4: f64,
    pub theta: f64,
}

impl ThetaSlice {
    pub fn new(q2: f64, q4: f64, theta: f64) -> Result<Self> {
        let s = ThetaSlice { q2, q4, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q2 >= 0.0 && self.q4 >= 0.0 && self.q2 + self.q4 <= 1.0 + PARAM_TOL) {
            return Err(Error::InvalidParams(format!(
                "q2 = {}, q4 = {} must be nonnegative with q2 + q4 <= 1",
                self.q2, self.q4
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_4 + 1e-15).contains(&self.theta) {
            return Err(Error::InvalidParams(format!("theta = {} outside [0, pi/4]", self.theta)));
        }
        Ok(())
    }
}

pub fn slice_to_params(s: &ThetaSlice) -> Result<HouParams> {
    s.validate()?;
    let rest = (1.0 - s.q2 - s.q4).max(0.0);
    let (sin, cos) = s.theta.sin_cos();
    HouParams::new(rest * sin * sin, s.q2, rest * cos * cos, s.q4)
}

/// The Hou state on 4 x 4: a permuted diagonal plus `q1/4` coherences among
/// the flat indices {0, 5, 10, 15}.
pub fn hou_state(q: &HouParams) -> Result<DensityMatrix> {
    q.validate()?;
    let HouParams { q1, q2, q3, q4 } = *q;
    let diag = [
        q1, q4, q3, q2, //
        q2, q1, q4, q3, //
        q3, q2, q1, q4, //
        q4, q3, q2, q1,
    ];
    let mut m = CMatrix::from_diag(&diag.map(|x| x / 4.0));
    let coherent = [0usize, 5, 10, 15];
    for &i in &coherent {
        for &j in &coherent {
            if i != j {
                m[(i, j)] = C64::new(q1 / 4.0, 0.0);
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(HOU_DIM, m))
}

pub fn closed_phi(q: &HouParams) -> f64 {
    let HouParams { q1, q4, .. } = *q;
    (q1 - q4 + (q1 - q4).abs()) / (4.0 * 6f64.sqrt())
}

pub fn closed_ppt(q: &HouParams) -> f64 {
    let HouParams { q1, q2, q3, q4 } = *q;
    let s = (4.0 * q1 * q1 + (q2 - q4).powi(2)).sqrt();
    (2.0 * q1 + (q1 - q3).abs() + (q2 + q4 - s).abs() + s - 1.0) / (2.0 * 6f64.sqrt())
}

pub fn closed_realign(q: &HouParams) -> f64 {
    let HouParams { q1, q2, q3, q4 } = *q;
    (1.0 / 6.0f64).sqrt()
        * (3.0 * q1
            + 0.25
                * ((q1 - q2 + q3 - q4).powi(2).sqrt()
                    + 2.0 * ((q1 - q3).powi(2) + (q2 - q4).powi(2)).sqrt()
                    - 3.0))
}

pub fn closed_witness(q: &HouParams) -> f64 {
    let HouParams { q2, q3, q4, .. } = *q;
    -(q2 + 2.0 * q3 + q4) / (2.0 * 6f64.sqrt())
}

/// The sixteen eigenvalues of `(I_4 ⊗ Φ) rho_hou`, in list order.
pub fn hou_eigenvalues(q: &HouParams) -> [f64; 16] {
    let HouParams { q1, q2, q3, q4 } = *q;
    let mut out = [0.0; 16];
    let groups = [
        (q1 + 2.0 * q2, 4),
        (q2 + 2.0 * q3, 4),
        (q3 + 2.0 * q4, 4),
        (q4 - q1, 1),
        (3.0 * q1 + q4, 3),
    ];
    let mut k = 0;
    for (value, mult) in groups {
        for _ in 0..mult {
            out[k] = value / 4.0;
            k += 1;
        }
    }
    out
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalised complex Gaussian matrix; `rows >= cols` gives an isometry.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    orthonormalize_columns(&gaussian_matrix(rows, cols, rng))
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    random_isometry(n, n, rng)
}

/// `alpha_i^2` proportional to squared standard Gaussians.
pub fn random_schmidt_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SchmidtVector> {
    if n == 0 {
        return Err(Error::BadDimension(n));
    }
    let weights: Vec<f64> = (0..n).map(|_| gaussian(rng).powi(2)).collect();
    SchmidtVector::from_weights(&weights)
}

pub fn random_schmidt(n: usize, seed: u64) -> Result<SchmidtVector> {
    random_schmidt_with(n, &mut rng_from_seed(seed))
}

pub fn random_pure_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    PureState::normalized(n, (0..n * n).map(|_| complex_gaussian(rng)).collect())
}

pub fn random_pure(n: usize, seed: u64) -> Result<PureState> {
    random_pure_with(n, &mut rng_from_seed(seed))
}

/// `G G^dagger / tr(G G^dagger)` with `G` an N^2 x rank complex Gaussian matrix.
pub fn random_density_with<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n2 = n * n;
    if rank < 1 || rank > n2 {
        return Err(Error::BadRank { rank, max: n2 });
    }
    let g = gaussian_matrix(n2, rank, rng);
    let gg = g.matmul(&g.dagger())?;
    let tr = gg.trace().re;
    let mut m = gg.scale_real(1.0 / tr);
    // exact Hermiticity
    for i in 0..n2 {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n2 {
            let z = m[(i, j)];
            m[(j, i)] = z.conj();
        }
    }
    Ok(DensityMatrix::new_unchecked(n, m))
}

pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(n, rank, &mut rng_from_seed(seed))
}

/// Single-system N x N density matrix `G G^dagger / tr`, `G` an N x rank Gaussian.
pub fn random_single_density_with<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<CMatrix> {
    if rank < 1 || rank > n {
        return Err(Error::BadRank { rank, max: n });
    }
    let g = gaussian_matrix(n, rank, rng);
    let gg = g.matmul(&g.dagger())?;
    let tr = gg.trace().re;
    Ok(gg.scale_real(1.0 / tr))
}

/// Uniform point of the probability simplex (flat Dirichlet).
pub fn random_hou_params<R: Rng + ?Sized>(rng: &mut R) -> HouParams {
    let e: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let s: f64 = e.iter().sum();
    let mut q = e.map(|x| x / s);
    // absorb rounding in the largest entry
    let (imax, _) = q
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    let rest: f64 = q.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, x)| x).sum();
    q[imax] = 1.0 - rest;
    HouParams { q1: q[0], q2: q[1], q3: q[2], q4: q[3] }
}
