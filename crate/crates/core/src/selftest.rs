//! Randomised property suites over the oracle checks and the state family.
//!
//! `Level::Full` runs the sample counts listed per suite; `Level::Quick` runs a
//! tenth of them (rounded up). Samples are seeded independently, so a failing
//! sample is reproducible from the run seed alone.

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::json;

use crate::bipartite::{density_from_pure, pure_from_schmidt, schmidt_decompose, DensityMatrix, SchmidtVector};
use crate::bounds::{apply_id_phi, phi_bound, phi_functional, phi_map, ppt_bound, ppt_functional, realign_bound, realign_functional};
use crate::linalg::{hermitian_eigs, CMatrix};
use crate::oracle::{
    charpoly_check, chen_inequality_check, convex_roof_upper, functional_property_check, pure_concurrence,
    pure_concurrence_from_reduced, root_relations_check, t_structure_check, CheckError, ROOF_SAMPLES,
};
use crate::states::{
    closed_phi, closed_ppt, closed_realign, hou_eigenvalues, hou_state, random_density_with, random_hou_params,
    random_pure_with, random_schmidt_with, random_single_density_with, random_unitary, rng_from_seed, HouParams,
};

pub const DEFAULT_SEED: u64 = 20_100_607;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn samples(self, full: usize) -> usize {
        match self {
            Level::Full => full,
            Level::Quick => full.div_ceil(10),
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level '{other}' (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    /// JSON description of the lowest-indexed failing sample.
    pub first_counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn first_failure(&self) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| !s.passed())
    }
}

type SampleResult = Result<(), String>;

fn from_check(r: Result<impl Sized, CheckError>) -> SampleResult {
    r.map(|_| ()).map_err(|e| match e {
        CheckError::Violated(v) => serde_json::to_string(&v).expect("violation serialises"),
        CheckError::Numerical(e) => json!({ "error": e.to_string() }).to_string(),
    })
}

fn numeric_err(e: crate::error::Error) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Seed for one sample, decorrelated across suites and indices.
pub fn sample_seed(run_seed: u64, suite: u64, case: u64, index: u64) -> u64 {
    // splitmix64 finaliser over a combined key
    let mut z = run_seed
        .wrapping_add(suite.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(case.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(index.wrapping_mul(0x94D0_49BB_1331_11EB));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `check(case, index)` for every case and index in parallel.
pub fn run_suite<C: Copy + Sync>(
    name: &'static str,
    cases: &[C],
    per_case: usize,
    check: impl Fn(C, usize) -> SampleResult + Sync,
) -> SuiteResult {
    let jobs: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|c| (0..per_case).map(move |i| (c, i)))
        .collect();
    let failures: Vec<(usize, String)> = jobs
        .par_iter()
        .enumerate()
        .filter_map(|(k, &(c, i))| check(cases[c], i).err().map(|e| (k, e)))
        .collect();
    SuiteResult {
        name,
        samples: jobs.len(),
        failures: failures.len(),
        first_counterexample: failures.into_iter().min_by_key(|(k, _)| *k).map(|(_, e)| e),
    }
}

const SCHMIDT_DIMS: [usize; 5] = [2, 3, 4, 5, 6];
const MAP_DIMS: [usize; 7] = [2, 3, 4, 5, 6, 7, 8];
const MIXED_DIMS: [usize; 3] = [2, 3, 4];

fn schmidt_sample(seed: u64, tag: u64, n: usize, i: usize) -> Result<SchmidtVector, String> {
    random_schmidt_with(n, &mut rng_from_seed(sample_seed(seed, tag, n as u64, i as u64))).map_err(numeric_err)
}

fn schmidt_suite(
    name: &'static str,
    tag: u64,
    level: Level,
    seed: u64,
    full: usize,
    check: impl Fn(&SchmidtVector) -> SampleResult + Sync,
) -> SuiteResult {
    run_suite(name, &SCHMIDT_DIMS, level.samples(full), |n, i| check(&schmidt_sample(seed, tag, n, i)?))
}

fn mixed_sample(seed: u64, tag: u64, n: usize, i: usize) -> Result<DensityMatrix, String> {
    let mut rng = rng_from_seed(sample_seed(seed, tag, n as u64, i as u64));
    let rank = 1 + i % (n * n);
    random_density_with(n, rank, &mut rng).map_err(numeric_err)
}

/// First 100 points of the simplex lattice with spacing 1/9.
pub fn simplex_grid() -> Vec<HouParams> {
    let steps = 9usize;
    let s = steps as f64;
    let mut out = Vec::new();
    for a in 0..=steps {
        for b in 0..=(steps - a) {
            for c in 0..=(steps - a - b) {
                let d = steps - a - b - c;
                out.push(HouParams { q1: a as f64 / s, q2: b as f64 / s, q3: c as f64 / s, q4: d as f64 / s });
            }
        }
    }
    out.truncate(100);
    out
}

pub fn run(level: Level, seed: u64) -> SelftestReport {
    let mut suites = Vec::new();

    suites.push(schmidt_suite("pure_concurrence_dual", 1, level, seed, 1000, |alpha| {
        let a = pure_concurrence(alpha);
        let b = pure_concurrence_from_reduced(&pure_from_schmidt(alpha));
        if (a - b).abs() > 1e-12 {
            return Err(json!({ "alphas": alpha.alphas(), "schmidt_form": a, "reduced_form": b }).to_string());
        }
        Ok(())
    }));
    suites.push(schmidt_suite("functional_property", 2, level, seed, 1000, |a| {
        from_check(functional_property_check(a))
    }));
    suites.push(schmidt_suite("t_structure", 3, level, seed, 500, |a| from_check(t_structure_check(a, 1e-9))));
    suites.push(schmidt_suite("charpoly", 4, level, seed, 500, |a| from_check(charpoly_check(a, 1e-7))));
    suites.push(schmidt_suite("root_relations", 5, level, seed, 500, |a| from_check(root_relations_check(a))));
    suites.push(schmidt_suite("chen_inequality", 6, level, seed, 1000, |a| from_check(chen_inequality_check(a))));

    suites.push(run_suite("phi_bound_pure_validity", &SCHMIDT_DIMS, level.samples(1000), |n, i| {
        let mut rng = rng_from_seed(sample_seed(seed, 7, n as u64, i as u64));
        let psi = random_pure_with(n, &mut rng).map_err(numeric_err)?;
        let alpha = schmidt_decompose(&psi).map_err(numeric_err)?;
        let c = pure_concurrence(&alpha);
        let bound = phi_bound(&density_from_pure(&psi)).map_err(numeric_err)?;
        if bound > c + 1e-9 {
            return Err(json!({ "alphas": alpha.alphas(), "phi_bound": bound, "concurrence": c }).to_string());
        }
        Ok(())
    }));

    suites.push(run_suite("phi_positivity", &MAP_DIMS, level.samples(1000), |n, i| {
        let mut rng = rng_from_seed(sample_seed(seed, 8, n as u64, i as u64));
        let sigma = random_single_density_with(n, 1 + i % n, &mut rng).map_err(numeric_err)?;
        let image = phi_map(&sigma, n).map_err(numeric_err)?;
        let min = hermitian_eigs(&image, false).map_err(numeric_err)?.eigenvalues[0];
        if min < -1e-10 {
            return Err(json!({ "n": n, "sample": i, "min_eigenvalue": min }).to_string());
        }
        Ok(())
    }));

    suites.push(run_suite("phi_not_completely_positive", &MAP_DIMS, 1, |n, _| {
        let alpha = SchmidtVector::new(vec![1.0 / (n as f64).sqrt(); n]).map_err(numeric_err)?;
        let t = apply_id_phi(&density_from_pure(&pure_from_schmidt(&alpha)));
        let min = hermitian_eigs(&t, false).map_err(numeric_err)?.eigenvalues[0];
        if min >= 0.0 || (min + 1.0 / n as f64).abs() >= 1e-10 {
            return Err(json!({ "n": n, "min_eigenvalue": min, "expected": -1.0 / n as f64 }).to_string());
        }
        Ok(())
    }));

    suites.push(run_suite("hou_eigenvalues", &[()], level.samples(100), |_, i| {
        let q = random_hou_params(&mut rng_from_seed(sample_seed(seed, 10, 0, i as u64)));
        let rho = hou_state(&q).map_err(numeric_err)?;
        let numeric = hermitian_eigs(&apply_id_phi(&rho), false).map_err(numeric_err)?.eigenvalues;
        let mut listed = hou_eigenvalues(&q).to_vec();
        listed.sort_by(f64::total_cmp);
        let worst = numeric.iter().zip(&listed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sum: f64 = listed.iter().sum();
        if worst > 1e-10 || (sum - 3.0).abs() > 1e-12 {
            return Err(json!({ "q": q, "max_deviation": worst, "list_sum": sum }).to_string());
        }
        Ok(())
    }));

    suites.push(run_suite("hou_closed_forms", &[()], level.samples(1000), |_, i| {
        let q = random_hou_params(&mut rng_from_seed(sample_seed(seed, 11, 0, i as u64)));
        let rho = hou_state(&q).map_err(numeric_err)?;
        let pairs = [
            ("phi", closed_phi(&q), phi_bound(&rho).map_err(numeric_err)?),
            ("ppt", closed_ppt(&q), ppt_bound(&rho).map_err(numeric_err)?),
            ("realign", closed_realign(&q), realign_bound(&rho).map_err(numeric_err)?),
        ];
        for (name, closed, numeric) in pairs {
            if (closed - numeric).abs() > 1e-9 {
                return Err(json!({ "q": q, "bound": name, "closed": closed, "numeric": numeric }).to_string());
            }
        }
        if (closed_phi(&q) > 0.0) != (q.q1 > q.q4) {
            return Err(json!({ "q": q, "bound": "phi", "sign_rule": "closed_phi > 0 iff q1 > q4" }).to_string());
        }
        Ok(())
    }));

    let grid = simplex_grid();
    suites.push(run_suite("hou_state_validity", &grid, 1, |q, _| {
        let rho = hou_state(&q).map_err(numeric_err)?;
        DensityMatrix::new(4, rho.into_matrix())
            .map(|_| ())
            .map_err(|e| json!({ "q": q, "error": e.to_string() }).to_string())
    }));

    suites.push(run_suite("local_unitary_invariance", &MIXED_DIMS, level.samples(100), |n, i| {
        let mut rng = rng_from_seed(sample_seed(seed, 13, n as u64, i as u64));
        let rho = random_density_with(n, 1 + i % (n * n), &mut rng).map_err(numeric_err)?;
        let u = random_unitary(n, &mut rng).map_err(numeric_err)?;
        let v = random_unitary(n, &mut rng).map_err(numeric_err)?;
        let first_only = rho.local_transform(&u, &CMatrix::identity(n)).map_err(numeric_err)?;
        let both = rho.local_transform(&u, &v).map_err(numeric_err)?;
        let checks = [
            ("phi under U⊗I", phi_bound(&rho), phi_bound(&first_only)),
            ("ppt under U⊗V", ppt_bound(&rho), ppt_bound(&both)),
            ("realign under U⊗V", realign_bound(&rho), realign_bound(&both)),
        ];
        for (name, a, b) in checks {
            let (a, b) = (a.map_err(numeric_err)?, b.map_err(numeric_err)?);
            if (a - b).abs() > 1e-9 {
                return Err(json!({ "n": n, "sample": i, "check": name, "before": a, "after": b }).to_string());
            }
        }
        Ok(())
    }));

    suites.push(run_suite("convexity", &MIXED_DIMS, level.samples(100), |n, i| {
        let r1 = mixed_sample(seed, 14, n, 2 * i)?;
        let r2 = mixed_sample(seed, 14, n, 2 * i + 1)?;
        let lambda = (i as f64 + 0.5) / level.samples(100) as f64;
        let mix = r1.mix(&r2, lambda).map_err(numeric_err)?;
        type Functional = fn(&DensityMatrix) -> crate::error::Result<f64>;
        let fs: [(&str, Functional); 3] = [("phi", phi_functional), ("ppt", ppt_functional), ("realign", realign_functional)];
        for (name, f) in fs {
            let lhs = f(&mix).map_err(numeric_err)?;
            let rhs = lambda * f(&r1).map_err(numeric_err)? + (1.0 - lambda) * f(&r2).map_err(numeric_err)?;
            if lhs > rhs + 1e-9 {
                return Err(json!({ "n": n, "sample": i, "functional": name, "mixture": lhs, "combination": rhs }).to_string());
            }
        }
        Ok(())
    }));

    suites.push(run_suite("sandwich", &MIXED_DIMS, level.samples(200), |n, i| {
        let rho = mixed_sample(seed, 15, n, i)?;
        let lower = [phi_bound(&rho), ppt_bound(&rho), realign_bound(&rho)]
            .into_iter()
            .try_fold(0.0f64, |m, b| b.map(|b| m.max(b)))
            .map_err(numeric_err)?;
        let upper = convex_roof_upper(&rho, ROOF_SAMPLES, sample_seed(seed, 16, n as u64, i as u64)).map_err(numeric_err)?;
        if lower > upper + 1e-6 {
            return Err(json!({ "n": n, "sample": i, "max_lower_bound": lower, "convex_roof_upper": upper }).to_string());
        }
        Ok(())
    }));

    SelftestReport { suites }
}
