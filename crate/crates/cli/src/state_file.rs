//! JSON state files: `{ "dim": N, "matrix": [[[re, im], ...], ...] }` with N^2 rows
//! of N^2 `[re, im]` pairs.

use std::fs;
use std::path::Path;

use concurrence::{CMatrix, DensityMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(dim: usize, m: &CMatrix) -> Self {
        let matrix = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        StateFile { dim, matrix }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.dim(), rho.matrix())
    }

    pub fn to_matrix(&self) -> Result<CMatrix, CliError> {
        let n2 = self.dim * self.dim;
        if self.dim == 0 {
            return Err(CliError::Invalid("\"dim\" must be a positive integer".into()));
        }
        if self.matrix.len() != n2 {
            return Err(CliError::Invalid(format!(
                "shape: expected {n2} rows for dim {}, found {}",
                self.dim,
                self.matrix.len()
            )));
        }
        let mut data = Vec::with_capacity(n2 * n2);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n2 {
                return Err(CliError::Invalid(format!(
                    "shape: row {i} has {} entries, expected {n2}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
        }
        Ok(CMatrix::new(n2, n2, data)?)
    }

    pub fn to_density(&self, tol: f64) -> Result<DensityMatrix, CliError> {
        Ok(DensityMatrix::with_tolerance(self.dim, self.to_matrix()?, tol)?)
    }
}

pub fn read_state(path: &Path, tol: f64) -> Result<DensityMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("cannot parse {}: {e}", path.display())))?;
    file.to_density(tol)
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&StateFile::from_density(rho)).expect("state file serialises");
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use concurrence::states::random_density;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn json_round_trip_is_lossless(n in 1usize..4, rank_pick in 0usize..16, seed in any::<u64>()) {
            let rank = 1 + rank_pick % (n * n);
            let rho = random_density(n, rank, seed).unwrap();
            let text = serde_json::to_string(&StateFile::from_density(&rho)).unwrap();
            let back: StateFile = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_matrix().unwrap(), rho.matrix().clone());
        }
    }

    #[test]
    fn shape_errors_are_reported() {
        let f = StateFile { dim: 2, matrix: vec![vec![[1.0, 0.0]; 4]; 3] };
        assert!(matches!(f.to_matrix(), Err(CliError::Invalid(m)) if m.contains("shape")));
        let f = StateFile { dim: 2, matrix: vec![vec![[0.25, 0.0]; 3]; 4] };
        assert!(f.to_matrix().is_err());
        let f = StateFile { dim: 0, matrix: vec![] };
        assert!(f.to_matrix().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"dim": 1, "matrix": [[[1.0, 0.0]]], "extra": 3}"#;
        assert!(serde_json::from_str::<StateFile>(text).is_err());
    }
}
