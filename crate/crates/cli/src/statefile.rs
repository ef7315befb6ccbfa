//! JSON serialization of density matrices: `{"dims": [...], "data": [[re, im], ...]}`
//! with `data` in row-major order.

use std::path::Path;

use lkh_core::states::random_density;
use lkh_core::{Complex64, ComplexMatrix, DensityMatrix, MultiSystem};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.sys().dims().to_vec(),
            data: rho.mat().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// The raw matrix, checked only for shape.
    pub fn matrix(&self) -> Result<ComplexMatrix, CliError> {
        let sys = MultiSystem::new(self.dims.clone())?;
        let n = sys.total_dim();
        if self.data.len() != n * n {
            return Err(CliError::Usage(format!(
                "state file holds {} entries, dims {:?} need {}",
                self.data.len(),
                self.dims,
                n * n
            )));
        }
        let data = self
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix::from_vec(n, n, data)?)
    }

    /// The matrix as a validated density matrix.
    pub fn density(&self) -> Result<DensityMatrix, CliError> {
        let sys = MultiSystem::new(self.dims.clone())?;
        Ok(DensityMatrix::new(self.matrix()?, sys)?)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// The state generated for `(dims, rank, seed)`.
pub fn generate_state(dims: &[usize], rank: usize, seed: u64) -> Result<StateFile, CliError> {
    let sys = MultiSystem::new(dims.to_vec())?;
    let rho = random_density(&sys, rank, seed)?;
    Ok(StateFile::from_density(&rho))
}
