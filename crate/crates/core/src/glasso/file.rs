//! Laplacian output file (TOML). Floats are written in shortest round-trip
//! form, so reading a file back reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::{SymMatrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianFile {
    pub laplacian: SymMatrix,
    pub kappa: f64,
    pub rho: f64,
    /// `lambda_N - lambda_{N-1}` of the learned covariance.
    pub gap_covariance: f64,
    /// Gap between the two smallest eigenvalues of the Laplacian.
    pub gap_laplacian: f64,
    pub u: Vector,
    pub converged: bool,
    pub sweeps: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    n: usize,
    kappa: f64,
    rho: f64,
    gap_covariance: f64,
    gap_laplacian: f64,
    converged: bool,
    sweeps: usize,
    u: Vec<f64>,
    laplacian: Vec<Vec<f64>>,
}

impl LaplacianFile {
    pub fn n(&self) -> usize {
        self.laplacian.n()
    }

    pub fn to_toml(&self) -> String {
        let n = self.n();
        let raw = Raw {
            n,
            kappa: self.kappa,
            rho: self.rho,
            gap_covariance: self.gap_covariance,
            gap_laplacian: self.gap_laplacian,
            converged: self.converged,
            sweeps: self.sweeps,
            u: self.u.iter().copied().collect(),
            laplacian: (0..n)
                .map(|i| (0..n).map(|j| self.laplacian[(i, j)]).collect())
                .collect(),
        };
        toml::to_string(&raw).expect("plain data serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let n = raw.n;
        if raw.u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: raw.u.len(),
            });
        }
        if raw.laplacian.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: raw.laplacian.len(),
            });
        }
        if let Some(row) = raw.laplacian.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let laplacian = SymMatrix::new(DMatrix::from_fn(n, n, |i, j| raw.laplacian[i][j]))?;
        Ok(LaplacianFile {
            laplacian,
            kappa: raw.kappa,
            rho: raw.rho,
            gap_covariance: raw.gap_covariance,
            gap_laplacian: raw.gap_laplacian,
            u: Vector::from_vec(raw.u),
            converged: raw.converged,
            sweeps: raw.sweeps,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trips_bit_exactly(a in -1e6f64..1e6, b in -1e-6f64..1e-6, kappa in 1e-9f64..1e9) {
            let f = LaplacianFile {
                laplacian: SymMatrix::new(nalgebra::dmatrix![a, b; b, 1.0 / 3.0]).unwrap(),
                kappa,
                rho: 1e-4,
                gap_covariance: a.abs(),
                gap_laplacian: 0.1 + 0.2,
                u: Vector::from_vec(vec![b, a]),
                converged: true,
                sweeps: 7,
            };
            let back = LaplacianFile::from_toml(&f.to_toml()).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn infinite_kappa_and_bad_shapes() {
        let f = LaplacianFile {
            laplacian: SymMatrix::identity(2),
            kappa: f64::INFINITY,
            rho: 0.0,
            gap_covariance: 1.0,
            gap_laplacian: 1.0,
            u: Vector::from_vec(vec![1.0, 0.0]),
            converged: false,
            sweeps: 50,
        };
        let text = f.to_toml();
        assert_eq!(LaplacianFile::from_toml(&text).unwrap(), f);
        let broken = text.replace("n = 2", "n = 3");
        assert!(matches!(
            LaplacianFile::from_toml(&broken),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            LaplacianFile::from_toml("bogus = 1"),
            Err(Error::Config(_))
        ));
    }
}
