//! Serde schemas for bodies and zonotopes on disk.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::kernel::linalg::norm;
use crate::polytope::SymmetricHPolytope;
use crate::scalar::Scalar;
use crate::zonotope::Zonotope;

/// Directions within this distance of unit length are normalised on load.
pub const NORMALIZE_SLACK: f64 = 1e-6;

/// `{"n": 3, "directions": [[1,0,0], ...], "offsets": [1, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub n: usize,
    pub directions: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

impl BodyFile {
    pub fn from_polytope<T: Scalar>(p: &SymmetricHPolytope<T>) -> Self {
        Self {
            n: p.dim(),
            directions: p
                .directions()
                .iter()
                .map(|u| u.iter().map(|x| x.to_f64_lossy()).collect())
                .collect(),
            offsets: p.offsets().iter().map(|x| x.to_f64_lossy()).collect(),
        }
    }

    /// Validates and builds the body. Directions off unit length by at most
    /// [`NORMALIZE_SLACK`] are rescaled; anything further off is rejected.
    pub fn to_polytope<T: Scalar>(&self) -> Result<SymmetricHPolytope<T>> {
        if self.directions.len() != self.offsets.len() {
            return Err(GeomError::InvalidInput(format!(
                "{} directions but {} offsets",
                self.directions.len(),
                self.offsets.len()
            )));
        }
        let mut dirs = Vec::with_capacity(self.directions.len());
        for (i, u) in self.directions.iter().enumerate() {
            if u.len() != self.n {
                return Err(GeomError::DimensionMismatch {
                    expected: self.n,
                    got: u.len(),
                });
            }
            let r = norm(u);
            if !((r - 1.0).abs() <= NORMALIZE_SLACK) {
                return Err(GeomError::InvalidInput(format!(
                    "direction {i} has norm {r}, not within {NORMALIZE_SLACK:e} of 1"
                )));
            }
            dirs.push(u.iter().map(|&x| T::lit(x / r)).collect());
        }
        let offsets = self.offsets.iter().map(|&t| T::lit(t)).collect();
        SymmetricHPolytope::new(dirs, offsets)
    }
}

/// `{"n": 2, "generators": [[1,0], [0,1]]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZonotopeFile {
    pub n: usize,
    pub generators: Vec<Vec<f64>>,
}

impl ZonotopeFile {
    pub fn from_zonotope<T: Scalar>(z: &Zonotope<T>) -> Self {
        Self {
            n: z.dim(),
            generators: z
                .generators()
                .iter()
                .map(|w| w.iter().map(|x| x.to_f64_lossy()).collect())
                .collect(),
        }
    }

    pub fn to_zonotope<T: Scalar>(&self) -> Result<Zonotope<T>> {
        let gens = self
            .generators
            .iter()
            .map(|w| w.iter().map(|&x| T::lit(x)).collect())
            .collect();
        Zonotope::new(self.n, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_unit_directions_are_normalised() {
        let f = BodyFile {
            n: 2,
            directions: vec![vec![1.0 + 5e-7, 0.0], vec![0.0, 1.0]],
            offsets: vec![1.0, 1.0],
        };
        let p: SymmetricHPolytope<f64> = f.to_polytope().unwrap();
        assert_eq!(p.directions()[0], vec![1.0, 0.0]);
        assert_eq!(BodyFile::from_polytope(&p).offsets, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_bodies() {
        let bad_norm = BodyFile {
            n: 2,
            directions: vec![vec![2.0, 0.0], vec![0.0, 1.0]],
            offsets: vec![1.0, 1.0],
        };
        assert!(bad_norm.to_polytope::<f64>().is_err());
        let zero = BodyFile {
            n: 2,
            directions: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            offsets: vec![1.0, 0.0],
        };
        assert!(zero.to_polytope::<f64>().is_err());
        let flat = BodyFile {
            n: 2,
            directions: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            offsets: vec![1.0, 1.0],
        };
        assert!(matches!(flat.to_polytope::<f64>(), Err(GeomError::Unbounded(2))));
    }
}
