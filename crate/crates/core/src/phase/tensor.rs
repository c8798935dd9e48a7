use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    /// `[[0, I], [-I, 0]]`, the Poisson tensor of Weyl quantization.
    Moyal,
    /// `[[0, 0], [I, 0]]`, standard-order quantization.
    Standard,
    Custom,
}

/// The `2N×2N` matrix `J^{μν}` contracted along every graph edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizationTensor {
    dim: usize,
    kind: TensorKind,
    entries: Vec<Vec<BigRational>>,
    nonzero: Vec<(usize, usize, BigRational)>,
}

impl QuantizationTensor {
    pub fn moyal(dim: usize) -> Self {
        let mut m = vec![vec![BigRational::zero(); 2 * dim]; 2 * dim];
        for j in 0..dim {
            m[j][dim + j] = BigRational::one();
            m[dim + j][j] = -BigRational::one();
        }
        Self::build(dim, TensorKind::Moyal, m)
    }

    pub fn standard(dim: usize) -> Self {
        let mut m = vec![vec![BigRational::zero(); 2 * dim]; 2 * dim];
        for j in 0..dim {
            m[dim + j][j] = BigRational::one();
        }
        Self::build(dim, TensorKind::Standard, m)
    }

    pub fn custom(dim: usize, entries: Vec<Vec<BigRational>>) -> Result<Self> {
        if entries.len() != 2 * dim || entries.iter().any(|r| r.len() != 2 * dim) {
            return Err(Error::DimensionMismatch { left: entries.len(), right: 2 * dim });
        }
        Ok(Self::build(dim, TensorKind::Custom, entries))
    }

    pub fn from_kind(kind: TensorKind, dim: usize) -> Result<Self> {
        match kind {
            TensorKind::Moyal => Ok(Self::moyal(dim)),
            TensorKind::Standard => Ok(Self::standard(dim)),
            TensorKind::Custom => Err(Error::Unsupported("custom tensor needs explicit entries".into())),
        }
    }

    fn build(dim: usize, kind: TensorKind, entries: Vec<Vec<BigRational>>) -> Self {
        let mut nonzero = Vec::new();
        for (mu, row) in entries.iter().enumerate() {
            for (nu, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    nonzero.push((mu, nu, v.clone()));
                }
            }
        }
        QuantizationTensor { dim, kind, entries, nonzero }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn entry(&self, mu: usize, nu: usize) -> &BigRational {
        &self.entries[mu][nu]
    }

    /// Nonzero entries `(μ, ν, J^{μν})`, 0-based.
    pub fn nonzero_entries(&self) -> &[(usize, usize, BigRational)] {
        &self.nonzero
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..2 * self.dim)
            .all(|a| (0..2 * self.dim).all(|b| self.entries[a][b] == -self.entries[b][a].clone()))
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch { left: dim, right: self.dim });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_forms() {
        let j = QuantizationTensor::moyal(2);
        assert!(j.is_antisymmetric());
        assert_eq!(j.nonzero_entries().len(), 4);
        assert_eq!(*j.entry(0, 2), BigRational::one());
        assert_eq!(*j.entry(3, 1), -BigRational::one());
        let s = QuantizationTensor::standard(1);
        assert!(!s.is_antisymmetric());
        assert_eq!(s.nonzero_entries(), &[(1, 0, BigRational::one())]);
    }
}
