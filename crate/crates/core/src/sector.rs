//! Restriction to eigenspaces of the global bit-flip `P = ∏ X_i`.
//!
//! Sector basis states are `(|z⟩ + p|z̄⟩)/√2` for the representatives
//! `z < z̄`, i.e. the bitstrings whose most significant bit (qubit 0) is
//! zero. Row `r` of a sector matrix corresponds to representative `z = r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, C64};
use crate::pauli::{BuildOptions, PauliHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParitySector {
    n: usize,
    parity: Parity,
}

impl ParitySector {
    pub fn new(n: usize, parity: Parity) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArgument(format!("invalid qubit count {n}")));
        }
        Ok(ParitySector { n, parity })
    }

    pub fn even(n: usize) -> Result<Self> {
        Self::new(n, Parity::Even)
    }

    pub fn odd(n: usize) -> Result<Self> {
        Self::new(n, Parity::Odd)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        1usize << (self.n - 1)
    }

    fn all_ones(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn complement(&self, z: u64) -> u64 {
        z ^ self.all_ones()
    }

    /// Sector row of the pair containing `z`, with the relative sign of
    /// `|z⟩` inside that sector state.
    pub fn index_of(&self, z: u64) -> (usize, f64) {
        let half = 1u64 << (self.n - 1);
        if z < half {
            (z as usize, 1.0)
        } else {
            (self.complement(z) as usize, self.parity.sign())
        }
    }

    pub fn representative(&self, row: usize) -> u64 {
        row as u64
    }

    pub fn representatives(&self) -> Vec<u64> {
        (0..self.dim() as u64).collect()
    }

    /// Embeds sector amplitudes into the full `2^n` space.
    pub fn embed(&self, amps: &[C64]) -> Vec<C64> {
        let mut full = vec![C64::new(0.0, 0.0); 1usize << self.n];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (r, &a) in amps.iter().enumerate() {
            let z = r as u64;
            full[z as usize] += a * s;
            full[self.complement(z) as usize] += a * s * self.parity.sign();
        }
        full
    }

    /// Projects a full-space state onto the sector basis.
    pub fn project_state(&self, full: &[C64]) -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (0..self.dim())
            .map(|r| {
                let z = r as u64;
                (full[z as usize] + full[self.complement(z) as usize] * self.parity.sign()) * s
            })
            .collect()
    }
}

/// Restricts `h` to the given parity sector.
///
/// Uses `⟨r|H_sec|z⟩ = ⟨r|H|z⟩ + p⟨r|H|z̄⟩`, valid because `[H, P] = 0`.
pub fn parity_project(h: &PauliHamiltonian, sector: &ParitySector) -> Result<HermitianMatrix> {
    parity_project_with(h, sector, &BuildOptions::default())
}

pub fn parity_project_with(
    h: &PauliHamiltonian,
    sector: &ParitySector,
    opts: &BuildOptions,
) -> Result<HermitianMatrix> {
    if h.n() != sector.n() {
        return Err(Error::LengthMismatch {
            expected: sector.n(),
            got: h.n(),
        });
    }
    if h.n() > opts.max_qubits {
        return Err(Error::DimensionOverflow {
            n: h.n(),
            max: opts.max_qubits,
        });
    }
    if let Some(term) = h.parity_violation() {
        return Err(Error::SymmetryViolation {
            term: term.to_string(),
        });
    }
    let dim = sector.dim();
    let mut trips = Vec::with_capacity(dim * h.len().max(1));
    for (s, c) in h.terms() {
        for col in 0..dim {
            let (image, phase) = s.apply(sector.representative(col));
            let (row, sign) = sector.index_of(image);
            trips.push((row, col, phase * (c * sign)));
        }
    }
    let m = if dim < opts.dense_below {
        let mut d = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for (i, j, v) in trips {
            d[(i, j)] += v;
        }
        HermitianMatrix::from_complex_dense(d)?
    } else {
        HermitianMatrix::from_complex_triplets(dim, trips)?
    };
    m.with_labels(sector.representatives())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_sectors() {
        let h = PauliHamiltonian::from_labels(1, &[("X", -1.0)]).unwrap();
        let plus = parity_project(&h, &ParitySector::even(1).unwrap()).unwrap();
        let minus = parity_project(&h, &ParitySector::odd(1).unwrap()).unwrap();
        assert_eq!(plus.dim(), 1);
        assert_eq!(plus.get(0, 0).re, -1.0);
        assert_eq!(minus.get(0, 0).re, 1.0);
    }

    #[test]
    fn symmetry_violation_is_reported() {
        let h = PauliHamiltonian::from_labels(2, &[("ZI", 1.0)]).unwrap();
        assert!(matches!(
            parity_project(&h, &ParitySector::even(2).unwrap()),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn embed_and_project_are_inverse() {
        let sec = ParitySector::odd(3).unwrap();
        let amps: Vec<C64> = (0..4).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let back = sec.project_state(&sec.embed(&amps));
        for (a, b) in amps.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn sparse_sector_matches_dense() {
        let h = PauliHamiltonian::from_labels(3, &[("ZZI", 1.0), ("XII", -1.0), ("IYY", 0.4), ("XXX", 0.2)])
            .unwrap();
        let sec = ParitySector::even(3).unwrap();
        let d = parity_project(&h, &sec).unwrap();
        let s = parity_project_with(&h, &sec, &BuildOptions { dense_below: 0, ..Default::default() }).unwrap();
        assert_eq!(d.to_complex_dense(), s.to_complex_dense());
    }
}
