//! De-signing and shifting stoquastizations, at matrix and Pauli level, and
//! the signature-curability test.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, C64};
use crate::pauli::{PauliHamiltonian, PauliString};

/// Coefficients `α_ij` keyed by edge `(i, j)` with `i < j`.
pub type EdgeCoefficients = BTreeMap<(usize, usize), f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StoquastizationKind {
    DeSigned,
    ShiftedUniform(f64),
    ShiftedDenseRank1(f64),
}

/// Diagonal ±1 unitary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureMatrix {
    signs: Vec<i8>,
}

impl SignatureMatrix {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("signature entry {s} is not ±1")));
        }
        Ok(SignatureMatrix { signs })
    }

    pub fn identity(n: usize) -> Self {
        SignatureMatrix { signs: vec![1; n] }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `S·m·S`.
    pub fn conjugate(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        if m.dim() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: m.dim(),
            });
        }
        let n = m.dim();
        let mut out = m.to_complex_dense();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] *= (self.signs[i] * self.signs[j]) as f64;
            }
        }
        let out = HermitianMatrix::from_complex_dense(out)?;
        Ok(if m.is_dense() { out } else { out.sparsified() })
    }
}

/// Replaces every off-diagonal entry by minus its modulus.
pub fn design_matrix(m: &HermitianMatrix) -> HermitianMatrix {
    m.map_offdiag_real(|v| -v.norm())
}

/// `½(H − c·Σ_{i≠j, H_ij≠0}|i⟩⟨j|)` with `c` the largest off-diagonal
/// magnitude unless given.
pub fn shift_matrix(m: &HermitianMatrix, shift: Option<f64>) -> Result<HermitianMatrix> {
    if !m.is_real() {
        return Err(Error::ComplexEntries);
    }
    let c = match shift {
        Some(c) if c < 0.0 || c.is_nan() => return Err(Error::NegativeShift(c)),
        Some(c) => c,
        None => m.max_offdiag_abs(),
    };
    let shifted = m.map_offdiag_real(|v| v.re - c);
    HermitianMatrix::linear_combination(&[(0.5, &shifted)])
}

/// `½(H − shift·J)` with `J` the all-ones matrix, diagonal included.
pub fn shift_dense(m: &HermitianMatrix, shift: f64) -> Result<HermitianMatrix> {
    let Some(mut d) = m.to_real_dense() else {
        return Err(Error::ComplexEntries);
    };
    if !m.is_dense() {
        return Err(Error::NotDense);
    }
    d.iter_mut().for_each(|v| *v = 0.5 * (*v - shift));
    HermitianMatrix::from_real_dense(d)
}

/// Applies a stoquastization to an explicit matrix.
pub fn stoquastize_matrix(m: &HermitianMatrix, kind: StoquastizationKind) -> Result<HermitianMatrix> {
    match kind {
        StoquastizationKind::DeSigned => Ok(design_matrix(m)),
        StoquastizationKind::ShiftedUniform(c) => shift_matrix(m, Some(c)),
        StoquastizationKind::ShiftedDenseRank1(c) => shift_dense(m, c),
    }
}

/// Pauli-level de-signing: the off-diagonal part is split into blocks on
/// `k`-qubit subsets, each block is de-signed as a `2^k × 2^k` matrix and
/// re-expanded in the Pauli basis.
///
/// Terms sharing a support share a block; a support is placed in the subset
/// formed by padding it with the lowest unused qubits.
pub fn design_pauli(h: &PauliHamiltonian, k: usize) -> Result<PauliHamiltonian> {
    let n = h.n();
    let k = k.min(n);
    let mut out = PauliHamiltonian::new(n)?;
    let mut blocks: BTreeMap<u64, Vec<(PauliString, f64)>> = BTreeMap::new();
    for (p, c) in h.terms() {
        if p.is_diagonal() {
            out.add_term(*p, c)?;
            continue;
        }
        if p.z_mask() & !p.x_mask() != 0 {
            return Err(Error::LocalityViolation {
                term: p.to_string(),
                reason: "Z factor alongside X/Y factors".into(),
            });
        }
        if p.weight() > k {
            return Err(Error::LocalityViolation {
                term: p.to_string(),
                reason: format!("weight {} exceeds k = {k}", p.weight()),
            });
        }
        blocks.entry(padded_subset(n, p.x_mask(), k)).or_default().push((*p, c));
    }

    let mut owner: BTreeMap<u64, u64> = BTreeMap::new();
    for (&subset, terms) in &blocks {
        for (p, _) in terms {
            if let Some(&other) = owner.get(&p.x_mask()) {
                if other != subset {
                    return Err(Error::OverlapAmbiguity {
                        first: mask_string(n, other),
                        second: mask_string(n, subset),
                        mask: p.x_mask(),
                    });
                }
            }
            owner.insert(p.x_mask(), subset);
        }
    }

    for (&subset, terms) in &blocks {
        for (p, c) in design_block(n, subset, terms)? {
            out.add_term(p, c)?;
        }
    }
    Ok(out)
}

fn bit(n: usize, q: usize) -> u64 {
    1u64 << (n - 1 - q)
}

fn padded_subset(n: usize, support: u64, k: usize) -> u64 {
    let mut s = support;
    let mut q = 0;
    while (s.count_ones() as usize) < k && q < n {
        s |= bit(n, q);
        q += 1;
    }
    s
}

fn mask_string(n: usize, mask: u64) -> String {
    let qs: Vec<String> = (0..n).filter(|&q| mask & bit(n, q) != 0).map(|q| q.to_string()).collect();
    format!("{{{}}}", qs.join(","))
}

/// Qubits of `subset` in increasing order.
fn subset_qubits(n: usize, subset: u64) -> Vec<usize> {
    (0..n).filter(|&q| subset & bit(n, q) != 0).collect()
}

fn compress(n: usize, qubits: &[usize], mask: u64) -> u64 {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .filter(|&(_, &q)| mask & bit(n, q) != 0)
        .fold(0, |acc, (l, _)| acc | bit(k, l))
}

fn expand(n: usize, qubits: &[usize], local: u64) -> u64 {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .filter(|&(l, _)| local & bit(k, l) != 0)
        .fold(0, |acc, (_, &q)| acc | bit(n, q))
}

fn design_block(n: usize, subset: u64, terms: &[(PauliString, f64)]) -> Result<Vec<(PauliString, f64)>> {
    let qubits = subset_qubits(n, subset);
    let k = qubits.len();
    let dim = 1usize << k;
    let mut block = DMatrix::<C64>::zeros(dim, dim);
    let mut masks = Vec::new();
    for (p, c) in terms {
        let local = PauliString::from_masks(k, compress(n, &qubits, p.x_mask()), compress(n, &qubits, p.z_mask()))?;
        masks.push(local.x_mask());
        for b in 0..dim as u64 {
            let (img, phase) = local.apply(b);
            block[(img as usize, b as usize)] += phase * *c;
        }
    }
    masks.sort_unstable();
    masks.dedup();
    let designed = design_matrix(&HermitianMatrix::from_complex_dense(block)?).to_complex_dense();

    let mut out = Vec::new();
    for &x in &masks {
        // Only X/Y strings on the flipped qubits can carry weight here.
        let mut z = x;
        loop {
            let local = PauliString::from_masks(k, x, z)?;
            let tr: C64 = (0..dim as u64)
                .map(|b| {
                    let (img, phase) = local.apply(b);
                    phase * designed[(b as usize, img as usize)]
                })
                .sum();
            let coeff = tr.re / dim as f64;
            if coeff != 0.0 {
                let global = PauliString::from_masks(n, expand(n, &qubits, x), expand(n, &qubits, z))?;
                out.push((global, coeff));
            }
            if z == 0 {
                break;
            }
            z = (z - 1) & x;
        }
    }
    Ok(out)
}

/// Catalyst-coefficient form of the stoquastizations:
/// `α → −|α|` or `α → ½(α − c)`.
pub fn stoquastize_catalyst(alphas: &EdgeCoefficients, kind: StoquastizationKind) -> EdgeCoefficients {
    alphas
        .iter()
        .map(|(&e, &a)| {
            let v = match kind {
                StoquastizationKind::DeSigned => -a.abs(),
                StoquastizationKind::ShiftedUniform(c) | StoquastizationKind::ShiftedDenseRank1(c) => 0.5 * (a - c),
            };
            (e, v)
        })
        .collect()
}

/// A signature `S` with `S·m·S = design_matrix(m)`, if one exists.
///
/// Signs are propagated breadth-first over the sparsity graph and checked on
/// every edge. Matrices with genuinely complex entries are never curable by
/// a signature.
pub fn curability_check(m: &HermitianMatrix) -> Option<SignatureMatrix> {
    let n = m.dim();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut complex = false;
    m.for_each_offdiag(|i, j, v| {
        if v.im != 0.0 {
            complex = true;
        }
        adj[i].push((j, v.re));
    });
    if complex {
        return None;
    }
    let mut signs = vec![0i8; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if signs[root] != 0 {
            continue;
        }
        signs[root] = 1;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            for &(j, v) in &adj[i] {
                let want = if v > 0.0 { -signs[i] } else { signs[i] };
                if signs[j] == 0 {
                    signs[j] = want;
                    queue.push_back(j);
                } else if signs[j] != want {
                    return None;
                }
            }
        }
    }
    Some(SignatureMatrix { signs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        let n = rows.len();
        HermitianMatrix::from_real_dense(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    fn dense(m: &HermitianMatrix) -> DMatrix<f64> {
        m.to_real_dense().unwrap()
    }

    #[test]
    fn design_examples() {
        assert_eq!(dense(&design_matrix(&real(&[&[1.0, 2.0], &[2.0, 3.0]]))), DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 3.0]));
        let c = HermitianMatrix::from_complex_dense(DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)],
        ))
        .unwrap();
        let d = design_matrix(&c);
        assert!(d.is_real());
        assert_eq!(dense(&d), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        let stoq = real(&[&[0.5, -1.0, 0.0], &[-1.0, 2.0, -0.3], &[0.0, -0.3, 1.0]]);
        assert_eq!(design_matrix(&stoq), stoq);
    }

    #[test]
    fn shift_examples() {
        let zero = DMatrix::<f64>::zeros(2, 2);
        assert_eq!(dense(&shift_matrix(&real(&[&[0.0, 1.0], &[1.0, 0.0]]), Some(1.0)).unwrap()), zero);
        assert_eq!(
            dense(&shift_matrix(&real(&[&[0.0, -1.0], &[-1.0, 0.0]]), Some(1.0)).unwrap()),
            DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])
        );
        assert_eq!(dense(&shift_matrix(&real(&[&[0.0, 0.4], &[0.4, 0.0]]), None).unwrap()), zero);
        assert_eq!(
            dense(&shift_matrix(&real(&[&[4.0, 1.0], &[1.0, -2.0]]), Some(3.0)).unwrap()),
            DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, -1.0])
        );
        assert!(matches!(shift_matrix(&real(&[&[0.0]]), Some(-1.0)), Err(Error::NegativeShift(_))));
    }

    #[test]
    fn shift_keeps_sparsity() {
        let m = real(&[&[1.0, 0.0, 2.0], &[0.0, 1.0, -1.0], &[2.0, -1.0, 0.0]]);
        let s = shift_matrix(&m, None).unwrap();
        assert_eq!(s.get(0, 1).re, 0.0);
        assert_eq!(s.get(0, 2).re, 0.0);
        assert_eq!(s.get(1, 2).re, -1.5);
        assert_eq!(s.get(2, 2).re, 0.0);
    }

    #[test]
    fn shift_dense_examples() {
        let z = HermitianMatrix::from_real_dense(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(dense(&shift_dense(&z, 1.0).unwrap()), DMatrix::from_element(2, 2, -0.5));
        let id = HermitianMatrix::from_real_dense(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(dense(&shift_dense(&id, 0.0).unwrap()), DMatrix::identity(2, 2) * 0.5);
        assert!(matches!(shift_dense(&id.sparsified(), 1.0), Err(Error::NotDense)));
    }

    #[test]
    fn pauli_design_examples() {
        let h = PauliHamiltonian::from_labels(2, &[("XX", 0.8)]).unwrap();
        let d = design_pauli(&h, 2).unwrap();
        assert_eq!(d, PauliHamiltonian::from_labels(2, &[("XX", -0.8)]).unwrap());

        let h = PauliHamiltonian::from_labels(3, &[("XXI", 1.0), ("IXX", -1.0)]).unwrap();
        let d = design_pauli(&h, 2).unwrap();
        assert_eq!(d, PauliHamiltonian::from_labels(3, &[("XXI", -1.0), ("IXX", -1.0)]).unwrap());
    }

    #[test]
    fn pauli_design_matches_matrix() {
        for labels in [
            vec![("XX", 0.6), ("YY", 0.6)],
            vec![("XX", 1.0), ("YY", 0.5), ("ZI", 0.3)],
            vec![("XY", 0.7), ("YX", -0.7), ("IX", 0.2)],
        ] {
            let h = PauliHamiltonian::from_labels(2, &labels).unwrap();
            let lhs = design_pauli(&h, 2).unwrap().build_matrix().unwrap().to_complex_dense();
            let rhs = design_matrix(&h.build_matrix().unwrap()).to_complex_dense();
            assert!((lhs - rhs).iter().all(|d| d.norm() < 1e-12));
        }
    }

    #[test]
    fn pauli_design_errors() {
        let h = PauliHamiltonian::from_labels(2, &[("XZ", 1.0)]).unwrap();
        assert!(matches!(design_pauli(&h, 2), Err(Error::LocalityViolation { .. })));
        let h = PauliHamiltonian::from_labels(3, &[("XXX", 1.0)]).unwrap();
        assert!(matches!(design_pauli(&h, 2), Err(Error::LocalityViolation { .. })));
    }

    #[test]
    fn catalyst_maps() {
        let a: EdgeCoefficients = [((0, 1), 0.7), ((1, 2), -0.3)].into_iter().collect();
        let d = stoquastize_catalyst(&a, StoquastizationKind::DeSigned);
        assert_eq!(d[&(0, 1)], -0.7);
        assert_eq!(d[&(1, 2)], -0.3);
        let a: EdgeCoefficients = [((0, 1), 1.0), ((1, 2), -1.0)].into_iter().collect();
        let s = stoquastize_catalyst(&a, StoquastizationKind::ShiftedUniform(1.0));
        assert_eq!(s[&(0, 1)], 0.0);
        assert_eq!(s[&(1, 2)], -1.0);
    }

    #[test]
    fn curability_examples() {
        let m = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = curability_check(&m).unwrap();
        assert_eq!(s.signs(), &[1, -1]);
        assert_eq!(s.conjugate(&m).unwrap(), design_matrix(&m));

        let tri = real(&[&[0.0, 1.0, -1.0], &[1.0, 0.0, -1.0], &[-1.0, -1.0, 0.0]]);
        assert!(curability_check(&tri).is_none());
        // exhaustive confirmation
        for bits in 0..8u32 {
            let signs = (0..3).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            let s = SignatureMatrix::new(signs).unwrap();
            assert_ne!(s.conjugate(&tri).unwrap(), design_matrix(&tri));
        }

        let stoq = real(&[&[0.0, -1.0, 0.0], &[-1.0, 0.0, -2.0], &[0.0, -2.0, 1.0]]);
        assert_eq!(curability_check(&stoq).unwrap(), SignatureMatrix::identity(3));
    }
}
