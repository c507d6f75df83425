//! Random instances: dense Wigner-type and complex Hermitian matrices,
//! 3-regular Max-Cut graphs with a unique cut, and catalyst draws.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, C64};
use crate::pauli::{PauliHamiltonian, PauliString};
use crate::stoquastize::EdgeCoefficients;

/// Deterministic generator for one instance: a ChaCha stream selected by
/// `stream_id` under the key derived from `master_seed`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        SeededRng {
            master_seed,
            stream_id,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent generator for a labelled sub-task of this stream.
    pub fn substream(&self, tag: u64) -> SeededRng {
        let mut inner = ChaCha20Rng::seed_from_u64(splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(1))));
        inner.set_stream(self.stream_id);
        SeededRng {
            master_seed: self.master_seed,
            stream_id: self.stream_id,
            inner,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("matrix dimension must be at least 2, got {n}")));
    }
    Ok(())
}

fn uniform_pm1(rng: &mut SeededRng) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Entries i.i.d. uniform in `[-1, 1]`, averaged with the transpose.
pub fn sample_wigner(n: usize, rng: &mut SeededRng) -> Result<HermitianMatrix> {
    check_dim(n)?;
    let raw = DMatrix::from_fn(n, n, |_, _| uniform_pm1(rng));
    let sym = (&raw + raw.transpose()) * 0.5;
    HermitianMatrix::from_real_dense(sym)
}

/// Real and imaginary parts i.i.d. uniform in `[-1, 1]`, averaged with the
/// conjugate transpose.
pub fn sample_complex_hermitian(n: usize, rng: &mut SeededRng) -> Result<HermitianMatrix> {
    check_dim(n)?;
    let raw = DMatrix::from_fn(n, n, |_, _| {
        let re = uniform_pm1(rng);
        let im = uniform_pm1(rng);
        C64::new(re, im)
    });
    let mut herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    for i in 0..n {
        herm[(i, i)].im = 0.0;
    }
    HermitianMatrix::from_complex_dense(herm)
}

/// `A + ½W` with `A` the all-ones matrix.
pub fn shifted_partner(w: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = w.to_real_dense().ok_or(Error::ComplexEntries)?;
    HermitianMatrix::from_real_dense(d.map(|v| 1.0 + 0.5 * v))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutInstance {
    pub n: usize,
    /// Edges `(i, j)` with `i < j`, sorted; every coupling is `+1`.
    pub edges: Vec<(usize, usize)>,
    /// Ground bitstring with qubit 0 (the most significant bit) clear.
    pub solution: u64,
    pub master_seed: u64,
    pub stream_id: u64,
}

impl MaxCutInstance {
    /// `Σ_{(i,j)} z_i z_j` for bitstring `b` (bit of qubit `q` is `1 << (n-1-q)`).
    pub fn energy(&self, b: u64) -> i64 {
        ising_energy(self.n, &self.edges, b)
    }

    pub fn ground_states(&self) -> Vec<u64> {
        ground_states(self.n, &self.edges)
    }

    pub fn solution_string(&self) -> String {
        bitstring(self.n, self.solution)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }
}

fn bitstring(n: usize, b: u64) -> String {
    (0..n).map(|q| if b >> (n - 1 - q) & 1 == 1 { '1' } else { '0' }).collect()
}

fn ising_energy(n: usize, edges: &[(usize, usize)], b: u64) -> i64 {
    edges
        .iter()
        .map(|&(i, j)| {
            if (b >> (n - 1 - i) ^ b >> (n - 1 - j)) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .sum()
}

fn ground_states(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let masks: Vec<u64> = edges
        .iter()
        .map(|&(i, j)| (1u64 << (n - 1 - i)) | (1u64 << (n - 1 - j)))
        .collect();
    let m = edges.len() as i64;
    let mut best = i64::MAX;
    let mut states = Vec::new();
    for b in 0..1u64 << n {
        // edges with both endpoints equal contribute +1, cut edges -1
        let cut = masks.iter().filter(|&&mk| (b & mk).count_ones() == 1).count() as i64;
        let e = m - 2 * cut;
        if e < best {
            best = e;
            states.clear();
        }
        if e == best {
            states.push(b);
        }
    }
    states
}

impl fmt::Display for MaxCutInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "seed {} {}", self.master_seed, self.stream_id)?;
        writeln!(f, "solution {}", self.solution_string())?;
        for &(i, j) in &self.edges {
            writeln!(f, "edge {i} {j}")?;
        }
        Ok(())
    }
}

impl FromStr for MaxCutInstance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut seed = (0, 0);
        let mut solution = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(&format!("bad integer {s:?}")));
            match fields.as_slice() {
                ["n", v] => n = Some(num(v)? as usize),
                ["seed", a, b] => seed = (num(a)?, num(b)?),
                ["solution", s] => {
                    if !s.chars().all(|c| c == '0' || c == '1') || s.len() > 63 {
                        return Err(err("solution must be a bitstring"));
                    }
                    solution = Some((s.len(), u64::from_str_radix(s, 2).unwrap_or(0)));
                }
                ["edge", a, b] => {
                    let (i, j) = (num(a)? as usize, num(b)? as usize);
                    if i == j {
                        return Err(err("self-loop"));
                    }
                    edges.push((i.min(j), i.max(j)));
                }
                _ => return Err(err(&format!("unrecognized line {content:?}"))),
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing `n` line".into(),
        })?;
        if edges.iter().any(|&(_, j)| j >= n) {
            return Err(Error::Parse {
                line: 0,
                msg: "edge endpoint out of range".into(),
            });
        }
        edges.sort_unstable();
        let solution = match solution {
            Some((len, s)) if len == n => s,
            Some(_) => {
                return Err(Error::Parse {
                    line: 0,
                    msg: "solution length differs from n".into(),
                })
            }
            None => ground_states(n, &edges)[0],
        };
        Ok(MaxCutInstance {
            n,
            edges,
            solution,
            master_seed: seed.0,
            stream_id: seed.1,
        })
    }
}

const PAIRING_ATTEMPTS: usize = 100_000;

/// Simple 3-regular graph from the pairing model, rejecting loops and
/// multi-edges.
pub fn sample_three_regular(n: usize, rng: &mut SeededRng) -> Result<Vec<(usize, usize)>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("3-regular graphs need even n ≥ 4, got {n}")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(rng);
        let mut edges = BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !edges.insert((a, b)) {
                continue 'attempt;
            }
        }
        return Ok(edges.into_iter().collect());
    }
    Err(Error::RetriesExhausted {
        retries: PAIRING_ATTEMPTS,
    })
}

/// Largest spin count accepted by the exhaustive uniqueness check.
pub const MAX_MAXCUT_SPINS: usize = 24;

/// Random 3-regular antiferromagnet whose Ising energy has exactly two
/// minimizers. Graphs failing the uniqueness check count as retries.
pub fn sample_maxcut(n: usize, rng: &mut SeededRng, max_retries: usize) -> Result<MaxCutInstance> {
    if n > MAX_MAXCUT_SPINS {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds the exhaustive-check limit {MAX_MAXCUT_SPINS}"
        )));
    }
    for _ in 0..=max_retries {
        let edges = sample_three_regular(n, rng)?;
        let gs = ground_states(n, &edges);
        if gs.len() == 2 {
            return Ok(MaxCutInstance {
                n,
                solution: gs[0],
                edges,
                master_seed: rng.master_seed(),
                stream_id: rng.stream_id(),
            });
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalystMode {
    Uniform,
    Pm1,
}

impl FromStr for CatalystMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(CatalystMode::Uniform),
            "pm1" => Ok(CatalystMode::Pm1),
            _ => Err(Error::InvalidArgument(format!("unknown catalyst mode {s:?}"))),
        }
    }
}

/// One coefficient per edge, uniform in `[-1, 1]` or `±1` with equal odds.
pub fn sample_catalyst(edges: &[(usize, usize)], mode: CatalystMode, rng: &mut SeededRng) -> Result<EdgeCoefficients> {
    if edges.is_empty() {
        return Err(Error::InvalidArgument("empty edge list".into()));
    }
    Ok(edges
        .iter()
        .map(|&(i, j)| {
            let a = match mode {
                CatalystMode::Uniform => uniform_pm1(rng),
                CatalystMode::Pm1 => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            ((i.min(j), i.max(j)), a)
        })
        .collect())
}

/// `α + Σ_S α_S X_S` over `terms` distinct nonempty X-strings, every
/// coefficient uniform in `[-1, 1]`.
pub fn sample_x_diagonal(n: usize, terms: usize, rng: &mut SeededRng) -> Result<PauliHamiltonian> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidArgument(format!("X-diagonal sampling needs 1 <= n <= 20, got {n}")));
    }
    let available = (1usize << n) - 1;
    if terms == 0 || terms > available {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {terms} distinct X-strings on {n} qubits"
        )));
    }
    let mut masks = BTreeSet::new();
    while masks.len() < terms {
        masks.insert(rng.random_range(1..=available as u64));
    }
    let mut h = PauliHamiltonian::new(n)?;
    h.add_term(PauliString::identity(n)?, uniform_pm1(rng))?;
    for x in masks {
        h.add_term(PauliString::from_masks(n, x, 0)?, uniform_pm1(rng))?;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_is_symmetric_and_bounded() {
        let mut rng = SeededRng::new(7, 0);
        let w = sample_wigner(12, &mut rng).unwrap();
        let d = w.to_real_dense().unwrap();
        assert_eq!(d, d.transpose());
        assert!(d.iter().all(|v| (-1.0..=1.0).contains(v)));
        let again = sample_wigner(12, &mut SeededRng::new(7, 0)).unwrap();
        assert_eq!(w, again);
        let other = sample_wigner(12, &mut SeededRng::new(7, 1)).unwrap();
        assert_ne!(w, other);
    }

    #[test]
    fn complex_sample_is_hermitian() {
        let m = sample_complex_hermitian(9, &mut SeededRng::new(3, 4)).unwrap();
        assert!(!m.is_real());
        assert!(m.hermitian_defect() <= 1e-15);
        assert!(m.diagonal().iter().zip(0..).all(|(_, i)| m.get(i, i).im == 0.0));
    }

    #[test]
    fn partner_is_rank_one_shift() {
        let w = sample_wigner(6, &mut SeededRng::new(1, 1)).unwrap();
        let p = shifted_partner(&w).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(p.get(i, j).re, 1.0 + 0.5 * w.get(i, j).re);
            }
        }
    }

    #[test]
    fn k4_exhausts_retries() {
        let mut rng = SeededRng::new(11, 0);
        assert_eq!(
            sample_maxcut(4, &mut rng, 5),
            Err(Error::RetriesExhausted { retries: 5 })
        );
        let k4: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert_eq!(ground_states(4, &k4).len(), 6);
    }

    #[test]
    fn accepted_instance_has_complementary_pair() {
        let inst = sample_maxcut(6, &mut SeededRng::new(5, 2), 1000).unwrap();
        assert!(inst.degrees().iter().all(|&d| d == 3));
        let gs = inst.ground_states();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0] ^ gs[1], 0b111111);
        assert_eq!(inst.solution, gs[0]);
        assert_eq!(inst.solution >> 5, 0);
        assert_eq!(inst, sample_maxcut(6, &mut SeededRng::new(5, 2), 1000).unwrap());
    }

    #[test]
    fn instance_text_round_trip() {
        let inst = sample_maxcut(8, &mut SeededRng::new(9, 3), 1000).unwrap();
        let back: MaxCutInstance = inst.to_string().parse().unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn catalyst_draws() {
        let edges = [(0, 1), (1, 2), (0, 2)];
        let mut rng = SeededRng::new(2, 0);
        let pm = sample_catalyst(&edges, CatalystMode::Pm1, &mut rng).unwrap();
        assert!(pm.values().all(|&a| a == 1.0 || a == -1.0));
        let un = sample_catalyst(&edges, CatalystMode::Uniform, &mut rng).unwrap();
        assert!(un.values().all(|a| (-1.0..=1.0).contains(a)));
        assert!(sample_catalyst(&[], CatalystMode::Pm1, &mut rng).is_err());
    }

    #[test]
    fn x_diagonal_draws() {
        let h = sample_x_diagonal(5, 7, &mut SeededRng::new(4, 0)).unwrap();
        assert!(h.len() <= 8);
        assert!(h.terms().all(|(p, c)| p.z_mask() == 0 && (-1.0..=1.0).contains(&c)));
        assert!(sample_x_diagonal(2, 4, &mut SeededRng::new(4, 0)).is_err());
    }
}
