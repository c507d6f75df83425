//! Pauli strings and real-weighted Pauli sums.
//!
//! Basis convention: the computational basis state `|b⟩` is indexed by the
//! integer value of its bitstring with qubit 0 as the most significant bit,
//! so the string `"XI"` flips bit `1 << (n - 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, C64};

/// Largest supported qubit count for bitmask storage.
pub const MAX_QUBITS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli string stored as flip (`x`) and phase (`z`) bitmasks;
/// `Y` sets both bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(PauliString { n, x: 0, z: 0 })
    }

    pub fn from_factors(factors: &[Pauli]) -> Result<Self> {
        let n = factors.len();
        check_qubits(n)?;
        let mut s = PauliString { n, x: 0, z: 0 };
        for (q, &p) in factors.iter().enumerate() {
            s = s.with(q, p);
        }
        Ok(s)
    }

    /// Identity everywhere except the listed `(qubit, factor)` pairs.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n)?;
        for &(q, p) in factors {
            if q >= n {
                return Err(Error::InvalidArgument(format!("qubit {q} out of range for n={n}")));
            }
            s = s.with(q, p);
        }
        Ok(s)
    }

    /// From raw masks; bit `1 << (n-1-q)` refers to qubit `q`.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        check_qubits(n)?;
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if (x | z) & !all != 0 {
            return Err(Error::InvalidArgument(format!("mask exceeds {n} qubits")));
        }
        Ok(PauliString { n, x, z })
    }

    fn with(mut self, q: usize, p: Pauli) -> Self {
        let bit = 1u64 << (self.n - 1 - q);
        self.x &= !bit;
        self.z &= !bit;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= bit,
            Pauli::Z => self.z |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit;
            }
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn factor(&self, q: usize) -> Pauli {
        let bit = 1u64 << (self.n - 1 - q);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.factor(q)).collect()
    }

    /// Bitmask of qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn num_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Commutes with `P = ∏ X_i` iff the number of Y/Z factors is even.
    pub fn commutes_with_parity(&self) -> bool {
        self.z.count_ones() % 2 == 0
    }

    /// `P|b⟩ = phase · |b ^ x⟩`.
    #[inline]
    pub fn apply(&self, b: u64) -> (u64, C64) {
        let sign = if (b & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let phase = match self.num_y() % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        };
        (b ^ self.x, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.factor(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("invalid Pauli factor {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_factors(&factors)
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Refuse to build matrices above this qubit count.
    pub max_qubits: usize,
    /// Use dense storage when the dimension is below this value.
    pub dense_below: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_qubits: 24,
            dense_below: 1 << 12,
        }
    }
}

/// Real linear combination of Pauli strings on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliHamiltonian {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(PauliHamiltonian {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut h = Self::new(n)?;
        for (s, c) in terms {
            h.add_term(s, c)?;
        }
        Ok(h)
    }

    /// Parses `(coefficient, "XZI…")` pairs.
    pub fn from_labels(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut h = Self::new(n)?;
        for &(label, c) in terms {
            h.add_term(label.parse()?, c)?;
        }
        Ok(h)
    }

    /// Adds `coeff · s`, merging with an existing term; exact cancellations
    /// remove the term.
    pub fn add_term(&mut self, s: PauliString, coeff: f64) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::NonFiniteCoefficient {
                term: s.to_string(),
                value: coeff,
            });
        }
        let entry = self.terms.entry(s).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&s);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, c)| (s, *c))
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms.get(s).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_terms(self.n, self.terms().map(|(s, c)| (*s, c * factor)))
    }

    pub fn plus(&self, other: &PauliHamiltonian) -> Result<Self> {
        let mut h = self.clone();
        for (s, c) in other.terms() {
            h.add_term(*s, c)?;
        }
        Ok(h)
    }

    /// First term that anticommutes with `P = ∏ X_i`, if any.
    pub fn parity_violation(&self) -> Option<PauliString> {
        self.terms.keys().find(|s| !s.commutes_with_parity()).copied()
    }

    pub fn commutes_with_parity(&self) -> bool {
        self.parity_violation().is_none()
    }

    pub fn build_matrix(&self) -> Result<HermitianMatrix> {
        self.build_matrix_with(&BuildOptions::default())
    }

    /// Matrix of the Pauli sum in the computational Z basis.
    pub fn build_matrix_with(&self, opts: &BuildOptions) -> Result<HermitianMatrix> {
        if self.n > opts.max_qubits {
            return Err(Error::DimensionOverflow {
                n: self.n,
                max: opts.max_qubits,
            });
        }
        let dim = 1usize << self.n;
        let labels: Vec<u64> = (0..dim as u64).collect();
        if dim < opts.dense_below {
            let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
            for (s, c) in self.terms() {
                for b in 0..dim as u64 {
                    let (row, phase) = s.apply(b);
                    m[(row as usize, b as usize)] += phase * c;
                }
            }
            HermitianMatrix::from_complex_dense(m)?.with_labels(labels)
        } else {
            let mut trips = Vec::with_capacity(dim * self.terms.len());
            for (s, c) in self.terms() {
                for b in 0..dim as u64 {
                    let (row, phase) = s.apply(b);
                    trips.push((row as usize, b as usize, phase * c));
                }
            }
            HermitianMatrix::from_complex_triplets(dim, trips)?.with_labels(labels)
        }
    }

    /// Serializes as one `coeff pauli_string` line per term.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return format!("qubits {}\n", self.n);
        }
        let mut out = String::new();
        for (s, c) in self.terms() {
            out.push_str(&format!("{c} {s}\n"));
        }
        out
    }

    /// Parses the line format written by [`to_text`](Self::to_text).
    /// Blank lines and `#` comments are ignored; an optional `qubits N`
    /// line fixes the qubit count. The Unicode minus sign is accepted.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut pending = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            if parts.len() != 2 {
                return Err(parse_err(format!("expected two fields, got {}", parts.len())));
            }
            if parts[0] == "qubits" {
                let q = parts[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(e.to_string()))?;
                n = Some(q);
                continue;
            }
            let coeff = parts[0]
                .replace('\u{2212}', "-")
                .parse::<f64>()
                .map_err(|e| parse_err(format!("bad coefficient {:?}: {e}", parts[0])))?;
            let s: PauliString = parts[1].parse().map_err(|e: Error| parse_err(e.to_string()))?;
            if let Some(q) = n {
                if q != s.n() {
                    return Err(parse_err(format!(
                        "string {} has length {}, expected {q}",
                        parts[1],
                        s.n()
                    )));
                }
            } else {
                n = Some(s.n());
            }
            pending.push((s, coeff));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "no terms and no qubit count".into(),
        })?;
        Self::from_terms(n, pending)
    }

    /// `H_D = -Σ_i X_i`.
    pub fn transverse_field(n: usize) -> Result<Self> {
        Self::from_terms(
            n,
            (0..n)
                .map(|q| PauliString::from_sparse(n, &[(q, Pauli::X)]).map(|s| (s, -1.0)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `Σ_{(i,j)} c_ij P_i P_j` over an edge list.
    pub fn two_body(n: usize, p: Pauli, edges: &[((usize, usize), f64)]) -> Result<Self> {
        let mut h = Self::new(n)?;
        for &((i, j), c) in edges {
            if i == j {
                return Err(Error::InvalidArgument(format!("self-loop on qubit {i}")));
            }
            h.add_term(PauliString::from_sparse(n, &[(i, p), (j, p)])?, c)?;
        }
        Ok(h)
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Largest entry of `[H, P]` built numerically; used to cross-check the
/// symbolic parity test on small systems.
pub fn parity_commutator_norm(h: &PauliHamiltonian) -> Result<f64> {
    let m = h.build_matrix()?;
    let dim = m.dim();
    let all = (dim - 1) as u64;
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            // (HP)_ij = H_{i, j^all}; (PH)_ij = H_{i^all, j}
            let hp = m.get(i, j ^ all as usize);
            let ph = m.get(i ^ all as usize, j);
            worst = worst.max((hp - ph).norm());
        }
    }
    Ok(worst)
}
