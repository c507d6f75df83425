//! Signed graphs: Laplacians, balance, frustration index, expansion,
//! exhaustive k-way Cheeger constants and an audit of the spectral bounds
//! relating them.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::SeededRng;
use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::spectra::dense_eigh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// `+1` or `-1`.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedGraph {
    vertices: usize,
    edges: Vec<SignedEdge>,
    degrees: Vec<f64>,
}

impl SignedGraph {
    pub fn new(vertices: usize, edges: Vec<SignedEdge>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut degrees = vec![0.0; vertices];
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            if e.u >= vertices || e.v >= vertices {
                return Err(Error::InvalidArgument(format!("edge ({}, {}) out of range", e.u, e.v)));
            }
            if e.u == e.v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {}", e.u)));
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid weight {}", e.weight)));
            }
            if e.sign != 1 && e.sign != -1 {
                return Err(Error::InvalidArgument(format!("invalid sign {}", e.sign)));
            }
            let (u, v) = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert((u, v)) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
            }
            degrees[u] += e.weight;
            degrees[v] += e.weight;
            normalized.push(SignedEdge { u, v, ..e });
        }
        Ok(SignedGraph {
            vertices,
            edges: normalized,
            degrees,
        })
    }

    /// Unit-weight graph from `(u, v, sign)` triples.
    pub fn unit(vertices: usize, edges: &[(usize, usize, i8)]) -> Result<Self> {
        Self::new(
            vertices,
            edges
                .iter()
                .map(|&(u, v, sign)| SignedEdge { u, v, weight: 1.0, sign })
                .collect(),
        )
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn d_max(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degrees[v]).sum()
    }

    /// Same graph with every sign set to `+1`.
    pub fn unsigned(&self) -> SignedGraph {
        SignedGraph {
            edges: self.edges.iter().map(|e| SignedEdge { sign: 1, ..*e }).collect(),
            ..self.clone()
        }
    }

    /// Signature after the switching `σ_uv → θ_u σ_uv θ_v`.
    pub fn switched(&self, theta: &[i8]) -> Result<SignedGraph> {
        if theta.len() != self.vertices {
            return Err(Error::LengthMismatch {
                expected: self.vertices,
                got: theta.len(),
            });
        }
        Ok(SignedGraph {
            edges: self
                .edges
                .iter()
                .map(|e| SignedEdge {
                    sign: e.sign * theta[e.u] * theta[e.v],
                    ..*e
                })
                .collect(),
            ..self.clone()
        })
    }

    /// Subgraph induced on `set`, relabelled in the order given.
    pub fn induced(&self, set: &[usize]) -> Result<SignedGraph> {
        let mut index = vec![usize::MAX; self.vertices];
        for (k, &v) in set.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.u] != usize::MAX && index[e.v] != usize::MAX)
            .map(|e| SignedEdge {
                u: index[e.u],
                v: index[e.v],
                ..*e
            })
            .collect();
        SignedGraph::new(set.len(), edges)
    }

    pub fn isolated_vertex(&self) -> Option<usize> {
        self.degrees.iter().position(|&d| d == 0.0)
    }
}

impl fmt::Display for SignedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        for e in &self.edges {
            writeln!(f, "{} {} {} {}", e.u, e.v, e.weight, if e.sign > 0 { "+1" } else { "-1" })?;
        }
        Ok(())
    }
}

impl FromStr for SignedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut vertices = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line, msg };
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                ["vertices", n] => {
                    vertices = Some(n.parse::<usize>().map_err(|_| err(format!("bad vertex count {n:?}")))?)
                }
                [u, v, w, s] => {
                    if vertices.is_none() {
                        return Err(err("edge before `vertices` header".into()));
                    }
                    let u = u.parse().map_err(|_| err(format!("bad vertex {u:?}")))?;
                    let v = v.parse().map_err(|_| err(format!("bad vertex {v:?}")))?;
                    let weight = w.parse().map_err(|_| err(format!("bad weight {w:?}")))?;
                    let sign = match *s {
                        "+" | "+1" | "1" => 1,
                        "-" | "-1" | "−" | "−1" => -1,
                        _ => return Err(err(format!("bad sign {s:?}"))),
                    };
                    edges.push(SignedEdge { u, v, weight, sign });
                }
                _ => return Err(err(format!("unrecognized line {content:?}"))),
            }
        }
        let vertices = vertices.ok_or(Error::Parse {
            line: 0,
            msg: "missing `vertices` header".into(),
        })?;
        SignedGraph::new(vertices, edges)
    }
}

/// `D − A^σ` (or `D − A` when unsigned), optionally as
/// `D^{-1/2} L D^{-1/2}`.
pub fn laplacian(g: &SignedGraph, signed: bool, normalized: bool) -> Result<HermitianMatrix> {
    let n = g.vertices;
    if normalized {
        if let Some(v) = g.isolated_vertex() {
            return Err(Error::IsolatedVertex(v));
        }
    }
    let mut l = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_column_slice(&g.degrees));
    for e in &g.edges {
        let a = if signed { e.sign as f64 * e.weight } else { e.weight };
        l[(e.u, e.v)] -= a;
        l[(e.v, e.u)] -= a;
    }
    if normalized {
        let s: Vec<f64> = g.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                l[(i, j)] *= s[i] * s[j];
            }
        }
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (l[(i, j)] + l[(j, i)]);
                l[(i, j)] = avg;
                l[(j, i)] = avg;
            }
        }
    }
    HermitianMatrix::from_real_dense(l)
}

/// Switching `θ` taking every edge to a positive sign, if one exists.
pub fn is_balanced(g: &SignedGraph) -> Option<Vec<i8>> {
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); g.vertices];
    for e in &g.edges {
        adj[e.u].push((e.v, e.sign));
        adj[e.v].push((e.u, e.sign));
    }
    let mut theta = vec![0i8; g.vertices];
    let mut queue = VecDeque::new();
    for root in 0..g.vertices {
        if theta[root] != 0 {
            continue;
        }
        theta[root] = 1;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(v, s) in &adj[u] {
                let want = theta[u] * s;
                if theta[v] == 0 {
                    theta[v] = want;
                    queue.push_back(v);
                } else if theta[v] != want {
                    return None;
                }
            }
        }
    }
    Some(theta)
}

/// Limit on `|S|` for [`frustration_index`].
pub const MAX_FRUSTRATION_SUBSET: usize = 26;
/// Limit on `|V|` for exhaustive Cheeger constants and audits.
pub const MAX_CHEEGER_VERTICES: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

fn check_subset(g: &SignedGraph, set: &[usize]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut seen = vec![false; g.vertices];
    for &v in set {
        if v >= g.vertices || seen[v] {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range or repeated")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Minimum over bipartitions `S = S₁ ∪ S₂` of
/// `2w⁺(S₁,S₂) + 2w⁻(S₁) + 2w⁻(S₂)`, divided by `vol(S)`.
pub fn frustration_index(g: &SignedGraph, set: &[usize]) -> Result<(f64, Bipartition)> {
    check_subset(g, set)?;
    if set.len() > MAX_FRUSTRATION_SUBSET {
        return Err(Error::SubsetTooLarge {
            size: set.len(),
            max: MAX_FRUSTRATION_SUBSET,
        });
    }
    let mut local = vec![usize::MAX; g.vertices];
    for (k, &v) in set.iter().enumerate() {
        local[v] = k;
    }
    let inner: Vec<(u32, u32, f64, i8)> = g
        .edges
        .iter()
        .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
        .map(|e| (local[e.u] as u32, local[e.v] as u32, e.weight, e.sign))
        .collect();
    let k = set.len();
    // the first vertex of S is fixed to S₁; the cost is symmetric under swap
    let mut best = (f64::INFINITY, 0u32);
    for rest in 0..1u32 << (k - 1) {
        let side = (rest << 1) | 1;
        let cost = residual(&inner, side);
        if cost < best.0 {
            best = (cost, side);
        }
    }
    let vol = g.volume(set);
    let value = if best.0 == 0.0 { 0.0 } else { best.0 / vol };
    let (first, second) = set
        .iter()
        .enumerate()
        .partition::<Vec<_>, _>(|&(i, _)| best.1 >> i & 1 == 1);
    Ok((
        value,
        Bipartition {
            first: first.into_iter().map(|(_, &v)| v).collect(),
            second: second.into_iter().map(|(_, &v)| v).collect(),
        },
    ))
}

fn residual(edges: &[(u32, u32, f64, i8)], side: u32) -> f64 {
    edges
        .iter()
        .map(|&(a, b, w, s)| {
            let split = (side >> a ^ side >> b) & 1 == 1;
            if (s > 0) == split {
                2.0 * w
            } else {
                0.0
            }
        })
        .sum()
}

/// `w(E(S, S̄)) / vol(S)`, ignoring signs.
pub fn expansion(g: &SignedGraph, set: &[usize]) -> Result<f64> {
    check_subset(g, set)?;
    let mut inside = vec![false; g.vertices];
    for &v in set {
        inside[v] = true;
    }
    let cut: f64 = g
        .edges
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| e.weight)
        .sum();
    let vol = g.volume(set);
    if vol == 0.0 {
        return Err(Error::InvalidArgument("subset has zero volume".into()));
    }
    Ok(cut / vol)
}

/// Per-subset volume, expansion and frustration for a small graph; subsets
/// are bitmasks with vertex `v` at bit `v`.
struct SubsetTables {
    n: usize,
    vol: Vec<f64>,
    phi: Vec<f64>,
    frustration: Option<Vec<(f64, u32)>>,
}

impl SubsetTables {
    fn new(g: &SignedGraph, signed: bool) -> Self {
        let n = g.vertices;
        let size = 1usize << n;
        let mut vol = vec![0.0; size];
        let mut cut = vec![0.0; size];
        for s in 1..size {
            let v = s.trailing_zeros() as usize;
            vol[s] = vol[s & (s - 1)] + g.degrees[v];
        }
        for s in 0..size {
            cut[s] = g
                .edges
                .iter()
                .filter(|e| (s >> e.u & 1) != (s >> e.v & 1))
                .map(|e| e.weight)
                .sum();
        }
        let phi = (0..size)
            .map(|s| if vol[s] > 0.0 { cut[s] / vol[s] } else { f64::INFINITY })
            .collect();
        let frustration = signed.then(|| {
            (0..size)
                .map(|s| {
                    if s == 0 || vol[s] == 0.0 {
                        return (f64::INFINITY, 0);
                    }
                    let inner: Vec<(u32, u32, f64, i8)> = g
                        .edges
                        .iter()
                        .filter(|e| s >> e.u & 1 == 1 && s >> e.v & 1 == 1)
                        .map(|e| (e.u as u32, e.v as u32, e.weight, e.sign))
                        .collect();
                    let low = s & s.wrapping_neg();
                    let others = s ^ low;
                    let mut best = (f64::INFINITY, 0u32);
                    let mut sub = others;
                    loop {
                        let side = (sub | low) as u32;
                        let c = residual(&inner, side);
                        if c < best.0 {
                            best = (c, side);
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & others;
                    }
                    (if best.0 == 0.0 { 0.0 } else { best.0 / vol[s] }, best.1)
                })
                .collect()
        });
        SubsetTables {
            n,
            vol,
            phi,
            frustration,
        }
    }

    fn objective(&self, s: usize) -> f64 {
        match &self.frustration {
            Some(f) => f[s].0 + self.phi[s],
            None => self.phi[s],
        }
    }

    /// `min` over `k` disjoint nonempty subsets of `max` objective, with the
    /// optimizing subsets.
    fn cheeger(&self, k: usize) -> (f64, Vec<usize>) {
        let size = 1usize << self.n;
        let full = size - 1;
        // level 1: best single subset inside each T
        let mut best: Vec<(f64, usize)> = (0..size).map(|s| (self.objective(s), s)).collect();
        best[0] = (f64::INFINITY, 0);
        for t in 1..size {
            let mut bits = t;
            while bits != 0 {
                let v = bits & bits.wrapping_neg();
                bits ^= v;
                if best[t ^ v].0 < best[t].0 {
                    best[t] = best[t ^ v];
                }
            }
        }
        let mut levels: Vec<Vec<(f64, usize)>> = vec![best];
        for level in 2..=k {
            let prev = levels.last().unwrap();
            let targets: Vec<usize> = if level == k { vec![full] } else { (0..size).collect() };
            let mut cur = vec![(f64::INFINITY, 0usize); size];
            for t in targets {
                let mut s = t;
                while s != 0 {
                    let v = self.objective(s).max(prev[t ^ s].0);
                    if v < cur[t].0 {
                        cur[t] = (v, s);
                    }
                    s = (s - 1) & t;
                }
            }
            levels.push(cur);
        }
        // witnesses
        let mut sets = Vec::new();
        let mut t = full;
        for level in (1..=k).rev() {
            let (v, s) = levels[level - 1][t];
            if !v.is_finite() {
                return (f64::INFINITY, Vec::new());
            }
            sets.push(s);
            t ^= s;
        }
        (levels[k - 1][full].0, sets)
    }

    fn vertices_of(&self, s: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| s >> v & 1 == 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerWitness {
    pub vertices: Vec<usize>,
    pub expansion: f64,
    /// Frustration index and its bipartition (signed constants only).
    pub frustration: Option<(f64, Bipartition)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    pub k: usize,
    pub signed: bool,
    pub h: f64,
    pub witnesses: Vec<CheegerWitness>,
    /// `λ_k` of `D^{-1/2} L D^{-1/2}` (absent with isolated vertices).
    pub lambda_normalized: Option<f64>,
    /// `λ_k` of `L = D − A^σ`.
    pub lambda_unnormalized: f64,
    /// `λ_k/2 ≤ h_k` with normalized eigenvalues.
    pub lower_bound_holds: Option<bool>,
    /// `h_k ≤ √(2 λ_k)` with normalized eigenvalues.
    pub sqrt_upper_holds: Option<bool>,
    /// `h_k / (k³ √(2 D_max λ_k))` with unnormalized eigenvalues.
    pub constant_ratio: f64,
}

fn check_cheeger_size(g: &SignedGraph) -> Result<()> {
    if g.vertices > MAX_CHEEGER_VERTICES {
        return Err(Error::GraphTooLarge {
            size: g.vertices,
            max: MAX_CHEEGER_VERTICES,
        });
    }
    Ok(())
}

fn le_tol(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-10 * rhs.abs().max(1.0)
}

/// Exhaustive `h_k^σ` (signed) or `h_k^+` (unsigned) over `k` disjoint
/// nonempty vertex subsets, with the matching Laplacian eigenvalues.
pub fn cheeger_constant(g: &SignedGraph, k: usize, signed: bool) -> Result<CheegerReport> {
    check_cheeger_size(g)?;
    if k == 0 || k > g.vertices {
        return Err(Error::InvalidEigenCount { k, dim: g.vertices });
    }
    let tables = SubsetTables::new(g, signed);
    cheeger_from_tables(g, &tables, k, signed)
}

fn cheeger_from_tables(g: &SignedGraph, tables: &SubsetTables, k: usize, signed: bool) -> Result<CheegerReport> {
    let (h, sets) = tables.cheeger(k);
    let witnesses = sets
        .iter()
        .map(|&s| {
            let vertices = tables.vertices_of(s);
            let frustration = match &tables.frustration {
                Some(f) => {
                    let (value, side) = f[s];
                    let (first, second) = vertices.iter().partition(|&&v| side >> v & 1 == 1);
                    Some((value, Bipartition { first, second }))
                }
                None => None,
            };
            CheegerWitness {
                vertices,
                expansion: tables.phi[s],
                frustration,
            }
        })
        .collect();
    let unnorm = dense_eigh(laplacian(g, signed, false)?.to_real_dense().unwrap(), false).0;
    let lambda_unnormalized = unnorm[k - 1];
    let lambda_normalized = match laplacian(g, signed, true) {
        Ok(l) => Some(dense_eigh(l.to_real_dense().unwrap(), false).0[k - 1]),
        Err(Error::IsolatedVertex(_)) => None,
        Err(e) => return Err(e),
    };
    let lam_norm = lambda_normalized.map(|l| l.max(0.0));
    Ok(CheegerReport {
        k,
        signed,
        h,
        witnesses,
        lambda_normalized,
        lambda_unnormalized,
        lower_bound_holds: lam_norm.map(|l| le_tol(l / 2.0, h)),
        sqrt_upper_holds: lam_norm.map(|l| le_tol(h, (2.0 * l).sqrt())),
        constant_ratio: h / ((k as f64).powi(3) * (2.0 * g.d_max() * lambda_unnormalized.max(0.0)).sqrt()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Hard checks must hold; the rest are diagnostics.
    pub hard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub vertices: usize,
    pub d_max: f64,
    pub balanced: bool,
    /// Unnormalized spectra of `L^σ` and `L^+`.
    pub signed_spectrum: Vec<f64>,
    pub unsigned_spectrum: Vec<f64>,
    pub signed_normalized_spectrum: Vec<f64>,
    pub unsigned_normalized_spectrum: Vec<f64>,
    pub cheeger: Vec<CheegerReport>,
    /// Support of the ground state of `L^σ`.
    pub support: Vec<usize>,
    /// No unsigned Cheeger witness meets the support.
    pub degenerate_witness: bool,
    pub checks: Vec<BoundCheck>,
}

impl AuditReport {
    pub fn hard_failures(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| c.hard && !c.holds).collect()
    }

    pub fn check(&self, name: &str) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| c.name == name).collect()
    }
}

/// Relative amplitude below which a ground-state entry counts as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

fn check(name: &str, lhs: f64, rhs: f64, hard: bool) -> BoundCheck {
    BoundCheck {
        name: name.to_string(),
        lhs,
        rhs,
        holds: le_tol(lhs, rhs),
        hard,
    }
}

/// Evaluates the Cheeger sandwiches for `k ≤ k_max` and the bounds relating
/// signed and unsigned spectra.
///
/// Hard checks: `λ_k/2 ≤ h_k` (normalized, signed and unsigned, `k ≤ 2`),
/// `h_1^σ ≤ √(2λ_1^σ)` and `h_2^+ ≤ √(2λ_2^+)` (normalized),
/// `λ_2^+ ≤ √(2 D_max λ_2^σ)`, and
/// `λ_2^σ ≤ 2√(2D_max)(vol Ω/vol(S∩Ω) √λ_1^σ + 2 vol S/vol(S∩Ω) √λ_2^+)`
/// for unsigned Cheeger witnesses `S` with `Φ(S) ≤ √(2 D_max λ_2^+)` and
/// `S∩Ω ≠ ∅`; these use unnormalized eigenvalues.
pub fn audit_inequalities(g: &SignedGraph, k_max: usize) -> Result<AuditReport> {
    check_cheeger_size(g)?;
    if let Some(v) = g.isolated_vertex() {
        return Err(Error::IsolatedVertex(v));
    }
    let n = g.vertices;
    let k_max = k_max.max(2).min(n);
    let d_max = g.d_max();
    let (signed_spectrum, signed_vectors) = dense_eigh(laplacian(g, true, false)?.to_real_dense().unwrap(), true);
    let signed_vectors = signed_vectors.unwrap();
    let unsigned_spectrum = dense_eigh(laplacian(g, false, false)?.to_real_dense().unwrap(), false).0;
    let signed_normalized_spectrum = dense_eigh(laplacian(g, true, true)?.to_real_dense().unwrap(), false).0;
    let unsigned_normalized_spectrum = dense_eigh(laplacian(g, false, true)?.to_real_dense().unwrap(), false).0;

    let signed_tables = SubsetTables::new(g, true);
    let unsigned_tables = SubsetTables {
        frustration: None,
        n: signed_tables.n,
        vol: signed_tables.vol.clone(),
        phi: signed_tables.phi.clone(),
    };
    let mut cheeger = Vec::new();
    let mut checks = Vec::new();
    for k in 1..=k_max {
        for signed in [true, false] {
            let tables = if signed { &signed_tables } else { &unsigned_tables };
            let r = cheeger_from_tables(g, tables, k, signed)?;
            let tag = if signed { "signed" } else { "unsigned" };
            let lam = r.lambda_normalized.unwrap_or(f64::NAN).max(0.0);
            checks.push(check(&format!("{tag}_lower_k{k}"), lam / 2.0, r.h, k <= 2));
            let sqrt_hard = (signed && k == 1) || (!signed && k == 2);
            checks.push(check(&format!("{tag}_sqrt_upper_k{k}"), r.h, (2.0 * lam).sqrt(), sqrt_hard));
            checks.push(check(
                &format!("{tag}_dmax_upper_k{k}"),
                r.h,
                (k as f64).powi(3) * (2.0 * d_max * r.lambda_unnormalized.max(0.0)).sqrt(),
                false,
            ));
            cheeger.push(r);
        }
    }

    let l1s = signed_spectrum[0].max(0.0);
    let l2s = signed_spectrum[1].max(0.0);
    let l2u = unsigned_spectrum[1].max(0.0);
    checks.push(check("converse_unnormalized", l2u, (2.0 * d_max * l2s).sqrt(), true));
    checks.push(check(
        "converse_normalized",
        unsigned_normalized_spectrum[1].max(0.0),
        (2.0 * signed_normalized_spectrum[1].max(0.0)).sqrt(),
        false,
    ));
    checks.push(check("converse_factor_two", l2u, 2.0 * (2.0 * d_max * l2s).sqrt(), false));

    let phi0 = &signed_vectors[0];
    let amax = phi0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let support: Vec<usize> = (0..n).filter(|&v| phi0[v].abs() > SUPPORT_THRESHOLD * amax).collect();
    let support_mask: usize = support.iter().map(|&v| 1usize << v).sum();
    let vol_omega = signed_tables.vol[support_mask];

    let unsigned_h2 = cheeger
        .iter()
        .find(|r| r.k == 2 && !r.signed)
        .expect("k_max ≥ 2");
    let precondition = (2.0 * d_max * l2u).sqrt();
    let mut degenerate_witness = true;
    for w in &unsigned_h2.witnesses {
        let s_mask: usize = w.vertices.iter().map(|&v| 1usize << v).sum();
        if !le_tol(signed_tables.phi[s_mask], precondition) {
            continue;
        }
        let vol_r = signed_tables.vol[s_mask & support_mask];
        if vol_r == 0.0 {
            continue;
        }
        degenerate_witness = false;
        let rhs = 2.0
            * (2.0 * d_max).sqrt()
            * (vol_omega / vol_r * l1s.sqrt() + 2.0 * signed_tables.vol[s_mask] / vol_r * l2u.sqrt());
        checks.push(check("excited_bound_full", l2s, rhs, true));
    }

    // bound through the unsigned Laplacian of the support subgraph
    if support.len() >= 2 {
        let sub = g.induced(&support)?;
        if sub.isolated_vertex().is_none() {
            let l2_omega = dense_eigh(laplacian(&sub, false, false)?.to_real_dense().unwrap(), false).0[1].max(0.0);
            let sub_tables = SubsetTables::new(&sub, false);
            let (_, sets) = sub_tables.cheeger(2);
            for s in sets {
                if !le_tol(sub_tables.phi[s], (2.0 * d_max * l2_omega).sqrt()) {
                    continue;
                }
                let vol_s: f64 = sub_tables.vertices_of(s).iter().map(|&v| g.degrees[support[v]]).sum();
                let rhs = 2.0 * (2.0 * d_max).sqrt() * (vol_omega / vol_s * l1s.sqrt() + l2_omega.sqrt());
                checks.push(check("excited_bound_support", l2s, rhs, false));
            }
        }
    }

    Ok(AuditReport {
        vertices: n,
        d_max,
        balanced: is_balanced(g).is_some(),
        signed_spectrum,
        unsigned_spectrum,
        signed_normalized_spectrum,
        unsigned_normalized_spectrum,
        cheeger,
        support,
        degenerate_witness,
        checks,
    })
}

/// Erdős–Rényi skeleton with edge probability `p`, independent ±1 signs
/// (negative with probability `p_negative`) and unit weights, resampled
/// until no vertex is isolated.
pub fn sample_signed_graph(n: usize, p: f64, p_negative: f64, rng: &mut SeededRng) -> Result<SignedGraph> {
    if n < 2 || !(0.0..=1.0).contains(&p) || p == 0.0 || !(0.0..=1.0).contains(&p_negative) {
        return Err(Error::InvalidArgument(format!(
            "invalid signed-graph parameters n={n}, p={p}, p_negative={p_negative}"
        )));
    }
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    let sign = if rng.random::<f64>() < p_negative { -1 } else { 1 };
                    edges.push((u, v, sign));
                }
            }
        }
        let g = SignedGraph::unit(n, &edges)?;
        if g.isolated_vertex().is_none() {
            return Ok(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(signs: [i8; 3]) -> SignedGraph {
        SignedGraph::unit(3, &[(0, 1, signs[0]), (1, 2, signs[1]), (0, 2, signs[2])]).unwrap()
    }

    fn spectrum(m: &HermitianMatrix) -> Vec<f64> {
        dense_eigh(m.to_real_dense().unwrap(), false).0
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn triangle_spectra() {
        assert!(close(&spectrum(&laplacian(&triangle([1, 1, 1]), false, false).unwrap()), &[0.0, 3.0, 3.0]));
        assert!(close(&spectrum(&laplacian(&triangle([1, 1, -1]), true, false).unwrap()), &[1.0, 1.0, 4.0]));
        assert!(close(&spectrum(&laplacian(&triangle([1, 1, -1]), true, true).unwrap()), &[0.5, 0.5, 2.0]));
        let balanced = triangle([-1, -1, 1]);
        assert!(spectrum(&laplacian(&balanced, true, false).unwrap())[0].abs() < 1e-12);
    }

    #[test]
    fn normalized_requires_degrees() {
        let g = SignedGraph::unit(3, &[(0, 1, 1)]).unwrap();
        assert_eq!(laplacian(&g, true, true), Err(Error::IsolatedVertex(2)));
    }

    #[test]
    fn balance_examples() {
        let tree = SignedGraph::unit(4, &[(0, 1, -1), (1, 2, 1), (1, 3, -1)]).unwrap();
        assert!(is_balanced(&tree).is_some());
        assert!(is_balanced(&triangle([1, 1, -1])).is_none());
        let g = triangle([1, -1, -1]);
        let theta = is_balanced(&g).unwrap();
        assert!(g.switched(&theta).unwrap().edges().iter().all(|e| e.sign == 1));
    }

    #[test]
    fn frustration_examples() {
        let (f, _) = frustration_index(&triangle([1, -1, -1]), &[0, 1, 2]).unwrap();
        assert_eq!(f, 0.0);
        let (f, bip) = frustration_index(&triangle([1, 1, -1]), &[0, 1, 2]).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(bip.first.len() + bip.second.len(), 3);
        assert_eq!(frustration_index(&triangle([1, 1, 1]), &[1]).unwrap().0, 0.0);
        assert_eq!(frustration_index(&triangle([1, 1, 1]), &[]), Err(Error::EmptySubset));
    }

    #[test]
    fn expansion_examples() {
        let path = SignedGraph::unit(4, &[(0, 1, 1), (1, 2, -1), (2, 3, 1)]).unwrap();
        assert_eq!(expansion(&path, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert!((expansion(&path, &[0, 1]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let two = SignedGraph::unit(5, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, -1)]).unwrap();
        assert_eq!(expansion(&two, &[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn cheeger_examples() {
        let r = cheeger_constant(&triangle([1, 1, 1]), 2, false).unwrap();
        assert!((r.h - 1.0).abs() < 1e-15);
        assert_eq!(r.witnesses.len(), 2);
        let r = cheeger_constant(&triangle([1, 1, -1]), 1, true).unwrap();
        assert!((r.h - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.witnesses[0].vertices, vec![0, 1, 2]);
        let r = cheeger_constant(&triangle([1, -1, -1]), 1, true).unwrap();
        assert_eq!(r.h, 0.0);
        let big = SignedGraph::unit(15, &[]).unwrap();
        assert!(matches!(cheeger_constant(&big, 1, true), Err(Error::GraphTooLarge { .. })));
    }

    #[test]
    fn triangle_audit_values() {
        let rep = audit_inequalities(&triangle([1, 1, -1]), 2).unwrap();
        let low = rep.check("signed_lower_k1")[0];
        assert!((low.lhs - 0.25).abs() < 1e-12 && (low.rhs - 1.0 / 3.0).abs() < 1e-12);
        let up = rep.check("signed_sqrt_upper_k1")[0];
        assert!((up.rhs - 1.0).abs() < 1e-12);
        let rep = audit_inequalities(&triangle([1, 1, 1]), 2).unwrap();
        let low = rep.check("unsigned_lower_k2")[0];
        assert!((low.lhs - 0.75).abs() < 1e-12 && (low.rhs - 1.0).abs() < 1e-12);
        assert!((rep.check("unsigned_sqrt_upper_k2")[0].rhs - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let g = SignedGraph::new(
            4,
            vec![
                SignedEdge { u: 0, v: 1, weight: 1.5, sign: -1 },
                SignedEdge { u: 2, v: 3, weight: 0.25, sign: 1 },
            ],
        )
        .unwrap();
        let back: SignedGraph = g.to_string().parse().unwrap();
        assert_eq!(g, back);
        assert!("0 1 1 +1".parse::<SignedGraph>().is_err());
    }
}
