//! Low-lying spectra, gaps, minimum-gap sweeps and the first-order
//! perturbative gap derivative.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::anneal::{InterpolationPath, PathMatrices};
use crate::error::{Error, Result};
use crate::krylov::{lowest_eigenpairs, LanczosOptions};
use crate::matrix::{Entries, HermitianMatrix, Op, Scalar, C64};
use crate::sector::{Parity, ParitySector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Full dense diagonalization at or below this dimension.
    pub dense_max_dim: usize,
    pub lanczos: LanczosOptions,
    pub want_vectors: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_max_dim: 1 << 12,
            lanczos: LanczosOptions::default(),
            want_vectors: false,
        }
    }
}

impl EigenOptions {
    pub fn dense() -> Self {
        EigenOptions {
            dense_max_dim: usize::MAX,
            ..Default::default()
        }
    }

    pub fn krylov() -> Self {
        EigenOptions {
            dense_max_dim: 0,
            ..Default::default()
        }
    }

    pub fn with_vectors(mut self) -> Self {
        self.want_vectors = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `‖Hv − λv‖`; NaN for dense results computed without vectors.
    pub residual_norms: Vec<f64>,
    pub method: Method,
    /// Present when requested or when the Krylov route computed them anyway.
    pub eigenvectors: Option<Vec<Vec<C64>>>,
}

/// The `k` smallest eigenvalues of `m`.
pub fn eigs_lowest(m: &HermitianMatrix, k: usize) -> Result<SpectrumResult> {
    eigs_lowest_with(m, k, &EigenOptions::default(), None)
}

/// [`eigs_lowest`] with explicit options and optional warm-start vectors
/// (used along sweeps in `s`).
pub fn eigs_lowest_with(
    m: &HermitianMatrix,
    k: usize,
    opts: &EigenOptions,
    warm: Option<&[Vec<C64>]>,
) -> Result<SpectrumResult> {
    let dim = m.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidEigenCount { k, dim });
    }
    match m.entries() {
        Entries::Real(op) => lowest_generic(op, k, opts, warm, m.norm_inf()),
        Entries::Complex(op) => lowest_generic(op, k, opts, warm, m.norm_inf()),
    }
}

fn lowest_generic<T: Scalar>(
    op: &Op<T>,
    k: usize,
    opts: &EigenOptions,
    warm: Option<&[Vec<C64>]>,
    norm_bound: f64,
) -> Result<SpectrumResult> {
    let dim = op.dim();
    if dim <= opts.dense_max_dim {
        let dense = op.to_dense();
        if !opts.want_vectors {
            let (vals, _) = dense_eigh(dense, false);
            return Ok(SpectrumResult {
                eigenvalues: vals[..k].to_vec(),
                residual_norms: vec![f64::NAN; k],
                method: Method::Dense,
                eigenvectors: None,
            });
        }
        let (vals, vecs) = dense_eigh(dense, true);
        let vecs = vecs.expect("vectors requested");
        let residual_norms = (0..k)
            .map(|i| residual(op, vals[i], &vecs[i]))
            .collect();
        return Ok(SpectrumResult {
            eigenvalues: vals[..k].to_vec(),
            residual_norms,
            method: Method::Dense,
            eigenvectors: Some(vecs[..k].iter().map(|v| v.iter().map(|x| x.to_c64()).collect()).collect()),
        });
    }
    let warm_t: Option<Vec<Vec<T>>> =
        warm.map(|w| w.iter().map(|v| v.iter().map(|z| T::from_c64_lossy(*z)).collect()).collect());
    let pairs = lowest_eigenpairs(
        |x, y| op.matvec(x, y),
        dim,
        k,
        norm_bound,
        &opts.lanczos,
        warm_t.as_deref(),
    )?;
    Ok(SpectrumResult {
        eigenvalues: pairs.iter().map(|p| p.value).collect(),
        residual_norms: pairs.iter().map(|p| p.residual).collect(),
        method: Method::Krylov,
        eigenvectors: Some(
            pairs
                .iter()
                .map(|p| p.vector.iter().map(|x| x.to_c64()).collect())
                .collect(),
        ),
    })
}

fn residual<T: Scalar>(op: &Op<T>, value: f64, v: &[T]) -> f64 {
    let mut y = vec![T::zero(); v.len()];
    op.matvec(v, &mut y);
    y.iter()
        .zip(v)
        .map(|(a, b)| (*a - *b * T::from_real(value)).modulus_squared())
        .sum::<f64>()
        .sqrt()
}

/// Ascending eigenvalues (and optionally column eigenvectors) of a dense
/// Hermitian matrix.
pub fn dense_eigh<T: Scalar>(m: DMatrix<T>, want_vectors: bool) -> (Vec<f64>, Option<Vec<Vec<T>>>) {
    if !want_vectors {
        let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        return (vals, None);
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (vals, Some(vecs))
}

/// All eigenvalues, ascending, by dense diagonalization.
pub fn full_spectrum(m: &HermitianMatrix) -> Vec<f64> {
    match m.to_real_dense() {
        Some(r) => dense_eigh(r, false).0,
        None => dense_eigh(m.to_complex_dense(), false).0,
    }
}

/// `λ_1 − λ_0`. Degenerate ground spaces give values at rounding level,
/// reported as-is.
pub fn gap(m: &HermitianMatrix) -> Result<f64> {
    let s = eigs_lowest(m, 2)?;
    Ok(s.eigenvalues[1] - s.eigenvalues[0])
}

pub fn gap_with(m: &HermitianMatrix, opts: &EigenOptions) -> Result<f64> {
    let s = eigs_lowest_with(m, 2, opts, None)?;
    Ok(s.eigenvalues[1] - s.eigenvalues[0])
}

/// Relative tolerance for "strictly larger" comparisons between gaps and
/// between levels.
pub const DEGENERACY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub grid_points: usize,
    /// Target bracket width of the golden-section refinement.
    pub s_resolution: f64,
    /// Two grid-local minima within this relative distance trigger a
    /// refinement of both.
    pub multiple_minima_rtol: f64,
    /// Krylov residual tolerance on the coarse grid; refinement and the
    /// final evaluation use `eigen.lanczos.rel_tol`.
    pub grid_rel_tol: f64,
    pub eigen: EigenOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid_points: 101,
            s_resolution: 1e-5,
            multiple_minima_rtol: 0.01,
            grid_rel_tol: 1e-7,
            eigen: EigenOptions {
                dense_max_dim: 256,
                ..EigenOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinGapResult {
    pub s_star: f64,
    /// Swept gap at `s_star`: in-sector `ε_1 − ε_0` when a sector is given,
    /// otherwise the full-space `E_1 − E_0`.
    pub gap_min: f64,
    pub sector_gap: Option<f64>,
    /// `E_0(s*) < ε_0(s*)`: the sector ground state is not the global one.
    pub global_flag: bool,
    /// Lowest level of the swept space at `s_star`.
    pub swept_ground_energy: f64,
    /// Full-space ground energy at `s_star` (only computed with a sector).
    pub global_ground_energy: Option<f64>,
    /// Set when two grid-local minima were within the configured tolerance.
    pub multiple_minima: bool,
    pub evaluations: usize,
}

struct GapProbe {
    mats: PathMatrices,
    opts: SweepOptions,
    warm: Option<Vec<Vec<C64>>>,
    coarse: bool,
    evaluations: usize,
}

impl GapProbe {
    fn levels(&mut self, s: f64) -> Result<(f64, f64)> {
        let m = self.mats.at(s)?;
        let mut opts = self.opts.eigen;
        if self.coarse {
            opts.lanczos.rel_tol = opts.lanczos.rel_tol.max(self.opts.grid_rel_tol);
        }
        let res = eigs_lowest_with(&m, 2, &opts, self.warm.as_deref())?;
        if res.method == Method::Krylov {
            self.warm = res.eigenvectors.clone();
        }
        self.evaluations += 1;
        Ok((res.eigenvalues[0], res.eigenvalues[1]))
    }

    fn gap(&mut self, s: f64) -> Result<f64> {
        let (a, b) = self.levels(s)?;
        Ok(b - a)
    }
}

/// Minimum of the gap of `H(s)` over `s ∈ [0, 1]`: a uniform coarse grid
/// followed by golden-section refinement around the smallest grid value.
pub fn min_gap_sweep(path: &InterpolationPath, sector: Option<&ParitySector>) -> Result<MinGapResult> {
    min_gap_sweep_with(path, sector, &SweepOptions::default())
}

pub fn min_gap_sweep_with(
    path: &InterpolationPath,
    sector: Option<&ParitySector>,
    opts: &SweepOptions,
) -> Result<MinGapResult> {
    if opts.grid_points < 3 {
        return Err(Error::InvalidArgument("sweep grid needs at least 3 points".into()));
    }
    if let Some(sec) = sector {
        if sec.n() != path.n() {
            return Err(Error::LengthMismatch {
                expected: path.n(),
                got: sec.n(),
            });
        }
        path.check_parity_symmetry()?;
    }
    let mut probe = GapProbe {
        mats: PathMatrices::new(path, sector)?,
        opts: *opts,
        warm: None,
        coarse: true,
        evaluations: 0,
    };
    let npts = opts.grid_points;
    let grid: Vec<f64> = (0..npts).map(|i| i as f64 / (npts - 1) as f64).collect();
    let mut gaps = Vec::with_capacity(npts);
    for &s in &grid {
        gaps.push(probe.gap(s)?);
    }

    // grid-local minima, smallest first
    let mut minima: Vec<usize> = (0..npts)
        .filter(|&i| {
            (i == 0 || gaps[i] <= gaps[i - 1]) && (i + 1 == npts || gaps[i] <= gaps[i + 1])
        })
        .collect();
    minima.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]));
    let best = minima[0];
    let mut candidates = vec![best];
    let mut multiple = false;
    for &i in minima.iter().skip(1) {
        if i.abs_diff(best) > 1
            && (gaps[i] - gaps[best]).abs() <= opts.multiple_minima_rtol * gaps[best].abs().max(1e-300)
        {
            candidates.push(i);
            multiple = true;
        }
    }

    probe.coarse = false;
    let mut best_s = grid[best];
    let mut best_gap = gaps[best];
    for &i in &candidates {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(npts - 1)];
        let (s, g) = golden_section(&mut probe, lo, hi, opts.s_resolution)?;
        if g < best_gap {
            best_gap = g;
            best_s = s;
        }
        if gaps[i] < best_gap {
            best_gap = gaps[i];
            best_s = grid[i];
        }
    }

    // final evaluation at s* with a fresh start for reproducible levels
    probe.warm = None;
    let (e0, e1) = probe.levels(best_s)?;
    let gap_min = e1 - e0;
    let (sector_gap, global_ground, global_flag) = match sector {
        Some(sec) => {
            let other = ParitySector::new(
                sec.n(),
                match sec.parity() {
                    Parity::Even => Parity::Odd,
                    Parity::Odd => Parity::Even,
                },
            )?;
            let m_other = path.hamiltonian_in_sector(best_s, &other)?;
            let other_e0 = eigs_lowest_with(&m_other, 1, &opts.eigen, None)?.eigenvalues[0];
            let scale = m_other.norm_inf().max(1.0);
            let global = e0.min(other_e0);
            (Some(gap_min), Some(global), other_e0 < e0 - DEGENERACY_RTOL * scale)
        }
        None => (None, None, false),
    };
    Ok(MinGapResult {
        s_star: best_s,
        gap_min,
        sector_gap,
        global_flag,
        swept_ground_energy: e0,
        global_ground_energy: global_ground,
        multiple_minima: multiple,
        evaluations: probe.evaluations,
    })
}

fn golden_section(probe: &mut GapProbe, mut a: f64, mut b: f64, resolution: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = probe.gap(c)?;
    let mut fd = probe.gap(d)?;
    while b - a > resolution {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = probe.gap(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = probe.gap(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// `d(E_1 − E_0)/ds` at `s = 0` for `H_s = H_0 + sV`, from first-order
/// perturbation theory: `⟨ψ_1|V|ψ_1⟩ − ⟨ψ_0|V|ψ_0⟩`.
pub fn first_order_gap_derivative(h0: &HermitianMatrix, v: &HermitianMatrix) -> Result<f64> {
    if h0.dim() != v.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let k = h0.dim().min(3);
    if k < 2 {
        return Err(Error::InvalidEigenCount { k: 2, dim: h0.dim() });
    }
    let spectrum = eigs_lowest_with(h0, k, &EigenOptions::default().with_vectors(), None)?;
    let vals = &spectrum.eigenvalues;
    let threshold = 1e-8;
    let mut spacing = vals[1] - vals[0];
    if k == 3 {
        spacing = spacing.min(vals[2] - vals[1]);
    }
    if spacing <= threshold {
        return Err(Error::Degeneracy { spacing });
    }
    let vecs = spectrum.eigenvectors.expect("vectors requested");
    let expect = |psi: &[C64]| {
        let mut y = vec![C64::new(0.0, 0.0); psi.len()];
        v.matvec_c64(psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
    };
    Ok(expect(&vecs[1]) - expect(&vecs[0]))
}
