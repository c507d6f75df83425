//! Interpolating Hamiltonians `H(s) = (1−s)H_D + s(1−s)H_C + sH_I`,
//! Schrödinger evolution along them, and optimized time to solution.

use serde::{Deserialize, Serialize};

use crate::ensembles::MaxCutInstance;
use crate::error::{Error, Result};
use crate::krylov::{expmv, ExpmvOptions};
use crate::matrix::{HermitianMatrix, SparseFamily, C64};
use crate::pauli::{BuildOptions, Pauli, PauliHamiltonian, PauliString};
use crate::sector::{parity_project_with, ParitySector};
use crate::stoquastize::EdgeCoefficients;

/// Schedule weights `(1−s, s(1−s), s)` of driver, catalyst and problem.
pub fn schedule(s: f64) -> [f64; 3] {
    [1.0 - s, s * (1.0 - s), s]
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationPath {
    driver: PauliHamiltonian,
    catalyst: PauliHamiltonian,
    problem: PauliHamiltonian,
    build: BuildOptions,
}

impl InterpolationPath {
    pub fn new(
        driver: PauliHamiltonian,
        catalyst: PauliHamiltonian,
        problem: PauliHamiltonian,
    ) -> Result<Self> {
        let n = driver.n();
        for h in [&catalyst, &problem] {
            if h.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: h.n(),
                });
            }
        }
        Ok(InterpolationPath {
            driver,
            catalyst,
            problem,
            build: BuildOptions {
                dense_below: 257,
                ..Default::default()
            },
        })
    }

    /// Transverse-field driver, `Σ α_ij X_iX_j` catalyst and
    /// antiferromagnetic `Σ Z_iZ_j` problem on the instance's edges.
    pub fn maxcut(instance: &MaxCutInstance, catalyst: &EdgeCoefficients) -> Result<Self> {
        let n = instance.n;
        let driver = PauliHamiltonian::transverse_field(n)?;
        let problem = PauliHamiltonian::two_body(
            n,
            Pauli::Z,
            &instance.edges.iter().map(|&e| (e, 1.0)).collect::<Vec<_>>(),
        )?;
        let cat = catalyst_hamiltonian(n, catalyst)?;
        Self::new(driver, cat, problem)
    }

    /// Storage policy for the matrices this path builds.
    pub fn with_build_options(mut self, build: BuildOptions) -> Self {
        self.build = build;
        self
    }

    /// Same driver and problem with a different catalyst.
    pub fn with_catalyst(&self, catalyst: PauliHamiltonian) -> Result<Self> {
        if catalyst.n() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: catalyst.n(),
            });
        }
        Ok(InterpolationPath {
            catalyst,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.driver.n()
    }

    pub fn driver(&self) -> &PauliHamiltonian {
        &self.driver
    }

    pub fn catalyst(&self) -> &PauliHamiltonian {
        &self.catalyst
    }

    pub fn problem(&self) -> &PauliHamiltonian {
        &self.problem
    }

    pub fn build_options(&self) -> &BuildOptions {
        &self.build
    }

    pub fn check_parity_symmetry(&self) -> Result<()> {
        for h in [&self.driver, &self.catalyst, &self.problem] {
            if let Some(t) = h.parity_violation() {
                return Err(Error::SymmetryViolation { term: t.to_string() });
            }
        }
        Ok(())
    }

    /// `H(s)` as a Pauli sum.
    pub fn pauli_at(&self, s: f64) -> Result<PauliHamiltonian> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
        }
        let [a, b, c] = schedule(s);
        let mut h = PauliHamiltonian::new(self.n())?;
        for (w, part) in [(a, &self.driver), (b, &self.catalyst), (c, &self.problem)] {
            if w != 0.0 {
                for (p, coeff) in part.terms() {
                    h.add_term(*p, w * coeff)?;
                }
            }
        }
        Ok(h)
    }

    /// `H(s)` in the full computational basis.
    pub fn hamiltonian_at(&self, s: f64) -> Result<HermitianMatrix> {
        self.pauli_at(s)?.build_matrix_with(&self.build)
    }

    /// `H(s)` restricted to a parity sector.
    pub fn hamiltonian_in_sector(&self, s: f64, sector: &ParitySector) -> Result<HermitianMatrix> {
        parity_project_with(&self.pauli_at(s)?, sector, &self.build)
    }

    /// Classical minimizers of the (diagonal) problem Hamiltonian.
    pub fn problem_ground_states(&self) -> Result<Vec<u64>> {
        if let Some((p, _)) = self.problem.terms().find(|(p, _)| !p.is_diagonal()) {
            return Err(Error::InvalidArgument(format!(
                "problem Hamiltonian has off-diagonal term {p}"
            )));
        }
        let n = self.n();
        let energies: Vec<f64> = (0..1u64 << n)
            .map(|b| {
                self.problem
                    .terms()
                    .map(|(p, c)| c * p.apply(b).1.re)
                    .sum::<f64>()
            })
            .collect();
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((0..1u64 << n)
            .filter(|&b| energies[b as usize] <= min + 1e-12 * min.abs().max(1.0))
            .collect())
    }

    /// A bound on `max_s ‖∂H/∂s‖` from the Pauli coefficients.
    pub fn derivative_norm_bound(&self) -> f64 {
        let l1 = |h: &PauliHamiltonian| h.terms().map(|(_, c)| c.abs()).sum::<f64>();
        l1(&self.driver) + l1(&self.catalyst) + l1(&self.problem)
    }
}

/// `Σ_{(i,j)} α_ij X_i X_j`.
pub fn catalyst_hamiltonian(n: usize, alphas: &EdgeCoefficients) -> Result<PauliHamiltonian> {
    let mut h = PauliHamiltonian::new(n)?;
    for (&(i, j), &a) in alphas {
        h.add_term(PauliString::from_sparse(n, &[(i, Pauli::X), (j, Pauli::X)])?, a)?;
    }
    Ok(h)
}

/// Driver, catalyst and problem matrices of a path in one basis (a parity
/// sector or the full space), merged on a common sparsity pattern so that
/// `H(s)` is assembled without rebuilding from Pauli terms.
#[derive(Debug, Clone)]
pub struct PathMatrices {
    family: SparseFamily,
    norm_bound: [f64; 3],
}

impl PathMatrices {
    pub fn new(path: &InterpolationPath, sector: Option<&ParitySector>) -> Result<Self> {
        let sparse = BuildOptions {
            dense_below: 0,
            ..path.build
        };
        let mk = |h: &PauliHamiltonian| match sector {
            Some(sec) => parity_project_with(h, sec, &sparse),
            None => h.build_matrix_with(&sparse),
        };
        let parts = [mk(&path.driver)?, mk(&path.catalyst)?, mk(&path.problem)?];
        let norm_bound = [parts[0].norm_inf(), parts[1].norm_inf(), parts[2].norm_inf()];
        Ok(PathMatrices {
            family: SparseFamily::new(&[&parts[0], &parts[1], &parts[2]])?,
            norm_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// `H(s)`.
    pub fn at(&self, s: f64) -> Result<HermitianMatrix> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
        }
        Ok(self.family.combine(&schedule(s)))
    }

    fn weighted(&self, w: [f64; 3]) -> HermitianMatrix {
        self.family.combine(&w)
    }

    fn norm(&self, w: [f64; 3]) -> f64 {
        (0..3).map(|k| w[k].abs() * self.norm_bound[k]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Initial local error tolerance per step.
    pub local_tol: f64,
    /// Accept once halving the tolerance moves `p_gs` by less than this.
    pub p_stability: f64,
    pub max_tightenings: usize,
    pub max_steps: usize,
    pub max_norm_drift: f64,
    pub expmv: ExpmvOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            local_tol: 1e-8,
            p_stability: 1e-6,
            max_tightenings: 8,
            max_steps: 2_000_000,
            max_norm_drift: 1e-8,
            expmv: ExpmvOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub t_f: f64,
    pub p_gs: f64,
    pub norm_drift: f64,
    pub steps_used: usize,
    /// Local tolerance of the accepted run.
    pub local_tol: f64,
}

/// Integrates `i dψ/dt = H(t/t_f) ψ` from the uniform superposition and
/// returns the final population of the classical ground states.
///
/// With a sector the state lives in the sector basis and `p_gs` is the
/// population of the sector states of the solution pairs. The integrator is
/// a fourth-order commutator-free Magnus scheme whose exponentials are
/// Lanczos matvec approximations; steps are controlled by step doubling.
pub fn evolve(path: &InterpolationPath, t_f: f64, sector: Option<&ParitySector>) -> Result<EvolutionResult> {
    evolve_with(path, t_f, sector, &EvolveOptions::default())
}

pub fn evolve_with(
    path: &InterpolationPath,
    t_f: f64,
    sector: Option<&ParitySector>,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    let prepared = PreparedEvolution::new(path, sector)?;
    prepared.run(t_f, opts)
}

/// Precomputed operator, initial state and target rows for repeated
/// evolutions of one path (e.g. over a grid of anneal times).
pub struct PreparedEvolution {
    op: PathMatrices,
    initial: Vec<C64>,
    targets: Vec<usize>,
}

impl PreparedEvolution {
    pub fn new(path: &InterpolationPath, sector: Option<&ParitySector>) -> Result<Self> {
        if let Some(sec) = sector {
            path.check_parity_symmetry()?;
            if sec.n() != path.n() {
                return Err(Error::LengthMismatch {
                    expected: path.n(),
                    got: sec.n(),
                });
            }
        }
        let op = PathMatrices::new(path, sector)?;
        let dim = op.dim();
        let ground = path.problem_ground_states()?;
        let (initial, targets) = match sector {
            Some(sec) => {
                let full = C64::new((1.0 / (1u64 << path.n()) as f64).sqrt(), 0.0);
                let state = sec.project_state(&vec![full; 1usize << path.n()]);
                let mut rows: Vec<usize> = ground.iter().map(|&z| sec.index_of(z).0).collect();
                rows.sort_unstable();
                rows.dedup();
                (state, rows)
            }
            None => {
                let amp = C64::new((1.0 / dim as f64).sqrt(), 0.0);
                (vec![amp; dim], ground.iter().map(|&z| z as usize).collect())
            }
        };
        Ok(PreparedEvolution { op, initial, targets })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn initial_state(&self) -> &[C64] {
        &self.initial
    }

    fn population(&self, psi: &[C64]) -> f64 {
        self.targets.iter().map(|&r| psi[r].norm_sqr()).sum()
    }

    /// Runs with successively halved tolerances until `p_gs` is stable.
    pub fn run(&self, t_f: f64, opts: &EvolveOptions) -> Result<EvolutionResult> {
        if !(t_f >= 0.0) || !t_f.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid anneal time {t_f}")));
        }
        if t_f == 0.0 {
            return Ok(EvolutionResult {
                t_f,
                p_gs: self.population(&self.initial),
                norm_drift: 0.0,
                steps_used: 0,
                local_tol: opts.local_tol,
            });
        }
        let mut tol = opts.local_tol;
        let mut prev_p = self.population(&self.integrate(t_f, tol, opts)?.0);
        let mut delta = f64::INFINITY;
        for _ in 0..opts.max_tightenings {
            tol *= 0.5;
            let (psi, steps) = self.integrate(t_f, tol, opts)?;
            let p = self.population(&psi);
            delta = (p - prev_p).abs();
            prev_p = p;
            if delta < opts.p_stability {
                let drift = (norm(&psi) - 1.0).abs();
                if drift > opts.max_norm_drift {
                    return Err(Error::NormDriftExceeded {
                        drift,
                        tol: opts.max_norm_drift,
                    });
                }
                return Ok(EvolutionResult {
                    t_f,
                    p_gs: p,
                    norm_drift: drift,
                    steps_used: steps,
                    local_tol: tol,
                });
            }
        }
        Err(Error::PopulationUnstable { delta, tol })
    }

    /// Final state and accepted step count at a fixed local tolerance.
    pub fn integrate(&self, t_f: f64, tol: f64, opts: &EvolveOptions) -> Result<(Vec<C64>, usize)> {
        let mut psi = self.initial.clone();
        let mut t = 0.0;
        let hnorm = self.op.norm(schedule(0.0)).max(self.op.norm(schedule(1.0))).max(1.0);
        let mut h = (t_f).min(0.5 / hnorm);
        let mut steps = 0usize;
        let mut attempts = 0usize;
        while t < t_f {
            if attempts >= opts.max_steps {
                return Err(Error::StepLimitExceeded { limit: opts.max_steps });
            }
            attempts += 1;
            let last = t + h >= t_f;
            let h_try = if last { t_f - t } else { h };
            let coarse = self.cfm4(&psi, t, h_try, t_f, opts);
            let fine = coarse.as_ref().and_then(|_| {
                let mid = self.cfm4(&psi, t, 0.5 * h_try, t_f, opts)?;
                self.cfm4(&mid, t + 0.5 * h_try, 0.5 * h_try, t_f, opts)
            });
            let (Some(coarse), Some(fine)) = (coarse, fine) else {
                h = 0.25 * h_try;
                continue;
            };
            let err = coarse
                .iter()
                .zip(&fine)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let factor = if err == 0.0 {
                4.0
            } else {
                (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0)
            };
            if err <= tol {
                psi = fine;
                t = if last { t_f } else { t + h_try };
                steps += 1;
                h = h_try * factor;
            } else {
                h = h_try * factor.min(0.9);
            }
        }
        Ok((psi, steps))
    }

    /// One step `exp(-ih(β₋H₁ + β₊H₂)) exp(-ih(β₊H₁ + β₋H₂))` with `H₁, H₂`
    /// at the Gauss nodes and `β± = 1/4 ± √3/6`; `None` when a Krylov
    /// exponential fails to converge.
    fn cfm4(&self, psi: &[C64], t: f64, h: f64, t_f: f64, opts: &EvolveOptions) -> Option<Vec<C64>> {
        let sqrt3 = 3f64.sqrt();
        let c1 = 0.5 - sqrt3 / 6.0;
        let c2 = 0.5 + sqrt3 / 6.0;
        let a1 = 0.25 + sqrt3 / 6.0;
        let a2 = 0.25 - sqrt3 / 6.0;
        let w1 = schedule(((t + c1 * h) / t_f).clamp(0.0, 1.0));
        let w2 = schedule(((t + c2 * h) / t_f).clamp(0.0, 1.0));
        let mut stage = psi.to_vec();
        for (b1, b2) in [(a1, a2), (a2, a1)] {
            let w = [
                b1 * w1[0] + b2 * w2[0],
                b1 * w1[1] + b2 * w2[1],
                b1 * w1[2] + b2 * w2[2],
            ];
            let m = self.op.weighted(w);
            let (next, ok) = expmv(|x, y| m.matvec_c64(x, y), &stage, h, &opts.expmv);
            if !ok {
                return None;
            }
            stage = next;
        }
        Some(stage)
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsResult {
    pub t_best: f64,
    pub tts: f64,
    /// `(t_f, p_gs)` for every grid point.
    pub curve: Vec<(f64, f64)>,
    /// Grid points whose `p_gs` fell below the floor.
    pub floor_hits: usize,
    pub max_norm_drift: f64,
}

/// Lower bound applied to `p_gs` before dividing.
pub const P_GS_FLOOR: f64 = 1e-12;

/// Logarithmic anneal-time grid `2^lo … 2^hi` with `per_octave` points per
/// doubling.
pub fn log_time_grid(lo: i32, hi: i32, per_octave: usize) -> Vec<f64> {
    let per = per_octave.max(1) as i32;
    ((lo * per)..=(hi * per))
        .map(|k| 2f64.powf(k as f64 / per as f64))
        .collect()
}

/// Minimizes `t_f / p_gs(t_f)` over the grid.
pub fn tts_optimize(
    path: &InterpolationPath,
    t_grid: &[f64],
    sector: Option<&ParitySector>,
) -> Result<TtsResult> {
    tts_optimize_with(path, t_grid, sector, &EvolveOptions::default())
}

pub fn tts_optimize_with(
    path: &InterpolationPath,
    t_grid: &[f64],
    sector: Option<&ParitySector>,
    opts: &EvolveOptions,
) -> Result<TtsResult> {
    let prepared = PreparedEvolution::new(path, sector)?;
    let mut curve = Vec::with_capacity(t_grid.len());
    let mut drift = 0.0f64;
    for &t in t_grid {
        let r = prepared.run(t, opts)?;
        drift = drift.max(r.norm_drift);
        curve.push((t, r.p_gs));
    }
    tts_from_curve(&curve).map(|(t_best, tts, floor_hits)| TtsResult {
        t_best,
        tts,
        curve,
        floor_hits,
        max_norm_drift: drift,
    })
}

/// `(t_best, tts, floor_hits)` from precomputed `(t_f, p_gs)` pairs.
pub fn tts_from_curve(curve: &[(f64, f64)]) -> Result<(f64, f64, usize)> {
    if curve.is_empty() {
        return Err(Error::InvalidArgument("empty anneal-time grid".into()));
    }
    if curve.iter().any(|&(t, _)| !(t > 0.0)) {
        return Err(Error::InvalidArgument("anneal times must be positive".into()));
    }
    let mut floor_hits = 0;
    let mut best = (f64::NAN, f64::INFINITY);
    for &(t, p) in curve {
        let p_eff = if p < P_GS_FLOOR {
            floor_hits += 1;
            P_GS_FLOOR
        } else {
            p
        };
        let tts = t / p_eff;
        if tts < best.1 {
            best = (t, tts);
        }
    }
    Ok((best.0, best.1, floor_hits))
}

/// Anneal time `c · max‖∂H/∂s‖ / Δ_min²` from the adiabatic condition.
pub fn adiabatic_time(path: &InterpolationPath, min_gap: f64, c: f64) -> f64 {
    c * path.derivative_norm_bound() / (min_gap * min_gap)
}
