//! End-to-end acceptance checks. Each test writes one `criterion N ...
//! PASS|FAIL` line straight to stderr so the verdicts appear in the normal
//! `cargo test` output.

use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use stoq_core::anneal::{adiabatic_time, evolve, schedule, InterpolationPath};
use stoq_core::ensembles::{
    sample_catalyst, sample_complex_hermitian, sample_maxcut, sample_wigner, shifted_partner, CatalystMode, SeededRng,
};
use stoq_core::signed_graph::{cheeger_constant, laplacian, SignedGraph};
use stoq_core::spectra::{first_order_gap_derivative, full_spectrum, gap, min_gap_sweep};
use stoq_core::stoquastize::{design_matrix, design_pauli};
use stoq_core::{Error, HermitianMatrix, Pauli, PauliHamiltonian, PauliString, ParitySector};
use stoq_expcli::{run, ExperimentConfig, Family, Variant};

fn verdict(n: usize, name: &str, pass: bool, start: Instant, detail: &str) {
    let line = format!(
        "criterion {n:>2} {name:<34} {} ({:.1} s) {detail}\n",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn lowest(m: &HermitianMatrix) -> f64 {
    full_spectrum(m)[0]
}

fn dense_ensembles(mut f: impl FnMut(&HermitianMatrix)) {
    for n in [4usize, 8, 16, 32, 64] {
        for k in 0..1000u64 {
            f(&sample_wigner(n, &mut SeededRng::new(1, (n as u64) << 20 | k)).unwrap());
            f(&sample_complex_hermitian(n, &mut SeededRng::new(2, (n as u64) << 20 | k)).unwrap());
        }
    }
}

#[test]
fn criterion_01_variational_inequality() {
    let start = Instant::now();
    let (mut total, mut passed) = (0usize, 0usize);
    let mut worst = f64::NEG_INFINITY;
    dense_ensembles(|h| {
        let excess = lowest(&design_matrix(h)) - lowest(h);
        worst = worst.max(excess);
        total += 1;
        passed += usize::from(excess <= 1e-10);
    });
    let pass = passed == total;
    verdict(1, "variational inequality", pass, start, &format!("{passed}/{total}, max excess {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_02_trace_preservation() {
    let start = Instant::now();
    let (mut total, mut passed) = (0usize, 0usize);
    let mut worst = 0.0f64;
    dense_ensembles(|h| {
        let diff = (design_matrix(h).trace() - h.trace()).abs();
        worst = worst.max(diff);
        total += 1;
        passed += usize::from(diff <= 1e-12);
    });
    let pass = passed == total;
    verdict(2, "trace preservation", pass, start, &format!("{passed}/{total}, max diff {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_03_x_diagonal_gap_theorem() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Family::XdiagGaps);
    cfg.sizes = (1..=10).collect();
    cfg.instances_per_size = 100;
    cfg.master_seed = 3;
    let summary = run(&cfg).unwrap();
    let pass = summary.records == 1000 && summary.hard_failures == 0 && start.elapsed().as_secs() < 300;
    verdict(
        3,
        "X-diagonal gap theorem",
        pass,
        start,
        &format!("{} records, {} failures", summary.records, summary.hard_failures),
    );
    assert!(pass);
}

#[test]
fn criterion_04_dense_win_fraction_decay() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Family::DenseWins);
    cfg.sizes = (3..=10).collect();
    cfg.instances_per_size = 100_000;
    cfg.ensembles = vec![stoq_expcli::DenseEnsemble::Real];
    cfg.stoquastizations = vec![Variant::Designed];
    cfg.master_seed = 4;
    let summary = run(&cfg).unwrap();
    let rows: Vec<_> = cfg
        .sizes
        .iter()
        .map(|&n| summary.find(n, "designed", "all", "win_fraction").unwrap())
        .collect();
    let mut detail = String::new();
    let mut monotone = true;
    for pair in rows.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        // overlapping 2σ bars count as nonincreasing
        if b.value - b.bootstrap_2sigma > a.value + a.bootstrap_2sigma {
            monotone = false;
            detail += &format!(
                "rise N={}→{}: {:.2e}±{:.1e} → {:.2e}±{:.1e}; ",
                a.size, b.size, a.value, a.bootstrap_2sigma, b.value, b.bootstrap_2sigma
            );
        }
    }
    let last = rows.last().unwrap().value;
    let pass = monotone && last <= 1e-2 && start.elapsed().as_secs() < 1800;
    let curve: Vec<String> = rows.iter().map(|r| format!("{}:{:.2e}", r.size, r.value)).collect();
    detail += &format!("N=10 fraction {last:.2e}; curve {}", curve.join(" "));
    verdict(4, "dense win-fraction decay", pass, start, &detail);
    assert!(pass);
}

fn top_gap(m: &HermitianMatrix) -> f64 {
    let s = full_spectrum(m);
    s[s.len() - 1] - s[s.len() - 2]
}

#[test]
fn criterion_05_random_matrix_gap_separation() {
    let start = Instant::now();
    let n = 512;
    let (mut plus_ok, mut wigner_ok) = (0usize, 0usize);
    let (mut min_plus, mut max_w) = (f64::INFINITY, 0.0f64);
    for k in 0..200u64 {
        let w = sample_wigner(n, &mut SeededRng::new(5, k)).unwrap();
        let gp = top_gap(&shifted_partner(&w).unwrap());
        let gw = top_gap(&w);
        min_plus = min_plus.min(gp);
        max_w = max_w.max(gw);
        plus_ok += usize::from(gp >= 0.8 * n as f64);
        wigner_ok += usize::from(gw <= 1.0);
    }
    let pass = plus_ok == 200 && wigner_ok == 200 && start.elapsed().as_secs() < 600;
    verdict(
        5,
        "random-matrix gap separation",
        pass,
        start,
        &format!("min Δ_W+ {min_plus:.1}, max Δ_W {max_w:.3}"),
    );
    assert!(pass);
}

fn maxcut_path(n: usize, seed: u64, k: u64, mode: CatalystMode) -> InterpolationPath {
    let rng = SeededRng::new(seed, k);
    let inst = sample_maxcut(n, &mut rng.substream(0), 10_000).unwrap();
    let alphas = sample_catalyst(&inst.edges, mode, &mut rng.substream(1)).unwrap();
    InterpolationPath::maxcut(&inst, &alphas).unwrap()
}

/// Even-sector restriction through the explicit basis `(|z⟩ + |z̄⟩)/√2`.
fn even_sector_dense(h: &PauliHamiltonian) -> DMatrix<f64> {
    let full = h.build_matrix().unwrap().to_real_dense().unwrap();
    let dim = full.nrows();
    let half = dim / 2;
    let mut basis = DMatrix::<f64>::zeros(dim, half);
    for z in 0..half {
        basis[(z, z)] = std::f64::consts::FRAC_1_SQRT_2;
        basis[(dim - 1 - z, z)] = std::f64::consts::FRAC_1_SQRT_2;
    }
    basis.transpose() * full * basis
}

#[test]
fn criterion_06_min_gap_oracle() {
    let start = Instant::now();
    let sector = ParitySector::even(6).unwrap();
    let steps = 100_000;
    let (mut passed, mut worst) = (0usize, 0.0f64);
    for k in 0..50u64 {
        let mode = if k % 2 == 0 { CatalystMode::Uniform } else { CatalystMode::Pm1 };
        let path = maxcut_path(6, 6, k, mode);
        let parts = [path.driver(), path.catalyst(), path.problem()].map(even_sector_dense);
        let mut scan = f64::INFINITY;
        for i in 0..=steps {
            let w = schedule(i as f64 / steps as f64);
            let m = &parts[0] * w[0] + &parts[1] * w[1] + &parts[2] * w[2];
            let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            e.sort_by(f64::total_cmp);
            scan = scan.min(e[1] - e[0]);
        }
        let swept = min_gap_sweep(&path, Some(&sector)).unwrap().gap_min;
        let diff = (swept - scan).abs();
        worst = worst.max(diff);
        passed += usize::from(diff <= 1e-8);
    }
    let pass = passed == 50;
    verdict(6, "min-gap oracle equivalence", pass, start, &format!("{passed}/50, max diff {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_07_parity_sector_consistency() {
    let start = Instant::now();
    let (mut passed, mut worst) = (0usize, 0.0f64);
    for k in 0..100u64 {
        let n = if k % 2 == 0 { 6 } else { 8 };
        let mode = if k % 4 < 2 { CatalystMode::Uniform } else { CatalystMode::Pm1 };
        let path = maxcut_path(n, 7, k, mode);
        let s = SeededRng::new(70, k).random::<f64>();
        let full = full_spectrum(&path.hamiltonian_at(s).unwrap());
        let mut union = full_spectrum(&path.hamiltonian_in_sector(s, &ParitySector::even(n).unwrap()).unwrap());
        union.extend(full_spectrum(&path.hamiltonian_in_sector(s, &ParitySector::odd(n).unwrap()).unwrap()));
        union.sort_by(f64::total_cmp);
        let diff = full.iter().zip(&union).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff);
        passed += usize::from(full.len() == union.len() && diff <= 1e-10);
    }
    let pass = passed == 100;
    verdict(7, "parity-sector consistency", pass, start, &format!("{passed}/100, max diff {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_08_maxcut_win_fractions() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Family::MaxcutMingap);
    cfg.sizes = vec![6, 8, 10, 12];
    cfg.instances_per_size = 200;
    cfg.catalyst_mode = CatalystMode::Pm1;
    cfg.stoquastizations = vec![Variant::Designed];
    cfg.master_seed = 8;
    let summary = run(&cfg).unwrap();
    let mut pass = start.elapsed().as_secs() < 7200;
    let mut detail = String::new();
    for &n in &cfg.sizes {
        let win = summary.find(n, "designed", "all", "win_fraction").unwrap();
        let flag = summary.find(n, "none", "all", "global_flag_fraction").unwrap();
        pass &= win.count >= 200 && win.value < 0.5 && flag.value > 0.0;
        detail += &format!("n={n} win {:.3} flag {:.3}; ", win.value, flag.value);
    }
    verdict(8, "Max-Cut win fractions", pass, start, &detail);
    assert!(pass);
}

#[test]
fn criterion_09_time_evolution_contract() {
    let start = Instant::now();
    let sector = ParitySector::even(6).unwrap();
    let quench_exact = 2f64.powi(-5);
    let (mut passed, mut worst_p, mut worst_drift) = (0usize, 1.0f64, 0.0f64);
    for k in 0..20u64 {
        let path = maxcut_path(6, 9, k, CatalystMode::Pm1);
        let quench = evolve(&path, 0.0, Some(&sector)).unwrap();
        let gap = min_gap_sweep(&path, Some(&sector)).unwrap().gap_min;
        let slow = evolve(&path, adiabatic_time(&path, gap, 10.0), Some(&sector)).unwrap();
        // the sector amplitude 2^{-5/2} is irrational, so the quench
        // population equals 2^{-5} up to rounding
        let quench_ok = (quench.p_gs - quench_exact).abs() <= 4.0 * f64::EPSILON * quench_exact;
        worst_p = worst_p.min(slow.p_gs);
        worst_drift = worst_drift.max(slow.norm_drift);
        passed += usize::from(quench_ok && slow.norm_drift <= 1e-8 && slow.p_gs >= 0.99);
    }
    let pass = passed == 20;
    verdict(
        9,
        "time evolution contract",
        pass,
        start,
        &format!("{passed}/20, min p_gs {worst_p:.5}, max drift {worst_drift:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_cheeger_audit() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(Family::CheegerAudit);
    cfg.sizes = (3..=12).collect();
    cfg.instances_per_size = 50;
    cfg.master_seed = 10;
    let dir = tempfile::tempdir().unwrap();
    cfg.output = Some(dir.path().to_path_buf());
    run(&cfg).unwrap();
    let records = stoq_expcli::read_records(&dir.path().join("cheeger_audit.jsonl")).unwrap();
    let listed = [
        "signed_lower_k1",
        "signed_lower_k2",
        "unsigned_lower_k1",
        "unsigned_lower_k2",
        "signed_sqrt_upper_k1",
        "converse_unnormalized",
        "excited_bound_full",
    ];
    let mut detail = String::new();
    let mut pass = records.len() == 500;
    for name in listed {
        let checks: Vec<_> = records.iter().flat_map(|r| r.checks.iter()).filter(|c| c.name == name).collect();
        let held = checks.iter().filter(|c| c.holds).count();
        pass &= held == checks.len();
        detail += &format!("{name} {held}/{}; ", checks.len());
    }

    let frustrated = SignedGraph::unit(3, &[(0, 1, -1), (1, 2, 1), (0, 2, 1)]).unwrap();
    let h1 = cheeger_constant(&frustrated, 1, true).unwrap().h;
    let spectrum = full_spectrum(&laplacian(&frustrated, true, false).unwrap());
    let fixture = (h1 - 1.0 / 3.0).abs() <= 1e-12
        && spectrum.iter().zip([1.0, 1.0, 4.0]).all(|(a, b)| (a - b).abs() <= 1e-12);
    pass &= fixture && start.elapsed().as_secs() < 600;
    detail += &format!("triangle h1 {h1:.4} spectrum {spectrum:.4?}");
    verdict(10, "Cheeger audit", pass, start, &detail);
    assert!(pass);
}

fn random_stoquastic(n: usize, rng: &mut SeededRng) -> HermitianMatrix {
    let mut h = PauliHamiltonian::transverse_field(n).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < 0.5 {
                let zz = PauliString::from_sparse(n, &[(i, Pauli::Z), (j, Pauli::Z)]).unwrap();
                h.add_term(zz, rng.random_range(-1.0..1.0)).unwrap();
            }
        }
        let z = PauliString::from_sparse(n, &[(i, Pauli::Z)]).unwrap();
        h.add_term(z, rng.random_range(-0.5..0.5)).unwrap();
    }
    design_matrix(&h.build_matrix().unwrap())
}

fn nonnegative_perturbation(dim: usize, rng: &mut SeededRng) -> HermitianMatrix {
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            if i == j || rng.random::<f64>() < 0.2 {
                let v = rng.random_range(0.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
    }
    HermitianMatrix::from_real_dense(m).unwrap()
}

#[test]
fn criterion_11_first_order_perturbation() {
    let start = Instant::now();
    let gap_at = |h0: &HermitianMatrix, v: &HermitianMatrix, s: f64| {
        gap(&HermitianMatrix::linear_combination(&[(1.0, h0), (s, v)]).unwrap()).unwrap()
    };
    let (mut checked, mut passed, mut stream) = (0usize, 0usize, 0u64);
    let mut worst = 0.0f64;
    while checked < 100 {
        stream += 1;
        let mut rng = SeededRng::new(11, stream);
        let n = rng.random_range(2..=6usize);
        let h0 = random_stoquastic(n, &mut rng);
        let v = nonnegative_perturbation(h0.dim(), &mut rng);
        // degenerate pairs are outside the contract
        let Ok(d) = first_order_gap_derivative(&h0, &v) else {
            continue;
        };
        let step = 1e-5;
        let fd = (gap_at(&h0, &v, step) - gap_at(&h0, &v, -step)) / (2.0 * step);
        let rel = (d - fd).abs() / d.abs().max(1e-3);
        worst = worst.max(rel);
        passed += usize::from(rel <= 1e-4);
        checked += 1;
    }
    let pass = passed == 100;
    verdict(11, "first-order perturbation", pass, start, &format!("{passed}/100, max rel diff {worst:.1e}"));
    assert!(pass);
}

fn random_xy_hamiltonian(n: usize, k: usize, rng: &mut SeededRng) -> PauliHamiltonian {
    let mut h = PauliHamiltonian::new(n).unwrap();
    for _ in 0..rng.random_range(1..=2 * n) {
        let w = rng.random_range(1..=k.min(n));
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in 0..w {
            let j = rng.random_range(i..n);
            qubits.swap(i, j);
        }
        let factors: Vec<(usize, Pauli)> = qubits[..w]
            .iter()
            .map(|&q| (q, if rng.random::<bool>() { Pauli::X } else { Pauli::Y }))
            .collect();
        h.add_term(PauliString::from_sparse(n, &factors).unwrap(), rng.random_range(-1.0..1.0))
            .unwrap();
    }
    for q in 0..n {
        if rng.random::<bool>() {
            let z = PauliString::from_sparse(n, &[(q, Pauli::Z)]).unwrap();
            h.add_term(z, rng.random_range(-1.0..1.0)).unwrap();
        }
    }
    h
}

#[test]
fn criterion_12_pauli_level_design() {
    let start = Instant::now();
    let (mut checked, mut passed, mut stream) = (0usize, 0usize, 0u64);
    let mut worst = 0.0f64;
    while checked < 500 {
        stream += 1;
        let mut rng = SeededRng::new(12, stream);
        let n = rng.random_range(1..=6usize);
        let k = rng.random_range(1..=3usize);
        let h = random_xy_hamiltonian(n, k, &mut rng);
        let d = match design_pauli(&h, k) {
            Ok(d) => d,
            Err(Error::OverlapAmbiguity { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let lhs = d.build_matrix().unwrap();
        let rhs = design_matrix(&h.build_matrix().unwrap());
        let mut diff = 0.0f64;
        for i in 0..lhs.dim() {
            for j in 0..lhs.dim() {
                diff = diff.max((lhs.get(i, j) - rhs.get(i, j)).norm());
            }
        }
        worst = worst.max(diff);
        passed += usize::from(diff <= 1e-12);
        checked += 1;
    }
    let pass = passed == 500;
    verdict(12, "Pauli-level design consistency", pass, start, &format!("{passed}/500, max diff {worst:.1e}"));
    assert!(pass);
}
