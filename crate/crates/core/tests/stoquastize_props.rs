use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use stoq_core::ensembles::{sample_complex_hermitian, sample_wigner, SeededRng};
use stoq_core::pauli::{Pauli, PauliHamiltonian, PauliString};
use stoq_core::spectra::full_spectrum;
use stoq_core::stoquastize::{curability_check, design_matrix, design_pauli, shift_matrix, SignatureMatrix};
use stoq_core::{is_stoquastic, Error, HermitianMatrix};

fn lowest(m: &HermitianMatrix) -> f64 {
    full_spectrum(m)[0]
}

fn real_matrix(n: usize, vals: &[f64]) -> HermitianMatrix {
    let raw = DMatrix::from_fn(n, n, |i, j| vals[i * n + j]);
    HermitianMatrix::from_real_dense((&raw + raw.transpose()) * 0.5).unwrap()
}

/// A stoquastic matrix conjugated by a random signature: curable by
/// construction.
fn hidden_stoquastic(n: usize, rng: &mut SeededRng) -> HermitianMatrix {
    let raw = DMatrix::from_fn(n, n, |_, _| -rng.random_range(0.0..1.0));
    let signs: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let v = 0.5 * (raw[(i, j)] + raw[(j, i)]);
        if i == j {
            3.0 * v
        } else {
            signs[i] * signs[j] * v
        }
    });
    HermitianMatrix::from_real_dense(m).unwrap()
}

#[test]
fn ground_energy_never_rises_and_equality_tracks_curability() {
    let mut equal_and_curable = 0;
    for n in [2usize, 3, 5, 8, 13] {
        for k in 0..120u64 {
            let mut rng = SeededRng::new(0x5eed, (n as u64) << 16 | k);
            let m = match k % 3 {
                0 => sample_wigner(n, &mut rng).unwrap(),
                1 => hidden_stoquastic(n, &mut rng),
                _ => sample_complex_hermitian(n, &mut rng).unwrap(),
            };
            let d = design_matrix(&m);
            let (e, ed) = (lowest(&m), lowest(&d));
            assert!(ed <= e + 1e-10, "n={n} k={k}: {ed} > {e}");
            if m.is_real() {
                let curable = curability_check(&m).is_some();
                let equal = (ed - e).abs() <= 1e-9;
                assert_eq!(curable, equal, "n={n} k={k}: gap {}", e - ed);
                if curable {
                    equal_and_curable += 1;
                }
            }
        }
    }
    assert!(equal_and_curable >= 200);
}

#[test]
fn curability_signature_conjugates_to_designed() {
    for k in 0..50u64 {
        let m = hidden_stoquastic(7, &mut SeededRng::new(77, k));
        let s = curability_check(&m).expect("curable by construction");
        let conj = s.conjugate(&m).unwrap();
        let d = design_matrix(&m);
        for i in 0..7 {
            for j in 0..7 {
                assert!((conj.get(i, j) - d.get(i, j)).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn triangle_signatures_exhaustive() {
    // one positive pair, two negative pairs: no signature works
    let m = real_matrix(3, &[0.0, 1.0, -1.0, 1.0, 0.0, -1.0, -1.0, -1.0, 0.0]);
    assert!(curability_check(&m).is_none());
    let mut found = 0;
    for bits in 0..8u32 {
        let signs: Vec<i8> = (0..3).map(|q| if bits >> q & 1 == 1 { -1 } else { 1 }).collect();
        let c = SignatureMatrix::new(signs).unwrap().conjugate(&m).unwrap();
        if is_stoquastic(&c, 0.0) {
            found += 1;
        }
    }
    assert_eq!(found, 0);
}

#[test]
fn shift_lowers_every_offdiagonal() {
    let mut rng = SeededRng::new(4, 4);
    for n in 2..10 {
        let m = sample_wigner(n, &mut rng).unwrap();
        let s = shift_matrix(&m, None).unwrap();
        assert!(is_stoquastic(&s, 0.0));
        assert!((s.trace() - 0.5 * m.trace()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_is_preserved(n in 2usize..12, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed, 0);
        for m in [sample_wigner(n, &mut rng).unwrap(), sample_complex_hermitian(n, &mut rng).unwrap()] {
            prop_assert!((design_matrix(&m).trace() - m.trace()).abs() <= 1e-12);
        }
    }

    #[test]
    fn design_is_idempotent_and_stoquastic(n in 2usize..10, seed in any::<u64>()) {
        let m = sample_complex_hermitian(n, &mut SeededRng::new(seed, 1)).unwrap();
        let d = design_matrix(&m);
        prop_assert!(is_stoquastic(&d, 0.0));
        prop_assert_eq!(design_matrix(&d), d.clone());
        prop_assert_eq!(d.diagonal(), m.diagonal());
    }

    #[test]
    fn top_gap_sum_telescopes(n in 3usize..9, seed in any::<u64>()) {
        // with G = ‖H‖I − H, trace preservation gives Σ_k (gap⁺_k − gap_k) =
        // N(λ⁺_0 − λ_0) and ‖G⁺‖ ≥ ‖G‖
        let m = sample_wigner(n, &mut SeededRng::new(seed, 2)).unwrap();
        let d = design_matrix(&m);
        let (a, b) = (full_spectrum(&m), full_spectrum(&d));
        let telescoped: f64 = (1..n).map(|k| (b[k] - b[0]) - (a[k] - a[0])).sum();
        prop_assert!((telescoped - n as f64 * (a[0] - b[0])).abs() < 1e-9);
        let norm = m.norm_inf().max(d.norm_inf());
        prop_assert!(norm - b[0] >= norm - a[0] - 1e-10);
    }
}

fn random_xy_hamiltonian(n: usize, k: usize, rng: &mut SeededRng) -> PauliHamiltonian {
    let mut h = PauliHamiltonian::new(n).unwrap();
    let terms = rng.random_range(1..=2 * n);
    for _ in 0..terms {
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
        let p = PauliString::from_sparse(n, &factors).unwrap();
        h.add_term(p, rng.random_range(-1.0..1.0)).unwrap();
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
fn pauli_design_matches_matrix_design() {
    let mut checked = 0;
    let mut stream = 0u64;
    while checked < 500 {
        stream += 1;
        let mut rng = SeededRng::new(2024, stream);
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
        let dim = lhs.dim();
        for i in 0..dim {
            for j in 0..dim {
                assert!((lhs.get(i, j) - rhs.get(i, j)).norm() <= 1e-12, "{h}");
            }
        }
        checked += 1;
    }
}
