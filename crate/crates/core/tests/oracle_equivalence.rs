//! Gaussian-state routes against brute-force exact diagonalization.

use kitaev_de::entropy::{block_diagonal_distribution, diagonal_distribution_on, Basis};
use kitaev_de::gaussian::{closed_chain_correlations, dense_ground_state, kernel, open_chain_correlations};
use kitaev_de::model::{ground_energy, solve_chain, Boundary, Decay, ModelSpec};
use kitaev_de::oracle::{
    ed_diagonal_marginal, ed_ground_state, ed_majorana_ab, ed_sigma_x, ed_sigma_z, ed_spectrum, spin_ground_state,
    spin_spectrum,
};
use kitaev_de::{sigma_x_correlator, sigma_z_correlator, CorrelationSource};

const N: usize = 10;

fn reference() -> ModelSpec {
    ModelSpec::long_range_pairing(1.0, 1.0, 0.5, Decay::Infinite)
}

fn specs() -> Vec<ModelSpec> {
    vec![
        reference(),
        ModelSpec::long_range_pairing(1.0, -0.7, 1.3, Decay::Power(1.5)),
        ModelSpec::long_range_pairing(0.6, 1.1, -0.2, Decay::Power(0.0)),
        ModelSpec::long_range_pairing_hopping(-0.8, 1.0, -0.6, Decay::Power(0.2), Decay::Power(0.2), 3),
        ModelSpec::long_range_pairing_hopping(0.3, 0.9, 1.7, Decay::Power(1.0), Decay::Power(2.5), 2),
    ]
}

#[test]
fn sigma_z_sign_fixed_at_reference_point() {
    let spec = reference();
    let ed = ed_ground_state(&spec, N, Boundary::Open).unwrap();
    let src = open_chain_correlations(&spec, N).unwrap();
    for j in 0..N {
        let z = ed_sigma_z(&ed, &[j]);
        assert!((src.ab(j, j) - z).abs() < 1e-10, "site {j}: {} vs {z}", src.ab(j, j));
    }
    // closed chain: ⟨σz⟩ = −G_0 from the momentum sum at equal N
    let ed = ed_ground_state(&spec, N, Boundary::AntiperiodicClosed).unwrap();
    let g = kernel(&spec, N, 2).unwrap();
    assert!((ed_sigma_z(&ed, &[0]) + g.get(0)).abs() < 1e-10);
    for r in -2isize..=2 {
        let (i, j) = (4usize, (4 - r) as usize);
        assert!((ed_majorana_ab(&ed, i, j) + g.get(r)).abs() < 1e-10, "R = {r}");
    }
}

#[test]
fn dense_matrix_matches_ed() {
    for spec in specs() {
        let ed = ed_ground_state(&spec, N, Boundary::Open).unwrap();
        let src = open_chain_correlations(&spec, N).unwrap();
        for i in 0..N {
            for j in 0..N {
                assert!((src.ab(i, j) - ed_majorana_ab(&ed, i, j)).abs() < 1e-10, "{spec:?} ({i},{j})");
            }
        }
    }
}

#[test]
fn closed_dense_matches_ed() {
    for spec in specs() {
        let ed = ed_ground_state(&spec, N, Boundary::AntiperiodicClosed).unwrap();
        let src = closed_chain_correlations(&spec, N).unwrap();
        for i in 0..N {
            for j in 0..N {
                assert!((src.ab(i, j) - ed_majorana_ab(&ed, i, j)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn ground_energies() {
    for spec in specs() {
        let open = ed_ground_state(&spec, N, Boundary::Open).unwrap();
        let dense = dense_ground_state(&spec, N, Boundary::Open).unwrap();
        assert!((open.energy - dense.energy).abs() < 1e-9);
        let closed = ed_ground_state(&spec, N, Boundary::AntiperiodicClosed).unwrap();
        let modes = solve_chain(&spec, N).unwrap();
        assert!((closed.energy - ground_energy(&modes)).abs() < 1e-9, "{spec:?}");
    }
}

#[test]
fn subset_correlators() {
    let subsets: [&[usize]; 6] = [&[0], &[2, 3], &[0, 1, 2, 3], &[1, 4, 8], &[0, 3, 5, 9], &[2, 3, 6, 7, 8, 9]];
    for spec in specs() {
        let ed = ed_ground_state(&spec, N, Boundary::Open).unwrap();
        let src = open_chain_correlations(&spec, N).unwrap();
        for s in subsets {
            let z = sigma_z_correlator(&src, s).unwrap();
            assert!((z - ed_sigma_z(&ed, s)).abs() < 1e-10);
            let x = sigma_x_correlator(&src, s).unwrap();
            assert!((x - ed_sigma_x(&ed, s)).abs() < 1e-10, "{spec:?} {s:?}: {x} vs {}", ed_sigma_x(&ed, s));
        }
    }
}

#[test]
fn block_distributions_both_bases() {
    for spec in specs() {
        let ed = ed_ground_state(&spec, N, Boundary::Open).unwrap();
        let spin = spin_ground_state(&spec, N).unwrap();
        let src = open_chain_correlations(&spec, N).unwrap();
        for sites in [vec![0, 1, 2, 3], vec![3, 4, 5, 6]] {
            let z = diagonal_distribution_on(&src, &sites, Basis::Z).unwrap();
            let z_ref = ed_diagonal_marginal(&ed, &sites, Basis::Z);
            let x = diagonal_distribution_on(&src, &sites, Basis::X).unwrap();
            let x_ref = ed_diagonal_marginal(&spin, &sites, Basis::X);
            for s in 0..16 {
                assert!((z.p[s] - z_ref.p[s]).abs() < 1e-8);
                assert!((x.p[s] - x_ref.p[s]).abs() < 1e-8, "{spec:?} {sites:?} {s}");
            }
        }
        let first = block_diagonal_distribution(&src, 4, Basis::Z).unwrap();
        assert_eq!(first, diagonal_distribution_on(&src, &[0, 1, 2, 3], Basis::Z).unwrap());
    }
}

#[test]
fn spin_chain_reproduces_fermion_spectrum() {
    for spec in specs() {
        let n = 8;
        let f = ed_spectrum(&spec, n, Boundary::Open).unwrap();
        let s = spin_spectrum(&spec, n).unwrap();
        for (a, b) in f.iter().zip(&s) {
            assert!((a - b).abs() < 1e-10, "{spec:?}");
        }
        let ed = ed_ground_state(&spec, n, Boundary::Open).unwrap();
        let spin = spin_ground_state(&spec, n).unwrap();
        let overlap: f64 = ed.amplitudes.iter().zip(&spin.amplitudes).map(|(a, b)| a * b).sum();
        assert!((overlap.abs() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn edge_breaks_translation_invariance() {
    let ed = ed_ground_state(&reference(), N, Boundary::Open).unwrap();
    assert!((ed_majorana_ab(&ed, 0, 0) - ed_majorana_ab(&ed, N / 2, N / 2)).abs() > 1e-3);
}

#[test]
fn toeplitz_and_open_chain_agree_in_bulk() {
    let n = 2000;
    // trivial phases: open chains of topological specs carry zero modes and are degenerate
    for spec in [
        ModelSpec::long_range_pairing(1.0, 1.0, 1.5, Decay::Infinite),
        ModelSpec::long_range_pairing_hopping(-0.8, 1.0, -1.8, Decay::Power(0.2), Decay::Power(0.2), 3),
    ] {
        let toeplitz = CorrelationSource::Toeplitz(kernel(&spec, n, 6).unwrap());
        let dense = open_chain_correlations(&spec, n).unwrap();
        let centre: Vec<usize> = (n / 2..n / 2 + 6).collect();
        let shifted: Vec<usize> = (0..6).collect();
        for len in 1..=6 {
            let a = sigma_z_correlator(&dense, &centre[..len]).unwrap();
            let b = sigma_z_correlator(&toeplitz, &shifted[..len]).unwrap();
            assert!((a - b).abs() < 1e-4, "{len}: {a} vs {b}");
            if len % 2 == 0 {
                let a = sigma_x_correlator(&dense, &centre[..len]).unwrap();
                let b = sigma_x_correlator(&toeplitz, &shifted[..len]).unwrap();
                assert!((a - b).abs() < 1e-4);
            }
        }
    }
}
