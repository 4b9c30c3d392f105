//! Brute-force exact diagonalization of small chains, used as ground truth.
//!
//! Occupation bitstrings index the Fock space; bit `j` is `n_j`. Fermion operators
//! act with the sign `(−1)^{Σ_{m<j} n_m}`, which makes the amplitudes identical to those
//! of the Jordan-Wigner spin chain with bit `1` meaning `σz = −1`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::entropy::{Basis, DiagonalDistribution};
use crate::error::{Error, Result};
use crate::model::{bonds, spin_couplings, Boundary, ModelSpec, SpinCouplings};

pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct FockGroundState {
    pub n: usize,
    /// Length `2^n`, real.
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    /// Distance to the next level over both parity sectors.
    pub gap: f64,
    /// `‖Hψ − Eψ‖`.
    pub residual: f64,
}

#[derive(Clone, Copy)]
enum Op {
    Create(usize),
    Annihilate(usize),
}

/// Applies operators right to left; `None` when the state is annihilated.
fn apply(ops: &[Op], mut state: usize) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (j, create) = match *op {
            Op::Create(j) => (j, true),
            Op::Annihilate(j) => (j, false),
        };
        let occupied = state >> j & 1 == 1;
        if occupied == create {
            return None;
        }
        if (state & ((1 << j) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        state ^= 1 << j;
    }
    Some((sign, state))
}

/// Quadratic Hamiltonian as `(coefficient, operator string)` terms.
fn fermion_terms(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<Vec<(f64, Vec<Op>)>> {
    use Op::*;
    let mut terms = Vec::new();
    for b in bonds(spec, n, boundary)? {
        let (i, j) = (b.i, b.j);
        if b.pairing != 0.0 {
            terms.push((b.pairing, vec![Annihilate(i), Annihilate(j)]));
            terms.push((b.pairing, vec![Create(j), Create(i)]));
        }
        if b.hopping != 0.0 {
            terms.push((-b.hopping, vec![Create(i), Annihilate(j)]));
            terms.push((-b.hopping, vec![Create(j), Annihilate(i)]));
        }
    }
    Ok(terms)
}

fn sector_states(n: usize, parity: u32) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() % 2 == parity).collect()
}

fn check_size(n: usize) -> Result<()> {
    if !(2..=MAX_SITES).contains(&n) {
        return Err(Error::InvalidSpec(format!("exact diagonalization needs 2 <= N <= {MAX_SITES}, got {n}")));
    }
    Ok(())
}

/// Hamiltonian restricted to one fermion-parity sector.
fn sector_matrix(spec: &ModelSpec, n: usize, boundary: Boundary, states: &[usize]) -> Result<DMatrix<f64>> {
    let terms = fermion_terms(spec, n, boundary)?;
    let mut index = vec![usize::MAX; 1 << n];
    for (a, &s) in states.iter().enumerate() {
        index[s] = a;
    }
    let mut h = DMatrix::zeros(states.len(), states.len());
    for (a, &s) in states.iter().enumerate() {
        let occ = s.count_ones() as f64;
        h[(a, a)] += -spec.mu * (occ - 0.5 * n as f64);
        for (coef, ops) in &terms {
            if let Some((sign, t)) = apply(ops, s) {
                h[(index[t], a)] += coef * sign;
            }
        }
    }
    Ok(h)
}

/// Ground state of a parity-conserving Hamiltonian given per sector.
fn ground_from_sectors(n: usize, sectors: Vec<(Vec<usize>, DMatrix<f64>)>) -> Result<FockGroundState> {
    let mut levels: Vec<f64> = Vec::new();
    let mut best: Option<(f64, Vec<usize>, DVector<f64>, DMatrix<f64>)> = None;
    for (states, h) in sectors {
        let eig = SymmetricEigen::new(h.clone());
        let lo = eig.eigenvalues.imin();
        let e0 = eig.eigenvalues[lo];
        levels.extend(eig.eigenvalues.iter());
        if best.as_ref().map_or(true, |b| e0 < b.0) {
            best = Some((e0, states, eig.eigenvectors.column(lo).into_owned(), h));
        }
    }
    let (energy, states, vec, h) = best.expect("two sectors");
    levels.sort_by(f64::total_cmp);
    let gap = levels[1] - levels[0];
    if gap < 1e-10 {
        return Err(Error::DegenerateGroundState { gap });
    }
    let residual = (&h * &vec - energy * &vec).norm();
    let mut amplitudes = vec![0.0; 1 << n];
    for (a, &s) in states.iter().enumerate() {
        amplitudes[s] = vec[a];
    }
    Ok(FockGroundState { n, amplitudes, energy, gap, residual })
}

pub fn ed_ground_state(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<FockGroundState> {
    check_size(n)?;
    let sectors = (0..2)
        .map(|p| {
            let states = sector_states(n, p);
            let h = sector_matrix(spec, n, boundary, &states)?;
            Ok((states, h))
        })
        .collect::<Result<Vec<_>>>()?;
    ground_from_sectors(n, sectors)
}

/// Full fermionic spectrum, ascending.
pub fn ed_spectrum(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut out = Vec::new();
    for p in 0..2 {
        let h = sector_matrix(spec, n, boundary, &sector_states(n, p))?;
        out.extend(SymmetricEigen::new(h).eigenvalues.iter());
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Open spin chain in the `σz` basis (bit `1` is `σz = −1`), restricted to a parity sector.
fn spin_sector_matrix(c: &SpinCouplings, n: usize, states: &[usize]) -> DMatrix<f64> {
    let mut index = vec![usize::MAX; 1 << n];
    for (a, &s) in states.iter().enumerate() {
        index[s] = a;
    }
    let z = |s: usize, j: usize| if s >> j & 1 == 1 { -1.0 } else { 1.0 };
    let mut h = DMatrix::zeros(states.len(), states.len());
    for (a, &s) in states.iter().enumerate() {
        h[(a, a)] += 0.5 * c.mu * (0..n).map(|j| z(s, j)).sum::<f64>();
        for (idx, (&jx, &jy)) in c.jx.iter().zip(&c.jy).enumerate() {
            let l = idx + 1;
            for i in 0..n.saturating_sub(l) {
                let j = i + l;
                let string: f64 = (i + 1..j).map(|m| z(s, m)).product();
                let t = s ^ (1 << i) ^ (1 << j);
                // σy σy picks up i(−1)^{bit} on each site
                let yy = -z(s, i) * z(s, j);
                h[(index[t], a)] += string * (jx + jy * yy);
            }
        }
    }
    h
}

/// Ground state of the equivalent open spin chain, amplitudes in the `σz` basis.
pub fn spin_ground_state(spec: &ModelSpec, n: usize) -> Result<FockGroundState> {
    check_size(n)?;
    let c = spin_couplings(spec, n - 1);
    let sectors = (0..2)
        .map(|p| {
            let states = sector_states(n, p);
            let h = spin_sector_matrix(&c, n, &states);
            (states, h)
        })
        .collect();
    ground_from_sectors(n, sectors)
}

/// Full spectrum of the open spin chain, ascending.
pub fn spin_spectrum(spec: &ModelSpec, n: usize) -> Result<Vec<f64>> {
    check_size(n)?;
    let c = spin_couplings(spec, n - 1);
    let mut out = Vec::new();
    for p in 0..2 {
        let h = spin_sector_matrix(&c, n, &sector_states(n, p));
        out.extend(SymmetricEigen::new(h).eigenvalues.iter());
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Marginal distribution of `sites` in the `Z` or `X` basis; bit `b` of the index refers to `sites[b]`.
pub fn ed_diagonal_marginal(state: &FockGroundState, sites: &[usize], basis: Basis) -> DiagonalDistribution {
    let mut amp = state.amplitudes.clone();
    if basis == Basis::X {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for &j in sites {
            let bit = 1usize << j;
            for s in 0..amp.len() {
                if s & bit == 0 {
                    let (a, b) = (amp[s], amp[s | bit]);
                    amp[s] = r * (a + b);
                    amp[s | bit] = r * (a - b);
                }
            }
        }
    }
    let mut p = vec![0.0; 1 << sites.len()];
    for (s, a) in amp.iter().enumerate() {
        let idx = sites.iter().enumerate().fold(0, |acc, (b, &j)| acc | ((s >> j & 1) << b));
        p[idx] += a * a;
    }
    DiagonalDistribution { basis, l: sites.len(), p }
}

/// `⟨Π_{j∈S} σz_j⟩`.
pub fn ed_sigma_z(state: &FockGroundState, sites: &[usize]) -> f64 {
    let mask: usize = sites.iter().map(|&j| 1 << j).sum();
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(s, a)| {
            let sign = if (s & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            sign * a * a
        })
        .sum()
}

/// `⟨Π_{j∈S} σx_j⟩` on spin amplitudes.
pub fn ed_sigma_x(state: &FockGroundState, sites: &[usize]) -> f64 {
    let mask: usize = sites.iter().map(|&j| 1 << j).sum();
    state.amplitudes.iter().enumerate().map(|(s, a)| a * state.amplitudes[s ^ mask]).sum()
}

/// `⟨A_i B_j⟩` with `A = c† + c`, `B = c† − c`.
pub fn ed_majorana_ab(state: &FockGroundState, i: usize, j: usize) -> f64 {
    use Op::*;
    let terms = [
        (1.0, [Create(i), Create(j)]),
        (-1.0, [Create(i), Annihilate(j)]),
        (1.0, [Annihilate(i), Create(j)]),
        (-1.0, [Annihilate(i), Annihilate(j)]),
    ];
    let mut total = 0.0;
    for (s, &a) in state.amplitudes.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (coef, ops) in &terms {
            if let Some((sign, t)) = apply(ops, s) {
                total += state.amplitudes[t] * coef * sign * a;
            }
        }
    }
    total
}
