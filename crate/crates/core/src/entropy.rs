//! Diagonal entropy of the pure ground state, of finite blocks, and global entanglement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{kernel, sigma_x_unchecked, sigma_z_unchecked, CorrelationSource, INFINITE_CHAIN_N, MAX_SUBSET};
use crate::model::{solve_chain, ModelSpec};

/// Largest block whose distribution is enumerated.
pub const MAX_BLOCK: usize = 16;
const CLAMP_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl std::str::FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "z" | "Z" => Ok(Basis::Z),
            "x" | "X" => Ok(Basis::X),
            _ => Err(format!("unknown basis {s:?} (expected Z or X)")),
        }
    }
}

/// Probabilities of the `2^L` outcomes. Bit `j` of the index set means outcome `−1` on site `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalDistribution {
    pub basis: Basis,
    pub l: usize,
    pub p: Vec<f64>,
}

impl DiagonalDistribution {
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    /// Bits.
    pub value: f64,
    /// `None` for the momentum-occupation basis of the pure state.
    pub basis: Option<Basis>,
    /// Block length or chain length.
    pub size: usize,
    pub spec: Option<ModelSpec>,
}

/// `−Σ p log₂ p`, skipping zeros.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Entropy of the pair distribution `{cos²Θ, sin²Θ}`.
pub fn mode_entropy(theta: f64) -> f64 {
    let c = theta.cos().powi(2);
    let s = theta.sin().powi(2);
    shannon_entropy(&[c, s])
}

/// Ground-state diagonal entropy in the momentum-occupation basis.
///
/// The state factorizes over `(k, −k)` pairs, so each pair contributes one `S_k`.
pub fn pure_state_de(spec: &ModelSpec, n: usize) -> Result<EntropyReport> {
    let modes = solve_chain(spec, n)?;
    if modes.iter().any(|m| m.gapless) {
        let min_gap = modes.iter().map(|m| m.epsilon).fold(f64::INFINITY, f64::min);
        return Err(Error::Gapless { min_gap });
    }
    let value = 0.5 * modes.iter().map(|m| mode_entropy(m.theta)).sum::<f64>();
    Ok(EntropyReport { value, basis: None, size: n, spec: Some(*spec) })
}

pub fn de_density_finite_size(spec: &ModelSpec, n: usize) -> Result<f64> {
    Ok(pure_state_de(spec, n)?.value / n as f64)
}

/// In-place Walsh-Hadamard transform: `out[x] = Σ_S v[S] (−1)^{|x ∧ S|}`.
pub fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Correlators `⟨Π_{j∈S} σ_j⟩` for every subset `S` of `sites`, indexed by bitmask.
pub fn subset_correlators(source: &CorrelationSource, sites: &[usize], basis: Basis) -> Result<Vec<f64>> {
    let l = sites.len();
    if l > MAX_BLOCK.min(MAX_SUBSET) {
        return Err(Error::TooManySites { got: l, limit: MAX_BLOCK });
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("sites must be strictly increasing".into()));
    }
    if let Some(&last) = sites.last() {
        if last >= source.len() {
            return Err(Error::SiteOutOfRange { site: last, range: source.len() });
        }
    }
    Ok((0..1usize << l)
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<usize> = (0..l).filter(|b| mask >> b & 1 == 1).map(|b| sites[b]).collect();
            match basis {
                Basis::Z => sigma_z_unchecked(source, &subset),
                Basis::X => sigma_x_unchecked(source, &subset),
            }
        })
        .collect())
}

/// Diagonal distribution of an arbitrary set of sites.
pub fn diagonal_distribution_on(
    source: &CorrelationSource,
    sites: &[usize],
    basis: Basis,
) -> Result<DiagonalDistribution> {
    let mut p = subset_correlators(source, sites, basis)?;
    walsh_hadamard(&mut p);
    let scale = 1.0 / p.len() as f64;
    let mut min_p = f64::INFINITY;
    for x in p.iter_mut() {
        *x *= scale;
        min_p = min_p.min(*x);
    }
    let total: f64 = p.iter().sum();
    if min_p < -CLAMP_TOL || (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NormalizationFailure { total, min_p });
    }
    for x in p.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    Ok(DiagonalDistribution { basis, l: sites.len(), p })
}

/// Distribution of the block of sites `0..l`.
pub fn block_diagonal_distribution(source: &CorrelationSource, l: usize, basis: Basis) -> Result<DiagonalDistribution> {
    let sites: Vec<usize> = (0..l).collect();
    diagonal_distribution_on(source, &sites, basis)
}

pub fn block_de(source: &CorrelationSource, l: usize, basis: Basis) -> Result<EntropyReport> {
    let d = block_diagonal_distribution(source, l, basis)?;
    Ok(EntropyReport { value: d.entropy(), basis: Some(basis), size: l, spec: None })
}

/// Block entropies for each `l` in `ls` from one infinite-chain kernel.
pub fn block_de_series(spec: &ModelSpec, ls: &[usize], basis: Basis, n: usize) -> Result<Vec<(usize, f64)>> {
    let l_max = ls.iter().copied().max().unwrap_or(1).max(1);
    let source = CorrelationSource::Toeplitz(kernel(spec, n, l_max)?);
    ls.iter().map(|&l| Ok((l, block_de(&source, l, basis)?.value))).collect()
}

/// `E = 1 − ⟨σz⟩²` on the infinite chain.
pub fn global_entanglement(spec: &ModelSpec) -> Result<f64> {
    global_entanglement_with_n(spec, INFINITE_CHAIN_N)
}

pub fn global_entanglement_with_n(spec: &ModelSpec, n: usize) -> Result<f64> {
    let g = kernel(spec, n, 1)?;
    let z = -g.get(0);
    Ok(1.0 - z * z)
}

/// `(2/N) Σ_i (1 − Tr ρ_i²)` from single-site `⟨σz_i⟩` values.
pub fn global_entanglement_from_sites(sigma_z: &[f64]) -> f64 {
    let sum: f64 = sigma_z
        .iter()
        .map(|&z| {
            let (up, down) = ((1.0 + z) / 2.0, (1.0 - z) / 2.0);
            1.0 - (up * up + down * down)
        })
        .sum();
    2.0 * sum / sigma_z.len() as f64
}
