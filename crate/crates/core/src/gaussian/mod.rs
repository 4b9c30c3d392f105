//! Ground-state Majorana correlators and Wick evaluation of spin strings.
//!
//! With `A_j = c_j† + c_j` and `B_j = c_j† − c_j` one has `σz_j = A_j B_j`,
//! `⟨A_i A_j⟩ = δ_ij`, `⟨B_i B_j⟩ = −δ_ij`, and every correlator below reduces to
//! the matrix `M_ij = ⟨A_i B_j⟩`.

mod pfaffian;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorana::coupling_matrix;
use crate::model::{solve_chain, Boundary, ModelSpec};

pub use pfaffian::pfaffian;
pub(crate) use pfaffian::pfaffian_unchecked;

/// Largest subset accepted by the correlator routines.
pub const MAX_SUBSET: usize = 20;
/// Default length of the momentum grid standing in for the infinite chain.
pub const INFINITE_CHAIN_N: usize = 8192;

/// `G_R = (1/N) Σ_k e^{iRk} e^{−2iΘ_k}` for `|R| ≤ l_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorKernel {
    pub n: usize,
    pub l_max: usize,
    values: Vec<f64>,
    /// Largest imaginary part discarded from the sums.
    pub max_imag: f64,
}

impl CorrelatorKernel {
    pub fn get(&self, r: isize) -> f64 {
        self.values[(r + self.l_max as isize) as usize]
    }

    /// Kernel for a state with `Θ_k ≡ 0`.
    pub fn polarized(l_max: usize) -> Self {
        let mut values = vec![0.0; 2 * l_max + 1];
        values[l_max] = 1.0;
        CorrelatorKernel { n: 0, l_max, values, max_imag: 0.0 }
    }
}

pub fn kernel(spec: &ModelSpec, n: usize, l_max: usize) -> Result<CorrelatorKernel> {
    if 4 * l_max >= n {
        return Err(Error::InvalidSpec(format!("L_max = {l_max} must be below N/4 = {}", n / 4)));
    }
    let modes = solve_chain(spec, n)?;
    if modes.iter().any(|m| m.gapless) {
        let min_gap = modes.iter().map(|m| m.epsilon).fold(f64::INFINITY, f64::min);
        return Err(Error::Gapless { min_gap });
    }
    let inv = 1.0 / n as f64;
    let mut values = Vec::with_capacity(2 * l_max + 1);
    let mut max_imag: f64 = 0.0;
    for r in -(l_max as isize)..=l_max as isize {
        let (mut re, mut im) = (0.0, 0.0);
        for m in &modes {
            let (s, c) = (r as f64 * m.k).sin_cos();
            // e^{−2iΘ} = cos2Θ − i sin2Θ = −h_z + i h_y
            re += -c * m.hz - s * m.hy;
            im += c * m.hy - s * m.hz;
        }
        values.push(re * inv);
        max_imag = max_imag.max((im * inv).abs());
    }
    Ok(CorrelatorKernel { n, l_max, values, max_imag })
}

/// Source of the pair correlators `⟨A_i B_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationSource {
    /// Translation-invariant chain: `⟨A_i B_j⟩ = −G_{i−j}`.
    Toeplitz(CorrelatorKernel),
    /// Full matrix, e.g. from an open chain.
    Dense(DMatrix<f64>),
}

impl CorrelationSource {
    pub fn ab(&self, i: usize, j: usize) -> f64 {
        match self {
            CorrelationSource::Toeplitz(g) => -g.get(i as isize - j as isize),
            CorrelationSource::Dense(m) => m[(i, j)],
        }
    }

    /// Number of addressable sites (`0..len`).
    pub fn len(&self) -> usize {
        match self {
            CorrelationSource::Toeplitz(g) => g.l_max + 1,
            CorrelationSource::Dense(m) => m.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        if sites.len() > MAX_SUBSET {
            return Err(Error::TooManySites { got: sites.len(), limit: MAX_SUBSET });
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("sites must be strictly increasing".into()));
        }
        match sites.last() {
            Some(&s) if s >= self.len() => Err(Error::SiteOutOfRange { site: s, range: self.len() }),
            _ => Ok(()),
        }
    }

    /// `⟨A B⟩` submatrix on the given sites.
    pub fn submatrix(&self, sites: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(sites.len(), sites.len(), |a, b| self.ab(sites[a], sites[b]))
    }
}

/// Gaussian ground state of a finite chain from the singular value decomposition of `K`.
#[derive(Debug, Clone)]
pub struct DenseGroundState {
    pub correlations: DMatrix<f64>,
    pub energy: f64,
    /// Quasiparticle energies, ascending.
    pub quasiparticle: Vec<f64>,
}

/// `H = (i/2) Σ K_jl α_j β_l` has ground state `⟨A_i B_j⟩ = (U Vᵀ)_ij` and energy `−½ Σ s`
/// for `K = U S Vᵀ`.
pub fn dense_ground_state(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<DenseGroundState> {
    if n > 2000 {
        return Err(Error::InvalidSpec(format!("dense solve limited to N <= 2000, got {n}")));
    }
    let k = coupling_matrix(spec, n, boundary)?;
    let (correlations, mut quasiparticle) = polar_factor(k);
    let energy = -0.5 * quasiparticle.iter().sum::<f64>();
    quasiparticle.sort_by(f64::total_cmp);
    let gap = quasiparticle[0];
    if gap < 1e-10 {
        return Err(Error::DegenerateGroundState { gap });
    }
    Ok(DenseGroundState { correlations, energy, quasiparticle })
}

/// Orthogonal polar factor `U Vᵀ` of `K` and its singular values.
///
/// Large well-conditioned matrices go through the eigenvectors of `KᵀK` plus one
/// Newton-Schulz step; everything else through a full SVD.
fn polar_factor(k: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = k.nrows();
    if n >= 256 {
        let eig = (k.transpose() * &k).symmetric_eigen();
        let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
        if lo > 1e-6 * hi {
            let s: Vec<f64> = eig.eigenvalues.iter().map(|l| l.sqrt()).collect();
            let v = &eig.eigenvectors;
            let scaled = DMatrix::from_fn(n, n, |i, j| v[(i, j)] / s[j]);
            let m = &k * scaled * v.transpose();
            let correction = DMatrix::identity(n, n) * 3.0 - m.transpose() * &m;
            return (m * correction * 0.5, s);
        }
    }
    let svd = k.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    (u * v_t, svd.singular_values.iter().copied().collect())
}

pub fn open_chain_correlations(spec: &ModelSpec, n: usize) -> Result<CorrelationSource> {
    Ok(CorrelationSource::Dense(dense_ground_state(spec, n, Boundary::Open)?.correlations))
}

pub fn closed_chain_correlations(spec: &ModelSpec, n: usize) -> Result<CorrelationSource> {
    let gs = dense_ground_state(spec, n, Boundary::AntiperiodicClosed)?;
    Ok(CorrelationSource::Dense(gs.correlations))
}

/// `⟨Π_{j∈S} σz_j⟩ = det M_S`.
pub fn sigma_z_correlator(source: &CorrelationSource, sites: &[usize]) -> Result<f64> {
    source.check_sites(sites)?;
    Ok(sigma_z_unchecked(source, sites))
}

pub(crate) fn sigma_z_unchecked(source: &CorrelationSource, sites: &[usize]) -> f64 {
    match sites.len() {
        0 => 1.0,
        1 => source.ab(sites[0], sites[0]),
        _ => source.submatrix(sites).determinant(),
    }
}

#[derive(Clone, Copy)]
enum Majorana {
    A(usize),
    B(usize),
}

/// `⟨Π_{j∈S} σx_j⟩` via the Pfaffian of the contractions of the Jordan-Wigner strings.
///
/// Consecutive pairs `σx_a σx_b` expand to `B_a A_{a+1} B_{a+1} … A_{b−1} B_{b−1} A_b`.
pub fn sigma_x_correlator(source: &CorrelationSource, sites: &[usize]) -> Result<f64> {
    source.check_sites(sites)?;
    Ok(sigma_x_unchecked(source, sites))
}

pub(crate) fn sigma_x_unchecked(source: &CorrelationSource, sites: &[usize]) -> f64 {
    if sites.len() % 2 == 1 {
        return 0.0;
    }
    let mut ops = Vec::new();
    for pair in sites.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        ops.push(Majorana::B(a));
        for m in a + 1..b {
            ops.push(Majorana::A(m));
            ops.push(Majorana::B(m));
        }
        ops.push(Majorana::A(b));
    }
    let n = ops.len();
    let mut c = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in p + 1..n {
            let v = match (ops[p], ops[q]) {
                (Majorana::A(i), Majorana::B(j)) => source.ab(i, j),
                (Majorana::B(i), Majorana::A(j)) => -source.ab(j, i),
                // distinct sites only: ⟨A_i A_j⟩ = ⟨B_i B_j⟩ = 0
                _ => 0.0,
            };
            c[(p, q)] = v;
            c[(q, p)] = -v;
        }
    }
    pfaffian_unchecked(c)
}
