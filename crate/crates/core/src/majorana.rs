//! Majorana zero modes of open chains as null vectors of the coupling matrix.
//!
//! In terms of `α_j = c_j + c_j†` and `β_j = i(c_j† − c_j)` the Hamiltonian reads
//! `H = (i/2) Σ_{jl} K_jl α_j β_l`, so `[H, Σ_j m_j α_j] = 0` exactly when `mᵀK = 0`
//! and `[H, Σ_l n_l β_l] = 0` when `K n = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{bonds, Boundary, ModelSpec, Variant};
use crate::topology::{winding_number, DEFAULT_SAMPLES};

pub const DEFAULT_TOL: f64 = 1e-8;

/// `K` for either boundary condition.
pub fn coupling_matrix(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<DMatrix<f64>> {
    let mut k = DMatrix::from_diagonal_element(n, n, -spec.mu);
    for b in bonds(spec, n, boundary)? {
        let (i, j, p) = if b.i < b.j { (b.i, b.j, b.pairing) } else { (b.j, b.i, -b.pairing) };
        k[(i, j)] += p - b.hopping;
        k[(j, i)] += -p - b.hopping;
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaCoupling {
    pub k: DMatrix<f64>,
}

impl MajoranaCoupling {
    /// Largest `|i − j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let n = self.k.nrows();
        let mut w = 0;
        for i in 0..n {
            for j in 0..n {
                if self.k[(i, j)] != 0.0 {
                    w = w.max(i.abs_diff(j));
                }
            }
        }
        w
    }
}

/// Open-chain coupling matrix.
pub fn build_coupling(spec: &ModelSpec, n: usize) -> Result<MajoranaCoupling> {
    if let Variant::LongRangePairingHopping { r, .. } = spec.variant {
        if n <= 2 * r {
            return Err(Error::InvalidSpec(format!("N = {n} must exceed 2r = {}", 2 * r)));
        }
    }
    Ok(MajoranaCoupling { k: coupling_matrix(spec, n, Boundary::Open)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Built from `α_j`.
    Left,
    /// Built from `β_j`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroMode {
    pub side: Side,
    /// Unit-norm coefficients `m_j` (left) or `n_j` (right).
    pub coefficients: Vec<f64>,
    /// `‖mᵀK‖` or `‖K n‖`.
    pub singular_value: f64,
}

impl ZeroMode {
    pub fn probability(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// Mean site index under the mode's probability.
    pub fn center(&self) -> f64 {
        self.coefficients.iter().enumerate().map(|(j, c)| j as f64 * c * c).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModePair {
    pub left: ZeroMode,
    pub right: ZeroMode,
}

/// Singular values of `K` relative to the largest, ascending.
pub fn relative_singular_values(coupling: &MajoranaCoupling) -> Vec<f64> {
    let s = coupling.k.singular_values();
    let max = s.max();
    let mut rel: Vec<f64> = s.iter().map(|x| x / max).collect();
    rel.sort_by(f64::total_cmp);
    rel
}

/// Zero-mode pairs with relative singular value below `tol`.
pub fn zero_modes(spec: &ModelSpec, n: usize, tol: f64) -> Result<Vec<ZeroModePair>> {
    winding_number(spec, DEFAULT_SAMPLES)?;
    let coupling = build_coupling(spec, n)?;
    let k = &coupling.k;
    let svd = k.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    let s = &svd.singular_values;
    let s_max = s.max();
    if s_max == 0.0 {
        return Err(Error::InvalidSpec("coupling matrix vanishes".into()));
    }
    let mut null = Vec::new();
    for (idx, &sv) in s.iter().enumerate() {
        let rel = sv / s_max;
        if rel >= tol / 10.0 && rel <= tol * 10.0 {
            return Err(Error::TolAmbiguous { singular_value: rel, tol });
        }
        if rel < tol {
            null.push(idx);
        }
    }
    let left = localized_basis(&u, &null, true);
    let right = localized_basis(&v, &null, false);
    let kt = k.transpose();
    Ok(left
        .into_iter()
        .zip(right)
        .map(|(m, nv)| ZeroModePair {
            left: ZeroMode {
                side: Side::Left,
                singular_value: (&kt * &m).norm(),
                coefficients: m.iter().copied().collect(),
            },
            right: ZeroMode {
                side: Side::Right,
                singular_value: (k * &nv).norm(),
                coefficients: nv.iter().copied().collect(),
            },
        })
        .collect())
}

pub fn mode_count(spec: &ModelSpec, n: usize, tol: f64) -> Result<usize> {
    Ok(zero_modes(spec, n, tol)?.len())
}

/// Rotates the selected columns into eigenvectors of the position operator, ordered by center.
fn localized_basis(basis: &DMatrix<f64>, cols: &[usize], ascending: bool) -> Vec<DVector<f64>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let n = basis.nrows();
    let q = DMatrix::from_fn(n, cols.len(), |i, c| basis[(i, cols[c])]);
    let x = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| i as f64));
    let proj = q.transpose() * x * &q;
    let eig = proj.symmetric_eigen();
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if !ascending {
        order.reverse();
    }
    order
        .into_iter()
        .map(|c| {
            let mut v = &q * eig.eigenvectors.column(c);
            v /= v.norm();
            if v[v.iamax()] < 0.0 {
                v = -v;
            }
            v
        })
        .collect()
}
