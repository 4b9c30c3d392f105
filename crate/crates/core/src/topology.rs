//! Winding number of the Anderson-vector trajectory.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{pair_components, solve_chain, Decay, ModelSpec, Param, Variant};

pub const DEFAULT_SAMPLES: usize = 4096;
pub const GAP_TOL: f64 = 1e-8;
/// Maximum distance from the nearest half-integer accepted as quantized.
pub const SNAP_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingResult {
    pub nu_raw: f64,
    /// Nearest half-integer to `nu_raw`.
    pub nu: f64,
    pub gapped: bool,
    pub min_gap: f64,
    /// False when `nu_raw` is farther than [`SNAP_TOL`] from `nu`.
    pub quantized: bool,
}

fn wrap_angle(mut d: f64) -> f64 {
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// For variant 1 with `α ≤ 1` the pairing sum diverges at `k = 0`, so the step across it is skipped.
fn open_at_zero(spec: &ModelSpec) -> bool {
    matches!(
        (spec.variant, spec.alpha),
        (Variant::LongRangePairing, Decay::Power(a)) if a <= 1.0
    )
}

/// Angle steps wider than this are resolved on a finer grid.
const MAX_STEP: f64 = PI / 2.0;
const REFINE: usize = 64;
const REFINE_DEPTH: usize = 4;

fn angle_and_gap(spec: &ModelSpec, k: f64, n: usize) -> (f64, f64) {
    let (xi, d) = pair_components(spec, k, n);
    ((-d).atan2(-xi), xi.hypot(d))
}

/// Smallest `ε` on `[a, b]` by golden-section search. Assumes a single minimum in the bracket.
fn golden_min_gap(spec: &ModelSpec, mut a: f64, mut b: f64, n: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let gap = |k: f64| angle_and_gap(spec, k, n).1;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (gap(c), gap(d));
    for _ in 0..200 {
        if b - a <= f64::EPSILON * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - r * (b - a);
            fc = gap(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + r * (b - a);
            fd = gap(d);
        }
    }
    fc.min(fd)
}

/// Angle increment from `ka` to `kb` summed over a finer grid. Raises `Gapless` if the gap closes inside.
fn refined_step(
    spec: &ModelSpec,
    ka: f64,
    kb: f64,
    n: usize,
    depth: usize,
    gap_tol: f64,
    min_gap: &mut f64,
) -> Result<f64> {
    let h = (kb - ka) / REFINE as f64;
    let pts: Vec<(f64, f64)> = (0..=REFINE).map(|m| angle_and_gap(spec, ka + h * m as f64, n)).collect();
    let best = (0..=REFINE).min_by(|&x, &y| pts[x].1.total_cmp(&pts[y].1)).unwrap_or(0);
    let lo = ka + h * best.saturating_sub(1) as f64;
    let hi = ka + h * (best + 1).min(REFINE) as f64;
    *min_gap = min_gap.min(pts[best].1).min(golden_min_gap(spec, lo, hi, n));
    if *min_gap <= gap_tol {
        return Err(Error::Gapless { min_gap: *min_gap });
    }
    let mut total = 0.0;
    for m in 0..REFINE {
        let step = wrap_angle(pts[m + 1].0 - pts[m].0);
        total += if step.abs() > MAX_STEP {
            if depth == 0 {
                return Err(Error::Gapless { min_gap: *min_gap });
            }
            let a = ka + h * m as f64;
            refined_step(spec, a, a + h, n, depth - 1, gap_tol, min_gap)?
        } else {
            step
        };
    }
    Ok(total)
}

pub fn winding_number(spec: &ModelSpec, samples: usize) -> Result<WindingResult> {
    winding_number_with_tol(spec, samples, GAP_TOL)
}

pub fn winding_number_with_tol(spec: &ModelSpec, samples: usize, gap_tol: f64) -> Result<WindingResult> {
    if samples < 256 || samples % 2 != 0 {
        return Err(Error::InvalidSpec(format!("samples must be even and >= 256, got {samples}")));
    }
    let modes = solve_chain(spec, samples)?;
    let mut min_gap = modes.iter().map(|m| m.epsilon).fold(f64::INFINITY, f64::min);
    let singular_zero = open_at_zero(spec);
    for k in [0.0, PI] {
        if k == 0.0 && singular_zero {
            continue;
        }
        let (xi, d) = pair_components(spec, k, samples);
        min_gap = min_gap.min(xi.hypot(d));
    }
    if min_gap <= gap_tol || modes.iter().any(|m| m.gapless) {
        return Err(Error::Gapless { min_gap });
    }
    let n = modes.len();
    let angle: Vec<f64> = modes.iter().map(|m| m.hy.atan2(m.hz)).collect();
    let mut total = 0.0;
    for i in 0..n {
        let next = (i + 1) % n;
        if singular_zero && i + 1 == n / 2 {
            continue;
        }
        let step = wrap_angle(angle[next] - angle[i]);
        total += if step.abs() > MAX_STEP {
            // the gap may close between samples; look closer
            let kb = if next == 0 { modes[0].k + 2.0 * PI } else { modes[next].k };
            refined_step(spec, modes[i].k, kb, samples, REFINE_DEPTH, gap_tol, &mut min_gap)?
        } else {
            step
        };
    }
    let nu_raw = total / (2.0 * PI);
    // + 0.0 turns a snapped -0 into 0
    let nu = (2.0 * nu_raw).round() / 2.0 + 0.0;
    let quantized = (nu_raw - nu).abs() < SNAP_TOL;
    if !quantized {
        log::warn!("NumericalWinding: nu_raw = {nu_raw} is not within {SNAP_TOL} of a half-integer");
    }
    Ok(WindingResult { nu_raw, nu, gapped: true, min_gap, quantized })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub k: f64,
    pub hy: f64,
    pub hz: f64,
    pub gapless: bool,
}

pub type Trajectory = Vec<TrajectoryPoint>;

pub fn trajectory(spec: &ModelSpec, samples: usize) -> Result<Trajectory> {
    Ok(solve_chain(spec, samples)?
        .into_iter()
        .map(|m| TrajectoryPoint { k: m.k, hy: m.hy, hz: m.hz, gapless: m.gapless })
        .collect())
}

/// Signed crossings of the ray `h_y = 0, h_z > 0` along the closed trajectory.
///
/// An independent route to the winding number for curves that avoid the origin.
pub fn signed_crossings(points: &[TrajectoryPoint]) -> i64 {
    let n = points.len();
    let mut count = 0;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if (a.hy < 0.0) == (b.hy < 0.0) {
            continue;
        }
        // h_z where the segment meets h_y = 0
        let t = a.hy / (a.hy - b.hy);
        if a.hz + t * (b.hz - a.hz) > 0.0 {
            count += if b.hy >= 0.0 { 1 } else { -1 };
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub x: f64,
    pub y: f64,
    /// `None` where the spectrum is gapless.
    pub winding: Option<WindingResult>,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScan {
    pub x_param: Param,
    pub y_param: Param,
    pub nx: usize,
    pub ny: usize,
    /// Row-major in `y`, then `x`.
    pub cells: Vec<ScanCell>,
}

impl PhaseScan {
    pub fn cell(&self, ix: usize, iy: usize) -> &ScanCell {
        &self.cells[iy * self.nx + ix]
    }
}

/// Winding number on a rectangular grid of two parameters.
pub fn phase_boundary_scan(
    base: &ModelSpec,
    x: (Param, &[f64]),
    y: (Param, &[f64]),
    samples: usize,
) -> Result<PhaseScan> {
    let (nx, ny) = (x.1.len(), y.1.len());
    let coords: Vec<(f64, f64)> = y.1.iter().flat_map(|&yv| x.1.iter().map(move |&xv| (xv, yv))).collect();
    let results: Vec<Result<Option<WindingResult>>> = coords
        .par_iter()
        .map(|&(xv, yv)| {
            let spec = base.with_param(x.0, xv).with_param(y.0, yv);
            match winding_number(&spec, samples) {
                Ok(w) => Ok(Some(w)),
                Err(Error::Gapless { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let windings = results.into_iter().collect::<Result<Vec<_>>>()?;
    let nu = |ix: usize, iy: usize| windings[iy * nx + ix].map(|w| w.nu);
    let cells = coords
        .iter()
        .enumerate()
        .map(|(idx, &(xv, yv))| {
            let (ix, iy) = (idx % nx, idx / nx);
            let here = nu(ix, iy);
            let mut neighbours = Vec::with_capacity(4);
            if ix > 0 {
                neighbours.push(nu(ix - 1, iy));
            }
            if ix + 1 < nx {
                neighbours.push(nu(ix + 1, iy));
            }
            if iy > 0 {
                neighbours.push(nu(ix, iy - 1));
            }
            if iy + 1 < ny {
                neighbours.push(nu(ix, iy + 1));
            }
            let boundary = here.is_none() || neighbours.iter().any(|&v| v != here);
            ScanCell { x: xv, y: yv, winding: windings[idx], boundary }
        })
        .collect();
    Ok(PhaseScan { x_param: x.0, y_param: y.0, nx, ny, cells })
}
