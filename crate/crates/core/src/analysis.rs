//! Scaling-law fits, susceptibilities and discontinuity detection over parameter sweeps.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{block_de_series, de_density_finite_size, global_entanglement_with_n, Basis};
use crate::error::{Error, Result};
use crate::gaussian::INFINITE_CHAIN_N;
use crate::model::{ModelSpec, Param};
use crate::topology::{winding_number, DEFAULT_SAMPLES};

pub const DEFAULT_KAPPA: f64 = 10.0;
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FitKind {
    Volume { s: f64 },
    Block { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub kind: FitKind,
    /// Root-mean-square residual, same units as the inputs.
    pub residual_rms: f64,
    pub points_used: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// `residual_rms` divided by the mean absolute value of the data.
    pub fn relative_residual(&self) -> f64 {
        let mean = self.points_used.iter().map(|p| p.1.abs()).sum::<f64>() / self.points_used.len() as f64;
        self.residual_rms / mean
    }

    pub fn predict(&self, size: f64) -> f64 {
        match self.kind {
            FitKind::Volume { s } => s * size,
            FitKind::Block { a, b, c } => a * size + b * size.log2() + c,
        }
    }
}

fn distinct(xs: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn rms(fit: &ScalingFit) -> f64 {
    let ss: f64 = fit.points_used.iter().map(|&(x, y)| (y - fit.predict(x)).powi(2)).sum();
    (ss / fit.points_used.len() as f64).sqrt()
}

/// Least-squares `S = s N` through the origin.
pub fn fit_volume_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let got = distinct(points.iter().map(|p| p.0));
    if got < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got });
    }
    let num: f64 = points.iter().map(|&(n, s)| n * s).sum();
    let den: f64 = points.iter().map(|&(n, _)| n * n).sum();
    let mut fit =
        ScalingFit { kind: FitKind::Volume { s: num / den }, residual_rms: 0.0, points_used: points.to_vec() };
    fit.residual_rms = rms(&fit);
    Ok(fit)
}

/// Ordinary least squares on `{L, log₂L, 1}`.
pub fn fit_block_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let used: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= 2.0).collect();
    let got = distinct(used.iter().map(|p| p.0));
    if got < 5 {
        return Err(Error::InsufficientPoints { needed: 5, got });
    }
    let design = DMatrix::from_fn(used.len(), 3, |i, j| match j {
        0 => used[i].0,
        1 => used[i].0.log2(),
        _ => 1.0,
    });
    let rhs = DVector::from_iterator(used.len(), used.iter().map(|p| p.1));
    let svd = design.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut fit =
        ScalingFit { kind: FitKind::Block { a: x[0], b: x[1], c: x[2] }, residual_rms: 0.0, points_used: used };
    fit.residual_rms = rms(&fit);
    Ok(fit)
}

/// `start, start + step, …` up to `stop` inclusive (within half a step).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Error::InvalidSpec(format!("bad grid [{start}, {stop}] step {step}")));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..n).map(|i| shortest_near(start + i as f64 * step, 1e-12 * step)).collect())
}

/// Fewest decimals within `tol` of `x`, so `-0.42` does not come out as `-0.41999999999999993`.
fn shortest_near(x: f64, tol: f64) -> f64 {
    (0..=17).filter_map(|d| format!("{x:.d$}").parse::<f64>().ok()).find(|y| (y - x).abs() <= tol).unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusceptibilityCurve {
    pub param: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
    /// `chi[i]` is the central difference at `grid[i + 1]`.
    pub chi: Vec<f64>,
}

impl SusceptibilityCurve {
    /// Susceptibility aligned with `grid`, `None` at the two ends.
    pub fn aligned(&self) -> Vec<Option<f64>> {
        let mut out = vec![None; self.grid.len()];
        for (i, &c) in self.chi.iter().enumerate() {
            out[i + 1] = Some(c);
        }
        out
    }
}

/// Central differences on the interior of a uniform grid.
pub fn susceptibility(param: &str, grid: &[f64], values: &[f64]) -> Result<SusceptibilityCurve> {
    if grid.len() != values.len() {
        return Err(Error::InvalidSpec("grid and values differ in length".into()));
    }
    if grid.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: grid.len() });
    }
    let h = grid[1] - grid[0];
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h.abs() {
            return Err(Error::NonUniformGrid { index: i });
        }
    }
    let chi = (1..grid.len() - 1).map(|i| (values[i + 1] - values[i - 1]) / (2.0 * h)).collect();
    Ok(SusceptibilityCurve { param: param.to_string(), grid: grid.to_vec(), values: values.to_vec(), step: h, chi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Channel {
    S,
    A,
    B,
    C,
    E,
    Nu,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::S => "s",
            Channel::A => "a",
            Channel::B => "b",
            Channel::C => "c",
            Channel::E => "E",
            Channel::Nu => "nu",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "s" => Ok(Channel::S),
            "a" => Ok(Channel::A),
            "b" => Ok(Channel::B),
            "c" => Ok(Channel::C),
            "E" | "e" => Ok(Channel::E),
            "nu" => Ok(Channel::Nu),
            _ => Err(format!("unknown channel {s:?} (expected s, a, b, c, E or nu)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalFlag {
    /// Midpoint between the two grid points whose susceptibilities jump.
    pub value: f64,
    pub jump: f64,
    pub channel: Channel,
}

/// A run of flags on adjacent midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlagCluster {
    pub start: f64,
    pub end: f64,
    /// Midpoint with the largest jump.
    pub peak: f64,
    pub peak_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointReport {
    pub flags: Vec<CriticalFlag>,
    pub threshold: f64,
    pub step: f64,
}

impl CriticalPointReport {
    pub fn clusters(&self) -> Vec<FlagCluster> {
        let mut out: Vec<FlagCluster> = Vec::new();
        for f in &self.flags {
            match out.last_mut() {
                Some(c) if f.value - c.end < 1.5 * self.step => {
                    c.end = f.value;
                    if f.jump > c.peak_jump {
                        c.peak = f.value;
                        c.peak_jump = f.jump;
                    }
                }
                _ => out.push(FlagCluster { start: f.value, end: f.value, peak: f.value, peak_jump: f.jump }),
            }
        }
        out
    }

    pub fn is_flagged(&self, x: f64) -> bool {
        self.flags.iter().any(|f| (f.value - x).abs() <= 0.5 * self.step + 1e-12)
    }
}

/// Flags midpoints where `|χ_{i+1} − χ_i| > kappa · median_j |χ_{j+1} − χ_j|`.
///
/// Jumps below `1e−8 (1 + max|χ|)` are never flagged so that exactly smooth curves stay clean.
pub fn detect_critical_points(
    curve: &SusceptibilityCurve,
    kappa: f64,
    channel: Channel,
) -> Result<CriticalPointReport> {
    if curve.grid.len() < 7 {
        return Err(Error::InsufficientPoints { needed: 7, got: curve.grid.len() });
    }
    let diffs: Vec<f64> = curve.chi.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut finite: Vec<f64> = diffs.iter().copied().filter(|d| d.is_finite()).collect();
    finite.sort_by(f64::total_cmp);
    let median = if finite.is_empty() {
        0.0
    } else if finite.len() % 2 == 1 {
        finite[finite.len() / 2]
    } else {
        0.5 * (finite[finite.len() / 2 - 1] + finite[finite.len() / 2])
    };
    let scale = curve.chi.iter().filter(|c| c.is_finite()).fold(0.0f64, |m, c| m.max(c.abs()));
    let threshold = (kappa * median).max(1e-8 * (1.0 + scale));
    let flags = diffs
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(i, &d)| CriticalFlag { value: 0.5 * (curve.grid[i + 1] + curve.grid[i + 2]), jump: d, channel })
        .collect();
    Ok(CriticalPointReport { flags, threshold, step: curve.step })
}

/// Flags midpoints between consecutive points whose winding numbers differ.
pub fn winding_changes(grid: &[f64], nu: &[Option<f64>]) -> Vec<CriticalFlag> {
    grid.windows(2)
        .zip(nu.windows(2))
        .filter(|(_, n)| n[0] != n[1])
        .map(|(g, n)| CriticalFlag {
            value: 0.5 * (g[0] + g[1]),
            jump: match (n[0], n[1]) {
                (Some(a), Some(b)) => (b - a).abs(),
                _ => f64::NAN,
            },
            channel: Channel::Nu,
        })
        .collect()
}

/// Settings shared by the sweep-based channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSettings {
    /// Chain length for `s`.
    pub n_volume: usize,
    /// Block lengths for `a`, `b`, `c`.
    pub block_sizes: Vec<usize>,
    pub basis: Basis,
    /// Momentum grid standing in for the infinite chain.
    pub kernel_n: usize,
    pub samples: usize,
    pub kappa: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            n_volume: 2000,
            block_sizes: (4..=14).collect(),
            basis: Basis::Z,
            kernel_n: INFINITE_CHAIN_N,
            samples: DEFAULT_SAMPLES,
            kappa: DEFAULT_KAPPA,
        }
    }
}

/// Values of every requested channel at one parameter point. Failures become NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub x: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub nu: Option<f64>,
}

impl ScanRow {
    pub fn get(&self, ch: Channel) -> f64 {
        match ch {
            Channel::S => self.s,
            Channel::A => self.a,
            Channel::B => self.b,
            Channel::C => self.c,
            Channel::E => self.e,
            Channel::Nu => self.nu.unwrap_or(f64::NAN),
        }
    }
}

fn or_nan<T>(r: Result<T>, what: &str, x: f64) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("{what} failed at {x}: {e}");
            None
        }
    }
}

pub fn evaluate_point(spec: &ModelSpec, x: f64, channels: &[Channel], settings: &ScanSettings) -> ScanRow {
    let nan = f64::NAN;
    let mut row = ScanRow { x, s: nan, a: nan, b: nan, c: nan, e: nan, nu: None };
    if channels.contains(&Channel::S) {
        row.s = or_nan(de_density_finite_size(spec, settings.n_volume), "s", x).unwrap_or(nan);
    }
    if channels.iter().any(|c| matches!(c, Channel::A | Channel::B | Channel::C)) {
        let fit =
            or_nan(block_de_series(spec, &settings.block_sizes, settings.basis, settings.kernel_n), "block DE", x)
                .and_then(|series| {
                    let pts: Vec<(f64, f64)> = series.iter().map(|&(l, v)| (l as f64, v)).collect();
                    or_nan(fit_block_law(&pts), "block fit", x)
                });
        if let Some(ScalingFit { kind: FitKind::Block { a, b, c }, .. }) = fit {
            row.a = a;
            row.b = b;
            row.c = c;
        }
    }
    if channels.contains(&Channel::E) {
        row.e = or_nan(global_entanglement_with_n(spec, settings.kernel_n), "E", x).unwrap_or(nan);
    }
    if channels.contains(&Channel::Nu) {
        row.nu = winding_number(spec, settings.samples).ok().map(|w| w.nu);
    }
    row
}

/// Aligned per-channel results of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparativeTable {
    pub param: Param,
    pub channels: Vec<Channel>,
    pub rows: Vec<ScanRow>,
    /// One curve per non-`nu` channel, in `channels` order.
    pub curves: Vec<(Channel, SusceptibilityCurve)>,
    pub reports: Vec<(Channel, CriticalPointReport)>,
    pub nu_changes: Vec<CriticalFlag>,
}

/// Runs the requested channels over a sweep of `param` and detects discontinuities in each.
pub fn comparative_scan(
    base: &ModelSpec,
    param: Param,
    grid: &[f64],
    channels: &[Channel],
    settings: &ScanSettings,
) -> Result<ComparativeTable> {
    let rows: Vec<ScanRow> =
        grid.par_iter().map(|&x| evaluate_point(&base.with_param(param, x), x, channels, settings)).collect();
    let mut curves = Vec::new();
    let mut reports = Vec::new();
    for &ch in channels.iter().filter(|&&c| c != Channel::Nu) {
        let values: Vec<f64> = rows.iter().map(|r| r.get(ch)).collect();
        let curve = susceptibility(param.name(), grid, &values)?;
        reports.push((ch, detect_critical_points(&curve, settings.kappa, ch)?));
        curves.push((ch, curve));
    }
    let nu_changes = if channels.contains(&Channel::Nu) {
        winding_changes(grid, &rows.iter().map(|r| r.nu).collect::<Vec<_>>())
    } else {
        Vec::new()
    };
    Ok(ComparativeTable { param, channels: channels.to_vec(), rows, curves, reports, nu_changes })
}
