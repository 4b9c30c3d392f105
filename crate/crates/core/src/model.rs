//! Extended Kitaev chain Hamiltonians and their momentum-space solution.
//!
//! Real-space conventions used throughout the crate:
//!
//! ```text
//! H = Σ_j −μ (n_j − ½) + Σ_bonds [ P (c_i c_j + h.c.) − t (c_i† c_j + h.c.) ]
//! ```
//!
//! Variant 1 has nearest-neighbour hopping `t = J/2` and pairing `P_l = (Δ/2) d_l^{−α}`
//! over every range. Variant 2 has pairing `Δ d_l^{−α}` and hopping `J d_l^{−β}` for `l ≤ r`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Threshold below which both Anderson-vector components count as zero.
pub const ZERO_VECTOR_TOL: f64 = 1e-14;

/// Power-law decay exponent. `Infinite` keeps only the `d = 1` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    Power(f64),
    Infinite,
}

impl Decay {
    /// Weight `d^{−exponent}` for a distance `d ≥ 1`.
    pub fn weight(self, d: usize) -> f64 {
        match self {
            Decay::Infinite => {
                if d == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Decay::Power(a) => {
                if a == 0.0 {
                    1.0
                } else {
                    (d as f64).powf(-a)
                }
            }
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Decay::Power(_))
    }

    pub fn value(self) -> f64 {
        match self {
            Decay::Power(a) => a,
            Decay::Infinite => f64::INFINITY,
        }
    }

    pub fn from_f64(x: f64) -> Decay {
        if x == f64::INFINITY {
            Decay::Infinite
        } else {
            Decay::Power(x)
        }
    }
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Power(a) => write!(f, "{a}"),
            Decay::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Decay {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Decay::Infinite),
            other => other
                .parse::<f64>()
                .map(Decay::from_f64)
                .map_err(|_| format!("expected a number or \"inf\", got {s:?}")),
        }
    }
}

impl Serialize for Decay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Decay::Power(a) => s.serialize_f64(*a),
            Decay::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Decay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Decay::from_f64(x)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which chain. Range and hopping decay only exist for the second variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Variant {
    /// Nearest-neighbour hopping, pairing over all ranges.
    LongRangePairing,
    /// Pairing and hopping up to range `r`.
    LongRangePairingHopping { beta: Decay, r: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub variant: Variant,
    #[serde(rename = "J")]
    pub j: f64,
    pub delta: f64,
    pub mu: f64,
    pub alpha: Decay,
}

impl ModelSpec {
    pub fn long_range_pairing(j: f64, delta: f64, mu: f64, alpha: Decay) -> Self {
        ModelSpec { variant: Variant::LongRangePairing, j, delta, mu, alpha }
    }

    pub fn long_range_pairing_hopping(j: f64, delta: f64, mu: f64, alpha: Decay, beta: Decay, r: usize) -> Self {
        ModelSpec { variant: Variant::LongRangePairingHopping { beta, r }, j, delta, mu, alpha }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("J", self.j), ("delta", self.delta), ("mu", self.mu)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite")));
            }
        }
        check_decay("alpha", self.alpha)?;
        if let Variant::LongRangePairingHopping { beta, r } = self.variant {
            check_decay("beta", beta)?;
            if r == 0 {
                return Err(Error::InvalidSpec("r must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Longest bond range present on a chain of `n` sites.
    pub fn range(&self, n: usize) -> usize {
        match self.variant {
            Variant::LongRangePairing => match self.alpha {
                Decay::Infinite => 1,
                Decay::Power(_) => n.saturating_sub(1).max(1),
            },
            Variant::LongRangePairingHopping { r, .. } => r,
        }
    }

    pub fn with_param(mut self, param: Param, value: f64) -> Self {
        match param {
            Param::Mu => self.mu = value,
            Param::Delta => self.delta = value,
            Param::J => self.j = value,
        }
        self
    }
}

fn check_decay(name: &str, d: Decay) -> Result<()> {
    match d {
        Decay::Power(a) if !(a >= 0.0) => Err(Error::InvalidSpec(format!("{name} must be nonnegative"))),
        _ => Ok(()),
    }
}

/// Sweepable model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Mu,
    Delta,
    J,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Mu => "mu",
            Param::Delta => "delta",
            Param::J => "J",
        }
    }
}

impl std::str::FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(Param::Mu),
            "delta" => Ok(Param::Delta),
            "j" => Ok(Param::J),
            _ => Err(format!("unknown parameter {s:?} (expected mu, delta or J)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Open,
    AntiperiodicClosed,
}

/// Antiperiodic momentum grid, sorted ascending in `(−π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub n: usize,
    pub points: Vec<f64>,
}

impl MomentumGrid {
    /// Requires even `n` so that no point lands on `±π`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidSpec(format!("grid size N must be even and >= 2, got {n}")));
        }
        let h = 2.0 * PI / n as f64;
        let points = (0..n).map(|m| -PI + h * (m as f64 + 0.5)).collect();
        Ok(MomentumGrid { n, points })
    }

    /// Index of `−k` for the point at index `m`.
    pub fn mirror(&self, m: usize) -> usize {
        self.n - 1 - m
    }
}

/// Solution at one momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeData {
    pub k: f64,
    /// Quasiparticle energy `sqrt(ξ² + D²)`.
    pub epsilon: f64,
    pub hy: f64,
    pub hz: f64,
    pub theta: f64,
    /// Set when the Anderson vector vanishes at this `k`.
    pub gapless: bool,
}

impl ModeData {
    fn from_pair(k: f64, xi: f64, d: f64) -> Self {
        let epsilon = xi.hypot(d);
        if xi.abs() < ZERO_VECTOR_TOL && d.abs() < ZERO_VECTOR_TOL {
            return ModeData { k, epsilon, hy: 0.0, hz: 0.0, theta: 0.0, gapless: true };
        }
        ModeData { k, epsilon, hy: -d / epsilon, hz: -xi / epsilon, theta: 0.5 * d.atan2(xi), gapless: false }
    }
}

/// Normal (`ξ`) and anomalous (`D`) parts of the Bogoliubov block at `k`.
pub fn pair_components(spec: &ModelSpec, k: f64, n: usize) -> (f64, f64) {
    match spec.variant {
        Variant::LongRangePairing => {
            let xi = spec.j * k.cos() + spec.mu;
            (xi, 0.5 * spec.delta * pairing_sum(spec.alpha, k, n))
        }
        Variant::LongRangePairingHopping { beta, r } => {
            let (mut c, mut s) = (0.0, 0.0);
            for l in 1..=r {
                let d = l.min(n - l);
                let kl = k * l as f64;
                c += kl.cos() * beta.weight(d);
                s += kl.sin() * spec.alpha.weight(d);
            }
            (spec.mu + 2.0 * spec.j * c, 2.0 * spec.delta * s)
        }
    }
}

/// `f_α(k) = Σ_{l=1}^{N−1} sin(kl) / d_l^α` with `d_l = min(l, N−l)`, folded onto `l ≤ N/2`.
pub fn pairing_sum(alpha: Decay, k: f64, n: usize) -> f64 {
    let mut f = 0.0;
    let half = n / 2;
    let upper = if n % 2 == 0 { half } else { half + 1 };
    for l in 1..upper {
        let w = alpha.weight(l);
        if w == 0.0 {
            break;
        }
        f += 2.0 * w * (k * l as f64).sin();
    }
    if n % 2 == 0 {
        f += alpha.weight(half) * (k * half as f64).sin();
    }
    f
}

/// `f_α` on every point of the antiperiodic grid in O(N log N).
fn pairing_sum_grid(alpha: Decay, grid: &MomentumGrid) -> Vec<f64> {
    let n = grid.n;
    if let Decay::Infinite = alpha {
        return grid.points.iter().map(|&k| pairing_sum(alpha, k, n)).collect();
    }
    // e^{i k_m l} = (−1)^l e^{iπl/N} e^{2πi m l / N}
    let mut buf: Vec<Complex64> = (0..n)
        .map(|l| {
            if l == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let w = alpha.weight(l.min(n - l));
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(sign * w, PI * l as f64 / n as f64)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.im).collect()
}

/// Mode data at one momentum of a chain of `n` sites.
pub fn dispersion(spec: &ModelSpec, k: f64, n: usize) -> Result<ModeData> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidSpec("N must be at least 2".into()));
    }
    if let Variant::LongRangePairingHopping { r, .. } = spec.variant {
        if n <= 2 * r {
            return Err(Error::InvalidSpec(format!("N = {n} must exceed 2r = {}", 2 * r)));
        }
    }
    let (xi, d) = pair_components(spec, k, n);
    let mode = ModeData::from_pair(k, xi, d);
    if mode.gapless {
        return Err(Error::ZeroVector { k });
    }
    Ok(mode)
}

/// Mode data on the full antiperiodic grid, ordered by `k`.
pub fn solve_chain(spec: &ModelSpec, n: usize) -> Result<Vec<ModeData>> {
    spec.validate()?;
    let grid = MomentumGrid::new(n)?;
    solve_on_grid(spec, &grid)
}

pub fn solve_on_grid(spec: &ModelSpec, grid: &MomentumGrid) -> Result<Vec<ModeData>> {
    let n = grid.n;
    let pts = &grid.points;
    let pairs: Vec<(f64, f64)> = match spec.variant {
        Variant::LongRangePairing => {
            let f = pairing_sum_grid(spec.alpha, grid);
            pts.iter().zip(&f).map(|(&k, &f)| (spec.j * k.cos() + spec.mu, 0.5 * spec.delta * f)).collect()
        }
        Variant::LongRangePairingHopping { r, .. } => {
            if n <= 2 * r {
                return Err(Error::InvalidSpec(format!("N = {n} must exceed 2r = {}", 2 * r)));
            }
            pts.iter().map(|&k| pair_components(spec, k, n)).collect()
        }
    };
    Ok(pts.iter().zip(pairs).map(|(&k, (xi, d))| ModeData::from_pair(k, xi, d)).collect())
}

/// Ground-state energy `−½ Σ_k ε_k` of the antiperiodic chain.
pub fn ground_energy(modes: &[ModeData]) -> f64 {
    -0.5 * modes.iter().map(|m| m.epsilon).sum::<f64>()
}

/// One quadratic bond `P (c_i c_j + h.c.) − t (c_i† c_j + h.c.)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub pairing: f64,
    pub hopping: f64,
}

/// Real-space bond list. Closed chains fold `c_{N+m} = −c_m` into the sign of the bond.
pub fn bonds(spec: &ModelSpec, n: usize, boundary: Boundary) -> Result<Vec<Bond>> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidSpec("N must be at least 2".into()));
    }
    let closed = boundary == Boundary::AntiperiodicClosed;
    let dist = |l: usize| if closed { l.min(n - l) } else { l };
    let mut raw: Vec<(usize, usize, f64, f64)> = Vec::new();
    match spec.variant {
        Variant::LongRangePairing => {
            for i in 0..n {
                if closed || i + 1 < n {
                    raw.push((i, i + 1, 0.0, 0.5 * spec.j));
                }
            }
            // closed: every ordered pair (j, j+l), l = 1..N−1, counts each bond twice
            let scale = if closed { 0.25 } else { 0.5 };
            for l in 1..n {
                let w = spec.alpha.weight(dist(l));
                if w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    if closed || i + l < n {
                        raw.push((i, i + l, scale * spec.delta * w, 0.0));
                    }
                }
            }
        }
        Variant::LongRangePairingHopping { beta, r } => {
            if closed && n <= 2 * r {
                return Err(Error::InvalidSpec(format!("N = {n} must exceed 2r = {}", 2 * r)));
            }
            for l in 1..=r.min(n - 1) {
                let (pw, hw) = (spec.alpha.weight(dist(l)), beta.weight(dist(l)));
                for i in 0..n {
                    if closed || i + l < n {
                        raw.push((i, i + l, spec.delta * pw, spec.j * hw));
                    }
                }
            }
        }
    }
    Ok(raw
        .into_iter()
        .filter(|&(_, _, p, t)| p != 0.0 || t != 0.0)
        .map(|(i, j, p, t)| {
            if j >= n {
                Bond { i, j: j - n, pairing: -p, hopping: -t }
            } else {
                Bond { i, j, pairing: p, hopping: t }
            }
        })
        .collect())
}

/// Couplings of the equivalent open spin chain
///
/// ```text
/// H = Σ_l Σ_j [Jx_l σx_j Z…Z σx_{j+l} + Jy_l σy_j Z…Z σy_{j+l}] + (μ/2) Σ_j σz_j
/// ```
///
/// with `Jx_l = −(t_l + P_l)/2`, `Jy_l = −(t_l − P_l)/2` and `Z…Z` the string of
/// `σz` strictly between the two sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinCouplings {
    /// `jx[l − 1]` couples sites `l` apart.
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub mu: f64,
}

/// Spin couplings up to range `max_range` (variant 2 stops at `r`).
pub fn spin_couplings(spec: &ModelSpec, max_range: usize) -> SpinCouplings {
    let (mut jx, mut jy) = (Vec::new(), Vec::new());
    let range = match spec.variant {
        Variant::LongRangePairing => max_range,
        Variant::LongRangePairingHopping { r, .. } => r.min(max_range),
    };
    for l in 1..=range {
        let (t, p) = match spec.variant {
            Variant::LongRangePairing => {
                let t = if l == 1 { 0.5 * spec.j } else { 0.0 };
                (t, 0.5 * spec.delta * spec.alpha.weight(l))
            }
            Variant::LongRangePairingHopping { beta, .. } => {
                (spec.j * beta.weight(l), spec.delta * spec.alpha.weight(l))
            }
        };
        jx.push(-(t + p) / 2.0);
        jy.push(-(t - p) / 2.0);
    }
    SpinCouplings { jx, jy, mu: spec.mu }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1(delta: f64, mu: f64, alpha: Decay) -> ModelSpec {
        ModelSpec::long_range_pairing(1.0, delta, mu, alpha)
    }

    #[test]
    fn grid_n4() {
        let g = MomentumGrid::new(4).unwrap();
        let want = [-3.0 * PI / 4.0, -PI / 4.0, PI / 4.0, 3.0 * PI / 4.0];
        for (a, b) in g.points.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(MomentumGrid::new(5).is_err());
    }

    #[test]
    fn infinite_alpha_single_term() {
        for &k in &[0.3, -1.1, 2.9] {
            assert_eq!(pairing_sum(Decay::Infinite, k, 100), 2.0 * k.sin());
            assert_eq!(pairing_sum(Decay::Infinite, k, 2), k.sin());
        }
    }

    #[test]
    fn fft_matches_direct_sum() {
        for &a in &[0.0, 0.7, 1.5, 3.0] {
            let g = MomentumGrid::new(64).unwrap();
            let fast = pairing_sum_grid(Decay::Power(a), &g);
            for (m, &k) in g.points.iter().enumerate() {
                let literal: f64 = (1..64).map(|l| (k * l as f64).sin() / (l.min(64 - l) as f64).powf(a)).sum();
                assert!((fast[m] - literal).abs() < 1e-11, "a={a} m={m}");
                assert!((pairing_sum(Decay::Power(a), k, 64) - literal).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn large_mu_gives_zero_angle() {
        let modes = solve_chain(&v1(1.0, 1e6, Decay::Infinite), 64).unwrap();
        assert!(modes.iter().all(|m| m.theta.abs() < 1e-6));
    }

    #[test]
    fn gapless_at_pi_flagged() {
        let spec = v1(0.0, 1.0, Decay::Infinite);
        assert!(matches!(dispersion(&spec, PI, 10), Err(Error::ZeroVector { .. })));
        // the antiperiodic grid never hits k = π, so only the exact evaluation fails
        let modes = solve_chain(&spec, 10).unwrap();
        assert!(modes.iter().all(|m| m.hy == 0.0));
    }

    #[test]
    fn trivial_phase_is_gapped() {
        let spec = v1(-1.0, -1.5, Decay::Infinite);
        for n in [10, 100, 1000] {
            let modes = solve_chain(&spec, n).unwrap();
            let gap = modes.iter().map(|m| m.epsilon).fold(f64::INFINITY, f64::min);
            assert!(gap > 0.4);
        }
    }

    #[test]
    fn spin_coupling_identities() {
        let spec = ModelSpec::long_range_pairing_hopping(-0.8, 1.0, -0.6, Decay::Power(0.2), Decay::Power(0.2), 3);
        let c = spin_couplings(&spec, 10);
        assert_eq!(c.jx.len(), 3);
        for l in 1..=3 {
            let w = (l as f64).powf(-0.2);
            assert!((c.jx[l - 1] + c.jy[l - 1] + 0.8 * -w).abs() < 1e-15);
            assert!((c.jx[l - 1] - c.jy[l - 1] + w).abs() < 1e-15);
        }
        let c0 = spin_couplings(&v1(0.0, 0.4, Decay::Power(0.0)), 5);
        assert!(c0.jx[1..].iter().chain(&c0.jy[1..]).all(|&x| x == 0.0));
    }

    #[test]
    fn decay_parses() {
        assert_eq!("inf".parse::<Decay>().unwrap(), Decay::Infinite);
        assert_eq!("0.5".parse::<Decay>().unwrap(), Decay::Power(0.5));
        let d: Decay = serde_json_like("\"inf\"");
        assert_eq!(d, Decay::Infinite);
    }

    fn serde_json_like(s: &str) -> Decay {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn closed_bonds_wrap_with_sign() {
        let spec = v1(1.0, 0.0, Decay::Infinite);
        let b = bonds(&spec, 4, Boundary::AntiperiodicClosed).unwrap();
        let wrapped: Vec<_> = b.iter().filter(|b| b.i == 3 && b.j == 0).collect();
        assert!(wrapped.iter().all(|b| b.pairing <= 0.0 && b.hopping <= 0.0));
        assert!(!wrapped.is_empty());
    }
}
