//! Flat JSON run configuration, flag overrides, and validation into a fully resolved form.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use kitaev_de::analysis::DEFAULT_KAPPA;
use kitaev_de::entropy::MAX_BLOCK;
use kitaev_de::gaussian::INFINITE_CHAIN_N;
use kitaev_de::majorana::DEFAULT_TOL;
use kitaev_de::topology::DEFAULT_SAMPLES;
use kitaev_de::{Basis, Channel, Decay, ModelSpec, Param};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Winding,
    Trajectory,
    Mzm,
    DePure,
    DeBlock,
    Ge,
    FitVolume,
    FitBlock,
    Sweep,
    CriticalScan,
    Compare,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Winding => "winding",
            Task::Trajectory => "trajectory",
            Task::Mzm => "mzm",
            Task::DePure => "de-pure",
            Task::DeBlock => "de-block",
            Task::Ge => "ge",
            Task::FitVolume => "fit-volume",
            Task::FitBlock => "fit-block",
            Task::Sweep => "sweep",
            Task::CriticalScan => "critical-scan",
            Task::Compare => "compare",
        }
    }

    fn is_scan(self) -> bool {
        matches!(self, Task::Sweep | Task::CriticalScan | Task::Compare)
    }
}

/// Validation failure that names the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a config file may contain. Every key is optional here; requirements depend on the task.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    /// long-range-pairing (or 1) / long-range-pairing-hopping (or 2)
    #[arg(long)]
    pub variant: Option<String>,
    #[serde(rename = "J", alias = "j")]
    #[arg(long = "j", allow_negative_numbers = true)]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Number or "inf".
    #[arg(long)]
    pub alpha: Option<Decay>,
    #[arg(long)]
    pub beta: Option<Decay>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Chain lengths for fit-volume.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub l_min: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub basis: Option<String>,
    /// Swept parameter: mu, delta or J.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Second swept parameter (sweep only).
    #[arg(long)]
    pub y_param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_stop: Option<f64>,
    #[arg(long)]
    pub y_step: Option<f64>,
    /// Comma-separated subset of s, a, b, c, E, nu.
    #[arg(long, value_delimiter = ',')]
    pub channels: Option<Vec<String>>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Momentum samples for winding numbers and trajectories.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Momentum grid standing in for the infinite chain.
    #[arg(long)]
    pub kernel_n: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),+) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )+
    };
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            // serde names unknown or mistyped keys in backticks
            let field = msg.split('`').nth(1).unwrap_or("config").to_string();
            ConfigError::new(field, msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Values in `top` win.
    pub fn overlay(mut self, top: &RawConfig) -> Self {
        overlay!(
            self, top, task, variant, j, delta, mu, alpha, beta, r, n, sizes, l_min, l_max, basis, param, start, stop,
            step, y_param, y_start, y_stop, y_step, channels, kappa, tol, samples, kernel_n, threads, out
        );
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// The resolved configuration, with every default written out. Echoed in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    #[serde(flatten)]
    pub spec: ModelSpec,
    pub n: usize,
    pub sizes: Vec<usize>,
    pub l_min: usize,
    pub l_max: usize,
    pub basis: Basis,
    pub grid: Option<Grid>,
    pub y_grid: Option<Grid>,
    pub channels: Vec<String>,
    pub kappa: f64,
    pub tol: f64,
    pub samples: usize,
    pub kernel_n: usize,
    pub threads: usize,
    pub out: PathBuf,
}

fn required<T: Clone>(v: &Option<T>, field: &str, task: Task) -> Result<T, ConfigError> {
    v.clone().ok_or_else(|| ConfigError::new(field, format!("required for task {}", task.name())))
}

fn parse<T: FromStr<Err = String>>(v: &str, field: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|e: String| ConfigError::new(field, e))
}

fn positive(v: f64, field: &str) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be a positive finite number, got {v}")))
    }
}

fn even_grid(n: usize, field: &str) -> Result<usize, ConfigError> {
    if n >= 2 && n % 2 == 0 {
        Ok(n)
    } else {
        Err(ConfigError::new(field, format!("must be even and at least 2, got {n}")))
    }
}

fn grid(
    task: Task,
    param: &Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    names: [&str; 4],
) -> Result<Grid, ConfigError> {
    let param = match param {
        Some(p) => parse(p, names[0])?,
        None => Param::Mu,
    };
    let start = required(&start, names[1], task)?;
    let stop = required(&stop, names[2], task)?;
    let step = positive(step.unwrap_or(0.01), names[3])?;
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(ConfigError::new(names[2], format!("must be finite and not below {} ({start})", names[1])));
    }
    if (stop - start) / step > 1e6 {
        return Err(ConfigError::new(names[3], "grid would exceed a million points"));
    }
    Ok(Grid { param, start, stop, step })
}

fn set_param(spec_mu: &mut Option<f64>, spec_delta: &mut Option<f64>, spec_j: &mut Option<f64>, g: &Grid) {
    let slot = match g.param {
        Param::Mu => spec_mu,
        Param::Delta => spec_delta,
        Param::J => spec_j,
    };
    slot.get_or_insert(g.start);
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig, env_threads: Option<&str>) -> Result<RunConfig, ConfigError> {
        let task = raw.task.ok_or_else(|| ConfigError::new("task", "missing; pass --task or set it in the config"))?;

        let (grid_x, grid_y) = if task.is_scan() {
            let x = grid(task, &raw.param, raw.start, raw.stop, raw.step, ["param", "start", "stop", "step"])?;
            let y = if raw.y_param.is_some() || raw.y_start.is_some() || raw.y_stop.is_some() {
                if task != Task::Sweep {
                    return Err(ConfigError::new("y_param", "a second axis is only supported by task sweep"));
                }
                let y = grid(
                    task,
                    &raw.y_param,
                    raw.y_start,
                    raw.y_stop,
                    raw.y_step,
                    ["y_param", "y_start", "y_stop", "y_step"],
                )?;
                if y.param == x.param {
                    return Err(ConfigError::new("y_param", "must differ from param"));
                }
                Some(y)
            } else {
                None
            };
            (Some(x), y)
        } else {
            (None, None)
        };

        // swept parameters need no fixed value
        let (mut mu, mut delta, mut j) = (raw.mu, raw.delta, raw.j);
        for g in grid_x.iter().chain(grid_y.iter()) {
            set_param(&mut mu, &mut delta, &mut j, g);
        }

        let variant = required(&raw.variant, "variant", task)?;
        let j = required(&j, "J", task)?;
        let delta = required(&delta, "delta", task)?;
        let mu = required(&mu, "mu", task)?;
        let alpha = required(&raw.alpha, "alpha", task)?;
        let spec = match variant.to_ascii_lowercase().as_str() {
            "long-range-pairing" | "1" | "v1" => {
                for (name, present) in [("beta", raw.beta.is_some()), ("r", raw.r.is_some())] {
                    if present {
                        log::warn!("{name} is ignored by variant long-range-pairing");
                    }
                }
                ModelSpec::long_range_pairing(j, delta, mu, alpha)
            }
            "long-range-pairing-hopping" | "2" | "v2" => {
                let beta = required(&raw.beta, "beta", task)?;
                let r = required(&raw.r, "r", task)?;
                ModelSpec::long_range_pairing_hopping(j, delta, mu, alpha, beta, r)
            }
            other => {
                return Err(ConfigError::new(
                    "variant",
                    format!("unknown variant {other:?} (expected long-range-pairing or long-range-pairing-hopping)"),
                ))
            }
        };
        if let Err(kitaev_de::Error::InvalidSpec(msg)) = spec.validate() {
            // messages lead with the field name
            let field = msg.split_whitespace().next().unwrap_or("variant").to_string();
            return Err(ConfigError::new(field, msg));
        }

        let n_default = if task == Task::Mzm { 100 } else { 2000 };
        let n = even_grid(raw.n.unwrap_or(n_default), "n")?;
        if let kitaev_de::Variant::LongRangePairingHopping { r, .. } = spec.variant {
            if n <= 2 * r {
                return Err(ConfigError::new("n", format!("must exceed 2r = {}", 2 * r)));
            }
        }
        let sizes = raw.sizes.clone().unwrap_or_else(|| (1..=10).map(|i| 200 * i).collect());
        if task == Task::FitVolume {
            if sizes.is_empty() {
                return Err(ConfigError::new("sizes", "must not be empty"));
            }
            for &s in &sizes {
                even_grid(s, "sizes")?;
            }
        }

        let l_min = raw.l_min.unwrap_or(4);
        let l_max = raw.l_max.unwrap_or(14);
        if l_min < 1 {
            return Err(ConfigError::new("l_min", "must be at least 1"));
        }
        if l_max < l_min || l_max > MAX_BLOCK {
            return Err(ConfigError::new("l_max", format!("must lie in [l_min, {MAX_BLOCK}], got {l_max}")));
        }
        let basis: Basis = match &raw.basis {
            Some(b) => parse(b, "basis")?,
            None => Basis::Z,
        };

        let default_channels: &[&str] = match task {
            Task::Sweep => &["s", "nu"],
            Task::CriticalScan => &["s"],
            Task::Compare => &["s", "a", "E", "nu"],
            _ => &[],
        };
        let channels: Vec<String> = match &raw.channels {
            Some(c) => c.clone(),
            None => default_channels.iter().map(|s| s.to_string()).collect(),
        };
        if task.is_scan() {
            if channels.is_empty() {
                return Err(ConfigError::new("channels", "must name at least one channel"));
            }
            let mut seen = Vec::new();
            for c in &channels {
                let ch: Channel = parse(c, "channels")?;
                if seen.contains(&ch) {
                    return Err(ConfigError::new("channels", format!("{c:?} listed twice")));
                }
                seen.push(ch);
            }
            if task == Task::CriticalScan && (seen.len() != 1 || seen[0] == Channel::Nu) {
                return Err(ConfigError::new("channels", "critical-scan takes exactly one of s, a, b, c, E"));
            }
        }
        let channels = channels
            .iter()
            .map(|c| parse::<Channel>(c, "channels").map(|ch| ch.name().to_string()))
            .collect::<Result<_, _>>()?;

        let kappa = positive(raw.kappa.unwrap_or(DEFAULT_KAPPA), "kappa")?;
        let tol = positive(raw.tol.unwrap_or(DEFAULT_TOL), "tol")?;
        let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 256 || samples % 2 != 0 {
            return Err(ConfigError::new("samples", format!("must be even and at least 256, got {samples}")));
        }
        let kernel_n = even_grid(raw.kernel_n.unwrap_or(INFINITE_CHAIN_N), "kernel_n")?;
        if 4 * l_max >= kernel_n {
            return Err(ConfigError::new("kernel_n", format!("must exceed 4 l_max = {}", 4 * l_max)));
        }

        let threads = match raw.threads {
            Some(t) => t,
            None => match env_threads {
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::new("threads", format!("KITAEV_DE_THREADS={v:?} is not a count")))?,
                None => 0,
            },
        };
        let out = raw.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", task.name())));

        Ok(RunConfig {
            task,
            spec,
            n,
            sizes,
            l_min,
            l_max,
            basis,
            grid: grid_x,
            y_grid: grid_y,
            channels,
            kappa,
            tol,
            samples,
            kernel_n,
            threads,
            out,
        })
    }

    pub fn channel_list(&self) -> Vec<Channel> {
        self.channels.iter().map(|c| c.parse().expect("validated")).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        (self.l_min..=self.l_max).collect()
    }
}
