//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! Every setting has one key. Flags use the same names with `-` for `_`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nsse_core::model::{Front, WavePacket};
use nsse_core::observables::Normalization;
use nsse_core::quad::QuadSpec;
use nsse_core::units::{to_internal_with, AtomParams, LifetimeConvention, UnitSystem};

/// A rejected setting, named by its key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{key}: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

fn err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Front velocity in units of v_recoil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    Finite(f64),
    /// Simultaneous switch-on everywhere.
    Infinite,
}

impl Velocity {
    pub fn front(self, units: &UnitSystem) -> nsse_core::Result<Front> {
        match self {
            Self::Finite(v) => Front::new(units.velocity_to_internal(v)),
            Self::Infinite => Ok(Front::sse()),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl fmt::Display for Velocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

/// How the observation time of a single-time dataset is given.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSelection {
    /// Positions of the front edge [λ₀]; t = −z/v.
    Edge(Vec<f64>),
    /// Times [τ_natural].
    Time(Vec<f64>),
}

/// A single observation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instant {
    Edge(f64),
    Time(f64),
}

impl Instant {
    /// Time in τ_natural for a front moving at `v`.
    pub fn t_tau_nat(self, v: Velocity, units: &UnitSystem) -> f64 {
        match (self, v) {
            (Self::Time(t), _) => t,
            (Self::Edge(z), Velocity::Finite(v)) => {
                units.time_from_internal(-z / units.velocity_to_internal(v))
            }
            // Rejected by validation.
            (Self::Edge(_), Velocity::Infinite) => f64::NAN,
        }
    }
}

/// Quadrature preset before per-key overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    #[default]
    Default,
    Relaxed,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Self::Default => "default",
            Self::Relaxed => "relaxed",
        }
    }
}

/// Every tunable of a run. Units: SI for the atom, λ₀ for lengths, v_recoil
/// for velocities, τ_natural for times, γ for detunings, degrees for angles.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub atom: AtomParams,
    pub packet_width: f64,
    pub lifetime: LifetimeConvention,
    pub velocities: Vec<Velocity>,
    pub theta_deg: f64,
    pub time: TimeSelection,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub normalize: Normalization,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub theta_points: usize,
    pub preset: Preset,
    pub hermite_order: Option<usize>,
    pub z_rel_tol: Option<f64>,
    pub omega_rel_tol: Option<f64>,
    pub z_window_sigmas: Option<f64>,
    pub omega_window_gammas: Option<f64>,
    pub z_cap_widths: Option<f64>,
    pub max_intervals: Option<usize>,
    pub out: Option<PathBuf>,
}

/// All keys, in the order they are written to dataset headers.
pub const KEYS: &[&str] = &[
    "gamma",
    "lambda0",
    "v_recoil",
    "omega_recoil",
    "packet_width",
    "lifetime",
    "v",
    "theta",
    "edge_z",
    "t",
    "omega_min",
    "omega_max",
    "points",
    "normalize",
    "t_min",
    "t_max",
    "t_points",
    "theta_points",
    "preset",
    "hermite_order",
    "z_rel_tol",
    "omega_rel_tol",
    "z_window_sigmas",
    "omega_window_gammas",
    "z_cap_widths",
    "max_intervals",
    "out",
];

/// Which command the defaults are for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Sse,
    Angular,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Sse => "sse",
            Self::Angular => "angular",
        }
    }
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let (velocities, time) = match command {
            Command::Spectrum => (
                vec![Velocity::Finite(10.0), Velocity::Finite(1.0)],
                TimeSelection::Edge(vec![0.5, 0.0, -0.5]),
            ),
            Command::Sse => (vec![Velocity::Infinite], TimeSelection::Time(vec![5.0])),
            Command::Angular => (vec![Velocity::Finite(1.0)], TimeSelection::Time(Vec::new())),
        };
        Self {
            atom: AtomParams::hydrogen_lyman_alpha(),
            packet_width: 1.0,
            lifetime: LifetimeConvention::Population,
            velocities,
            theta_deg: 0.0,
            time,
            omega_min: -15.0,
            omega_max: 15.0,
            points: 601,
            normalize: Normalization::Peak,
            t_min: -50.0,
            t_max: 40.0,
            t_points: 91,
            theta_points: 61,
            preset: Preset::Default,
            hermite_order: None,
            z_rel_tol: None,
            omega_rel_tol: None,
            z_window_sigmas: None,
            omega_window_gammas: None,
            z_cap_widths: None,
            max_intervals: None,
            out: None,
        }
    }

    /// Applies one layer of settings (a file, or the flags). Within a layer
    /// `edge_z` and `t` exclude each other; across layers the later one wins.
    pub fn apply(&mut self, layer: &[(String, String)]) -> Result<(), ConfigError> {
        let has = |k: &str| layer.iter().any(|(key, _)| key == k);
        if has("edge_z") && has("t") {
            return Err(err("t", "cannot be combined with edge_z"));
        }
        for (key, value) in layer {
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "gamma" => self.atom.gamma = positive(key, value)?,
            "lambda0" => self.atom.lambda0 = positive(key, value)?,
            "v_recoil" => self.atom.v_recoil = positive(key, value)?,
            "omega_recoil" => self.atom.omega_recoil = positive(key, value)?,
            "packet_width" => self.packet_width = positive(key, value)?,
            "lifetime" => self.lifetime = value.parse().map_err(|e: String| err(key, e))?,
            "v" => self.velocities = list(key, value, velocity)?,
            "theta" => {
                let th = float(key, value)?;
                if !(0.0..=180.0).contains(&th) {
                    return Err(err(key, format!("must lie in [0, 180] degrees, got {th}")));
                }
                self.theta_deg = th;
            }
            "edge_z" => self.time = TimeSelection::Edge(list(key, value, float)?),
            "t" => self.time = TimeSelection::Time(list(key, value, float)?),
            "omega_min" => self.omega_min = float(key, value)?,
            "omega_max" => self.omega_max = float(key, value)?,
            "points" => self.points = count(key, value, 2)?,
            "normalize" => {
                self.normalize = value.parse().map_err(|e: nsse_core::Error| err(key, e.to_string()))?
            }
            "t_min" => self.t_min = float(key, value)?,
            "t_max" => self.t_max = float(key, value)?,
            "t_points" => self.t_points = count(key, value, 1)?,
            "theta_points" => self.theta_points = count(key, value, 2)?,
            "preset" => {
                self.preset = match value {
                    "default" => Preset::Default,
                    "relaxed" => Preset::Relaxed,
                    other => {
                        return Err(err(key, format!("expected default or relaxed, got `{other}`")))
                    }
                }
            }
            "hermite_order" => self.hermite_order = Some(count(key, value, 1)?),
            "z_rel_tol" => self.z_rel_tol = Some(positive(key, value)?),
            "omega_rel_tol" => self.omega_rel_tol = Some(positive(key, value)?),
            "z_window_sigmas" => self.z_window_sigmas = Some(positive(key, value)?),
            "omega_window_gammas" => self.omega_window_gammas = Some(positive(key, value)?),
            "z_cap_widths" => self.z_cap_widths = Some(positive(key, value)?),
            "max_intervals" => self.max_intervals = Some(count(key, value, 1)?),
            "out" => {
                if value.is_empty() {
                    return Err(err(key, "empty path"));
                }
                self.out = Some(PathBuf::from(value))
            }
            _ => return Err(err(key, "unknown key")),
        }
        Ok(())
    }

    /// Cross-key checks for `command`.
    pub fn validate(&self, command: Command) -> Result<(), ConfigError> {
        self.atom
            .validate()
            .map_err(|e| core_err(e, "omega_recoil"))?;
        if self.velocities.is_empty() {
            return Err(err("v", "at least one velocity is required"));
        }
        match (&self.time, command) {
            (TimeSelection::Edge(z), _) => {
                if z.is_empty() {
                    return Err(err("edge_z", "at least one position is required"));
                }
                if self.velocities.iter().any(|v| v.is_infinite()) {
                    return Err(err("edge_z", "undefined for v = inf; give t instead"));
                }
                if command == Command::Sse {
                    return Err(err("edge_z", "the sse command takes t"));
                }
            }
            (TimeSelection::Time(t), Command::Spectrum | Command::Sse) if t.is_empty() => {
                return Err(err("t", "at least one time is required"));
            }
            (TimeSelection::Time(t), Command::Sse) => {
                if let Some(bad) = t.iter().find(|t| !(**t > 0.0)) {
                    return Err(err("t", format!("must be > 0 for the sse command, got {bad}")));
                }
            }
            _ => {}
        }
        if !(self.omega_max > self.omega_min) {
            return Err(err(
                "omega_max",
                format!("must exceed omega_min ({} ≤ {})", self.omega_max, self.omega_min),
            ));
        }
        if !(self.t_max >= self.t_min) {
            return Err(err("t_max", "must not be below t_min"));
        }
        self.quad_spec().validate().map_err(|e| core_err(e, "preset"))?;
        Ok(())
    }

    pub fn quad_spec(&self) -> QuadSpec {
        let base = match self.preset {
            Preset::Default => QuadSpec::default(),
            Preset::Relaxed => QuadSpec::relaxed(),
        };
        QuadSpec {
            hermite_order: self.hermite_order.unwrap_or(base.hermite_order),
            z_rel_tol: self.z_rel_tol.unwrap_or(base.z_rel_tol),
            omega_rel_tol: self.omega_rel_tol.unwrap_or(base.omega_rel_tol),
            z_window_sigmas: self.z_window_sigmas.unwrap_or(base.z_window_sigmas),
            omega_window_gammas: self.omega_window_gammas.unwrap_or(base.omega_window_gammas),
            z_cap_widths: self.z_cap_widths.unwrap_or(base.z_cap_widths),
            max_intervals: self.max_intervals.unwrap_or(base.max_intervals),
        }
    }

    pub fn units(&self) -> nsse_core::Result<UnitSystem> {
        to_internal_with(&self.atom, self.packet_width * self.atom.lambda0, self.lifetime)
    }

    pub fn packet(&self, units: &UnitSystem) -> WavePacket {
        WavePacket::from_units(units)
    }

    pub fn instants(&self) -> Vec<Instant> {
        match &self.time {
            TimeSelection::Edge(z) => z.iter().map(|&z| Instant::Edge(z)).collect(),
            TimeSelection::Time(t) => t.iter().map(|&t| Instant::Time(t)).collect(),
        }
    }

    /// Text form of `key`, as accepted by [`RunConfig::set`]; `None` for
    /// unset optional keys.
    pub fn get(&self, key: &str) -> Option<String> {
        let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let s = match key {
            "gamma" => self.atom.gamma.to_string(),
            "lambda0" => self.atom.lambda0.to_string(),
            "v_recoil" => self.atom.v_recoil.to_string(),
            "omega_recoil" => self.atom.omega_recoil.to_string(),
            "packet_width" => self.packet_width.to_string(),
            "lifetime" => self.lifetime.name().to_string(),
            "v" => self
                .velocities
                .iter()
                .map(Velocity::to_string)
                .collect::<Vec<_>>()
                .join(","),
            "theta" => self.theta_deg.to_string(),
            "edge_z" => match &self.time {
                TimeSelection::Edge(z) => join(z),
                TimeSelection::Time(_) => return None,
            },
            "t" => match &self.time {
                TimeSelection::Time(t) if !t.is_empty() => join(t),
                _ => return None,
            },
            "omega_min" => self.omega_min.to_string(),
            "omega_max" => self.omega_max.to_string(),
            "points" => self.points.to_string(),
            "normalize" => self.normalize.name().to_string(),
            "t_min" => self.t_min.to_string(),
            "t_max" => self.t_max.to_string(),
            "t_points" => self.t_points.to_string(),
            "theta_points" => self.theta_points.to_string(),
            "preset" => self.preset.name().to_string(),
            "hermite_order" => self.hermite_order?.to_string(),
            "z_rel_tol" => self.z_rel_tol?.to_string(),
            "omega_rel_tol" => self.omega_rel_tol?.to_string(),
            "z_window_sigmas" => self.z_window_sigmas?.to_string(),
            "omega_window_gammas" => self.omega_window_gammas?.to_string(),
            "z_cap_widths" => self.z_cap_widths?.to_string(),
            "max_intervals" => self.max_intervals?.to_string(),
            "out" => return None,
            _ => return None,
        };
        Some(s)
    }
}

fn core_err(e: nsse_core::Error, fallback: &str) -> ConfigError {
    match e {
        nsse_core::Error::InvalidParameter { name, reason } => err(name, reason),
        other => err(fallback, other.to_string()),
    }
}

fn float(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value
        .parse()
        .map_err(|_| err(key, format!("expected a number, got `{value}`")))?;
    if !x.is_finite() {
        return Err(err(key, format!("must be finite, got `{value}`")));
    }
    Ok(x)
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x = float(key, value)?;
    if x <= 0.0 {
        return Err(err(key, format!("must be > 0, got {x}")));
    }
    Ok(x)
}

fn count(key: &str, value: &str, min: usize) -> Result<usize, ConfigError> {
    let n: usize = value
        .parse()
        .map_err(|_| err(key, format!("expected a whole number, got `{value}`")))?;
    if n < min {
        return Err(err(key, format!("must be at least {min}, got {n}")));
    }
    Ok(n)
}

fn velocity(key: &str, value: &str) -> Result<Velocity, ConfigError> {
    if value.eq_ignore_ascii_case("inf") {
        return Ok(Velocity::Infinite);
    }
    Ok(Velocity::Finite(positive(key, value)?))
}

fn list<T>(
    key: &str,
    value: &str,
    item: fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|s| item(key, s.trim()))
        .collect()
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(err(
                &format!("line {}", n + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(err(k, "unknown key"));
        }
        if out.iter().any(|(key, _)| key == k) {
            return Err(err(k, "given more than once"));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| err("config", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
