//! Spectra and angular distributions in the form they are reported: grids,
//! normalizations and the reference curves they are compared against.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{delta_k, Front, ModeGeometry, WavePacket};
use crate::quad::{gauss_hermite, norms, p_theta, q_t_omega, QuadSpec};
use crate::units::UnitSystem;

/// How a spectrum is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Maximum over the grid is 1.
    #[default]
    Peak,
    /// Trapezoid integral over the grid is 1.
    Area,
    /// Probability density per unit γ, divided by ‖ψ_NS‖².
    Raw,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Self::Peak => "peak",
            Self::Area => "area",
            Self::Raw => "raw",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak" => Ok(Self::Peak),
            "area" => Ok(Self::Area),
            "raw" => Ok(Self::Raw),
            other => Err(invalid(
                "normalize",
                format!("expected peak, area or raw, got `{other}`"),
            )),
        }
    }
}

/// A spectrum on a detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDataset {
    /// ω_k − ω₀ [γ].
    pub detunings: Vec<f64>,
    pub values: Vec<f64>,
    /// Natural Lorentzian centred on the recoil-shifted line, normalized the
    /// same way as `values`.
    pub lorentzian: Vec<f64>,
    pub theta: f64,
    /// Time [1/γ].
    pub t: f64,
    /// Front velocity [λ₀γ]; infinite for simultaneous emission.
    pub velocity: f64,
    pub normalization: Normalization,
    /// ‖ψ_NS‖² used for raw output; `None` when it cancels.
    pub norm: Option<f64>,
}

/// Reduced angular distributions P_t(θ), one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularDataset {
    pub thetas: Vec<f64>,
    /// Times [1/γ].
    pub times: Vec<f64>,
    /// `values[i][j]` at `times[i]`, `thetas[j]`.
    pub values: Vec<Vec<f64>>,
    /// Rows divided by their θ-average (rows that are identically zero stay
    /// zero).
    pub mean_normalized: bool,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|j| if j + 1 == n { hi } else { lo + h * j as f64 })
                .collect()
        }
    }
}

/// 1 − cos²θ_pk: angular weight of a dipole at angle θ_pk to the photon.
pub fn dipole_factor(theta_pk: f64) -> f64 {
    let s = theta_pk.sin();
    s * s
}

/// Azimuth-integrated dipole weight 2π·sin²θ for a dipole along z.
pub fn dipole_factor_azimuthal(theta: f64) -> f64 {
    2.0 * PI * dipole_factor(theta)
}

fn normalize(values: &mut [f64], grid: &[f64], mode: Normalization, raw_scale: f64) {
    let scale = match mode {
        Normalization::Raw => raw_scale,
        Normalization::Peak => {
            let m = values.iter().cloned().fold(0.0, f64::max);
            if m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        }
        Normalization::Area => {
            let area = trapezoid(grid, values);
            if area > 0.0 {
                1.0 / area
            } else {
                1.0
            }
        }
    };
    for v in values.iter_mut() {
        *v *= scale;
    }
}

/// Trapezoid rule over a (not necessarily uniform) grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Full width at half maximum, by linear interpolation between grid points.
/// `None` if the half-maximum crossings are not both inside the grid.
pub fn fwhm(x: &[f64], y: &[f64]) -> Option<f64> {
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if ymax <= 0.0 {
        return None;
    }
    let half = 0.5 * ymax;
    let left = (1..=imax).rev().find(|&j| y[j - 1] < half).map(|j| {
        let f = (half - y[j - 1]) / (y[j] - y[j - 1]);
        x[j - 1] + f * (x[j] - x[j - 1])
    })?;
    let right = (imax..y.len() - 1).find(|&j| y[j + 1] < half).map(|j| {
        let f = (y[j] - half) / (y[j] - y[j + 1]);
        x[j] + f * (x[j + 1] - x[j])
    })?;
    Some(right - left)
}

/// 3/(8π²): spectral density per unit γ of one dipole-weighted direction,
/// for unit Lorentzian weight.
const SPECTRAL_CONSTANT: f64 = 3.0 / (8.0 * PI * PI);

fn lorentzian_column(units: &UnitSystem, detunings: &[f64], mode: Normalization) -> Vec<f64> {
    let mut l: Vec<f64> = detunings
        .iter()
        .map(|&d| {
            let x = delta_k(units, d);
            SPECTRAL_CONSTANT / (1.0 + x * x)
        })
        .collect();
    normalize(&mut l, detunings, mode, 1.0);
    l
}

/// Spectrum Q_t(ω_k) along θ for a moving front.
pub fn nsse_spectrum(
    units: &UnitSystem,
    theta: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
    detunings: &[f64],
    normalization: Normalization,
) -> Result<SpectrumDataset> {
    spec.validate()?;
    let modes = detunings
        .iter()
        .map(|&d| ModeGeometry::new(units, d, theta))
        .collect::<Result<Vec<_>>>()?;
    let mut values = modes
        .par_iter()
        .map(|m| q_t_omega(m, t, front, packet, spec))
        .collect::<Result<Vec<_>>>()?;
    let norm = match normalization {
        Normalization::Raw => Some(norms(units, t, front, packet, spec)?.total()),
        _ => None,
    };
    let raw_scale = norm.map_or(1.0, |n| if n > 0.0 { 1.0 / n } else { 1.0 });
    normalize(&mut values, detunings, normalization, raw_scale);
    Ok(SpectrumDataset {
        lorentzian: lorentzian_column(units, detunings, normalization),
        detunings: detunings.to_vec(),
        values,
        theta,
        t,
        velocity: front.velocity(),
        normalization,
        norm,
    })
}

/// Simultaneous-emission spectrum at time t: the finite-time Lorentzian
/// kernel averaged over the Doppler shift ħp·k/M of the Gaussian packet.
///
/// Q(ω_k) = (3/8π²)·E[(1 − 2e^{−γt}cos(xt) + e^{−2γt})/(1 + x²)] with
/// x = δ_k − ħp·k/M and p·k normal with standard deviation |k|/a. The θ
/// dependence drops out.
pub fn sse_spectrum(
    units: &UnitSystem,
    theta: f64,
    t: f64,
    packet: &WavePacket,
    detunings: &[f64],
    normalization: Normalization,
) -> Result<SpectrumDataset> {
    if !(t > 0.0) {
        return Err(invalid("t", format!("must be > 0, got {t}")));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid("theta", format!("must lie in [0, π], got {theta}")));
    }
    let rule = gauss_hermite(64);
    let mut values: Vec<f64> = detunings
        .iter()
        .map(|&d| {
            let k = units.k0 * (1.0 + d / units.omega0);
            let sigma = packet.hbar_over_m * k / packet.width;
            let dk = delta_k(units, d);
            let e: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(u, w)| {
                    let x = dk - sigma * std::f64::consts::SQRT_2 * u;
                    w * sse_kernel(x, t)
                })
                .sum();
            SPECTRAL_CONSTANT * e / PI.sqrt()
        })
        .collect();
    let norm = match normalization {
        Normalization::Raw => Some(1.0),
        _ => None,
    };
    normalize(&mut values, detunings, normalization, 1.0);
    Ok(SpectrumDataset {
        lorentzian: lorentzian_column(units, detunings, normalization),
        detunings: detunings.to_vec(),
        values,
        theta,
        t,
        velocity: f64::INFINITY,
        normalization,
        norm,
    })
}

/// |1 − e^{−(1 − ix)t}|²/(1 + x²).
fn sse_kernel(x: f64, t: f64) -> f64 {
    let e = (-t).exp();
    (1.0 - 2.0 * e * (x * t).cos() + e * e) / (1.0 + x * x)
}

/// P_t(θ) on a (t, θ) grid, rows mean-normalized over θ.
pub fn reduced_angular(
    units: &UnitSystem,
    times: &[f64],
    thetas: &[f64],
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<AngularDataset> {
    let mut ds = angular_raw(units, times, thetas, front, packet, spec)?;
    for row in ds.values.iter_mut() {
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        if mean > 0.0 {
            for v in row.iter_mut() {
                *v /= mean;
            }
        }
    }
    ds.mean_normalized = true;
    Ok(ds)
}

/// P_t(θ) on a (t, θ) grid without normalization.
pub fn angular_raw(
    units: &UnitSystem,
    times: &[f64],
    thetas: &[f64],
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<AngularDataset> {
    spec.validate()?;
    if times.is_empty() || thetas.is_empty() {
        return Err(invalid("grid", "time and angle grids must be non-empty"));
    }
    if let Some(&bad) = thetas.iter().find(|th| !(0.0..=PI).contains(*th)) {
        return Err(invalid("theta", format!("must lie in [0, π], got {bad}")));
    }
    let points: Vec<(f64, f64)> = times
        .iter()
        .flat_map(|&t| thetas.iter().map(move |&th| (t, th)))
        .collect();
    let flat = points
        .par_iter()
        .map(|&(t, th)| p_theta(units, th, t, front, packet, spec))
        .collect::<Result<Vec<_>>>()?;
    let values = flat.chunks(thetas.len()).map(|c| c.to_vec()).collect();
    Ok(AngularDataset {
        thetas: thetas.to_vec(),
        times: times.to_vec(),
        values,
        mean_normalized: false,
    })
}
