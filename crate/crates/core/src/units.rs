//! Physical parameters of the transition and the dimensionless unit system.
//!
//! Everything past this module works with ħ = 1, frequencies in units of the
//! amplitude decay rate γ, times in 1/γ and lengths in λ₀. User-facing values
//! (CLI, datasets) are expressed in τ_natural, λ₀, v_recoil and γ; the
//! conversions live on [`UnitSystem`].

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Maximum relative mismatch tolerated between `omega_recoil` and
/// `k0 * v_recoil / 2`.
pub const RECOIL_CONSISTENCY_TOL: f64 = 0.01;

/// Physical constants of the electronic transition, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Amplitude decay rate γ [rad/s].
    pub gamma: f64,
    /// Transition wavelength λ₀ [m].
    pub lambda0: f64,
    /// Single-photon recoil velocity ħk₀/M [m/s].
    pub v_recoil: f64,
    /// Recoil angular frequency ħk₀²/(2M) [rad/s].
    pub omega_recoil: f64,
}

impl AtomParams {
    /// Hydrogen 2p₁/₂ → 1s₁/₂ (Lyman-α) values.
    pub fn hydrogen_lyman_alpha() -> Self {
        Self {
            gamma: 2.0 * PI * 50.0e6,
            lambda0: 121.6e-9,
            v_recoil: 3.25,
            omega_recoil: 2.0 * PI * 13.328e6,
        }
    }

    /// Wavenumber k₀ = 2π/λ₀ [1/m].
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.lambda0
    }

    /// Relative mismatch between `omega_recoil` and `k0 * v_recoil / 2`.
    pub fn recoil_mismatch(&self) -> f64 {
        let implied = 0.5 * self.k0() * self.v_recoil;
        (implied - self.omega_recoil).abs() / self.omega_recoil
    }

    pub fn validate(&self) -> Result<()> {
        positive("gamma", self.gamma)?;
        positive("lambda0", self.lambda0)?;
        positive("v_recoil", self.v_recoil)?;
        positive("omega_recoil", self.omega_recoil)?;
        let mismatch = self.recoil_mismatch();
        if mismatch > RECOIL_CONSISTENCY_TOL {
            return Err(invalid(
                "omega_recoil",
                format!(
                    "inconsistent with k0*v_recoil/2 (relative mismatch {mismatch:.3e} > {RECOIL_CONSISTENCY_TOL})"
                ),
            ));
        }
        Ok(())
    }
}

impl Default for AtomParams {
    fn default() -> Self {
        Self::hydrogen_lyman_alpha()
    }
}

/// Which decay time serves as the user-facing time unit τ_natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LifetimeConvention {
    /// τ_natural = 1/(2γ), the population lifetime.
    #[default]
    Population,
    /// τ_natural = 1/γ, the amplitude decay time.
    Amplitude,
}

impl LifetimeConvention {
    /// τ_natural expressed in units of 1/γ.
    pub fn in_inverse_gamma(self) -> f64 {
        match self {
            Self::Population => 0.5,
            Self::Amplitude => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Population => "population",
            Self::Amplitude => "amplitude",
        }
    }
}

impl std::str::FromStr for LifetimeConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "population" => Ok(Self::Population),
            "amplitude" => Ok(Self::Amplitude),
            other => Err(format!(
                "expected `population` or `amplitude`, got `{other}`"
            )),
        }
    }
}

/// The internal unit system derived from [`AtomParams`] and a packet width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// τ_natural [s].
    pub time_unit: f64,
    /// λ₀ [m].
    pub length_unit: f64,
    /// v_recoil [m/s].
    pub velocity_unit: f64,
    /// γ [rad/s].
    pub frequency_unit: f64,
    /// ω_recoil / γ.
    pub eps_recoil: f64,
    /// ħ/(M a²) in units of γ.
    pub spread_rate: f64,
    /// ħ/M in units of λ₀²γ.
    pub hbar_over_m: f64,
    /// k₀ in units of 1/λ₀ (always 2π).
    pub k0: f64,
    /// ω₀ / γ.
    pub omega0: f64,
    /// Packet width parameter a in units of λ₀.
    pub packet_width: f64,
    pub lifetime: LifetimeConvention,
}

impl UnitSystem {
    /// τ_natural in internal time units (1/γ).
    pub fn tau_natural(&self) -> f64 {
        self.lifetime.in_inverse_gamma()
    }

    /// Converts a time in τ_natural to internal units.
    pub fn time_to_internal(&self, t_tau_nat: f64) -> f64 {
        t_tau_nat * self.tau_natural()
    }

    pub fn time_from_internal(&self, t: f64) -> f64 {
        t / self.tau_natural()
    }

    /// v_recoil expressed in internal velocity units (λ₀γ).
    pub fn velocity_scale(&self) -> f64 {
        self.velocity_unit / (self.length_unit * self.frequency_unit)
    }

    /// Converts a velocity in v_recoil units to internal units. Infinity is
    /// preserved.
    pub fn velocity_to_internal(&self, v: f64) -> f64 {
        v * self.velocity_scale()
    }

    pub fn velocity_from_internal(&self, v: f64) -> f64 {
        v / self.velocity_scale()
    }

    /// Recoil velocity ħk₀/M in internal units, as implied by ω_recoil.
    pub fn recoil_speed(&self) -> f64 {
        self.hbar_over_m * self.k0
    }

    pub fn seconds_to_internal(&self, t: f64) -> f64 {
        t * self.frequency_unit
    }

    pub fn seconds_from_internal(&self, t: f64) -> f64 {
        t / self.frequency_unit
    }

    pub fn meters_to_internal(&self, x: f64) -> f64 {
        x / self.length_unit
    }

    pub fn meters_from_internal(&self, x: f64) -> f64 {
        x * self.length_unit
    }

    pub fn rad_per_s_to_internal(&self, w: f64) -> f64 {
        w / self.frequency_unit
    }

    pub fn rad_per_s_from_internal(&self, w: f64) -> f64 {
        w * self.frequency_unit
    }
}

/// Builds the internal unit system for a packet of width `packet_width_a` [m].
pub fn to_internal(params: &AtomParams, packet_width_a: f64) -> Result<UnitSystem> {
    to_internal_with(params, packet_width_a, LifetimeConvention::default())
}

pub fn to_internal_with(
    params: &AtomParams,
    packet_width_a: f64,
    lifetime: LifetimeConvention,
) -> Result<UnitSystem> {
    params.validate()?;
    positive("packet_width", packet_width_a)?;

    let gamma = params.gamma;
    let lambda0 = params.lambda0;
    let eps_recoil = params.omega_recoil / gamma;
    let k0 = 2.0 * PI;
    // ħk₀²/(2M) = ω_recoil fixes ħ/M without going through the rounded v_recoil.
    let hbar_over_m = 2.0 * eps_recoil / (k0 * k0);
    let a = packet_width_a / lambda0;

    Ok(UnitSystem {
        time_unit: lifetime.in_inverse_gamma() / gamma,
        length_unit: lambda0,
        velocity_unit: params.v_recoil,
        frequency_unit: gamma,
        eps_recoil,
        spread_rate: hbar_over_m / (a * a),
        hbar_over_m,
        k0,
        omega0: SPEED_OF_LIGHT * params.k0() / gamma,
        packet_width: a,
        lifetime,
    })
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
