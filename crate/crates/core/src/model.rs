//! Closed-form pieces of the emission model: photon mode geometry, the moving
//! switch-on front, the Gaussian packet, the emission kernel F(z, pₓ) and the
//! simultaneous-emission amplitude.
//!
//! Everything here works in internal units: ħ = 1, time in 1/γ, lengths in
//! λ₀, momenta in ħ/λ₀, frequencies in γ. Conversion from the user-facing
//! units happens in [`crate::units::UnitSystem`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::special::{scaled_exp_w, ComplexScaled};
use crate::units::UnitSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this ratio the kernel switches from the Faddeeva form to the
/// small-k_z expansion. The ratio estimates (momentum spread · ħk_z/M)/|Δ|,
/// and the expansion is truncated after the cubic term, so its error is
/// about the fourth power of this value.
pub const SMALL_KZ_RATIO: f64 = 1e-3;

/// One photon mode: frequency and polar angle, with the derived wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    /// ω_k − ω₀ [γ].
    pub detuning: f64,
    /// ω₀ [γ].
    pub omega0: f64,
    /// Polar angle from the z axis [rad].
    pub theta: f64,
    /// |k| = ω_k/c [1/λ₀].
    pub k: f64,
    pub kx: f64,
    pub kz: f64,
    /// δ_k = ω_k + ħω_k²/(2Mc²) − ω₀ [γ].
    pub delta_k: f64,
}

impl ModeGeometry {
    pub fn new(units: &UnitSystem, detuning: f64, theta: f64) -> Result<Self> {
        if !detuning.is_finite() || detuning <= -units.omega0 {
            return Err(invalid(
                "detuning",
                format!("ω_k must be positive, got detuning {detuning}"),
            ));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid("theta", format!("must lie in [0, π], got {theta}")));
        }
        let ratio = 1.0 + detuning / units.omega0;
        let k = units.k0 * ratio;
        let (s, c) = theta.sin_cos();
        Ok(Self {
            detuning,
            omega0: units.omega0,
            theta,
            k,
            kx: k * s,
            kz: k * c,
            delta_k: delta_k(units, detuning),
        })
    }

    /// ω_k/ω₀.
    pub fn omega_ratio(&self) -> f64 {
        1.0 + self.detuning / self.omega0
    }
}

/// δ_k for a mode detuned by `detuning` = ω_k − ω₀ [γ], using
/// ħω_k²/(2Mc²) = ω_recoil·(ω_k/ω₀)².
///
/// Takes the detuning rather than ω_k itself because ω₀/γ ≈ 5·10⁷ would
/// swallow the digits that matter.
pub fn delta_k(units: &UnitSystem, detuning: f64) -> f64 {
    let r = 1.0 + detuning / units.omega0;
    detuning + units.eps_recoil * r * r
}

/// The switch-on step Θ(t + z/v), moving along −z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    velocity: f64,
}

impl Front {
    /// A front moving with `velocity` [λ₀γ]; infinity means simultaneous
    /// switch-on.
    pub fn new(velocity: f64) -> Result<Self> {
        if velocity.is_nan() || velocity <= 0.0 {
            return Err(invalid("v", format!("must be > 0, got {velocity}")));
        }
        Ok(Self { velocity })
    }

    /// The simultaneous (v = ∞) limit.
    pub fn sse() -> Self {
        Self {
            velocity: f64::INFINITY,
        }
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn is_sse(&self) -> bool {
        self.velocity.is_infinite()
    }

    pub fn tau(&self, t: f64, z: f64) -> f64 {
        tau(t, z, self)
    }
}

/// Retarded time τ = t + z/v (just t when v = ∞).
pub fn tau(t: f64, z: f64, front: &Front) -> f64 {
    if front.is_sse() {
        t
    } else {
        t + z / front.velocity
    }
}

/// Θ(τ) with Θ(0) = 1.
pub fn step(tau: f64) -> f64 {
    if tau >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Gaussian packet α₀(p) = (a/√(2π))^{3/2}·exp(−p²a²/4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    /// a [λ₀].
    pub width: f64,
    /// ħ/M [λ₀²γ].
    pub hbar_over_m: f64,
}

impl WavePacket {
    pub fn new(width: f64, hbar_over_m: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid("packet_width", format!("must be > 0, got {width}")));
        }
        if !(hbar_over_m.is_finite() && hbar_over_m > 0.0) {
            return Err(invalid(
                "hbar_over_m",
                format!("must be > 0, got {hbar_over_m}"),
            ));
        }
        Ok(Self {
            width,
            hbar_over_m,
        })
    }

    pub fn from_units(units: &UnitSystem) -> Self {
        Self {
            width: units.packet_width,
            hbar_over_m: units.hbar_over_m,
        }
    }

    /// a_t² = a² − 2iħτ/M.
    pub fn at_sq(&self, tau: f64) -> Complex64 {
        Complex64::new(self.width * self.width, -2.0 * self.hbar_over_m * tau)
    }

    pub fn alpha0(&self, p: [f64; 3]) -> f64 {
        let a = self.width;
        let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        (a / (2.0 * PI).sqrt()).powf(1.5) * (-p2 * a * a / 4.0).exp()
    }

    /// Marginal density along z of the freely spread packet after time τ.
    pub fn density_z(&self, z: f64, tau: f64) -> f64 {
        let a = self.width;
        let m2 = self.at_sq(tau).norm_sqr();
        (2.0 / PI).sqrt() * a / m2.sqrt() * (-2.0 * a * a * z * z / m2).exp()
    }
}

/// All intermediate quantities of F(z, pₓ) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionKernel {
    /// τ [1/γ].
    pub tau: f64,
    pub at_sq: Complex64,
    pub delta_k: f64,
    /// Δ_k = δ_k + iγ − pₓk_x ħ/M.
    pub big_delta: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    /// Faddeeva arguments; infinite when k_z = 0.
    pub eta1: Complex64,
    pub eta2: Complex64,
    /// F in scaled form.
    pub f: ComplexScaled,
    /// exp(−γτ)·F.
    pub damped: Complex64,
    /// Whether the small-k_z expansion was used.
    pub small_kz: bool,
}

impl EmissionKernel {
    /// F as a plain complex number (infinite if it does not fit).
    pub fn f_value(&self) -> Complex64 {
        self.f.value()
    }

    /// exp(−2γτ)·|F|², the quantity integrated over z and pₓ.
    pub fn weight(&self) -> f64 {
        self.damped.norm_sqr()
    }
}

/// F(z, pₓ) at time t. Zero when the front has not yet reached z.
pub fn kernel(
    z: f64,
    p_x: f64,
    t: f64,
    mode: &ModeGeometry,
    front: &Front,
    packet: &WavePacket,
) -> EmissionKernel {
    let tau = tau(t, z, front);
    let mut k = kernel_at_tau(z, p_x, tau, mode, packet);
    if tau < 0.0 {
        k.f = ComplexScaled::ZERO;
        k.damped = Complex64::new(0.0, 0.0);
    }
    k
}

/// F(z, pₓ) at retarded time τ, without the Θ(τ) gate.
pub fn kernel_at_tau(
    z: f64,
    p_x: f64,
    tau: f64,
    mode: &ModeGeometry,
    packet: &WavePacket,
) -> EmissionKernel {
    let hm = packet.hbar_over_m;
    let at_sq = packet.at_sq(tau);
    let kappa = hm * mode.kz;
    let big_delta = Complex64::new(mode.delta_k - hm * p_x * mode.kx, 1.0);
    let y1 = z;
    let y2 = z + kappa * tau;
    let small_kz = small_kz_ratio(kappa, y1, y2, at_sq, big_delta) < SMALL_KZ_RATIO;

    let (eta1, eta2) = if kappa == 0.0 {
        let inf = Complex64::new(f64::INFINITY, f64::INFINITY);
        (inf, inf)
    } else {
        (
            eta(y1, kappa, at_sq, big_delta),
            eta(y2, kappa, at_sq, big_delta),
        )
    };
    let (i1, i2) = if small_kz {
        (
            ComplexScaled::from_complex(i_series(y1, kappa, at_sq, big_delta)),
            ComplexScaled::from_complex(i_series(y2, kappa, at_sq, big_delta)),
        )
    } else {
        (
            i_faddeeva(y1, kappa, at_sq, eta1),
            i_faddeeva(y2, kappa, at_sq, eta2),
        )
    };

    // F = I(y₁) − exp(−iΔτ) I(y₂), and exp(−γτ)exp(−iΔτ) = exp(−i Re Δ τ).
    let f = i1.sub(i2.mul_exp(-I * big_delta * tau));
    let damped = i1
        .mul_exp(Complex64::new(-tau, 0.0))
        .sub(i2.mul_exp(Complex64::new(0.0, -big_delta.re * tau)))
        .value();

    EmissionKernel {
        tau,
        at_sq,
        delta_k: mode.delta_k,
        big_delta,
        b1: I * y1,
        b2: I * y2,
        eta1,
        eta2,
        f,
        damped,
        small_kz,
    }
}

fn small_kz_ratio(kappa: f64, y1: f64, y2: f64, at_sq: Complex64, delta: Complex64) -> f64 {
    let at = at_sq.norm().sqrt();
    let reach = (y1.abs().max(y2.abs()) / at).max(1.0);
    kappa.abs() * reach / (at * delta.norm())
}

/// η = (a_t/(2|κ|))(Δ − 2iyκ/a_t²) with κ = ħk_z/M.
fn eta(y: f64, kappa: f64, at_sq: Complex64, delta: Complex64) -> Complex64 {
    let at = at_sq.sqrt();
    at / (2.0 * kappa.abs()) * (delta - 2.0 * I * y * kappa / at_sq)
}

/// I(y) = ∫dp exp(−p²a_t²/4 + ipy)/(pκ − Δ) = (iπ/|κ|)exp(−y²/a_t²)W(η).
pub(crate) fn i_faddeeva(y: f64, kappa: f64, at_sq: Complex64, eta: Complex64) -> ComplexScaled {
    let s = -(y * y) / at_sq;
    scaled_exp_w(s, eta).mul_complex(I * PI / kappa.abs())
}

/// I(y) from expanding 1/(pκ − Δ) in powers of pκ/Δ through third order.
pub(crate) fn i_series(y: f64, kappa: f64, at_sq: Complex64, delta: Complex64) -> Complex64 {
    let c = 1.0 / at_sq;
    let m0 = 2.0 * PI.sqrt() / at_sq.sqrt() * (-(y * y) * c).exp();
    let m1 = 2.0 * I * c * y * m0;
    let m2 = (2.0 * c - 4.0 * c * c * y * y) * m0;
    let m3 = I * m0 * (12.0 * c * c * y - 8.0 * c * c * c * y * y * y);
    let r = kappa / delta;
    -(m0 + r * (m1 + r * (m2 + r * m3))) / delta
}

/// The simultaneous-emission amplitude β_t(p, k) with the coupling stripped:
/// −Θ(t)[exp(−(γ + s₀)t) − exp(−s_k t)]/(γ + s₀ − s_k).
pub fn sse_amplitude_beta(
    p: [f64; 3],
    mode: &ModeGeometry,
    t: f64,
    packet: &WavePacket,
) -> Complex64 {
    if t < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let hm = packet.hbar_over_m;
    let pk = p[0] * mode.kx + p[2] * mode.kz;
    // s_k − s₀ = i(δ_k − ħp·k/M); formed from δ_k to keep ω₀ out of it.
    let x = mode.delta_k - hm * pk;
    let denom = Complex64::new(1.0, -x);
    let pmk2 = (p[0] - mode.kx).powi(2) + p[1] * p[1] + (p[2] - mode.kz).powi(2);
    let sk_over_i = 0.5 * hm * pmk2 + 0.5 * mode.omega0 + mode.detuning;
    let phase_k = Complex64::from_polar(1.0, -sk_over_i * t);
    -phase_k * ((-denom * t).exp() - 1.0) / denom
}
