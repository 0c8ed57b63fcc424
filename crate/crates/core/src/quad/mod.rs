//! Integration of the emission kernel: pₓ by Gauss–Hermite, z and ω_k by
//! adaptive Gauss–Kronrod, plus the normalization integrals.

pub mod engine;
pub mod oracle;
pub mod rules;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::{kernel, step, Front, ModeGeometry, WavePacket};
use crate::units::UnitSystem;

pub use engine::{integrate, Estimate, Tolerance};
pub use rules::{gauss_hermite, gauss_legendre, Rule};

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Gauss–Hermite order for the pₓ integral.
    pub hermite_order: usize,
    pub z_rel_tol: f64,
    /// Relative tolerance of the ω_k and θ integrals.
    pub omega_rel_tol: f64,
    /// Half-width of the z window in units of the spread packet's r.m.s.
    /// width.
    pub z_window_sigmas: f64,
    /// Half-width W of the spectral window [γ].
    pub omega_window_gammas: f64,
    /// Hard limit |z| ≤ z_cap_widths·a on every z integral.
    pub z_cap_widths: f64,
    pub max_intervals: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            hermite_order: 40,
            z_rel_tol: 1e-8,
            omega_rel_tol: 1e-6,
            z_window_sigmas: 7.0,
            omega_window_gammas: 60.0,
            z_cap_widths: 200.0,
            max_intervals: 4000,
        }
    }
}

impl QuadSpec {
    /// Looser tolerances for large (t, θ) sweeps.
    pub fn relaxed() -> Self {
        Self {
            hermite_order: 24,
            z_rel_tol: 1e-6,
            omega_rel_tol: 1e-4,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hermite_order < 8 {
            return Err(invalid("hermite_order", "must be at least 8"));
        }
        for (name, tol) in [
            ("z_rel_tol", self.z_rel_tol),
            ("omega_rel_tol", self.omega_rel_tol),
        ] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {tol}")));
            }
        }
        for (name, v) in [
            ("z_window_sigmas", self.z_window_sigmas),
            ("omega_window_gammas", self.omega_window_gammas),
            ("z_cap_widths", self.z_cap_widths),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.max_intervals < 16 {
            return Err(invalid("max_intervals", "must be at least 16"));
        }
        Ok(())
    }

    fn z_tol(&self) -> Tolerance {
        Tolerance {
            rel: self.z_rel_tol,
            abs: 0.0,
            max_intervals: self.max_intervals,
        }
    }

    fn omega_tol(&self) -> Tolerance {
        Tolerance {
            rel: self.omega_rel_tol,
            abs: 0.0,
            max_intervals: self.max_intervals,
        }
    }
}

/// Overall constant between ∫dpₓ∫dz Θ e^{−2γτ−pₓ²a²/2}|F|² and the
/// spectral density Q_t(ω_k): 3a²/(32π⁴).
pub fn emission_constant(packet: &WavePacket) -> f64 {
    3.0 * packet.width * packet.width / (32.0 * PI.powi(4))
}

/// r.m.s. width of the z marginal of the packet after free spreading for τ.
fn spread_sigma(packet: &WavePacket, tau: f64) -> f64 {
    packet.at_sq(tau).norm() / (2.0 * packet.width)
}

/// Hull of the z values where `inside(z, τ)` holds on a fine scan of
/// [lo, hi], padded by one scan step.
fn scan_window<P: Fn(f64, f64) -> bool>(
    lo: f64,
    hi: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    inside: P,
) -> Option<(f64, f64)> {
    if lo >= hi {
        return None;
    }
    let len = hi - lo;
    let step = (packet.width / 8.0).min(len / 4096.0);
    let n = (len / step).ceil() as usize;
    let mut first = None;
    let mut last = None;
    for j in 0..=n {
        let z = (lo + step * j as f64).min(hi);
        let tau = front.tau(t, z);
        if inside(z, tau) {
            first.get_or_insert(j);
            last = Some(j);
        }
    }
    let (first, last) = (first?, last?);
    let a = (lo + step * (first as f64 - 1.0)).max(lo);
    let b = (lo + step * (last as f64 + 1.0)).min(hi);
    Some((a, b))
}

/// z range that carries the emission integrand for recoil drift
/// κ = ħk_z/M, or `None` when nothing has been emitted yet.
///
/// A point z is kept when, for some emission time s within the last
/// z_window_sigmas²/4 lifetimes before τ, the packet centre displaced by
/// −κs lies within z_window_sigmas spread widths of z.
pub fn emission_window(
    t: f64,
    front: &Front,
    kappa: f64,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Option<(f64, f64)> {
    let cap = spec.z_cap_widths * packet.width;
    let lo = if front.is_sse() {
        if t < 0.0 {
            return None;
        }
        -cap
    } else {
        (-front.velocity() * t).max(-cap)
    };
    let n_sigma = spec.z_window_sigmas;
    let memory = n_sigma * n_sigma / 4.0;
    scan_window(lo, cap, t, front, packet, |z, tau| {
        if tau < 0.0 {
            return false;
        }
        let reach = n_sigma * spread_sigma(packet, tau);
        let u1 = z + kappa * (tau - memory).max(0.0);
        let u2 = z + kappa * tau;
        let nearest = if u1.signum() != u2.signum() {
            0.0
        } else {
            u1.abs().min(u2.abs())
        };
        nearest <= reach
    })
}

/// z range that carries the excited-state population.
pub fn excited_window(
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Option<(f64, f64)> {
    let cap = spec.z_cap_widths * packet.width;
    let n_sigma = spec.z_window_sigmas;
    scan_window(-cap, cap, t, front, packet, |z, tau| {
        z.abs() <= n_sigma * spread_sigma(packet, tau)
    })
}

fn z_panels(lo: f64, hi: f64, packet: &WavePacket) -> usize {
    (((hi - lo) / packet.width).ceil() as usize).clamp(2, 16)
}

/// ∫dz Θ(τ) exp(−2γτ)|F(z, pₓ)|² for one mode.
pub fn z_integral(
    mode: &ModeGeometry,
    p_x: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let kappa = packet.hbar_over_m * mode.kz;
    let Some((lo, hi)) = emission_window(t, front, kappa, packet, spec) else {
        return Ok(0.0);
    };
    let est = integrate(
        |z| kernel(z, p_x, t, mode, front, packet).weight(),
        lo,
        hi,
        z_panels(lo, hi, packet),
        spec.z_tol(),
        "z integral",
    )?;
    Ok(est.value)
}

/// Q_t(ω_k) without the 1/‖ψ_NS‖² normalization.
pub fn q_t_omega(
    mode: &ModeGeometry,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let a = packet.width;
    let px_integral = if mode.kx == 0.0 {
        // Δ_k has no pₓ dependence: the Gaussian weight integrates to √(2π)/a.
        (2.0 * PI).sqrt() / a * z_integral(mode, 0.0, t, front, packet, spec)?
    } else {
        let rule = gauss_hermite(spec.hermite_order);
        let scale = std::f64::consts::SQRT_2 / a;
        let mut sum = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            sum += w * z_integral(mode, scale * x, t, front, packet, spec)?;
        }
        scale * sum
    };
    Ok(emission_constant(packet) * px_integral)
}

/// A mode along θ whose δ_k is set directly; pₓ = 0 then makes Re Δ_k = δ_k.
fn mode_with_delta(units: &UnitSystem, theta: f64, delta: f64) -> ModeGeometry {
    let (s, c) = theta.sin_cos();
    ModeGeometry {
        detuning: 0.0,
        omega0: units.omega0,
        theta,
        k: units.k0,
        kx: units.k0 * s,
        kz: units.k0 * c,
        delta_k: delta,
    }
}

/// P_t(θ) = ∫dω_k Q_t(ω_k), unnormalized.
///
/// pₓ enters Q_t only through the shift −pₓk_xħ/M of Re Δ_k, which the
/// infinite ω_k integral absorbs. The pₓ integral therefore reduces to
/// √(2π)/a and the spectral integral runs over Re Δ_k at pₓ = 0, adaptively
/// across the window of ±omega_window_gammas around the recoil-shifted line.
/// Beyond the window the large-|Δ| form of F gives the tails in closed form
/// up to one z integral. The ω_k
/// dependence of |k| (relative size 10⁻⁶ across the window) is neglected.
pub fn p_theta(
    units: &UnitSystem,
    theta: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let mode0 = mode_with_delta(units, theta, 0.0);
    let kappa = packet.hbar_over_m * mode0.kz;
    if emission_window(t, front, kappa, packet, spec).is_none() {
        return Ok(0.0);
    }
    let profile = |x: f64| z_integral(&mode_with_delta(units, theta, x), 0.0, t, front, packet, spec);
    let w = spec.omega_window_gammas;
    let lo = units.eps_recoil - w;
    let hi = units.eps_recoil + w;
    let mut failure = None;
    // x = tan φ flattens the Lorentzian core and the 1/x² wings.
    let est = integrate(
        |phi| {
            let x = phi.tan();
            match profile(x) {
                Ok(v) => v * (1.0 + x * x),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        lo.atan(),
        hi.atan(),
        4,
        spec.omega_tol(),
        "spectral integral",
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let tails = spectral_tails(t, front, kappa, lo, hi, packet, spec)?;
    let a = packet.width;
    Ok(emission_constant(packet) * (2.0 * PI).sqrt() / a * (est?.value + tails))
}

/// ∫_h^∞ e^{ixτ}/(1 + x²) dx for h > 0, τ ≥ 0, by rotating the contour onto
/// x = h + iu: i·e^{ihτ}∫₀^∞ e^{−uτ}/((h + iu)² + 1) du.
fn lorentz_fourier_tail(tau: f64, h: f64) -> Result<Complex64> {
    let f = |s: f64, part: fn(Complex64) -> f64| {
        if s >= 1.0 {
            // u → ∞: the integrand tends to h/(1 − s)² · (−1/u²) → −1/h.
            return if tau > 0.0 { 0.0 } else { part(Complex64::new(-1.0 / h, 0.0)) };
        }
        let u = h * s / (1.0 - s);
        let du = h / ((1.0 - s) * (1.0 - s));
        let x = Complex64::new(h, u);
        part((-u * tau).exp() * du / (x * x + 1.0))
    };
    let tol = Tolerance::relative(1e-10).with_abs(1e-12 / h);
    let re = integrate(|s| f(s, |c| c.re), 0.0, 1.0, 2, tol, "spectral tail")?.value;
    let im = integrate(|s| f(s, |c| c.im), 0.0, 1.0, 2, tol, "spectral tail")?.value;
    Ok(Complex64::i() * Complex64::from_polar(1.0, h * tau) * Complex64::new(re, im))
}

/// ∫dz ∫_{x ∉ [lo, hi]} dx Θ(τ)e^{−2γτ}|F|² at pₓ = 0, with Re Δ = x, in the
/// large-|Δ| limit F ≈ −[M₀(z) − e^{−iΔτ}M₀(z + κτ)]/Δ. M₀ is the spread
/// Gaussian, M₀(y) = (2√π/a_t)exp(−y²/a_t²).
fn spectral_tails(
    t: f64,
    front: &Front,
    kappa: f64,
    lo: f64,
    hi: f64,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let Some((z_lo, z_hi)) = emission_window(t, front, kappa, packet, spec) else {
        return Ok(0.0);
    };
    let measure = (0.5 * PI - hi.atan()) + (0.5 * PI + lo.atan());
    let a = packet.width;
    let mut failure = None;
    let f = |z: f64| {
        let tau = front.tau(t, z);
        if tau < 0.0 {
            return 0.0;
        }
        let at_sq = packet.at_sq(tau);
        let m2 = at_sq.norm_sqr();
        let g = |y: f64| 4.0 * PI / m2.sqrt() * (-2.0 * a * a * y * y / m2).exp();
        let direct = (-2.0 * tau).exp() * g(z) + g(z + kappa * tau);
        let c = 1.0 / at_sq;
        let y = z + kappa * tau;
        let overlap = 4.0 * PI / m2.sqrt() * (-c * z * z - c.conj() * y * y).exp();
        let osc = match (lorentz_fourier_tail(tau, hi), lorentz_fourier_tail(tau, -lo)) {
            (Ok(up), Ok(down)) => up + down.conj(),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        measure * direct - 2.0 * (-tau).exp() * (overlap * osc).re
    };
    let est = integrate(f, z_lo, z_hi, z_panels(z_lo, z_hi, packet), spec.z_tol(), "spectral tail");
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

/// P_t(θ) by integrating [`q_t_omega`] (with its full pₓ quadrature) over
/// ω_k ∈ ω₀ ± omega_window_gammas·γ plus 1/ω² tails. Slower than
/// [`p_theta`]; kept as a cross-check.
pub fn p_theta_spectral(
    units: &UnitSystem,
    theta: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let q = |det: f64| q_t_omega(&ModeGeometry::new(units, det, theta)?, t, front, packet, spec);
    let w = spec.omega_window_gammas;
    let mut failure = None;
    let est = integrate(
        |det| match q(det) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        -w,
        w,
        8,
        spec.omega_tol(),
        "spectral integral",
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let d_lo = crate::model::delta_k(units, -w);
    let d_hi = crate::model::delta_k(units, w);
    Ok(est?.value + q(-w)? * d_lo.abs() + q(w)? * d_hi.abs())
}

/// Unnormalized excited-state and photon populations; their sum is ‖ψ_NS‖².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub excited: f64,
    pub photon: f64,
}

impl Norms {
    pub fn total(&self) -> f64 {
        self.excited + self.photon
    }
}

/// ∫dz exp(−2γτΘ(τ))·ρ(z; τ), with ρ the z marginal of the freely spread
/// packet.
pub fn n_excited(t: f64, front: &Front, packet: &WavePacket, spec: &QuadSpec) -> Result<f64> {
    if front.is_sse() {
        return Ok((-2.0 * t * step(t)).exp());
    }
    let Some((lo, hi)) = excited_window(t, front, packet, spec) else {
        return Ok(0.0);
    };
    let f = |z: f64| {
        let tau = front.tau(t, z);
        // Before switch-on the atom is still in its initial state.
        (-2.0 * tau * step(tau)).exp() * packet.density_z(z, tau.max(0.0))
    };
    // The switch-on point z = −vt is a kink; integrate either side of it.
    let kink = -front.velocity() * t;
    let mut total = 0.0;
    let parts: &[(f64, f64)] = if kink > lo && kink < hi {
        &[(lo, kink), (kink, hi)]
    } else {
        &[(lo, hi)]
    };
    for &(a, b) in parts {
        total += integrate(f, a, b, z_panels(a, b, packet), spec.z_tol(), "excited population")?
            .value;
    }
    Ok(total)
}

/// 2π∫sinθ dθ sin²θ P_t(θ): photon population for a dipole along z.
pub fn n_photon(
    units: &UnitSystem,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let mut failure = None;
    let est = integrate(
        |theta| {
            let s = theta.sin();
            match p_theta(units, theta, t, front, packet, spec) {
                Ok(p) => 2.0 * PI * s * s * s * p,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        PI,
        1,
        spec.omega_tol(),
        "angular integral",
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

pub fn norms(
    units: &UnitSystem,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<Norms> {
    Ok(Norms {
        excited: n_excited(t, front, packet, spec)?,
        photon: n_photon(units, t, front, packet, spec)?,
    })
}
