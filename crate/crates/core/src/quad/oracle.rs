//! Brute-force references for the reduced kernel, independent of the
//! Faddeeva function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{kernel, Front, ModeGeometry, WavePacket};
use crate::units::UnitSystem;

use super::rules::gauss_legendre;
use super::{emission_constant, emission_window, integrate, QuadSpec, Tolerance};

/// Momentum cutoff in units of 1/a; the Gaussian weight is below 1e−15 there.
const P_CUT: f64 = 12.0;
const ORACLE_REL_TOL: f64 = 1e-6;

/// Composite Gauss–Legendre nodes and weights on [−lim, lim].
fn composite(lim: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let h = 2.0 * lim / panels as f64;
    let mut x = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    for j in 0..panels {
        let c = -lim + h * (j as f64 + 0.5);
        for (n, wt) in rule.nodes.iter().zip(&rule.weights) {
            x.push(c + 0.5 * h * n);
            w.push(0.5 * h * wt);
        }
    }
    (x, w)
}

/// L(p) = (1 − exp(iDτ))/D with D = pₓk_xħ/M + p_zk_zħ/M − δ_k − iγ.
fn big_l(p_x: f64, p_z: f64, tau: f64, mode: &ModeGeometry, hm: f64) -> Complex64 {
    let d = Complex64::new(hm * (p_x * mode.kx + p_z * mode.kz) - mode.delta_k, -1.0);
    (1.0 - (Complex64::i() * d * tau).exp()) / d
}

fn oracle_sum(
    mode: &ModeGeometry,
    tau: f64,
    packet: &WavePacket,
    z: f64,
    p_x: f64,
    panels: usize,
) -> f64 {
    let a = packet.width;
    let hm = packet.hbar_over_m;
    let lim = P_CUT / a;
    let (py, wy) = composite(lim, 8, 16);
    let (pz, wz) = composite(lim, panels, 12);

    let norm = (a / (2.0 * PI).sqrt()).powi(3);
    let py_part: f64 = py
        .iter()
        .zip(&wy)
        .map(|(p, w)| w * (-p * p * a * a / 2.0).exp())
        .sum();
    let px_part = (-p_x * p_x * a * a / 2.0).exp();

    let ls: Vec<Complex64> = pz.iter().map(|&p| big_l(p_x, p, tau, mode, hm)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (j, &p) in pz.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (k, &q) in pz.iter().enumerate() {
            let phase = (p - q) * z + (p * p - q * q) * tau * hm / 2.0;
            let gauss = (-(p * p + q * q) * a * a / 4.0).exp();
            row += Complex64::from_polar(wz[k] * gauss, phase) * ls[j] * ls[k].conj();
        }
        total += row * wz[j];
    }
    norm * py_part * px_part * total.re * (-2.0 * tau).exp()
}

/// The (p_y, p_z, p_z′) integral of the emission probability integrand at
/// one (z, pₓ), including Θ(τ)exp(−2γτ), by tensor-product quadrature.
///
/// Should equal [`kernel_density`]; fails if two resolutions disagree.
pub fn q_oracle(
    mode: &ModeGeometry,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    z: f64,
    p_x: f64,
) -> Result<f64> {
    let tau = front.tau(t, z);
    if tau < 0.0 {
        return Ok(0.0);
    }
    let coarse = oracle_sum(mode, tau, packet, z, p_x, 40);
    let fine = oracle_sum(mode, tau, packet, z, p_x, 60);
    let diff = (fine - coarse).abs();
    if diff > ORACLE_REL_TOL * fine.abs() && diff > 1e-300 {
        return Err(Error::NonConvergence {
            what: "momentum oracle",
            estimate: fine,
            error_bound: diff,
        });
    }
    Ok(fine)
}

/// (a²/2π)·exp(−pₓ²a²/2)·Θ(τ)exp(−2γτ)|F|²: what [`q_oracle`] integrates to.
pub fn kernel_density(
    mode: &ModeGeometry,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    z: f64,
    p_x: f64,
) -> f64 {
    let a = packet.width;
    a * a / (2.0 * PI)
        * (-p_x * p_x * a * a / 2.0).exp()
        * kernel(z, p_x, t, mode, front, packet).weight()
}

/// P_t(θ) from the time-domain form of the spectral integral:
/// ∫dω|F|² = 2π(4π/|a_t|²)∫₀^τ ds e^{2γs} exp(−2a²(z + κs)²/|a_t|⁴).
pub fn p_theta_time_domain(
    units: &UnitSystem,
    theta: f64,
    t: f64,
    front: &Front,
    packet: &WavePacket,
    spec: &QuadSpec,
) -> Result<f64> {
    let a = packet.width;
    let kappa = packet.hbar_over_m * units.k0 * theta.cos();
    let Some((lo, hi)) = emission_window(t, front, kappa, packet, spec) else {
        return Ok(0.0);
    };
    let inner_tol = Tolerance::relative(1e-11).with_abs(1e-300);
    let mut failure = None;
    let outer = integrate(
        |z| {
            let tau = front.tau(t, z);
            if tau <= 0.0 {
                return 0.0;
            }
            let m2 = packet.at_sq(tau).norm_sqr();
            let alpha = 2.0 * a * a / m2;
            let s_lo = (tau - 40.0).max(0.0);
            let inner = integrate(
                |s| (-2.0 * (tau - s) - alpha * (z + kappa * s).powi(2)).exp(),
                s_lo,
                tau,
                4,
                inner_tol,
                "time-domain oracle",
            );
            match inner {
                Ok(e) => 8.0 * PI * PI / m2.sqrt() * e.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        16,
        Tolerance::relative(1e-9).with_abs(1e-300),
        "time-domain oracle",
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(emission_constant(packet) * (2.0 * PI).sqrt() / a * outer?.value)
}
