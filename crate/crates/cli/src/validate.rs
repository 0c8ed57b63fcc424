//! Self-checks against independent references and limiting cases.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use nsse_core::model::{Front, ModeGeometry, WavePacket};
use nsse_core::observables::{linspace, nsse_spectrum, reduced_angular, sse_spectrum, Normalization};
use nsse_core::quad::oracle::{kernel_density, q_oracle};
use nsse_core::quad::{norms, n_photon, QuadSpec};
use nsse_core::reference::relative_error;
use nsse_core::special::{faddeeva, scaled_exp_w, ComplexScaled};
use nsse_core::units::UnitSystem;
use nsse_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::CliError;
use crate::config::{ConfigError, RunConfig};

/// One pass/fail line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Everything a check needs about the physical setup.
#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub units: UnitSystem,
    pub packet: WavePacket,
    pub spec: QuadSpec,
}

impl Setup {
    pub fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        let units = cfg.units()?;
        Ok(Self {
            units,
            packet: cfg.packet(&units),
            spec: cfg.quad_spec(),
        })
    }

    fn front(&self, v: f64) -> Result<Front, Error> {
        Front::new(self.units.velocity_to_internal(v))
    }

    /// Internal time at which the front edge sits at `z` [λ₀].
    fn edge_time(&self, v: f64, z: f64) -> f64 {
        -z / self.units.velocity_to_internal(v)
    }
}

/// W(ξ) on `n` random points with |Re ξ|, |Im ξ| ≤ 50 against the
/// double-double reference; relative error must not exceed 1e−12. Where
/// W overflows a double the scaled form is compared. `perturb` multiplies
/// every value by 1 + perturb.
pub fn faddeeva_accuracy(n: usize, seed: u64, perturb: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factor = Complex64::new(1.0 + perturb, 0.0);
    let mut worst = (0.0f64, Complex64::new(0.0, 0.0));
    let mut scaled = 0;
    for _ in 0..n {
        let xi = Complex64::new(rng.gen_range(-50.0..=50.0), rng.gen_range(-50.0..=50.0));
        let approx = match faddeeva(xi) {
            Ok(w) => ComplexScaled::from_complex(w * factor),
            Err(_) => {
                scaled += 1;
                scaled_exp_w(Complex64::new(0.0, 0.0), xi).mul_complex(factor)
            }
        };
        let e = relative_error(approx, xi);
        if !(e <= worst.0) {
            worst = (e, xi);
        }
    }
    Check::new(
        format!("faddeeva vs reference, {n} points"),
        worst.0 <= 1e-12,
        format!(
            "max relative error {:.3e} at {} ({scaled} in scaled form), limit 1e-12",
            worst.0, worst.1
        ),
    )
}

/// Closed-form kernel against the brute-force momentum quadrature on `n`
/// random (mode, front, z, pₓ) points.
pub fn kernel_oracle(setup: &Setup, n: usize, seed: u64, tol: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = setup.packet.width;
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for _ in 0..n {
        let det = rng.gen_range(-10.0..10.0);
        let theta = rng.gen_range(0.0..PI);
        let v = 10f64.powf(rng.gen_range(-1.0..1.0));
        let front = match setup.front(v) {
            Ok(f) => f,
            Err(e) => return Check::new("kernel vs momentum oracle", false, e.to_string()),
        };
        let t = rng.gen_range(0.5..10.0);
        let tau = rng.gen_range(0.1..t);
        let z = (tau - t) * front.velocity() + a * rng.gen_range(-1.0..1.0);
        let p_x = rng.gen_range(-2.0..2.0) / a;
        let mode = match ModeGeometry::new(&setup.units, det, theta) {
            Ok(m) => m,
            Err(e) => return Check::new("kernel vs momentum oracle", false, e.to_string()),
        };
        let want = match q_oracle(&mode, t, &front, &setup.packet, z, p_x) {
            Ok(w) => w,
            Err(e) => return Check::new("kernel vs momentum oracle", false, e.to_string()),
        };
        let got = kernel_density(&mode, t, &front, &setup.packet, z, p_x);
        let e = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        if !(e <= worst) {
            worst = e;
            where_ = format!("δ={det:.3} θ={theta:.3} v={v:.3} t={t:.3} z={z:.3} pₓ={p_x:.3}");
        }
    }
    Check::new(
        format!("kernel vs momentum oracle, {n} points"),
        worst <= tol,
        format!("max relative error {worst:.3e} at {where_}, limit {tol:e}"),
    )
}

/// Nearly infinite front velocity against the simultaneous-emission
/// reference at t = 5τ_natural along θ = 0, on `points` detunings in ±10γ.
/// Both in raw units; peak within 0.5%, everywhere within 2% of the peak.
pub fn sse_limit(setup: &Setup, points: usize) -> Result<Vec<Check>, Error> {
    let grid = linspace(-10.0, 10.0, points);
    let t = setup.units.time_to_internal(5.0);
    let front = setup.front(1e3)?;
    let q = nsse_spectrum(
        &setup.units,
        0.0,
        t,
        &front,
        &setup.packet,
        &setup.spec,
        &grid,
        Normalization::Raw,
    )?;
    let r = sse_spectrum(&setup.units, 0.0, t, &setup.packet, &grid, Normalization::Raw)?;
    let (ipk, peak) = r
        .values
        .iter()
        .cloned()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let at_peak = (q.values[ipk] - peak).abs() / peak;
    let across = q
        .values
        .iter()
        .zip(&r.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / peak;
    Ok(vec![
        Check::new(
            "v = 1000, t = 5: peak vs reference",
            at_peak < 5e-3,
            format!("relative difference {at_peak:.3e} at {:.2}γ, limit 5e-3", grid[ipk]),
        ),
        Check::new(
            "v = 1000, t = 5: ±10γ vs reference",
            across < 2e-2,
            format!("max difference / peak {across:.3e}, limit 2e-2"),
        ),
    ])
}

/// Front 5 packet widths ahead of the packet: emitted probability below
/// 1e−6 and raw spectrum below 1e−10 of the spectrum after transit.
pub fn causality(setup: &Setup, v: f64, points: usize) -> Result<Vec<Check>, Error> {
    let a_lambda = setup.packet.width;
    let front = setup.front(v)?;
    let before = setup.edge_time(v, 5.0 * a_lambda);
    let after = setup.edge_time(v, -5.0 * a_lambda);
    let n = norms(&setup.units, before, &front, &setup.packet, &setup.spec)?;
    let emitted = n.photon / n.total();
    let grid = linspace(-15.0, 15.0, points);
    let spectrum = |t| {
        nsse_spectrum(
            &setup.units,
            0.0,
            t,
            &front,
            &setup.packet,
            &setup.spec,
            &grid,
            Normalization::Raw,
        )
    };
    let pre = spectrum(before)?.values.iter().cloned().fold(0.0, f64::max);
    let post = spectrum(after)?.values.iter().cloned().fold(0.0, f64::max);
    let ratio = pre / post;
    Ok(vec![
        Check::new(
            format!("v = {v}, edge +5a: emitted probability"),
            emitted < 1e-6,
            format!("{emitted:.3e}, limit 1e-6"),
        ),
        Check::new(
            format!("v = {v}, edge +5a: spectrum vs edge −5a"),
            post > 0.0 && ratio < 1e-10,
            format!("max ratio {ratio:.3e} (post-transit peak {post:.3e}), limit 1e-10"),
        ),
    ])
}

fn flatness(values: &[f64]) -> f64 {
    values.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max)
}

/// Reduced angular distribution of simultaneous emission at `t_nat`.
pub fn sse_flatness(setup: &Setup, t_nat: f64, theta_points: usize) -> Result<Check, Error> {
    let thetas = linspace(0.0, PI, theta_points);
    let t = setup.units.time_to_internal(t_nat);
    let ds = reduced_angular(&setup.units, &[t], &thetas, &Front::sse(), &setup.packet, &setup.spec)?;
    let dev = flatness(&ds.values[0]);
    Ok(Check::new(
        format!("v = inf, t = {t_nat}: reduced distribution flat"),
        dev < 5e-3,
        format!("max |P/<P> - 1| = {dev:.3e} over {theta_points} angles, limit 5e-3"),
    ))
}

/// Reduced angular distribution long after the front has passed.
pub fn asymptotic_flatness(
    setup: &Setup,
    v: f64,
    t_nat: f64,
    theta_points: usize,
) -> Result<Check, Error> {
    let thetas = linspace(0.0, PI, theta_points);
    let t = setup.units.time_to_internal(t_nat);
    let front = setup.front(v)?;
    let ds = reduced_angular(&setup.units, &[t], &thetas, &front, &setup.packet, &setup.spec)?;
    let row = &ds.values[0];
    let dev = flatness(row);
    let (imax, _) = row
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    Ok(Check::new(
        format!("v = {v}, t = {t_nat}: reduced distribution flat"),
        dev < 2e-2,
        format!(
            "max |P/<P> - 1| = {dev:.3e} (largest at {:.0}°), limit 2e-2",
            thetas[imax].to_degrees()
        ),
    ))
}

/// N_excited + N_photon for a moving front.
pub fn norm_conservation(setup: &Setup, v: f64, t_nat: &[f64]) -> Result<Vec<Check>, Error> {
    let front = setup.front(v)?;
    t_nat
        .iter()
        .map(|&tn| {
            let n = norms(
                &setup.units,
                setup.units.time_to_internal(tn),
                &front,
                &setup.packet,
                &setup.spec,
            )?;
            let total = n.total();
            Ok(Check::new(
                format!("v = {v}, t = {tn}: N_excited + N_photon"),
                (0.95..=1.02).contains(&total),
                format!(
                    "{:.5} + {:.5} = {total:.5}, allowed [0.95, 1.02]",
                    n.excited, n.photon
                ),
            ))
        })
        .collect()
}

/// N_excited + N_photon = 1 for simultaneous emission.
pub fn sse_closure(setup: &Setup, t_nat: f64) -> Result<Check, Error> {
    let t = setup.units.time_to_internal(t_nat);
    let photon = n_photon(&setup.units, t, &Front::sse(), &setup.packet, &setup.spec)?;
    let total = (-2.0 * t).exp() + photon;
    Ok(Check::new(
        format!("v = inf, t = {t_nat}: N_excited + N_photon"),
        (total - 1.0).abs() < 1e-4,
        format!("{total:.7}, limit |total - 1| < 1e-4"),
    ))
}

/// Names accepted by `--suite`, in run order.
pub const SUITES: &[&str] = &[
    "special",
    "oracle",
    "sse-limit",
    "causality",
    "norm",
    "sse-flatness",
    "asymptotic-flatness",
];

fn run_suite(name: &str, setup: &Setup, perturb: f64) -> Result<Vec<Check>, Error> {
    Ok(match name {
        "special" => vec![faddeeva_accuracy(2000, 1, perturb)],
        "oracle" => vec![kernel_oracle(setup, 6, 2, 1e-4)],
        "sse-limit" => sse_limit(setup, 41)?,
        "causality" => {
            let mut c = causality(setup, 10.0, 61)?;
            c.extend(causality(setup, 1.0, 61)?);
            c
        }
        "norm" => {
            let mut c = vec![sse_closure(setup, 2.0)?];
            c.extend(norm_conservation(setup, 1.0, &[0.0])?);
            c
        }
        "sse-flatness" => vec![sse_flatness(setup, 5.0, 61)?],
        "asymptotic-flatness" => vec![asymptotic_flatness(setup, 1.0, 300.0, 61)?],
        other => unreachable!("unknown suite {other}"),
    })
}

/// Runs the selected suites, printing one line per check. Ok(true) iff
/// every check passed.
pub fn run_validate(
    cfg: &RunConfig,
    suite: Option<&str>,
    perturb: f64,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let selected: Vec<&str> = match suite {
        None => SUITES.to_vec(),
        Some(s) if SUITES.contains(&s) => vec![s],
        Some(s) => {
            return Err(ConfigError {
                key: "suite".into(),
                reason: format!("unknown suite `{s}`; expected one of {}", SUITES.join(", ")),
            }
            .into())
        }
    };
    let setup = Setup::from_config(cfg)?;
    let io = |e: std::io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    let mut all = true;
    for name in selected {
        let start = Instant::now();
        let checks = run_suite(name, &setup, perturb)?;
        let secs = start.elapsed().as_secs_f64();
        for c in &checks {
            all &= c.pass;
            writeln!(
                out,
                "{name:<20} {}  {}: {} [{secs:.1} s]",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )
            .map_err(io)?;
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faddeeva_check_detects_one_percent_error() {
        assert!(faddeeva_accuracy(300, 5, 0.0).pass);
        let c = faddeeva_accuracy(300, 5, 0.01);
        assert!(!c.pass, "{}", c.detail);
    }

    #[test]
    fn unknown_suite_is_a_bad_argument() {
        let cfg = RunConfig::defaults(crate::config::Command::Spectrum);
        let e = run_validate(&cfg, Some("everything"), 0.0, &mut Vec::new()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
