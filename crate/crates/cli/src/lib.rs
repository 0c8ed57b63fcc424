//! Command-line driver: spectra, angular distributions, validation.

pub mod commands;
pub mod config;
pub mod csv;
pub mod validate;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{run_angular, run_spectrum, run_sse, write_outputs, CliError};
use config::{load_config, Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nsse", version, about = "Emission spectra of a wave packet excited by a moving front")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Spectrum Q_t(ω) along one direction, one dataset per (v, time).
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        front: FrontArgs,
        #[command(flatten)]
        grid: SpectrumGrid,
    },
    /// Simultaneous-emission reference spectrum.
    Sse {
        #[command(flatten)]
        common: Common,
        /// Times [τ_natural], comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[command(flatten)]
        grid: SpectrumGrid,
    },
    /// Reduced angular distribution P_t(θ), one dataset per velocity.
    Angular {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        front: FrontArgs,
        /// Start of the time grid [τ_natural].
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<String>,
        /// End of the time grid [τ_natural].
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<String>,
        #[arg(long)]
        t_points: Option<String>,
        /// Number of angles in [0°, 180°].
        #[arg(long)]
        theta_points: Option<String>,
    },
    /// Run the self-checks and print a PASS/FAIL table.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Run a single suite.
        #[arg(long)]
        suite: Option<String>,
        /// Multiply every Faddeeva value by 1 + x in the `special` suite.
        #[arg(long, hide = true, allow_hyphen_values = true, default_value_t = 0.0)]
        perturb_faddeeva: f64,
    },
}

/// Settings shared by every command.
#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Amplitude decay rate γ [rad/s].
    #[arg(long)]
    pub gamma: Option<String>,
    /// Transition wavelength [m].
    #[arg(long)]
    pub lambda0: Option<String>,
    /// Recoil velocity [m/s].
    #[arg(long)]
    pub v_recoil: Option<String>,
    /// Recoil angular frequency [rad/s].
    #[arg(long)]
    pub omega_recoil: Option<String>,
    /// Packet width a [λ₀].
    #[arg(long)]
    pub packet_width: Option<String>,
    /// τ_natural = 1/(2γ) (population) or 1/γ (amplitude).
    #[arg(long)]
    pub lifetime: Option<String>,
    /// Quadrature preset: default or relaxed.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub hermite_order: Option<String>,
    #[arg(long)]
    pub z_rel_tol: Option<String>,
    #[arg(long)]
    pub omega_rel_tol: Option<String>,
    #[arg(long)]
    pub z_window_sigmas: Option<String>,
    #[arg(long)]
    pub omega_window_gammas: Option<String>,
    #[arg(long)]
    pub z_cap_widths: Option<String>,
    #[arg(long)]
    pub max_intervals: Option<String>,
    /// Output file, or directory when several datasets are produced.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    /// Front velocities [v_recoil], comma-separated; `inf` for simultaneous
    /// switch-on.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Front edge positions [λ₀], comma-separated; t = −z/v.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "t")]
    pub edge_z: Option<String>,
    /// Times [τ_natural], comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpectrumGrid {
    /// Direction of observation from the z axis [deg].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Lower end of the detuning grid [γ].
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: Option<String>,
    /// Upper end of the detuning grid [γ].
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
    /// peak, area or raw.
    #[arg(long)]
    pub normalize: Option<String>,
}

fn push(layer: &mut Vec<(String, String)>, key: &str, value: &Option<String>) {
    if let Some(v) = value {
        layer.push((key.to_string(), v.clone()));
    }
}

impl Common {
    fn layer(&self, layer: &mut Vec<(String, String)>) {
        push(layer, "gamma", &self.gamma);
        push(layer, "lambda0", &self.lambda0);
        push(layer, "v_recoil", &self.v_recoil);
        push(layer, "omega_recoil", &self.omega_recoil);
        push(layer, "packet_width", &self.packet_width);
        push(layer, "lifetime", &self.lifetime);
        push(layer, "preset", &self.preset);
        push(layer, "hermite_order", &self.hermite_order);
        push(layer, "z_rel_tol", &self.z_rel_tol);
        push(layer, "omega_rel_tol", &self.omega_rel_tol);
        push(layer, "z_window_sigmas", &self.z_window_sigmas);
        push(layer, "omega_window_gammas", &self.omega_window_gammas);
        push(layer, "z_cap_widths", &self.z_cap_widths);
        push(layer, "max_intervals", &self.max_intervals);
        push(layer, "out", &self.out);
    }
}

impl FrontArgs {
    fn layer(&self, layer: &mut Vec<(String, String)>) {
        push(layer, "v", &self.v);
        push(layer, "edge_z", &self.edge_z);
        push(layer, "t", &self.t);
    }
}

impl SpectrumGrid {
    fn layer(&self, layer: &mut Vec<(String, String)>) {
        push(layer, "theta", &self.theta);
        push(layer, "omega_min", &self.omega_min);
        push(layer, "omega_max", &self.omega_max);
        push(layer, "points", &self.points);
        push(layer, "normalize", &self.normalize);
    }
}

fn build_config(
    command: Command,
    common: &Common,
    flags: Vec<(String, String)>,
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &common.config {
        cfg.apply(&load_config(path)?)?;
    }
    cfg.apply(&flags)?;
    Ok(cfg)
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut flags = Vec::new();
    let (command, common) = match &cli.command {
        Cmd::Spectrum {
            common,
            front,
            grid,
        } => {
            common.layer(&mut flags);
            front.layer(&mut flags);
            grid.layer(&mut flags);
            (Some(Command::Spectrum), common)
        }
        Cmd::Sse { common, t, grid } => {
            common.layer(&mut flags);
            push(&mut flags, "t", t);
            grid.layer(&mut flags);
            (Some(Command::Sse), common)
        }
        Cmd::Angular {
            common,
            front,
            t_min,
            t_max,
            t_points,
            theta_points,
        } => {
            common.layer(&mut flags);
            front.layer(&mut flags);
            push(&mut flags, "t_min", t_min);
            push(&mut flags, "t_max", t_max);
            push(&mut flags, "t_points", t_points);
            push(&mut flags, "theta_points", theta_points);
            (Some(Command::Angular), common)
        }
        Cmd::Validate { common, .. } => {
            common.layer(&mut flags);
            (None, common)
        }
    };
    let cfg = build_config(command.unwrap_or(Command::Spectrum), common, flags)?;
    let outputs = match (&cli.command, command) {
        (
            Cmd::Validate {
                suite,
                perturb_faddeeva,
                ..
            },
            _,
        ) => {
            let ok = validate::run_validate(&cfg, suite.as_deref(), *perturb_faddeeva, stdout)?;
            return if ok {
                Ok(())
            } else {
                Err(CliError::ValidationFailed)
            };
        }
        (_, Some(Command::Spectrum)) => run_spectrum(&cfg)?,
        (_, Some(Command::Sse)) => run_sse(&cfg)?,
        (_, Some(Command::Angular)) => run_angular(&cfg)?,
        (_, None) => unreachable!(),
    };
    for path in write_outputs(&outputs, cfg.out.as_deref(), stdout)? {
        let _ = writeln!(stderr, "wrote {}", path.display());
    }
    Ok(())
}

/// Configures the worker pool from NSSE_THREADS (unset or 0: one worker
/// per core).
pub fn init_threads(value: Option<&str>) -> Result<(), String> {
    let n = match value.map(str::trim) {
        None | Some("") => 0,
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| format!("NSSE_THREADS: expected a whole number, got `{s}`"))?,
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("NSSE_THREADS: {e}"))?;
    }
    Ok(())
}
