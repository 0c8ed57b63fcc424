//! Dataset generation for the `spectrum`, `sse` and `angular` commands.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nsse_core::observables::{linspace, nsse_spectrum, reduced_angular, sse_spectrum, SpectrumDataset};

use crate::config::{Command, ConfigError, Instant, RunConfig, Velocity, KEYS};
use crate::csv::{write_table, Metadata};

/// Why a command failed; see [`CliError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid setting {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] nsse_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("validation failed")]
    ValidationFailed,
}

impl CliError {
    /// 1: a validation check failed; 2: bad arguments or unusable output
    /// path; 3: a quadrature did not converge.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::ValidationFailed => 1,
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Core(nsse_core::Error::InvalidParameter { .. }) => 2,
            Self::Core(_) => 3,
        }
    }
}

/// One generated dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// File name used when several datasets go to one directory.
    pub name: String,
    pub bytes: Vec<u8>,
}

fn base_metadata(cfg: &RunConfig, command: Command) -> Metadata {
    let mut m = Metadata::default();
    m.info("tool", format!("nsse {}", env!("CARGO_PKG_VERSION")));
    m.info("command", command.name());
    m.info(
        "units",
        format!(
            "detuning [gamma], t [tau_natural, {} lifetime {}/gamma], z [lambda0], v [v_recoil], theta [deg], atom parameters SI",
            cfg.lifetime.name(),
            cfg.lifetime.in_inverse_gamma()
        ),
    );
    m
}

/// Settings block for one dataset: every key, with the velocity and time
/// keys restricted to what this file contains.
fn settings(cfg: &RunConfig, v: Option<Velocity>, instants: &[Instant], meta: &mut Metadata) {
    for &key in KEYS {
        let value = match key {
            "v" => v.map(|v| v.to_string()).or_else(|| cfg.get(key)),
            "edge_z" | "t" => {
                let want_edge = key == "edge_z";
                let vals: Vec<String> = instants
                    .iter()
                    .filter_map(|i| match (i, want_edge) {
                        (Instant::Edge(z), true) => Some(z.to_string()),
                        (Instant::Time(t), false) => Some(t.to_string()),
                        _ => None,
                    })
                    .collect();
                (!vals.is_empty()).then(|| vals.join(","))
            }
            _ => cfg.get(key),
        };
        if let Some(value) = value {
            meta.setting(key, value);
        }
    }
}

fn instant_tag(i: Instant) -> String {
    match i {
        Instant::Edge(z) => format!("edge{z}"),
        Instant::Time(t) => format!("t{t}"),
    }
}

fn spectrum_bytes(ds: &SpectrumDataset, meta: &Metadata) -> Vec<u8> {
    let mut buf = Vec::new();
    write_table(
        &mut buf,
        meta,
        &["detuning_gamma", "q_norm", "lorentzian_ref"],
        &[&ds.detunings, &ds.values, &ds.lorentzian],
    )
    .expect("writing to memory");
    buf
}

/// Spectra Q_t(ω_k) along one direction: one dataset per (v, time).
pub fn run_spectrum(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    cfg.validate(Command::Spectrum)?;
    let units = cfg.units()?;
    let packet = cfg.packet(&units);
    let spec = cfg.quad_spec();
    let grid = linspace(cfg.omega_min, cfg.omega_max, cfg.points);
    let theta = cfg.theta_deg.to_radians();
    let mut outputs = Vec::new();
    for &v in &cfg.velocities {
        let front = v.front(&units)?;
        for instant in cfg.instants() {
            let t_nat = instant.t_tau_nat(v, &units);
            let t = units.time_to_internal(t_nat);
            let ds = nsse_spectrum(&units, theta, t, &front, &packet, &spec, &grid, cfg.normalize)?;
            let mut meta = base_metadata(cfg, Command::Spectrum);
            meta.info("t_tau_nat", t_nat);
            if let Some(n) = ds.norm {
                meta.info("norm_total", n);
            }
            settings(cfg, Some(v), &[instant], &mut meta);
            outputs.push(Output {
                name: format!("spectrum_v{v}_{}.csv", instant_tag(instant)),
                bytes: spectrum_bytes(&ds, &meta),
            });
        }
    }
    Ok(outputs)
}

/// Simultaneous-emission reference spectra, one dataset per time.
pub fn run_sse(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    cfg.validate(Command::Sse)?;
    let units = cfg.units()?;
    let packet = cfg.packet(&units);
    let grid = linspace(cfg.omega_min, cfg.omega_max, cfg.points);
    let theta = cfg.theta_deg.to_radians();
    let mut outputs = Vec::new();
    for instant in cfg.instants() {
        let t_nat = instant.t_tau_nat(Velocity::Infinite, &units);
        let t = units.time_to_internal(t_nat);
        let ds = sse_spectrum(&units, theta, t, &packet, &grid, cfg.normalize)?;
        let mut meta = base_metadata(cfg, Command::Sse);
        meta.info("t_tau_nat", t_nat);
        settings(cfg, Some(Velocity::Infinite), &[instant], &mut meta);
        outputs.push(Output {
            name: format!("sse_{}.csv", instant_tag(instant)),
            bytes: spectrum_bytes(&ds, &meta),
        });
    }
    Ok(outputs)
}

/// Mean-normalized angular distributions, one dataset per velocity, in long
/// format (t_tau_nat, theta_deg, p_reduced).
pub fn run_angular(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    cfg.validate(Command::Angular)?;
    let units = cfg.units()?;
    let packet = cfg.packet(&units);
    let spec = cfg.quad_spec();
    let thetas_deg = linspace(0.0, 180.0, cfg.theta_points);
    let thetas: Vec<f64> = thetas_deg.iter().map(|d| d.to_radians()).collect();
    let instants = cfg.instants();
    let mut outputs = Vec::new();
    for &v in &cfg.velocities {
        let front = v.front(&units)?;
        let times_nat: Vec<f64> = if instants.is_empty() {
            linspace(cfg.t_min, cfg.t_max, cfg.t_points)
        } else {
            instants.iter().map(|i| i.t_tau_nat(v, &units)).collect()
        };
        let times: Vec<f64> = times_nat.iter().map(|&t| units.time_to_internal(t)).collect();
        let ds = reduced_angular(&units, &times, &thetas, &front, &packet, &spec)?;
        let n = times.len() * thetas.len();
        let mut t_col = Vec::with_capacity(n);
        let mut th_col = Vec::with_capacity(n);
        let mut p_col = Vec::with_capacity(n);
        for (t, row) in times_nat.iter().zip(&ds.values) {
            for (th, p) in thetas_deg.iter().zip(row) {
                t_col.push(*t);
                th_col.push(*th);
                p_col.push(*p);
            }
        }
        let mut meta = base_metadata(cfg, Command::Angular);
        settings(cfg, Some(v), &instants, &mut meta);
        let mut buf = Vec::new();
        write_table(
            &mut buf,
            &meta,
            &["t_tau_nat", "theta_deg", "p_reduced"],
            &[&t_col, &th_col, &p_col],
        )
        .expect("writing to memory");
        outputs.push(Output {
            name: format!("angular_v{v}.csv"),
            bytes: buf,
        });
    }
    Ok(outputs)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Sends datasets to their destination. A single dataset goes to `out` (a
/// file, or a file inside `out` if that is a directory) or to `stdout` when
/// `out` is unset; several datasets need `out` and are written into it as
/// a directory. Returns the paths written.
pub fn write_outputs(
    outputs: &[Output],
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>, CliError> {
    match (outputs, out) {
        ([], _) => Ok(Vec::new()),
        ([single], None) => {
            stdout
                .write_all(&single.bytes)
                .map_err(io_err(Path::new("<stdout>")))?;
            Ok(Vec::new())
        }
        ([single], Some(path)) => {
            let path = if path.is_dir() {
                path.join(&single.name)
            } else {
                path.to_path_buf()
            };
            fs::write(&path, &single.bytes).map_err(io_err(&path))?;
            Ok(vec![path])
        }
        (_, None) => Err(ConfigError {
            key: "out".into(),
            reason: format!(
                "{} datasets requested; give a directory to write them into",
                outputs.len()
            ),
        }
        .into()),
        (many, Some(dir)) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            many.iter()
                .map(|o| {
                    let path = dir.join(&o.name);
                    fs::write(&path, &o.bytes).map_err(io_err(&path))?;
                    Ok(path)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csv::Table;

    fn small_spectrum() -> RunConfig {
        let mut c = RunConfig::defaults(Command::Spectrum);
        c.apply(&[
            ("v".into(), "10".into()),
            ("edge_z".into(), "0".into()),
            ("points".into(), "9".into()),
            ("preset".into(), "relaxed".into()),
        ])
        .unwrap();
        c
    }

    #[test]
    fn spectrum_dataset_layout() {
        let out = run_spectrum(&small_spectrum()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, "spectrum_v10_edge0.csv");
        let t = Table::parse(std::str::from_utf8(&out[0].bytes).unwrap()).unwrap();
        assert_eq!(t.header, vec!["detuning_gamma", "q_norm", "lorentzian_ref"]);
        assert_eq!(t.rows.len(), 9);
        assert_eq!(t.setting("v"), Some("10"));
        assert_eq!(t.setting("edge_z"), Some("0"));
        assert_eq!(t.setting("normalize"), Some("peak"));
        assert_eq!(t.info("command"), Some("spectrum"));
        assert!(t.info("tool").unwrap().starts_with("nsse "));
        let q = t.column("q_norm").unwrap();
        assert!(q.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(q.iter().any(|&x| x == 1.0));
    }

    #[test]
    fn header_regenerates_the_file() {
        let out = run_spectrum(&small_spectrum()).unwrap();
        let t = Table::parse(std::str::from_utf8(&out[0].bytes).unwrap()).unwrap();
        let mut c = RunConfig::defaults(Command::Spectrum);
        c.apply(&t.meta.settings).unwrap();
        let again = run_spectrum(&c).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn one_file_per_velocity_and_time() {
        let mut c = small_spectrum();
        c.set("v", "10,1").unwrap();
        c.set("t", "1,2").unwrap();
        c.set("points", "3").unwrap();
        let names: Vec<String> = run_spectrum(&c).unwrap().into_iter().map(|o| o.name).collect();
        assert_eq!(
            names,
            ["spectrum_v10_t1.csv", "spectrum_v10_t2.csv", "spectrum_v1_t1.csv", "spectrum_v1_t2.csv"]
        );
    }

    #[test]
    fn output_routing() {
        let dir = tempfile::tempdir().unwrap();
        let one = [Output {
            name: "a.csv".into(),
            bytes: b"x\n".to_vec(),
        }];
        let mut sink = Vec::new();
        assert!(write_outputs(&one, None, &mut sink).unwrap().is_empty());
        assert_eq!(sink, b"x\n");
        let p = write_outputs(&one, Some(dir.path()), &mut sink).unwrap();
        assert_eq!(p, vec![dir.path().join("a.csv")]);
        let file = dir.path().join("b.csv");
        write_outputs(&one, Some(&file), &mut sink).unwrap();
        assert_eq!(fs::read(&file).unwrap(), b"x\n");
        let two = [one[0].clone(), Output {
            name: "c.csv".into(),
            bytes: b"y\n".to_vec(),
        }];
        let e = write_outputs(&two, None, &mut sink).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let sub = dir.path().join("sub");
        assert_eq!(write_outputs(&two, Some(&sub), &mut sink).unwrap().len(), 2);
        assert_eq!(fs::read(sub.join("c.csv")).unwrap(), b"y\n");
    }

    #[test]
    fn sse_reference_and_angular_layouts() {
        let mut c = RunConfig::defaults(Command::Sse);
        c.set("points", "5").unwrap();
        let out = run_sse(&c).unwrap();
        assert_eq!(out[0].name, "sse_t5.csv");
        let t = Table::parse(std::str::from_utf8(&out[0].bytes).unwrap()).unwrap();
        assert_eq!(t.setting("v"), Some("inf"));
        assert_eq!(t.rows.len(), 5);

        let mut c = RunConfig::defaults(Command::Angular);
        c.apply(&[
            ("v".into(), "inf".into()),
            ("t".into(), "2".into()),
            ("theta_points".into(), "7".into()),
            ("preset".into(), "relaxed".into()),
        ])
        .unwrap();
        let out = run_angular(&c).unwrap();
        assert_eq!(out[0].name, "angular_vinf.csv");
        let t = Table::parse(std::str::from_utf8(&out[0].bytes).unwrap()).unwrap();
        assert_eq!(t.header, vec!["t_tau_nat", "theta_deg", "p_reduced"]);
        assert_eq!(t.column("theta_deg").unwrap(), linspace(0.0, 180.0, 7));
        for p in t.column("p_reduced").unwrap() {
            assert!((p - 1.0).abs() < 1e-5, "{p}");
        }
    }

    #[test]
    fn exit_codes() {
        let e: CliError = nsse_core::Error::NonConvergence {
            what: "z integral",
            estimate: 1.0,
            error_bound: 1.0,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(CliError::ValidationFailed.exit_code(), 1);
        let e: CliError = nsse_core::Error::InvalidParameter {
            name: "theta",
            reason: "x".into(),
        }
        .into();
        assert_eq!(e.exit_code(), 2);
    }
}
