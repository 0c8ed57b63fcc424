use std::process::{Command, Output};

use nsse_cli::csv::Table;

fn nsse(args: &[&str]) -> Output {
    nsse_env(args, &[])
}

fn nsse_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsse"));
    cmd.args(args).env_remove("NSSE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn nsse")
}

fn table(out: &Output) -> Table {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    Table::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn spectrum_writes_three_columns_peak_normalized() {
    let t = table(&nsse(&["spectrum", "--v", "1", "--edge-z", "0", "--points", "5"]));
    assert_eq!(t.header, ["detuning_gamma", "q_norm", "lorentzian_ref"]);
    assert_eq!(t.rows.len(), 5);
    assert_eq!(t.column("detuning_gamma").unwrap(), [-15.0, -7.5, 0.0, 7.5, 15.0]);
    let q = t.column("q_norm").unwrap();
    assert!((q.iter().cloned().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
    assert_eq!(t.setting("v"), Some("1"));
    assert_eq!(t.setting("edge_z"), Some("0"));
    assert_eq!(t.info("command"), Some("spectrum"));
}

#[test]
fn default_spectrum_without_out_is_rejected() {
    let out = nsse(&["spectrum", "--points", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out"), "{}", stderr(&out));
}

#[test]
fn several_datasets_go_into_the_out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsse(&[
        "spectrum", "--v", "10,1", "--edge-z", "0.5,-0.5", "--points", "3", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4, "{names:?}");
    assert!(names.iter().all(|n| n.starts_with("spectrum_v") && n.ends_with(".csv")));
}

#[test]
fn bad_values_exit_2_and_name_the_key() {
    for (args, key) in [
        (vec!["spectrum", "--v", "-1", "--edge-z", "0"], "v"),
        (vec!["spectrum", "--v", "1", "--t", "1", "--points", "1"], "points"),
        (vec!["spectrum", "--v", "1", "--t", "1", "--normalize", "max"], "normalize"),
        (vec!["spectrum", "--v", "inf", "--edge-z", "0"], "edge_z"),
        (vec!["sse", "--t", "0"], "t"),
        (vec!["angular", "--packet-width", "0", "--t", "1"], "packet_width"),
        (vec!["spectrum", "--v", "1", "--t", "1", "--omega-min", "3", "--omega-max", "2"], "omega_max"),
    ] {
        let out = nsse(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(key), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn config_file_is_read_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# a run\nv = 1\nt = 2\npoints = 7\ntheta = 45\n").unwrap();
    let p = path.to_str().unwrap();
    let t = table(&nsse(&["spectrum", "--config", p]));
    assert_eq!(t.rows.len(), 7);
    assert_eq!(t.setting("theta"), Some("45"));
    let t = table(&nsse(&["spectrum", "--config", p, "--points", "3"]));
    assert_eq!(t.rows.len(), 3);

    std::fs::write(&path, "v = 1\nbogus = 3\n").unwrap();
    let out = nsse(&["spectrum", "--config", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));
}

#[test]
fn dataset_header_regenerates_the_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let first = nsse(&["spectrum", "--v", "3", "--t", "1.5", "--points", "4", "--theta", "60"]);
    assert!(first.status.success());
    let t = table(&first);
    let cfg: String = t
        .meta
        .settings
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let path = dir.path().join("again.cfg");
    std::fs::write(&path, cfg).unwrap();
    let second = nsse(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn simultaneous_switch_on_is_isotropic() {
    let t = table(&nsse(&["angular", "--v", "inf", "--t", "1", "--theta-points", "7"]));
    assert_eq!(t.header, ["t_tau_nat", "theta_deg", "p_reduced"]);
    assert_eq!(t.rows.len(), 7);
    for p in t.column("p_reduced").unwrap() {
        assert!((p - 1.0).abs() < 1e-6, "{p}");
    }
}

#[test]
fn nothing_is_emitted_before_the_front_arrives() {
    let t = table(&nsse(&[
        "spectrum", "--v", "10", "--edge-z", "5", "--points", "9", "--normalize", "raw",
    ]));
    for q in t.column("q_norm").unwrap() {
        assert!(q.abs() < 1e-10, "{q}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["spectrum", "--v", "1", "--edge-z", "-0.5", "--points", "31", "--theta", "120"];
    let one = nsse_env(&args, &[("NSSE_THREADS", "1")]);
    let three = nsse_env(&args, &[("NSSE_THREADS", "3")]);
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);

    let bad = nsse_env(&args, &[("NSSE_THREADS", "many")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3() {
    let out = nsse(&[
        "spectrum", "--v", "1", "--t", "3", "--points", "3", "--z-rel-tol", "1e-15",
        "--max-intervals", "16",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("converge"));
}

#[test]
fn validate_flags_a_perturbed_faddeeva() {
    let ok = nsse(&["validate", "--suite", "special"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));

    let bad = nsse(&["validate", "--suite", "special", "--perturb-faddeeva", "0.01"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));

    let unknown = nsse(&["validate", "--suite", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}
