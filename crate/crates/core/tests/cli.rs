use spinlab::cli::{run, run_simulate, CliError, SimKind};
use std::fs;
use std::path::Path;

fn spinlab(args: &[&str]) -> i32 {
    run(std::iter::once("spinlab").chain(args.iter().copied()))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn phase_diagram_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phase");
    assert_eq!(spinlab(&["phase-diagram", "--p", "3", "--tmin", "0.5", "--tmax", "1.2", "--points", "141", "--out", path(&out)]), 0);
    for f in ["phase.csv", "landmarks.json", "v_gap.dat", "e_opt.dat", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let landmarks: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("landmarks.json")).unwrap()).unwrap();
    let t_sh = landmarks["temperatures"]["t_sh"].as_f64().unwrap();
    assert!((t_sh - 0.75f64.sqrt()).abs() < 1e-12);
    let (t_s, t_bbm) = (landmarks["temperatures"]["t_s"].as_f64().unwrap(), landmarks["temperatures"]["t_bbm"].as_f64().unwrap());

    let mut reader = csv::Reader::from_path(out.join("phase.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "p");
    assert_eq!(&header[11], "shattered");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 141);
    let shattered: Vec<usize> = (0..rows.len()).filter(|&i| &rows[i][11] == "true").collect();
    assert!(!shattered.is_empty());
    // one contiguous run of grid points inside (t_s, t_sh]
    assert_eq!(shattered[shattered.len() - 1] - shattered[0] + 1, shattered.len());
    for &i in &shattered {
        let t: f64 = rows[i][1].parse().unwrap();
        assert!(t > t_s && t <= t_sh);
    }
    for r in &rows {
        let t: f64 = r[1].parse().unwrap();
        if t > t_bbm {
            assert_eq!(&r[10], "false");
            assert_eq!(&r[12], "EmptyFeasibleSet");
            assert_eq!(&r[6], "");
        }
    }

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "phase-diagram");
    assert_eq!(manifest["output_paths"].as_array().unwrap().len(), 4);
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good");
    assert_eq!(spinlab(&["audit", "--p", "3", "--samples", "500", "--out", path(&good)]), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(good.join("audit.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["envelope"]["max_fd_deviation"].as_f64().unwrap() < 1e-4);

    let bad = dir.path().join("bad");
    assert_eq!(spinlab(&["audit", "--p", "3", "--samples", "500", "--out", path(&bad), "--tamper", "1e-6"]), 1);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(bad.join("audit.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(spinlab(&["no-such-command"]), 2);
    assert_eq!(spinlab(&["phase-diagram"]), 2);
    assert_eq!(spinlab(&["phase-diagram", "--tmin", "1.0", "--tmax", "0.5", "--out", out]), 2);
    assert_eq!(spinlab(&["audit", "--samples", "0", "--out", out]), 2);
    assert_eq!(spinlab(&["simulate", "sideways", "--config", "x", "--out", out]), 2);
    assert_eq!(spinlab(&["phase-diagram", "--p", "2", "--out", out]), 1);
}

fn config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn key_of(e: CliError) -> String {
    match e {
        CliError::Config { key, .. } => key,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        ("p = 3\nN_list = 8\nE = -1.645\nT = 0.8\nq = 0.5\neta = 0.05\n", "q"),
        ("p = 3\nN_list = 8\nE = -1.645\nT = 0.8\neta = 0.5\n", "eta"),
        ("p = 3\nN_list = 8\nE = -1.645\nT = -1\neta = 0.05\n", "T"),
        ("p = 3\nN_list = 8, x\nE = -1.645\nT = 0.8\neta = 0.05\n", "N_list"),
        ("p = 3\nN_list = 8\nE = -1.645\nT = 0.8\neta = 0.05\ntemperature = 1\n", "temperature"),
        ("p = 3\nE = -1.645\nT = 0.8\neta = 0.05\n", "N_list"),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let cfg = config(dir.path(), &format!("c{i}.cfg"), text);
        let err = run_simulate(SimKind::ExitTimes, &cfg, &out, None, false).unwrap_err();
        assert_eq!(key_of(err), *key, "case {i}");
    }
    let cfg = config(dir.path(), "cov.cfg", "N = 2\n");
    assert_eq!(key_of(run_simulate(SimKind::Covariance, &cfg, &out, None, false).unwrap_err()), "N");
    assert_eq!(spinlab(&["simulate", "exit-times", "--config", path(&dir.path().join("c0.cfg")), "--out", path(&out)]), 1);
}

#[test]
fn simulate_outputs_reproduce_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "cov.cfg", "# small run\np = 3\nN = 10\ndraws = 500\nq_list = 0.3\nseed = 9\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(spinlab(&["simulate", "covariance", "--config", path(&cfg), "--out", path(out)]), 0);
    }
    for f in ["results.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["parameters"]["N"], "10");
    let rows = csv::Reader::from_path(a.join("results.csv")).unwrap().records().count();
    assert_eq!(rows, 10);
}

#[test]
fn exit_times_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "exit.cfg",
        "p = 3\nN_list = 8, 12\nE = -1.645\nT = 0.8\nq = 0.5\neta = 0.05\nreplicas = 3\nhorizon = 2\nburn_in = 100\n",
    );
    let out = dir.path().join("exit");
    assert_eq!(spinlab(&["simulate", "exit-times", "--config", path(&cfg), "--out", path(&out), "--override", "--seed", "3"]), 0);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["sizes"].as_array().unwrap().len(), 2);
    let rows: Vec<csv::StringRecord> =
        csv::Reader::from_path(out.join("results.csv")).unwrap().records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn planted_band_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "band.cfg", "p = 3\nN = 10\nE = -1.637\nT = 0.7\neta = 0.02\nsamples = 1000\nlevels = 100\n");
    let out = dir.path().join("band");
    assert_eq!(spinlab(&["simulate", "planted-band", "--config", path(&cfg), "--out", path(&out)]), 0);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let q = s["q"].as_f64().unwrap();
    assert!((q - 0.8221).abs() < 1e-3, "{q}");
    assert!(s["std_err"].as_f64().unwrap() > 0.0);
}
