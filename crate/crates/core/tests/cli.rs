use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use symdp::cli::{Manifest, MANIFEST_NAME};
use symdp::grid::io::load_values;
use symdp::symmetry::MovingFrame;
use symdp::systems::{DubinsConfig, DubinsFrame, DubinsPair};
use symdp::dp::ControlSystem;
use tempfile::TempDir;

fn symdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn solve(config_path: &str, out: &Path, workers: usize) -> PathBuf {
    let o = symdp(&[
        "solve",
        "--config",
        config_path,
        "--out",
        out.to_str().unwrap(),
        "--workers",
        &workers.to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    out.join(MANIFEST_NAME)
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_ROTOR: &str = r#"
mode = "reduced"
seed = 3

[system]
name = "rotor2d"
horizon = 5
sigma = 0.1
nodes_per_dim = 3

[grid]
axes = [{ lo = 0.0, hi = 2.0, count = 41 }]
"#;

#[test]
fn rotor_solve_writes_one_value_file_per_stage() {
    let tmp = TempDir::new().unwrap();
    let manifest = solve(&config("rotor2d.toml"), tmp.path(), 1);
    let loaded = Manifest::load(&manifest).unwrap();
    let horizon = loaded.manifest.horizon;
    assert_eq!(horizon, 8);
    let values = fs::read_dir(tmp.path())
        .unwrap()
        .filter(|e| {
            let name = e.as_ref().unwrap().file_name();
            name.to_string_lossy().starts_with("value_")
        })
        .count();
    assert_eq!(values, horizon + 1);
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("sha256"));
    assert!(!text.contains("workers"));
}

#[test]
fn worker_count_does_not_change_output_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_ROTOR);
    let a = tmp.path().join("one");
    let b = tmp.path().join("eight");
    solve(&cfg, &a, 1);
    solve(&cfg, &b, 8);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 2 * 5 + 1 + 1);
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn invalid_config_exits_2_with_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &SMALL_ROTOR.replace("seed = 3", "seed = \"x\""));
    let o = symdp(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let cfg = write_config(tmp.path(), &SMALL_ROTOR.replace("rotor2d", "pendulum"));
    assert_eq!(symdp(&["solve", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), &SMALL_ROTOR.replace("horizon = 5", "horizon = 5\nradius = 1.0"));
    assert_eq!(symdp(&["solve", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(symdp(&["solve"]).status.code(), Some(2));
}

#[test]
fn solver_error_exits_1() {
    // the input (-1, 0) sends the node at angle 0 to the origin, where the
    // scaling frame is undefined
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
mode = "equivariant"
[system]
name = "l1"
n = 2
a = [1.0, 0.0, 0.0, 1.0]
b = [1.0, 0.0, 0.0, 1.0]
horizon = 1
input_values = [-1.0, 0.0]
[grid]
axes = [{ lo = 0.0, hi = 6.283185307179586, count = 8, periodic = true }]
"#,
    );
    let o = symdp(&["solve", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn deterministic_rollouts_repeat() {
    let tmp = TempDir::new().unwrap();
    let manifest = solve(&config("rotor2d.toml"), tmp.path(), 1);
    let csv = tmp.path().join("r.csv");
    let run = |x0: &str| {
        let o = symdp(&[
            "simulate",
            "--manifest",
            manifest.to_str().unwrap(),
            "--rollouts",
            "3",
            "--x0",
            x0,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("±"));
        fs::read_to_string(&csv).unwrap()
    };
    let text = run("-0.3,1.2");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rollout,k,x0,x1,u0,stage_cost");
    assert_eq!(lines.len(), 1 + 3 * 9);
    let strip = |r: &str| -> Vec<String> {
        lines[1..]
            .iter()
            .filter(|l| l.starts_with(&format!("{r},")))
            .map(|l| l.split_once(',').unwrap().1.to_string())
            .collect()
    };
    assert_eq!(strip("0"), strip("1"));
    assert_eq!(strip("0"), strip("2"));
    // terminal row has an empty input column
    assert!(lines[9].contains(",,"));
    assert_eq!(run("-0.3,1.2"), text);

    let o = symdp(&["simulate", "--manifest", manifest.to_str().unwrap(), "--x0", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_or_tampered_tables_exit_1() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_ROTOR);
    let out = tmp.path().join("o");
    let manifest = solve(&cfg, &out, 1);
    let m = manifest.to_str().unwrap();
    let policy = out.join("policy_0002.srdp");
    let mut bytes = fs::read(&policy).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&policy, &bytes).unwrap();
    let o = symdp(&["simulate", "--manifest", m]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hash"), "{}", stderr(&o));
    fs::remove_file(&policy).unwrap();
    assert_eq!(symdp(&["simulate", "--manifest", m]).status.code(), Some(1));
    assert_eq!(symdp(&["export", "--manifest", m]).status.code(), Some(1));
}

#[test]
fn check_exit_codes() {
    for name in ["rotor2d.toml", "mri-fingerprint.toml", "dubins-pair.toml", "lqr.toml", "l1.toml"] {
        let o = symdp(&["check", "--config", &config(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
    let o = symdp(&["check", "--config", &config("mri-fingerprint.toml")]);
    let text = stdout(&o);
    for line in text.lines().filter(|l| l.contains(".max_residual=")) {
        let v: f64 = line.rsplit('=').next().unwrap().parse().unwrap();
        assert!(v <= 1e-9, "{line}");
    }
    assert!(text.contains("f.invariance"));
    let o = symdp(&["check", "--config", &config("rotor2d-asymmetric.toml")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("g.invariance"));
}

#[test]
fn export_slices() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_ROTOR);
    let out = tmp.path().join("o");
    let manifest = solve(&cfg, &out, 1);
    let m = manifest.to_str().unwrap();
    let csv = tmp.path().join("slice.csv");
    let o = symdp(&["export", "--manifest", m, "--slice", "stage=1", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let table = load_values(&out.join("value_0001.srdp")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 41);
    for (i, row) in rows.iter().enumerate() {
        let (r, v) = row.split_once(',').unwrap();
        assert_eq!(r.parse::<f64>().unwrap(), table.grid.axes()[0].node(i));
        assert_eq!(v.parse::<f64>().unwrap().to_bits(), table.values[i].to_bits());
    }
    let o = symdp(&["export", "--manifest", m, "--slice", "table=policy,stage=0", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("a0,policy\n"));

    for bad in ["stage=x", "a3=0", "table=q", "stage=40", "bogus=1"] {
        let o = symdp(&["export", "--manifest", m, "--slice", bad]);
        let code = o.status.code();
        // a stage beyond the horizon is a missing table, not a malformed slice
        let expected = if bad == "stage=40" { 1 } else { 2 };
        assert_eq!(code, Some(expected), "{bad}: {}", stderr(&o));
    }
}

#[test]
fn export_rejects_three_free_axes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
mode = "reduced"
[system]
name = "dubins-pair"
horizon = 1
sigma = 0.0
[grid]
axes = [
    { lo = -1.0, hi = 1.0, count = 5 },
    { lo = -1.0, hi = 1.0, count = 4 },
    { lo = 0.0, hi = 6.283185307179586, count = 6, periodic = true },
]
"#,
    );
    let manifest = solve(&cfg, &tmp.path().join("o"), 1);
    let m = manifest.to_str().unwrap();
    assert_eq!(symdp(&["export", "--manifest", m]).status.code(), Some(2));
    let csv = tmp.path().join("s.csv");
    let o = symdp(&["export", "--manifest", m, "--slice", "a2=0", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 5 * 4);
}

/// Desk-scale Dubins run through every subcommand.
#[test]
fn dubins_desk_end_to_end() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("desk");
    let manifest = solve(&config("dubins-desk.toml"), &out, 2);
    let loaded = Manifest::load(&manifest).unwrap();
    assert_eq!(loaded.manifest.horizon, 20);

    // terminal table against g_N recomputed from the relative pose
    let terminal = load_values(&out.join("value_0020.srdp")).unwrap();
    let system = DubinsPair::new(DubinsConfig::default()).unwrap();
    let frame = DubinsFrame::new();
    for (i, node) in terminal.grid.nodes().enumerate() {
        let (z, y, t) = (node[0], node[1], node[2]);
        let heading = t.cos().clamp(-1.0, 1.0).acos();
        let expected = heading * heading + (z.hypot(y) - 1.0).abs();
        assert!((terminal.values[i] - expected).abs() <= 1e-12, "node {i}");
        let full = frame.rho_bar_inv(&node).unwrap();
        assert!((system.terminal_cost(&full) - expected).abs() <= 1e-12);
    }

    let csv = tmp.path().join("rollouts.csv");
    let x0 = "0.1,0,1.5707963267948966,-0.1,0,4.71238898038469";
    let simulate = || {
        let o = symdp(&[
            "simulate", "--manifest", manifest.to_str().unwrap(), "--x0", x0, "--rollouts", "4",
            "--seed", "11", "--out", csv.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(&csv).unwrap()
    };
    let first = simulate();
    assert_eq!(simulate(), first);
    let text = String::from_utf8(first).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.iter().filter(|h| h.starts_with('x')).count(), 6);
    assert_eq!(text.lines().count(), 1 + 4 * 21);

    let slice = tmp.path().join("slice.csv");
    let o = symdp(&[
        "export", "--manifest", manifest.to_str().unwrap(), "--slice", "stage=0,a2=0",
        "--out", slice.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&slice).unwrap();
    assert!(text.starts_with("a0,a1,value\n"));
    assert_eq!(text.lines().count(), 1 + 21 * 21);
}
