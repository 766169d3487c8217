use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn edgewalk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_edgewalk"));
    cmd.args(args).env_remove("EDGEWALK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Run {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Runs `command` with `--set` overrides and returns the CSV text.
    fn ok(&self, command: &str, sets: &[&str], out: &str) -> String {
        let out_path = self.path(out);
        let output = self.exec(command, sets, &out_path, &[]);
        assert!(
            output.status.success(),
            "{command} {sets:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        fs::read_to_string(out_path).unwrap()
    }

    fn exec(&self, command: &str, sets: &[&str], out: &Path, extra: &[&str]) -> Output {
        let mut args = vec![command.to_string()];
        for s in sets {
            args.push("--set".into());
            args.push(s.to_string());
        }
        args.push("--out".into());
        args.push(out.display().to_string());
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        edgewalk(&refs, &[])
    }
}

fn result(csv: &str, key: &str) -> String {
    let prefix = format!("# result {key}=");
    csv.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no result {key}"))
        .to_string()
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let body = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, body)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (header, body) = rows(csv);
    let idx = header.iter().position(|h| h == name).unwrap();
    body.iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn simulate_reproduces_the_fifty_step_distribution() {
    let run = Run::new();
    let svg = run.path("fig.svg");
    let out = run.path("fig.csv");
    let status = run.exec("simulate", &["steps=50"], &out, &["--svg", svg.to_str().unwrap()]);
    assert!(status.status.success());
    let csv = fs::read_to_string(&out).unwrap();

    let (header, body) = rows(&csv);
    assert_eq!(header, ["index", "label", "probability"]);
    assert_eq!(body.len(), 104);
    let p = column(&csv, "probability");
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(result(&csv, "support_99").parse::<u64>().unwrap() <= 38);
    let labels = column(&csv, "label");
    let peak = |lo: f64, hi: f64| {
        labels
            .iter()
            .zip(&p)
            .filter(|(j, _)| (lo..=hi).contains(*j))
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0
            .abs()
    };
    assert!(peak(0.0, 60.0) > 25.0 && peak(-60.0, 0.0) > 25.0);

    let svg = fs::read_to_string(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("probability"));
}

#[test]
fn output_is_deterministic_and_reproducible_from_metadata() {
    let run = Run::new();
    let sets = ["steps=40", "t=0.6@pi/5", "r=0.8i", "start=random", "seed=17"];
    let a = run.ok("simulate", &sets, "a.csv");
    let b = run.ok("simulate", &sets, "b.csv");
    assert_eq!(a, b);

    // Feeding the CSV back as the config reproduces it byte for byte.
    let out = run.path("c.csv");
    let rerun = run.exec("simulate", &[], &out, &["--config", run.path("a.csv").to_str().unwrap()]);
    assert!(rerun.status.success());
    assert_eq!(fs::read_to_string(out).unwrap(), a);
    assert!(a.contains("# config t=") && a.contains("# config seed=17"));
    assert!(a.starts_with("# edgewalk "));
}

#[test]
fn config_file_and_overrides() {
    let run = Run::new();
    let cfg = run.path("exp.cfg");
    fs::write(&cfg, "# first experiment\nsteps = 30\nt = 0.8\n\ndistribution = vertex\n").unwrap();
    let out = run.path("o.csv");
    let o = run.exec("simulate", &["steps=20"], &out, &["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out).unwrap();
    assert!(csv.contains("# config steps=20"));
    let r: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("# config r="))
        .and_then(|v| v.strip_suffix("+0.0i"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((r - 0.6).abs() < 1e-15);
    assert!(csv.contains("# config distribution=vertex"));
}

#[test]
fn phase_shifters_narrow_the_distribution() {
    let run = Run::new();
    let plain = run.ok("simulate", &["steps=50"], "plain.csv");
    let shifted = run.ok("simulate", &["steps=50", "phi=pi/2", "phi_placement=even"], "shift.csv");
    let w = |csv: &str| result(csv, "support_99").parse::<u64>().unwrap();
    assert!(w(&shifted) < w(&plain));
    let third = run.ok("simulate", &["steps=50", "phi=pi/3"], "third.csv");
    assert!(third.contains("# config phi_placement=even"));
}

#[test]
fn reversed_start_mirrors_the_distribution() {
    let run = Run::new();
    let right = run.ok("simulate", &["steps=30", "start=0,1"], "r.csv");
    let left = run.ok("simulate", &["steps=30", "start=1,0"], "l.csv");
    let pr = column(&right, "probability");
    let pl = column(&left, "probability");
    let labels = column(&right, "label");
    for (i, j) in labels.iter().enumerate() {
        // Edge {j, j+1} reversed about the edge {0, 1} is edge {-j, 1-j}.
        let n = labels.len() as f64;
        let m = (-j + n / 2.0).rem_euclid(n) - n / 2.0;
        let mirror = labels.iter().position(|x| *x == m).unwrap();
        assert!((pr[i] - pl[mirror]).abs() < 1e-12, "edge {j}");
    }
}

#[test]
fn average_flattens_for_generic_phase() {
    let run = Run::new();
    let csv = run.ok(
        "average",
        &["n=8", "m=50000", "t=0.7071067811865476@pi/7", "r=0.7071067811865476"],
        "avg.csv",
    );
    let p = column(&csv, "probability");
    assert_eq!(p.len(), 8);
    assert!(p.iter().all(|x| (x - 0.125).abs() < 0.01));
    assert_eq!(result(&csv, "uniform_limit_condition"), "true");
}

#[test]
fn scattering_sweep_schema_and_resonances() {
    let run = Run::new();
    let single = run.ok("scattering", &[], "single.csv");
    let (header, body) = rows(&single);
    assert_eq!(header, ["theta", "R", "T", "residual"]);
    assert_eq!(body.len(), 256);
    assert!(column(&single, "R").iter().all(|r| (r - 0.5).abs() < 1e-12));

    let double = run.ok(
        "scattering",
        &["barrier=0.7071067811865476 0.7071067811865476; 1 0; 0.7071067811865476 0.7071067811865476"],
        "double.csv",
    );
    assert!(column(&double, "residual").iter().all(|r| *r < 1e-10));
    assert!(result(&double, "resonance_count").parse::<usize>().unwrap() > 0);
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = Run::new();
    let sets = ["barrier=0.6 0.8 0.3; 0.9 0.43588989435406733i; 0.5@1 0.8660254037844386"];
    let default = run.ok("scattering", &sets, "d.csv");
    let out = run.path("one.csv");
    let mut args = vec!["scattering".to_string()];
    for s in sets {
        args.extend(["--set".to_string(), s.to_string()]);
    }
    args.extend(["--out".to_string(), out.display().to_string()]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert!(edgewalk(&refs, &[("EDGEWALK_THREADS", "1")]).status.success());
    assert_eq!(fs::read_to_string(out).unwrap(), default);
    let bad = edgewalk(&refs, &[("EDGEWALK_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn spectra() {
    let run = Run::new();
    let cycle = run.ok("spectrum", &["n=16", "t=0.7071067811865476@pi/7", "r=0.7071067811865476"], "c.csv");
    assert_eq!(rows(&cycle).1.len(), 32);
    assert!(column(&cycle, "residual").iter().all(|r| *r < 1e-10));

    let shifted = run.ok("spectrum", &["n=8", "spectrum=two-periodic", "phi=pi/2"], "p.csv");
    let (_, body) = rows(&shifted);
    assert_eq!(body.len(), 32);
    assert!(column(&shifted, "quartic_residual").iter().all(|r| *r < 1e-9));
    // Sector k=1 of N=8 sits at theta - eta = pi/4 for real t; the plus branch
    // has even/odd ratio 3 when |r|^2 = 1/2.
    let ratios: Vec<f64> = body
        .iter()
        .filter(|r| r[0] == "1" && r[2] == "plus")
        .map(|r| r[7].parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 2);
    assert!(ratios.iter().all(|x| (x - 3.0).abs() < 1e-8));
}

#[test]
fn equivalence_and_asymptotics() {
    let run = Run::new();
    let eq = run.ok("equivalence", &["steps=50"], "eq.csv");
    assert_eq!(rows(&eq).0, ["index", "label", "edge_probability", "vertex_probability"]);
    assert!(result(&eq, "max_edge_vs_vertex_difference").parse::<f64>().unwrap() > 1e-3);

    let asym = run.ok("asymptotic", &["steps=1000"], "asym.csv");
    let rel: f64 = result(&asym, "origin_relative_error").parse().unwrap();
    assert!(rel < 0.1);
    assert_eq!(result(&asym, "window_samples"), "21");
}

#[test]
fn config_errors_exit_with_two() {
    let run = Run::new();
    let out = run.path("x.csv");
    let cases: &[&[&str]] = &[
        &["bogus=1"],
        &["steps=many"],
        &["t=0.9", "r=0.9"],
        &["start=0,2"],
        &["t=1+2j"],
    ];
    for sets in cases {
        let o = run.exec("simulate", sets, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{sets:?}");
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    }
    assert_eq!(run.exec("average", &[], &out, &[]).status.code(), Some(2));
    assert_eq!(
        run.exec("asymptotic", &["phi=pi/2"], &out, &[]).status.code(),
        Some(2)
    );
    let missing = run.exec("simulate", &[], &out, &["--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&run.exec("simulate", &["steps=x"], &out, &[]).stderr).to_string();
    assert!(msg.contains("--set #1") && msg.contains("steps"));
}

#[test]
fn accumulated_norm_drift_exits_with_three() {
    // |t|^2 + |r|^2 - 1 is about 5e-11: accepted by the unitarity precondition,
    // but after a few hundred steps the norm contract fails.
    let run = Run::new();
    let out = run.path("drift.csv");
    let o = run.exec(
        "simulate",
        &["steps=400", "t=0.70710678122", "r=0.7071067811865476"],
        &out,
        &[],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("norm"));
    assert!(!out.exists());
}
