use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nltrace_cli::output::RESULTS_COLUMNS;

fn nltrace(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nltrace"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NLTRACE_OUTPUT_ROOT")
        .output()
        .expect("spawn nltrace")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

fn column(path: &Path, name: &str) -> usize {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_experiments_names_every_experiment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nltrace(&["list-experiments"], tmp.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["verify_hardy_1d", "verify_hardy_strip", "verify_elementary", "solve_obstacle", "convergence_study"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn elementary_run_writes_results_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "e.toml", "experiment = \"verify_elementary\"\nseed = 4\n");
    let o = nltrace(&["run", "e.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("out");
    let mut r = csv::Reader::from_path(out.join("results.csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), RESULTS_COLUMNS);
    assert!(r.records().all(|x| &x.unwrap()[19] == "true"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["seed"], 4);
    let echoed = fs::read_to_string(out.join("config.resolved.toml")).unwrap();
    assert!(echoed.contains("epsilon = 0.5"), "{echoed}");
}

#[test]
fn hardy_1d_ratio_of_the_identity_is_24() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "h.toml", "experiment = \"verify_hardy_1d\"\n\n[family]\nfunctions = [\"coord(0)\"]\n");
    let o = nltrace(&["run", "h.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = tmp.path().join("out/results.csv");
    let ratio = column(&path, "ratio");
    let recs = rows(&path);
    assert!(!recs.is_empty());
    for rec in recs {
        let r: f64 = rec[ratio].parse().unwrap();
        assert!((r - 24.0).abs() < 1e-3, "ratio {r}");
    }
}

#[test]
fn convergence_study_writes_a_drift_table() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "c.toml",
        "experiment = \"convergence_study\"\n\n[study]\nexperiment = \"verify_hardy_1d\"\n\n[mesh]\nlevels = [0, 1, 2]\n",
    );
    let o = nltrace(&["run", "c.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = tmp.path().join("out/convergence.csv");
    let drift = column(&path, "drift");
    let level = column(&path, "level");
    let recs = rows(&path);
    let levels: std::collections::BTreeSet<String> = recs.iter().map(|r| r[level].to_string()).collect();
    assert_eq!(levels.into_iter().collect::<Vec<_>>(), ["0", "1", "2"]);
    assert!(recs.iter().filter(|r| r[level] != *"0").all(|r| r[drift].parse::<f64>().unwrap() < 0.1));
}

#[test]
fn unknown_key_is_reported_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.toml", "experiment = \"verify_elementary\"\n\n[params]\nsmoothness = 0.5\n");
    let o = nltrace(&["run", "bad.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("bad.toml:4: unknown field `smoothness`"), "{err}");
}

#[test]
fn subcritical_exponent_is_a_precondition_error_on_the_s_line() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "sub.toml", "experiment = \"verify_hardy_strip\"\n\n[params]\np = 2.0\ns = 0.45\n");
    let o = nltrace(&["run", "sub.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("sub.toml:5: hardy_strip requires sp > 1; got sp = 0.9"), "{err}");
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn output_root_reroots_relative_directories() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "e.toml", "experiment = \"verify_elementary\"\n\n[output]\ndir = \"rel/run\"\n");
    let root = tmp.path().join("root");
    let o = Command::new(env!("CARGO_BIN_EXE_nltrace"))
        .args(["run", "e.toml"])
        .current_dir(tmp.path())
        .env("NLTRACE_OUTPUT_ROOT", &root)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(root.join("rel/run/results.csv").exists());
}

#[test]
fn artifacts_leave_no_temporary_files() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "o.toml", "experiment = \"solve_obstacle\"\n");
    let o = nltrace(&["run", "o.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> =
        fs::read_dir(tmp.path().join("out")).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["config.resolved.toml", "kkt.json", "results.csv", "solution.csv", "summary.json"]);
    let kkt: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("out/kkt.json")).unwrap()).unwrap();
    assert!(kkt["psor"]["complementarity"].as_f64().unwrap() <= 1e-8);
    assert_eq!(kkt["projected_descent"]["boundary_exact"], true);
}

#[test]
fn reruns_are_bitwise_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "t.toml",
        "experiment = \"verify_trace_strip\"\nseed = 9\n\n[mesh]\ntarget_h = 0.25\ndelta_cut = 0.03125\nlevels = [0, 1]\n",
    );
    let a = nltrace(&["run", "t.toml", "--threads", "1", "--output", "a"], tmp.path());
    let b = nltrace(&["run", "t.toml", "--threads", "3", "--output", "b"], tmp.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(fs::read(tmp.path().join("a/results.csv")).unwrap(), fs::read(tmp.path().join("b/results.csv")).unwrap());
    let o = nltrace(&["compare", "a", "b"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("bitwise equal"));
}

#[test]
fn compare_flags_differences_and_mismatched_experiments() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "e.toml", "experiment = \"verify_elementary\"\n");
    write(tmp.path(), "h.toml", "experiment = \"verify_hardy_1d\"\n");
    assert!(nltrace(&["run", "e.toml", "--output", "e"], tmp.path()).status.success());
    assert!(nltrace(&["run", "h.toml", "--output", "h"], tmp.path()).status.success());

    let text = fs::read_to_string(tmp.path().join("e/results.csv")).unwrap();
    let path = tmp.path().join("e/results.csv");
    let ratio = column(&path, "ratio");
    let mut w = csv::Writer::from_path(tmp.path().join("edited.csv")).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    w.write_record(r.headers().unwrap()).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let v: f64 = rec[ratio].parse().unwrap();
        let edited: Vec<String> =
            rec.iter().enumerate().map(|(k, f)| if k == ratio { format!("{:?}", v * 1.01) } else { f.to_string() }).collect();
        w.write_record(&edited).unwrap();
    }
    w.flush().unwrap();

    let o = nltrace(&["compare", "e/results.csv", "edited.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = nltrace(&["compare", "e/results.csv", "edited.csv", "--rel-tol", "0.02"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let o = nltrace(&["compare", "e", "h"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("experiment mismatch"), "{}", stderr(&o));
}

#[test]
fn failed_checks_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "o.toml", "experiment = \"solve_obstacle\"\n\n[solver]\ntol = 1e-3\n");
    let o = nltrace(&["run", "o.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL obstacle.agreement"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
}

#[test]
fn solver_failure_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "o.toml", "experiment = \"solve_obstacle\"\n\n[solver]\nmethod = \"psor\"\nmax_iter = 1\n");
    let o = nltrace(&["run", "o.toml", "--output", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("PSOR did not reach tol"), "{}", stderr(&o));
}
