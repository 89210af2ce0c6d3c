use std::f64::consts::PI;
use std::process::Command;

use sgwave::cli::run;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sgwave(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("sgwave").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn eval_kink_array_spans_one_turn() {
    let r = sgwave(&["eval", "--alpha", "1", "--gamma", "1.4142135623730951", "--branch", "kink_array", "--grid", "0:6.283185307179586:101"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("xi,y,F,g,phi\n"));
    let table = rows(&r.stdout);
    assert_eq!(table.len(), 101);
    let span = table[100][3] - table[0][3];
    assert!((span - 2.0 * PI).abs() < 1e-9, "{span}");
    assert!(table.iter().all(|row| row[3].is_finite() && row[4].is_finite()));
}

#[test]
fn eval_constant_rows() {
    let r = sgwave(&["eval", "--alpha", "1", "--gamma", "0.5", "--branch", "constant_s", "--grid", "-5:5:11"]);
    assert_eq!(r.code, 0);
    for row in rows(&r.stdout) {
        assert!((row[4] + PI / 6.0).abs() < 1e-15);
    }
}

#[test]
fn eval_marks_poles_as_infinite() {
    let r = sgwave(&["eval", "--alpha", "1", "--gamma", "0.5", "--branch", "increasing2", "--grid", "-1:1:3"]);
    assert_eq!(r.code, 0);
    let pole = r.stdout.lines().nth(2).unwrap();
    let fields: Vec<&str> = pole.split(',').collect();
    assert_eq!(fields[1], "inf");
    assert_eq!(fields[2], "inf");
    assert!(fields[3].parse::<f64>().unwrap().is_finite());
}

#[test]
fn domain_errors_exit_2() {
    let r = sgwave(&["eval", "--alpha", "1", "--gamma", "0.5", "--branch", "kink_array"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("gamma > 1"), "{}", r.stderr);

    let r = sgwave(&["eval", "--alpha", "1", "--gamma", "0.5", "--branch", "kink"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("kink"), "{}", r.stderr);

    assert_eq!(sgwave(&["eval", "--alpha", "-1", "--gamma", "0.5", "--branch", "decreasing1"]).code, 2);
    assert_eq!(sgwave(&["eval", "--gamma", "0.5", "--branch", "decreasing1"]).code, 2);
    assert_eq!(sgwave(&["limits", "--alpha", "1", "--gamma", "2", "--branch", "kink_array"]).code, 2);
    assert_eq!(sgwave(&["nonsense"]).code, 2);
}

#[test]
fn period_reports_both_routes() {
    let r = sgwave(&["period", "--alpha", "1", "--gamma", "1.4142135623730951"]);
    assert_eq!(r.code, 0);
    assert!((value(&r.stdout, "closed_form") - 2.0 * PI).abs() < 1e-9);
    assert!((value(&r.stdout, "quadrature") - 2.0 * PI).abs() < 1e-9);
    assert!(value(&r.stdout, "difference") < 1e-10);

    let r = sgwave(&["period", "--alpha", "1", "--gamma", "1.25"]);
    assert!((value(&r.stdout, "closed_form") - 8.377580410).abs() < 1e-9);

    assert_eq!(sgwave(&["period", "--alpha", "1", "--gamma", "1"]).code, 2);
}

#[test]
fn limits_of_subcritical_front() {
    let r = sgwave(&["limits", "--alpha", "0.5", "--gamma", "0.5", "--branch", "increasing2"]);
    assert_eq!(r.code, 0);
    assert!((value(&r.stdout, "g_minus_inf") - 5.0 * PI / 6.0).abs() < 1e-15);
    assert!((value(&r.stdout, "g_plus_inf") - 13.0 * PI / 6.0).abs() < 1e-14);
}

#[test]
fn verify_passes_and_fails_on_demand() {
    let r = sgwave(&["verify"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("identity[")).count(), 101);
    assert!(r.stdout.contains("status = pass"));
    let worst_identity = r
        .stdout
        .lines()
        .filter(|l| l.starts_with("identity["))
        .map(|l| l.split(" = ").nth(1).unwrap().split_whitespace().next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst_identity < 1e-12);

    let r = sgwave(&["verify", "--corrupt-gamma-sign"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("status = fail"));
    assert!(r.stdout.contains("worst = ode_residual."));

    let r = sgwave(&["verify", "--gamma-grid", "0:1:11"]);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("identity[")).count(), 11);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wave.cfg");
    std::fs::write(&cfg, "# stable front\nalpha = 1\ngamma = 0.5   # forcing\nbranch = constant_s\ngrid = 0:1:2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let r = sgwave(&["eval", "--config", cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((rows(&r.stdout)[0][4] + PI / 6.0).abs() < 1e-15);

    // the flag wins over the file
    let r = sgwave(&["eval", "--config", cfg, "--branch", "constant_u"]);
    let phi_u = rows(&r.stdout)[0][4];
    assert!((phi_u.sin() + 0.5).abs() < 1e-14 && (phi_u + PI / 6.0).abs() > 0.1, "{phi_u}");

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "alpha = 1\nspeed = 2\n").unwrap();
    let r = sgwave(&["eval", "--config", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("speed"));

    assert_eq!(sgwave(&["eval", "--config", "/nonexistent/wave.cfg"]).code, 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("period.txt");
    let r = sgwave(&["period", "--alpha", "2", "--gamma", "1.25", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!((value(&text, "closed_form") - 16.0 * PI / 3.0).abs() < 1e-12);
}

#[test]
fn simulate_kink_array_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let snapshot = dir.path().join("snap.csv");
    let r = sgwave(&[
        "simulate", "--alpha", "0.7", "--gamma", "1.5", "--branch", "kink_array", "--domain", "circle", "--m", "1",
        "--n", "256", "--t-end", "4", "--out", report.to_str().unwrap(), "--snapshot", snapshot.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(value(&r.stdout, "final_deviation") < 1e-3);
    assert_eq!(value(&r.stdout, "final_winding"), 1.0);
    let report = std::fs::read_to_string(report).unwrap();
    assert!(report.starts_with("t,deviation,shift\n"));
    let snapshot = std::fs::read_to_string(snapshot).unwrap();
    assert!(snapshot.starts_with("x,phi,phi_t\n"));
    assert_eq!(snapshot.lines().count(), 257);
}

#[test]
fn simulate_probe_reports_growth() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let r = sgwave(&[
        "simulate", "--alpha", "0.5", "--gamma", "0.5", "--branch", "increasing2", "--domain", "segment", "--n", "1024",
        "--epsilon", "1e-3", "--t-end", "30", "--record-every", "16", "--probe", "--out", report.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(value(&r.stdout, "max_deviation") > 0.1);
}

#[test]
fn simulate_config_errors() {
    let base = ["simulate", "--alpha", "0.5", "--gamma", "0.5", "--branch", "increasing2"];
    let r = sgwave(&base);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--out"));

    let mut args = base.to_vec();
    args.extend(["--out", "/nonexistent/dir/report.csv"]);
    assert_eq!(sgwave(&args).code, 2);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let mut args = base.to_vec();
    args.extend(["--out", out.to_str().unwrap(), "--cfl", "1.2"]);
    assert_eq!(sgwave(&args).code, 2);

    // circle needs gamma > 1
    let mut args = base.to_vec();
    args.extend(["--out", out.to_str().unwrap(), "--domain", "circle"]);
    assert_eq!(sgwave(&args).code, 2);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_sgwave");
    let status = |args: &[&str]| {
        Command::new(exe)
            .args(args)
            .env("SGW_LOG", "quiet")
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&["period", "--alpha", "1", "--gamma", "2"]), Some(0));
    assert_eq!(status(&["period", "--alpha", "1", "--gamma", "0.5"]), Some(2));
    assert_eq!(status(&["verify", "--corrupt-gamma-sign", "--gamma-grid", "0:1:3"]), Some(1));
    assert_eq!(status(&["--help"]), Some(0));
}

#[test]
fn simulate_blow_up_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let args = [
        "simulate", "--alpha", "0.5", "--gamma", "1.5", "--branch", "kink_array", "--epsilon", "2e6", "--t-end", "1",
        "--out", out.to_str().unwrap(),
    ];
    assert_eq!(sgwave(&args).code, 3);
    let mut probe = args.to_vec();
    probe.push("--probe");
    let r = sgwave(&probe);
    assert_eq!(r.code, 0);
    assert!(value(&r.stdout, "diverged_at") > 0.0);
}
