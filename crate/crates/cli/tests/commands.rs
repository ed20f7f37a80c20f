use std::io::Write;
use std::process::Command;

use aim_cli::{dispatch, exit_code, ProblemConfig};

fn run(text: &str) -> (i32, String, String) {
    let cfg = ProblemConfig::parse(text).expect("valid config");
    let (mut out, mut log) = (Vec::new(), Vec::new());
    let result = dispatch(&cfg, None, &mut out, &mut log);
    (exit_code(&result), String::from_utf8(out).unwrap(), String::from_utf8(log).unwrap())
}

fn rows(csv_text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv_text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn binary(args: &[&str], config: &str) -> std::process::Output {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(config.as_bytes()).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aim"));
    cmd.args(args).arg("--config").arg(file.path());
    cmd.output().unwrap()
}

const HARMONIC: &str = "mode = eigen\npotential = 0, 0, 1\nbeta = 1\nwindow = 0, 12\nn_max = 30\ntolerance = 1e-10\n";

#[test]
fn hermite_terminate_table() {
    let (code, out, _) = run("mode = terminate\np = 0, 2\nq = 0\nq_lambda = -2\nn_max = 4\n");
    assert_eq!(code, 0);
    let roots: Vec<String> = rows(&out).iter().map(|r| r[3].to_string()).collect();
    assert_eq!(roots, ["0;1", "0;1;2", "0;1;2;3", "0;1;2;3;4"]);
    assert_eq!(&rows(&out)[1][4], "-8*λ*(λ - 1)*(λ - 2)");
}

#[test]
fn harmonic_terminate_gives_odd_energies() {
    // ψ = e^{-x²/2} y turns -ψ'' + x²ψ = Eψ into y'' = 2x y' + (1 - E) y
    let (code, out, _) = run("mode = terminate\npotential = 0, 0, 1\nbeta = 1\nn_max = 3\n");
    assert_eq!(code, 0);
    assert_eq!(&rows(&out)[2][3], "1;3;5;7");
}

#[test]
fn constant_solution_when_q_vanishes() {
    let (code, out, log) = run("mode = terminate\np = 1, 1\nq = 0\nn_max = 1\n");
    assert_eq!(code, 0);
    assert_eq!(&rows(&out)[0][1], "true");
    assert!(log.contains("polynomial solution: constant"), "{log}");
}

#[test]
fn harmonic_eigen() {
    let (code, out, _) = run(HARMONIC);
    assert_eq!(code, 0);
    let energies: Vec<f64> = rows(&out).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(energies.len(), 6);
    for (k, e) in energies.iter().enumerate() {
        assert!((e - (2 * k + 1) as f64).abs() < 1e-10, "{k}: {e}");
    }
}

#[test]
fn empty_window_exits_4() {
    let text = HARMONIC.replace("window = 0, 12", "window = 100, 101");
    let (code, out, log) = run(&text);
    assert_eq!(code, 4);
    assert!(out.is_empty());
    assert!(log.contains("all diverged"));
}

#[test]
fn verify_harmonic_and_wrong_pairing() {
    let text = HARMONIC.replace("mode = eigen", "mode = verify") + "verify_tolerance = 1e-8\n";
    let (code, out, _) = run(&text);
    assert_eq!(code, 0, "{out}");
    assert!(rows(&out).iter().all(|r| &r[4] == "true"));

    let wrong = text + "oracle_potential = 0, 0, 2\n";
    let (code, _, _) = run(&wrong);
    assert_eq!(code, 5);
}

#[test]
fn quartic_verify() {
    let text = "mode = verify\npotential = 0, 0, 0, 0, 1\nbeta = 2\nwindow = 0, 2\nscan_step = 1/10\nn_max = 80\ntolerance = 1e-9\nverify_tolerance = 1e-6\n";
    let (code, out, _) = run(text);
    assert_eq!(code, 0);
    let r = &rows(&out)[0];
    assert!((r[1].parse::<f64>().unwrap() - 1.060362).abs() < 1e-6);
}

#[test]
fn riccati_v2_warns() {
    let (code, out, log) = run("mode = riccati\np = 3\nq = -2\nvariant = v2\ninitial = ones\nn_max = 40\n");
    assert_eq!(code, 0);
    assert!(log.contains("warning"));
    let last = rows(&out).pop().unwrap();
    assert!((last[1].parse::<f64>().unwrap() + 2.0).abs() < 1e-9);
}

#[test]
fn shift_demo_moves_roots() {
    let (code, out, _) = run("mode = shift-demo\np = 3\nq = -2\nshift = 1\nn_max = 40\ntolerance = 1e-6\n");
    assert_eq!(code, 0);
    let r = rows(&out);
    assert_eq!((&r[0][1], &r[0][2]), ("3", "-2"));
    assert_eq!((&r[1][1], &r[1][2]), ("5", "-6"));
    assert!((r[1][3].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    assert!((r[1][4].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn binary_exit_codes() {
    let out = binary(&["eigen"], HARMONIC);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("level,energy,n_used,residual,status"));

    let out = binary(&["eigen"], "mode = eigen\npotential = 1\nbogus = 3\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    // degenerate characteristic roots are a computation error
    let out = binary(&["shift-demo"], "mode = shift-demo\np = 2\nq = -1\n");
    assert_eq!(out.status.code(), Some(3));

    let out = binary(&["eigen", "--nmax", "0"], HARMONIC);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let text = HARMONIC.to_string() + "probe_depths = 4, 8, 12\n";
    let out = binary(&["eigen", "--trace", trace.to_str().unwrap()], &text);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(trace).unwrap();
    let r = rows(&written);
    assert_eq!(r.len(), 6 * 3);
    assert_eq!(&r[0][1], "4");
}
