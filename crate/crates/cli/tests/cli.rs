//! End-to-end runs of the `sketch-krylov` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sketch-krylov"));
    c.env_remove("SKETCH_KRYLOV_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn kv(text: &str, key: &str) -> Option<String> {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

const SMALL_QR: &[&str] = &["qr", "--matrix", "synthetic:2048x80", "--sketch", "srht:800:3", "--block", "5"];
const SMALL_GMRES: &[&str] = &["gmres", "--matrix", "laplacian:30x30:1", "--block", "3", "--restart", "6", "--restarts", "1"];

#[test]
fn qr_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&[SMALL_QR, &["--out", out.to_str().unwrap(), "--save-factors"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "iter,cond_Q,rel_fact_error,delta,delta_tilde,cond_W");
    assert_eq!(csv.lines().count(), 1 + 16);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(stdout(&o), summary);
    assert_eq!(kv(&summary, "exit_code").as_deref(), Some("0"));
    for f in ["config.txt", "q.mtx", "r.mtx", "s.mtx", "p.mtx", "cert.txt"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let o = run(SMALL_GMRES);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("iter,cond_Q,rel_residual,delta,delta_tilde\n"), "{text}");
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rel_residual="));
}

#[test]
fn gate_failure_exits_2() {
    let args = [SMALL_QR, &["--method", "bcgs", "--precision", "f32", "--gate"]].concat();
    let o = run(&args);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[SMALL_QR, &["--gate"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn hard_errors_exit_1() {
    for args in [
        &["qr", "--sketch", "bogus:10"][..],
        &["gmres", "--matrix", "file:/nonexistent/a.mtx"],
        &["qr", "--method", "subspace", "--matrix", "synthetic:100x10"],
        &["gmres", "--method", "bcgs", "--gate", "--matrix", "laplacian:10x10"],
        &["gen", "file:x.mtx", "--out", "/tmp/never.mtx"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    for args in [SMALL_GMRES, &["eig", "--matrix", "laplacian:20x20", "--block", "2", "--iterations", "2"]] {
        let (a, b) = (run(args), run(args));
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr);
    }
}

#[test]
fn env_seed_fills_in_a_missing_seed() {
    let from_env = bin().args(SMALL_GMRES).args(["--sketch", "srht:60"]).env("SKETCH_KRYLOV_SEED", "9").output().unwrap();
    let explicit = run(&[SMALL_GMRES, &["--sketch", "srht:60:9"]].concat());
    let other = run(&[SMALL_GMRES, &["--sketch", "srht:60:10"]].concat());
    assert_eq!(from_env.stdout, explicit.stdout);
    assert_ne!(explicit.stdout, other.stdout);
    let bad = bin().args(SMALL_GMRES).env("SKETCH_KRYLOV_SEED", "abc").output().unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small eig run\nmatrix=laplacian:16x16:0\nblock=2\niterations=2\nsketch=srht:100:1\nmethod=bcgs2\n").unwrap();
    let out = dir.path().join("eig");
    let o = run(&["eig", "--config", cfg.to_str().unwrap(), "--method", "rbgs", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout(&o);
    assert_eq!(kv(&summary, "method").as_deref(), Some("rbgs"));
    assert_eq!(kv(&summary, "sketch").as_deref(), Some("srht:100:1"));
    let saved = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(saved.contains("method=rbgs") && saved.contains("block=2"));

    fs::write(&cfg, "block=0x\n").unwrap();
    let o = run(&["eig", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

fn certify(dir: &Path, extra: &[&str]) -> Output {
    run(&[&["certify", "--factors", dir.to_str().unwrap()][..], extra].concat())
}

#[test]
fn gen_then_qr_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.mtx");
    let o = run(&["gen", "synthetic:1000x30", "--out", w.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(&w).unwrap().starts_with("%%MatrixMarket matrix array real general"));

    let out = dir.path().join("qr");
    let matrix = format!("file:{}", w.display());
    let o = run(&["qr", "--matrix", &matrix, "--sketch", "rademacher:300:2", "--block", "5", "--save-factors", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(kv(&stdout(&o), "experiment").as_deref(), Some("custom_qr"));

    let stored = fs::read_to_string(out.join("cert.txt")).unwrap();
    let o = certify(&out, &["--gate"]);
    assert_eq!(code(&o), 0);
    assert_eq!(kv(&stdout(&o), "delta"), kv(&stored, "delta"));

    // without stored sketches the operator is rebuilt from the seed
    fs::remove_file(out.join("s.mtx")).unwrap();
    fs::remove_file(out.join("p.mtx")).unwrap();
    assert_eq!(code(&certify(&out, &[])), 1);
    let o = certify(&out, &["--matrix", w.to_str().unwrap(), "--sketch", "rademacher:300:2"]);
    assert_eq!(code(&o), 0);
    let (a, b): (f64, f64) = (kv(&stdout(&o), "delta").unwrap().parse().unwrap(), kv(&stored, "delta").unwrap().parse().unwrap());
    // the stored sketch is the updated one, so agreement is to roundoff
    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
}

#[test]
fn certify_gates_bad_factors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bcgs");
    let o = run(&[SMALL_QR, &["--method", "bcgs", "--precision", "f32", "--save-factors", "--out", out.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(code(&certify(&out, &[])), 0);
    assert_eq!(code(&certify(&out, &["--gate"])), 2);
}

#[test]
fn gen_laplacian_writes_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a.mtx");
    assert_eq!(code(&run(&["gen", "laplacian:4x3:0.5", "--out", f.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&f).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    // 12 diagonal entries plus two per grid edge
    assert_eq!(lines.next().unwrap(), "12 12 46");
    let o = run(&["gmres", "--matrix", &format!("file:{}", f.display()), "--block", "1", "--restart", "4", "--sketch", "identity:12"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
