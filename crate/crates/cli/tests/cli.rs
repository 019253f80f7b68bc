use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn kdv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdv-ist"))
        .args(args)
        .env("KDV_IST_CACHE", dir.join("cache"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sha(p: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(p).unwrap()))
}

#[test]
fn zero_preset_scatters_to_nothing() {
    let d = tempfile::tempdir().unwrap();
    let o = kdv(d.path(), &["scatter", "--preset", "zero", "-o", "a"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 bound states, L ≡ 0"));
    assert!(d.path().join("a/scatter_manifest.json").exists());
}

#[test]
fn warm_cache_reproduces_the_slice() {
    let d = tempfile::tempdir().unwrap();
    let grid = "grid.dk=0.02";
    let cold = kdv(d.path(), &["scatter", "--preset", "square_well(1,2)", "--set", grid, "-o", "a"]);
    let warm = kdv(d.path(), &["scatter", "--preset", "square_well(1,2)", "--set", grid, "-o", "b"]);
    assert!(stdout(&cold).contains("1 bound state\n") && stdout(&cold).contains("cache miss"));
    assert!(stdout(&warm).contains("cache hit"));
    assert_eq!(sha(&d.path().join("a/scattering.json")), sha(&d.path().join("b/scattering.json")));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("b/scatter_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "scatter");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert!(m["timings"]["scatter"].is_number());
}

#[test]
fn validation_exit_status() {
    let d = tempfile::tempdir().unwrap();
    let ok = kdv(d.path(), &["validate", "--preset", "zero", "-o", "z"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    // scale L on a real slice: unitarity must fail and the process must say so
    let args = ["--preset", "square_well(1,2)", "--set", "grid.dk=0.02", "--set", "validate.hankel_points=[]"];
    assert!(kdv(d.path(), &[&["scatter", "-o", "w"][..], &args].concat()).status.success());
    let mut s: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("w/scattering.json")).unwrap()).unwrap();
    for l in s["L"].as_array_mut().unwrap() {
        let re = l[0].as_f64().unwrap();
        l[0] = (1.05 * re).into();
    }
    std::fs::write(d.path().join("bad.json"), s.to_string()).unwrap();
    let bad = kdv(d.path(), &[&["validate", "-o", "bad", "--set", "validate.slice=bad.json"][..], &args].concat());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL unitarity"));
    assert!(d.path().join("bad/validation.json").exists());
}

#[test]
fn errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    let o = kdv(d.path(), &["reconstruct", "--set", "reconstruct.nope=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown config key"));
    let o = kdv(d.path(), &["scatter", "--preset", "no_such_preset"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_field_and_zero_crosscheck() {
    let d = tempfile::tempdir().unwrap();
    let o = kdv(d.path(), &["reconstruct", "--preset", "zero", "-o", "r", "--set", "x_grid=[-1,0,1]", "--set", "t_list=[0.1]"]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(d.path().join("r/field.csv")).unwrap();
    let q: Vec<f64> = csv.lines().skip(1).filter(|l| !l.is_empty()).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(q, vec![0.0; 3]);
    let o = kdv(
        d.path(),
        &["crosscheck", "--preset", "zero", "-o", "c", "--set", "x_grid=[-1,0,1]", "--set", "t_list=[0.1]", "--set", "pde.n_modes=256"],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let table = std::fs::read_to_string(d.path().join("c/crosscheck.csv")).unwrap();
    assert_eq!(table.lines().nth(1).unwrap(), "1.0000000000000001e-1,0.0000000000000000e0,0.0000000000000000e0");
}

#[test]
fn toml_config_with_flag_overrides() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("run.toml"),
        "t_list = [0.3]\noutput_dir = \"from_file\"\n[potential]\npreset = \"exp_decay(1,1)\"\n[reconstruct.nystrom]\norder = 8\n",
    )
    .unwrap();
    let o = kdv(d.path(), &["config", "-c", "run.toml", "--set", "reconstruct.nystrom.order=10", "--path", "proposition"]);
    assert!(o.status.success());
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["potential"]["preset"], "exp_decay(1,1)");
    assert_eq!(c["reconstruct"]["nystrom"]["order"], 10);
    assert_eq!(c["path"], "proposition");
    assert_eq!(c["output_dir"], "from_file");
}

#[test]
fn reconstruct_is_deterministic_across_thread_counts() {
    let d = tempfile::tempdir().unwrap();
    let run = |out: &str, threads: &str| {
        let o = kdv(
            d.path(),
            &[
                "reconstruct", "--preset", "square_well(1,2)", "-o", out, "--threads", threads,
                "--set", "x_grid=[-2,0,1,3]", "--set", "t_list=[0.1,0.3]", "--compare-paths",
            ],
        );
        assert!(o.status.success(), "{}", stdout(&o));
        sha(&d.path().join(out).join("field.csv"))
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "3"));
    let agree: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("a/agreement.json")).unwrap()).unwrap();
    assert!(agree["max_abs_diff"].as_f64().unwrap() < 1e-4);
}
