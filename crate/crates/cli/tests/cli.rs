use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_betaplane")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Run {
    code: i32,
    out: PathBuf,
    stderr: String,
}

fn run(dir: &Path, sub: &str, config: &Value, tag: &str, threads: Option<usize>) -> Run {
    let path = dir.join(format!("{tag}.json"));
    fs::write(&path, serde_json::to_vec_pretty(config).unwrap()).unwrap();
    let out = dir.join(format!("out_{tag}"));
    let mut cmd = Command::new(binary());
    cmd.arg(sub)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(&out);
    if let Some(n) = threads {
        cmd.arg("--threads").arg(n.to_string());
    }
    let result = cmd.output().unwrap();
    Run {
        code: result.status.code().unwrap(),
        out,
        stderr: String::from_utf8_lossy(&result.stderr).into_owned(),
    }
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn power_stress(amplitude: f64, power: u32) -> Value {
    json!({ "meridional": [{
        "amplitude": amplitude,
        "latitude": { "kind": "power", "power": power, "gaussian": 1.0 },
        "zonal": { "m": 1, "sin": 1.0 }
    }]})
}

fn small_stationary() -> Value {
    json!({
        "kind": "stationary",
        "coriolis": { "kind": "linear", "beta": 1.0 },
        "stress": power_stress(1.0, 2),
        "grid": { "nx": 8, "ny": 64, "nz": 9, "half_width": 6.0 },
        "parameters": { "epsilon": 0.1, "nu_h": 0.001, "delta": 0.1, "alpha": 0.7 },
        "options": { "delta_margin": 0.5 }
    })
}

fn rays(rays: Value, options: Value) -> Value {
    json!({
        "kind": "poincare-rays",
        "rays": rays,
        "duration": 2.0,
        "options": options,
        "y_range": [-5.0, 5.0],
        "fit_window": [0.5, 2.0]
    })
}

fn error_of(r: &Run) -> Value {
    read_json(&r.out.join("error.json"))
}

#[test]
fn stationary_run_emits_report_fields_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), "stationary", &small_stationary(), "s", None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = read_json(&r.out.join("report.json"));
    assert_eq!(report["schema_version"], 1);
    assert!(report["data"]["residual"]["r_h1"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(r.out.join("velocity.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,y,z,u1,u2,u3");
    assert_eq!(csv.lines().count(), 1 + 8 * 64 * 9);
    let manifest = read_json(&r.out.join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let bytes = fs::read(r.out.join(f["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
}

#[test]
fn reruns_reproduce_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), "stationary", &small_stationary(), "a", Some(2));
    let b = run(dir.path(), "stationary", &small_stationary(), "b", Some(2));
    assert_eq!((a.code, b.code), (0, 0));
    let files = |r: &Run| read_json(&r.out.join("manifest.json"))["files"].clone();
    assert_eq!(files(&a), files(&b));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let one = run(
        dir.path(),
        "stationary",
        &small_stationary(),
        "one",
        Some(1),
    );
    let four = run(
        dir.path(),
        "stationary",
        &small_stationary(),
        "four",
        Some(4),
    );
    assert_eq!((one.code, four.code), (0, 0));
    let report = |r: &Run| read_json(&r.out.join("report.json"));
    assert_eq!(report(&one), report(&four));
}

#[test]
fn degenerate_ray_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let config = rays(
        json!([{ "mode": "plus", "y0": 0.0, "xi0": 0.5, "k3": 1 }]),
        json!({}),
    );
    let r = run(dir.path(), "poincare-rays", &config, "ray", None);
    assert_eq!(r.code, 2);
    let e = error_of(&r);
    assert_eq!(e["category"], "validation");
    assert_eq!(e["hypothesis"], "nondegenerate_ray");
}

#[test]
fn drifting_rays_are_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = rays(
        json!([{ "mode": "plus", "y0": 1.0, "xi0": 0.0, "k3": 1 }]),
        json!({ "dt": 0.5, "stride": 1, "drift_tolerance": 1e-14 }),
    );
    let r = run(dir.path(), "poincare-rays", &config, "drift", None);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(error_of(&r)["category"], "numerical");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_stationary();
    config["grid"]["depth"] = json!(3.0);
    let r = run(dir.path(), "stationary", &config, "key", None);
    assert_eq!(r.code, 2);
    assert!(error_of(&r)["message"]
        .as_str()
        .unwrap()
        .contains("unknown field"));
}

#[test]
fn subcommand_must_match_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), "rossby", &small_stationary(), "mismatch", None);
    assert_eq!(r.code, 2);
}

#[test]
fn incompatible_stress_names_its_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_stationary();
    config["stress"] = json!({ "zonal": [{
        "latitude": { "kind": "power", "power": 2, "gaussian": 1.0 },
        "zonal": { "m": 0, "cos": 1.0 }
    }]});
    let r = run(dir.path(), "stationary", &config, "compat", None);
    assert_eq!(r.code, 2);
    assert_eq!(error_of(&r)["hypothesis"], "stress_compatibility");
}

#[test]
fn low_truncation_exponent_blocks_gradients() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_stationary();
    config["parameters"]["alpha"] = json!(0.55);
    config["layer_gradients"] = json!(true);
    let r = run(dir.path(), "validate", &config, "alpha", None);
    assert_eq!(r.code, 2);
    assert_eq!(error_of(&r)["hypothesis"], "truncation_exponent");
}

#[test]
fn strong_interior_flow_blocks_the_temperature_study() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = read_json(&configs_dir().join("thermocline.json"));
    config["setup"]["stress"] = power_stress(1.0, 4);
    config["setup"]["grid"] = json!({ "nx": 8, "ny": 32, "nz": 9, "half_width": 4.0 });
    let r = run(dir.path(), "thermocline", &config, "grad", None);
    assert_eq!(r.code, 2);
    assert_eq!(error_of(&r)["hypothesis"], "advection_gradient_bound");
}

#[test]
fn shipped_configurations_validate() {
    let dir = tempfile::tempdir().unwrap();
    let mut names: Vec<PathBuf> = fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    assert!(names.len() >= 6);
    for (n, path) in names.iter().enumerate() {
        let config = read_json(path);
        let r = run(dir.path(), "validate", &config, &format!("v{n}"), None);
        assert_eq!(r.code, 0, "{}: {}", path.display(), r.stderr);
        assert!(r.out.join("validation.json").exists());
    }
}

#[test]
fn scales_are_nondimensionalized() {
    let dir = tempfile::tempdir().unwrap();
    let config = read_json(&configs_dir().join("scales.json"));
    let r = run(dir.path(), "scales", &config, "scales", None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let p = read_json(&r.out.join("parameters.json"));
    let eps = p["data"]["parameters"]["epsilon"].as_f64().unwrap();
    assert!((eps - 1.0 / (1e7 * 7e-5)).abs() < 1e-15);
}
