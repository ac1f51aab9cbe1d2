use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cryotrace::config::RunConfig;

const MINIMAL: &str = r#"
schema_version = 1
voxel_size_m = 5e-4

[bounds]
min_m = [-2e-3, -2e-3, -2e-3]
max_m = [2e-3, 2e-3, 2e-3]

[field]
source = "analytic"
analytic = { type = "stagnant", number_density_m3 = 3e20, temperature_k = 4.5 }

[regions.source]
center_m = [0.0, 0.0, 0.0]
normal = [1.0, 0.0, 0.0]
radius_m = 2e-4

[regions.exit]
center_m = [0.0, 0.0, 2e-3]
normal = [0.0, 0.0, -1.0]
radius_m = 1e-3

[tracer]
target_count = 100
master_seed = 5
source_temperature_k = 4.5
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cryotrace"));
    c.env_remove("CRYOTRACE_OUT");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn run_writes_artifacts_and_echoes_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", MINIMAL);
    let out = tmp.path().join("out");
    run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--workers", "2"]));
    for f in ["manifest.json", "summary.json", "terminals.csv", "residence.csv", "wall_chart.csv"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 5);
    assert_eq!(manifest["config"]["tracer"]["target_count"], 100);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["counts"]["total"], 100);
    assert_eq!(summary["config"], manifest["config"]);
}

#[test]
fn reruns_and_worker_counts_give_identical_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", MINIMAL);
    let summary = |name: &str, workers: &str| {
        let out = tmp.path().join(name);
        run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--workers", workers]));
        fs::read(out.join("summary.json")).unwrap()
    };
    let a = summary("a", "1");
    assert_eq!(a, summary("b", "1"));
    assert_eq!(a, summary("c", "3"));
}

#[test]
fn seed_flag_overrides_config_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", MINIMAL);
    let out = tmp.path().join("seeded");
    run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(["--seed", "77"]));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 77);
    assert_eq!(manifest["config"]["tracer"]["master_seed"], 77);
}

#[test]
fn manifest_reproduces_its_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", MINIMAL);
    let first = tmp.path().join("first");
    run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&first).args(["--seed", "9"]));
    let second = tmp.path().join("second");
    run_ok(bin().arg("run").arg(first.join("manifest.json")).arg("--out").arg(&second));
    assert_eq!(
        fs::read(first.join("summary.json")).unwrap(),
        fs::read(second.join("summary.json")).unwrap()
    );
}

#[test]
fn sweep_writes_one_artifact_set_per_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        "{MINIMAL}\n[[sweep]]\nseed = 1\nsampling = {{ method = \"direct\" }}\n\n[[sweep]]\nseed = 2\nsampling = {{ method = \"weighted\", candidates = 10 }}\n\n[[sweep]]\nseed = 3\nsampling = {{ method = \"weighted\", candidates = 3 }}\n"
    );
    let cfg = write_config(tmp.path(), "sweep.toml", &text);
    let out = tmp.path().join("sweep");
    run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
    let mut dirs: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    dirs.sort();
    assert_eq!(dirs, ["00-direct-seed1", "01-weighted10-seed2", "02-weighted3-seed3"]);
    for d in &dirs {
        let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join(d).join("manifest.json")).unwrap()).unwrap();
        assert!(d.contains(m["sampling"].as_str().unwrap()));
        assert!(out.join(d).join("summary.json").is_file());
    }
}

#[test]
fn output_directory_comes_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", MINIMAL);
    let out = tmp.path().join("from-env");
    run_ok(bin().arg("run").arg(&cfg).env("CRYOTRACE_OUT", &out));
    assert!(out.join("summary.json").is_file());
}

#[test]
fn validate_accepts_a_well_formed_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ok.toml", MINIMAL);
    let out = run_ok(bin().arg("validate").arg(&cfg).arg("--json"));
    let diags: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(diags.is_empty());
    assert_eq!(RunConfig::validate_path(&cfg).unwrap(), vec![]);
}

#[test]
fn validate_names_a_negative_cross_section() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", &format!("{MINIMAL}\n[gas]\nsigma_m2 = -1e-17\n"));
    let out = bin().arg("validate").arg(&cfg).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let diags: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0]["field"], "gas.sigma_m2");

    let run = bin().arg("run").arg(&cfg).arg("--out").arg(tmp.path().join("x")).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("gas.sigma_m2"));
}

#[test]
fn validate_prints_both_geometries_for_a_source_outside_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let text = MINIMAL.replace("center_m = [0.0, 0.0, 0.0]", "center_m = [5e-3, 0.0, 0.0]");
    let cfg = write_config(tmp.path(), "outside.toml", &text);
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("regions.source"));
    assert!(stderr.contains("0.005") && stderr.contains("0.002"), "{stderr}");
}

#[test]
fn validate_reports_the_line_of_an_unknown_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "typo.toml", &MINIMAL.replace("target_count", "target_cuont"));
    let out = bin().arg("validate").arg(&cfg).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let diags: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let line = MINIMAL.lines().position(|l| l.starts_with("target_count")).unwrap() + 1;
    assert_eq!(diags[0]["line"], line);
}

#[test]
fn csv_point_cloud_config_runs() {
    use cryotrace::flowfield::io::write_samples_path;
    use cryotrace::flowfield::FlowSample;
    use cryotrace::Vec3;

    let tmp = tempfile::tempdir().unwrap();
    // Cell-centred samples on a 0.5 mm lattice filling the bounds.
    let mut samples = Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let c = |n: i32| -1.75e-3 + 5e-4 * n as f64;
                samples.push(FlowSample {
                    position: Vec3::new(c(i), c(j), c(k)),
                    velocity: Vec3::new(0.0, 0.0, 5.0),
                    number_density: 3e20,
                    temperature: 4.5,
                });
            }
        }
    }
    write_samples_path(tmp.path().join("cloud.csv"), &samples).unwrap();
    let text = MINIMAL.replace(
        "source = \"analytic\"\nanalytic = { type = \"stagnant\", number_density_m3 = 3e20, temperature_k = 4.5 }",
        "source = \"csv\"\npath = \"cloud.csv\"\nmetadata = { label = \"lattice\", heat_load_w = 0.5 }",
    );
    assert!(text.contains("cloud.csv"));
    let cfg = write_config(tmp.path(), "csv.toml", &text);
    let out = tmp.path().join("out");
    run_ok(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["field_metadata"]["label"], "lattice");
    assert_eq!(manifest["field_metadata"]["heat_load_w"], 0.5);
}
