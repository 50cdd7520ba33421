use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use photomech_cli::output::Manifest;
use photomech_cli::verify::{run_check, Context, Level, CHECKS};
use photomech_cli::ScenarioConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_photomech"));
    c.env_remove("PHOTOMECH_OUTPUT_DIR");
    c
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn electrostatic_patch_runs_and_echoes_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("patch");
    let o = bin().arg("run").arg(scenario("electrostatic-patch")).arg("--output").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["trajectory.csv", "jumps.csv", "manifest.toml", "snapshots/step_000000.csv", "snapshots/step_000004.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let manifest = Manifest::read(&out.join("manifest.toml")).unwrap();
    let original = ScenarioConfig::parse(&std::fs::read_to_string(scenario("electrostatic-patch")).unwrap()).unwrap();
    assert_eq!(manifest.config, original);
    assert_eq!(manifest.run.frames, 5);
    assert!(manifest.run.max_interface_charge_residual < 1e-10);
}

#[test]
fn missing_field_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("damped-relaxation")).unwrap().replace("t_end = 1.8\n", "");
    let cfg = tmp.path().join("broken.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = bin().arg("run").arg(&cfg).arg("--output").arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("solver.t_end"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn environment_overrides_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .current_dir(tmp.path())
        .env("PHOTOMECH_OUTPUT_DIR", tmp.path().join("env"))
        .arg("run")
        .arg(scenario("electrostatic-patch"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(tmp.path().join("env/electrostatic-patch/trajectory.csv").is_file());
}

#[test]
fn plot_fields_and_unknown_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("relax");
    let o = bin().arg("run").arg(scenario("damped-relaxation")).arg("--output").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let o = bin().arg("plot").arg(out.join("trajectory.csv")).args(["--fields", "energy,y,order", "--probe", "0,0,0"]).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let energy = std::fs::read_to_string(out.join("plots/energy.csv")).unwrap();
    let header = energy.lines().next().unwrap();
    assert_eq!(
        header,
        "t [nondimensional],kinetic [nondimensional],potential [nondimensional],dissipated [nondimensional],total [nondimensional]"
    );
    assert_eq!(energy.lines().count(), 302);
    let y = std::fs::read_to_string(out.join("plots/y.csv")).unwrap();
    assert!(y.starts_with("t [nondimensional],y [nondimensional]\n"));
    // Snapshots every 10th of 300 steps.
    assert_eq!(y.lines().count(), 32);

    let o = bin().arg("plot").arg(&out).args(["--fields", "zeta"]).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("zeta"));
}

#[test]
fn injected_fault_fails_energy_momentum_check() {
    let tmp = tempfile::tempdir().unwrap();
    let report = tmp.path().join("report.json");
    let args = ["verify", "--checks", "energy-momentum-equivalence,piola-transforms", "--seed", "5"];
    let o = bin().args(args).args(["--inject-fault", "ptron-sign", "--report"]).arg(&report).output().unwrap();
    assert_eq!(code(&o), 1);
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["passed"], false);
    assert_eq!(rep["checks"][0]["name"], "energy-momentum-equivalence");
    assert_eq!(rep["checks"][0]["passed"], false);
    assert_eq!(rep["checks"][1]["passed"], true);

    let o = bin().args(args).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin().args(["verify", "--checks", "no-such-check"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn seeded_report_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let path = tmp.path().join(format!("r{i}.json"));
        let o = bin()
            .args(["verify", "--seed", "11", "--checks", "kinematic-derivatives,constitutive-gradients,lorentz-identity", "--report"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        reports.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let ctx = Context::new(Level::Fast, 11);
    let other = Context::new(Level::Fast, 12);
    let check = CHECKS.iter().find(|c| c.name == "constitutive-gradients").unwrap();
    assert_ne!(run_check(check, &ctx).measured, run_check(check, &other).measured);
}
