#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bevsim::config::{TestcaseConfig, VehicleConfig};
use bevsim::resources::{self, Kind};
use bevsim::route::{CycleSample, DriveCycle};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_plugin(name: &str) -> String {
    manifest_dir()
        .join("tests/fixtures/plugins")
        .join(name)
        .display()
        .to_string()
}

pub fn shipped_plugin(name: &str) -> String {
    manifest_dir().join("plugins").join(name).display().to_string()
}

pub fn vehicle(name: &str) -> VehicleConfig {
    let text = resources::text(Kind::Archetype, name).expect("packaged archetype");
    VehicleConfig::from_yaml_str(&text, Path::new("."), name).expect("valid archetype")
}

pub fn testcase(name: &str) -> TestcaseConfig {
    let text = resources::text(Kind::Testcase, name).expect("packaged testcase");
    TestcaseConfig::from_yaml_str(&text, Path::new("."), name).expect("valid testcase")
}

/// Speed held at `v` from t = 0 for `duration_s`, sampled every `dt`.
pub fn constant_cycle(v: f64, duration_s: f64, dt: f64) -> DriveCycle {
    let n = (duration_s / dt).round() as usize;
    let samples = (0..=n)
        .map(|k| CycleSample {
            time_s: k as f64 * dt,
            speed_mps: v,
        })
        .collect();
    DriveCycle::new("constant", samples).unwrap()
}

pub fn packaged_cycle(name: &str, dt: f64) -> DriveCycle {
    resources::cycle(name).unwrap().resample(dt).unwrap()
}

/// Writes a case directory from packaged inputs.
pub fn case_dir(root: &Path, vehicle: &str, testcase: &str) -> PathBuf {
    let dir = root.join("case");
    std::fs::create_dir_all(dir.join("output")).unwrap();
    std::fs::write(dir.join(bevsim::cli::CASE_MARKER), "0.1.0\n").unwrap();
    std::fs::write(dir.join("vehicle.yaml"), resources::text(Kind::Archetype, vehicle).unwrap()).unwrap();
    std::fs::write(dir.join("testcase.yaml"), resources::text(Kind::Testcase, testcase).unwrap()).unwrap();
    dir
}
