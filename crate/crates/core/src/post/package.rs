use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::budget::{integrate_budget, EnergyBudget};
use super::plots::render_plots;
use super::timeseries::timeseries_string;
use crate::config::{units, TestcaseConfig, VehicleConfig};
use crate::engine::{ExecutionCounts, RunOutput};
use crate::error::{Error, Result};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Files of a case package, relative to its directory.
pub const ARTIFACTS: [&str; 9] = [
    "summary.json",
    "timeseries.csv",
    "vehicle.yaml",
    "testcase.yaml",
    "vehicle.resolved.yaml",
    "testcase.resolved.yaml",
    "README.md",
    "plots/motion_soc.svg",
    "plots/power_thermal.svg",
];

/// The two input files of a run, as given and as parsed.
pub struct PackageInputs<'a> {
    pub vehicle_source: &'a str,
    pub vehicle_text: &'a str,
    pub vehicle: &'a VehicleConfig,
    pub testcase_source: &'a str,
    pub testcase_text: &'a str,
    pub testcase: &'a TestcaseConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub meta: Meta,
    pub results: Results,
    pub energy_budget_wh: EnergyBudget,
    pub inputs: InputDigests,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub case_name: String,
    pub vehicle_name: String,
    pub testcase_name: String,
    pub cycle_name: String,
    pub battery_model: String,
    pub motor_model: String,
    pub hvac_model: String,
    pub dt_s: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Results {
    pub steps: usize,
    pub duration_s: f64,
    pub distance_km: f64,
    pub initial_soc: f64,
    pub final_soc: f64,
    pub min_soc: f64,
    pub final_v_batt_v: f64,
    pub max_t_batt_c: f64,
    pub max_t_motor_c: f64,
    pub final_t_cabin_c: f64,
    pub final_charger_state: String,
    pub max_power_shortfall_w: f64,
    pub module_executions: ExecutionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigests {
    pub vehicle: FileDigest,
    pub testcase: FileDigest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub source: String,
    pub file: &'static str,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn summarize(run: &RunOutput, inputs: &PackageInputs, case_name: &str) -> RunSummary {
    let rows = &run.rows;
    let last = run.last();
    let fold_max = |f: fn(&crate::engine::SimState) -> f64| {
        rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let min_soc = rows.iter().map(|r| r.soc).fold(run.initial.soc, f64::min);
    RunSummary {
        meta: Meta {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            case_name: case_name.to_string(),
            vehicle_name: inputs.vehicle.name.clone(),
            testcase_name: inputs.testcase.name.clone(),
            cycle_name: run.cycle_name.clone(),
            battery_model: inputs.vehicle.battery.model.clone(),
            motor_model: inputs.vehicle.motor.model.clone(),
            hvac_model: inputs.vehicle.hvac.model.clone(),
            dt_s: inputs.testcase.sim.dt_s,
            wall_time_s: run.wall_time_s,
        },
        results: Results {
            steps: run.steps(),
            duration_s: last.time_s,
            distance_km: units::m_to_km(last.distance_m),
            initial_soc: run.initial.soc,
            final_soc: last.soc,
            min_soc,
            final_v_batt_v: last.v_batt_v,
            max_t_batt_c: fold_max(|r| r.t_batt_c).max(run.initial.t_batt_c),
            max_t_motor_c: fold_max(|r| r.t_motor_c).max(run.initial.t_motor_c),
            final_t_cabin_c: last.t_cabin_c,
            final_charger_state: last.charger_state.as_str().to_string(),
            max_power_shortfall_w: fold_max(|r| r.power_shortfall_w).max(0.0),
            module_executions: run.executions,
        },
        energy_budget_wh: integrate_budget(rows),
        inputs: InputDigests {
            vehicle: FileDigest {
                source: inputs.vehicle_source.to_string(),
                file: "vehicle.yaml",
                sha256: sha256_hex(inputs.vehicle_text.as_bytes()),
            },
            testcase: FileDigest {
                source: inputs.testcase_source.to_string(),
                file: "testcase.yaml",
                sha256: sha256_hex(inputs.testcase_text.as_bytes()),
            },
        },
    }
}

fn check_case_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "invalid case name `{name}` (letters, digits, `_`, `-`, `.`; no leading dot)"
        )))
    }
}

fn package_readme(s: &RunSummary) -> String {
    let b = &s.energy_budget_wh;
    let r = &s.results;
    let mut out = String::new();
    let _ = writeln!(out, "# Case `{}`\n", s.meta.case_name);
    let _ = writeln!(out, "Produced by {} {}.\n", s.meta.tool, s.meta.version);
    let _ = writeln!(out, "## Inputs\n");
    let _ = writeln!(
        out,
        "- vehicle: `{}` from `{}` (sha256 `{}`)",
        s.meta.vehicle_name, s.inputs.vehicle.source, s.inputs.vehicle.sha256
    );
    let _ = writeln!(
        out,
        "- testcase: `{}` from `{}` (sha256 `{}`)",
        s.meta.testcase_name, s.inputs.testcase.source, s.inputs.testcase.sha256
    );
    let _ = writeln!(out, "- cycle: `{}`, dt {} s\n", s.meta.cycle_name, s.meta.dt_s);
    let _ = writeln!(out, "## Results\n");
    let _ = writeln!(out, "| quantity | value |\n|---|---|");
    let _ = writeln!(out, "| steps | {} |", r.steps);
    let _ = writeln!(out, "| duration | {:.1} s |", r.duration_s);
    let _ = writeln!(out, "| distance | {:.3} km |", r.distance_km);
    let _ = writeln!(out, "| SoC | {:.4} to {:.4} |", r.initial_soc, r.final_soc);
    let _ = writeln!(out, "| net energy | {:.1} Wh |", b.e_net_wh);
    match b.consumption_kwh_per_100km {
        Some(c) => {
            let _ = writeln!(out, "| consumption | {c:.2} kWh/100 km |");
        }
        None => {
            let _ = writeln!(out, "| consumption | n/a (no distance) |");
        }
    }
    let _ = writeln!(out, "\n## Energy budget (Wh)\n");
    let _ = writeln!(out, "| term | Wh |\n|---|---|");
    for (k, v) in [
        ("aero", b.e_aero_wh),
        ("rolling", b.e_roll_wh),
        ("grade", b.e_grade_wh),
        ("inertia", b.e_inertia_wh),
        ("wheel", b.e_wheel_wh),
        ("drive (battery side)", b.e_drive_wh),
        ("regen", b.e_regen_wh),
        ("friction brake", b.e_friction_wh),
        ("auxiliary", b.e_aux_wh),
        ("hvac", b.e_hvac_wh),
        ("net", b.e_net_wh),
        ("charged", b.e_charge_wh),
    ] {
        let _ = writeln!(out, "| {k} | {v:.1} |");
    }
    let _ = writeln!(out, "\n## Files\n");
    for f in ARTIFACTS {
        let _ = writeln!(out, "- `{f}`");
    }
    out
}

fn write(dir: &Path, rel: &str, contents: &[u8]) -> Result<()> {
    let path = dir.join(rel);
    fs::write(&path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `<case_dir>/output/<case_name>/` and returns its path.
///
/// Everything is first written to a sibling temporary directory which is then
/// renamed into place, so a reader never sees a partial package.
pub fn write_case_package(
    run: &RunOutput,
    inputs: &PackageInputs,
    case_dir: &Path,
    case_name: &str,
    overwrite: bool,
) -> Result<PathBuf> {
    check_case_name(case_name)?;
    let output = case_dir.join("output");
    let target = output.join(case_name);
    if target.exists() && !overwrite {
        return Err(Error::Exists(target));
    }
    if run.rows.is_empty() {
        return Err(Error::Usage("run produced no steps".into()));
    }

    let summary = summarize(run, inputs, case_name);
    let plots = render_plots(&run.rows)?;
    let csv = timeseries_string(&run.rows)?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');

    fs::create_dir_all(&output)
        .map_err(|e| Error::io(format!("creating {}", output.display()), e))?;
    let tmp = output.join(format!(
        ".tmp-{case_name}-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        fs::create_dir_all(tmp.join("plots"))
            .map_err(|e| Error::io(format!("creating {}", tmp.display()), e))?;
        write(&tmp, "summary.json", json.as_bytes())?;
        write(&tmp, "timeseries.csv", csv.as_bytes())?;
        write(&tmp, "vehicle.yaml", inputs.vehicle_text.as_bytes())?;
        write(&tmp, "testcase.yaml", inputs.testcase_text.as_bytes())?;
        write(&tmp, "vehicle.resolved.yaml", inputs.vehicle.to_resolved_yaml().as_bytes())?;
        write(&tmp, "testcase.resolved.yaml", inputs.testcase.to_resolved_yaml().as_bytes())?;
        write(&tmp, "README.md", package_readme(&summary).as_bytes())?;
        for p in &plots {
            write(&tmp, &format!("plots/{}", p.file_name), p.svg.as_bytes())?;
        }
        if target.exists() {
            fs::remove_dir_all(&target)
                .map_err(|e| Error::io(format!("removing {}", target.display()), e))?;
        }
        fs::rename(&tmp, &target)
            .map_err(|e| Error::io(format!("moving package into {}", target.display()), e))
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result.map(|_| target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_names() {
        assert!(check_case_name("run_1.a-b").is_ok());
        for bad in ["", ".hidden", "a/b", "..", "x y"] {
            assert!(check_case_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn digest_of_known_text() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
