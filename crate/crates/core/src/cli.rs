//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 filesystem error,
//! 3 numerical failure or run abort. Human-readable output goes to `out`,
//! errors to `err`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{self, base_dir_of, read_text, units, TestcaseConfig, VehicleConfig};
use crate::engine::{build_engine, RunOutput};
use crate::error::{Error, Result};
use crate::post::{integrate_budget, write_case_package, PackageInputs};
use crate::resources::{self, Kind};
use crate::route;

/// File that marks a directory as a case directory.
pub const CASE_MARKER: &str = ".bevsim-case";

const TEMPLATE_VEHICLE: &str = "midsize_sedan";
const TEMPLATE_TESTCASE: &str = "mixed_23km";

#[derive(Debug, Parser)]
#[command(name = "bevsim", version, about = "Battery-electric vehicle drive-cycle simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create a case directory with template inputs.
    Init { dir: PathBuf },
    /// Simulate a case and write its package under `<case>/output/`.
    Run {
        #[arg(long = "case")]
        case_dir: PathBuf,
        /// Vehicle file to use instead of `<case>/vehicle.yaml`.
        #[arg(long)]
        vehicle: Option<PathBuf>,
        /// Testcase file to use instead of `<case>/testcase.yaml`.
        #[arg(long)]
        testcase: Option<PathBuf>,
        /// Package name (defaults to the testcase name).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        overwrite: bool,
        /// Suppress progress output.
        #[arg(long)]
        quiet: bool,
    },
    /// List packaged archetypes, testcases, cycles, and examples.
    ListExamples,
    /// Materialize a packaged example as `<out>/<name>/` and run it.
    RunExample {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        overwrite: bool,
        #[arg(long)]
        quiet: bool,
    },
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Init { dir } => cmd_init(&dir, out),
        Command::Run {
            case_dir,
            vehicle,
            testcase,
            name,
            overwrite,
            quiet,
        } => cmd_run(
            &RunArgs {
                case_dir,
                vehicle,
                testcase,
                name,
                overwrite,
                quiet,
            },
            out,
        )
        .map(|_| ()),
        Command::ListExamples => cmd_list_examples(out),
        Command::RunExample {
            name,
            out: out_dir,
            overwrite,
            quiet,
        } => cmd_run_example(&name, &out_dir, overwrite, quiet, out).map(|_| ()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}

fn fs_err(context: String) -> impl FnOnce(io::Error) -> Error {
    move |e| Error::io(context, e)
}

fn case_readme(title: &str) -> String {
    format!(
        "# {title}\n\n\
         Case directory for `bevsim`.\n\n\
         - `vehicle.yaml`: vehicle parameters\n\
         - `testcase.yaml`: route, environment, payload, and simulation settings\n\
         - `output/`: one package per run\n\n\
         Run with `bevsim run --case .`\n"
    )
}

fn is_empty_dir(dir: &Path) -> Result<bool> {
    let mut it = fs::read_dir(dir).map_err(fs_err(format!("reading {}", dir.display())))?;
    Ok(it.next().is_none())
}

fn materialize_case(dir: &Path, vehicle_text: &str, testcase_text: &str, title: &str) -> Result<()> {
    if dir.exists() && !is_empty_dir(dir)? {
        return Err(Error::io(
            format!("initializing {}", dir.display()),
            io::Error::new(io::ErrorKind::AlreadyExists, "directory exists and is not empty"),
        ));
    }
    fs::create_dir_all(dir.join("output"))
        .map_err(fs_err(format!("creating {}", dir.display())))?;
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        fs::write(&p, text).map_err(fs_err(format!("writing {}", p.display())))
    };
    write(CASE_MARKER, &format!("{}\n", env!("CARGO_PKG_VERSION")))?;
    write("README.md", &case_readme(title))?;
    write("vehicle.yaml", vehicle_text)?;
    write("testcase.yaml", testcase_text)?;
    Ok(())
}

pub fn cmd_init(dir: &Path, out: &mut dyn Write) -> Result<()> {
    let vehicle = resources::text(Kind::Archetype, TEMPLATE_VEHICLE).expect("template archetype is packaged");
    let testcase = resources::text(Kind::Testcase, TEMPLATE_TESTCASE).expect("template testcase is packaged");
    let title = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "case".into());
    materialize_case(dir, &vehicle, &testcase, &title)?;
    let _ = writeln!(out, "initialized case directory {}", dir.display());
    Ok(())
}

pub struct RunArgs {
    pub case_dir: PathBuf,
    pub vehicle: Option<PathBuf>,
    pub testcase: Option<PathBuf>,
    pub name: Option<String>,
    pub overwrite: bool,
    pub quiet: bool,
}

/// Outcome of a successful `run`.
#[derive(Debug)]
pub struct RunReport {
    pub package_dir: PathBuf,
    pub run: RunOutput,
}

fn spec_sheet(out: &mut dyn Write, v: &VehicleConfig, t: &TestcaseConfig, steps: usize, battery_kind: &str) {
    let route = match (&t.route.cycle_path, &t.route.segments) {
        (Some(p), _) => p.clone(),
        (None, Some(s)) => format!("{} parametric segments", s.len()),
        _ => "-".into(),
    };
    let _ = writeln!(out, "vehicle   {}", v.name);
    let _ = writeln!(
        out,
        "  mass {:.0} kg, Cd {:.3}, A {:.2} m2, Crr {:.4}, wheel {:.3} m, ratio {:.2}",
        v.mass_kg,
        v.cd,
        v.frontal_area_m2,
        v.crr,
        v.wheel_radius_m,
        v.reducer_ratio_total()
    );
    let _ = writeln!(
        out,
        "  motor {} {:.0} Nm / {:.0} kW, battery {} {:.1} kWh at {:.0} V, regen blend {:.2}",
        v.motor.model,
        v.motor.peak_torque_nm,
        units::w_to_kw(v.motor.peak_power_w),
        battery_kind,
        v.battery_energy_wh() / 1000.0,
        v.battery.v_nom_v,
        v.regen_blend_factor
    );
    let _ = writeln!(out, "testcase  {}", t.name);
    let _ = writeln!(
        out,
        "  route {route}, ambient {:.1} C, initial SoC {:.3}, hvac {}",
        t.environment.ambient_temp_c,
        t.sim.initial_soc,
        if t.sim.hvac_enabled { "on" } else { "off" }
    );
    let _ = writeln!(out, "  dt {} s, {} steps", t.sim.dt_s, steps);
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<RunReport> {
    let case_dir = &args.case_dir;
    if !case_dir.join(CASE_MARKER).is_file() {
        return Err(Error::Usage(format!(
            "{} is not a case directory (missing {CASE_MARKER}; create one with `bevsim init`)",
            case_dir.display()
        )));
    }
    let vehicle_path = args.vehicle.clone().unwrap_or_else(|| case_dir.join("vehicle.yaml"));
    let testcase_path = args.testcase.clone().unwrap_or_else(|| case_dir.join("testcase.yaml"));
    let vehicle_text = read_text(&vehicle_path)?;
    let testcase_text = read_text(&testcase_path)?;
    let vehicle = VehicleConfig::from_yaml_str(
        &vehicle_text,
        &base_dir_of(&vehicle_path),
        &vehicle_path.display().to_string(),
    )?;
    let testcase = TestcaseConfig::from_yaml_str(
        &testcase_text,
        &base_dir_of(&testcase_path),
        &testcase_path.display().to_string(),
    )?;
    let case_name = args.name.clone().unwrap_or_else(|| testcase.name.clone());

    let cycle = route::load_route(&testcase)?;
    let engine = build_engine(&vehicle, &testcase, cycle)?;
    spec_sheet(out, &vehicle, &testcase, engine.total_steps(), engine.battery_kind());

    let quiet = args.quiet;
    let mut next_decile = 1;
    let run = engine.run_with_progress(|done, total| {
        if quiet {
            return;
        }
        while next_decile <= 10 && done * 10 >= next_decile * total {
            let _ = writeln!(out, "progress {:>3}%", next_decile * 10);
            next_decile += 1;
        }
    })?;

    let budget = integrate_budget(&run.rows);
    let last = run.last();
    let _ = writeln!(
        out,
        "steps={} distance_km={:.3} final_soc={:.4} energy_net_wh={:.1}",
        run.steps(),
        units::m_to_km(last.distance_m),
        last.soc,
        budget.e_net_wh
    );

    let inputs = PackageInputs {
        vehicle_source: &vehicle_path.display().to_string(),
        vehicle_text: &vehicle_text,
        vehicle: &vehicle,
        testcase_source: &testcase_path.display().to_string(),
        testcase_text: &testcase_text,
        testcase: &testcase,
    };
    let package_dir = write_case_package(&run, &inputs, case_dir, &case_name, args.overwrite)?;
    let _ = writeln!(out, "package {}", package_dir.display());
    Ok(RunReport { package_dir, run })
}

pub fn cmd_list_examples(out: &mut dyn Write) -> Result<()> {
    for (label, kind) in [
        ("archetype", Kind::Archetype),
        ("testcase", Kind::Testcase),
        ("cycle", Kind::Cycle),
        ("map", Kind::Map),
    ] {
        for name in resources::names(kind) {
            let _ = writeln!(out, "{label} {name}");
        }
    }
    for ex in resources::EXAMPLES {
        let _ = writeln!(
            out,
            "example {} ({} + {}): {}",
            ex.name, ex.vehicle, ex.testcase, ex.description
        );
    }
    Ok(())
}

pub fn cmd_run_example(
    name: &str,
    out_dir: &Path,
    overwrite: bool,
    quiet: bool,
    out: &mut dyn Write,
) -> Result<RunReport> {
    let ex = resources::example(name).ok_or_else(|| {
        let names: Vec<_> = resources::EXAMPLES.iter().map(|e| e.name).collect();
        Error::Usage(format!("unknown example `{name}` (available: {})", names.join(", ")))
    })?;
    let missing = |what: &str, n: &str| Error::Usage(format!("packaged {what} `{n}` not found"));
    let vehicle = resources::text(Kind::Archetype, ex.vehicle).ok_or_else(|| missing("archetype", ex.vehicle))?;
    let testcase = resources::text(Kind::Testcase, ex.testcase).ok_or_else(|| missing("testcase", ex.testcase))?;
    let case_dir = out_dir.join(ex.name);
    if !case_dir.join(CASE_MARKER).is_file() {
        materialize_case(&case_dir, &vehicle, &testcase, ex.name)?;
    }
    let _ = writeln!(out, "example {}: {}", ex.name, ex.description);
    cmd_run(
        &RunArgs {
            case_dir,
            vehicle: None,
            testcase: None,
            name: Some(ex.name.to_string()),
            overwrite,
            quiet,
        },
        out,
    )
}

/// Loads the two input files of a case directory.
pub fn load_case(case_dir: &Path) -> Result<(VehicleConfig, TestcaseConfig)> {
    Ok((
        config::load_vehicle(case_dir.join("vehicle.yaml"))?,
        config::load_testcase(case_dir.join("testcase.yaml"))?,
    ))
}
