//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bevsim::battery::{ecm2rc_current_step, ecm2rc_params, BatteryInput, BatteryModel, BatteryState, Rint};
use bevsim::cli::{cmd_run, RunArgs};
use bevsim::config::{units, RateDivisors};
use bevsim::plugin::PluginError;
use bevsim::post::{integrate_budget, net_identity, ARTIFACTS};
use bevsim::resources;
use bevsim::{build_engine, simulate, Error, RunOutput};
use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

// ---- criteria ---------------------------------------------------------------

fn budget_identity() -> Outcome {
    let rounded = net_identity(3964.0, 1045.0, 100.0, 53.0);
    ensure(rounded == 3072.0, format!("rounded terms give {rounded}"))?;
    ensure((rounded - 3073.0).abs() <= 2.0, "stated net outside rounding of its terms")?;
    let mut worst: f64 = 0.0;
    let mut worst_direct: f64 = 0.0;
    for (v, t) in [
        ("midsize_sedan", "mixed_23km"),
        ("midsize_sedan", "city_stop_start"),
        ("compact_suv_ecm", "cold_morning"),
        ("compact_suv_ecm", "ac_charging"),
    ] {
        let run = simulate(&vehicle(v), &testcase(t)).map_err(e)?;
        let b = integrate_budget(&run.rows);
        let resid = b.e_net_wh - (b.e_drive_wh - b.e_regen_wh + b.e_aux_wh + b.e_hvac_wh);
        worst = worst.max(resid.abs());
        // independent recomputation straight from the rows
        let direct: f64 = run
            .rows
            .iter()
            .map(|r| (r.p_drive_dc_w - r.p_regen_w + r.p_aux_w + r.p_hvac_w) * r.dt_s)
            .sum::<f64>()
            / 3600.0;
        worst_direct = worst_direct.max((direct - b.e_net_wh).abs());
    }
    ensure(worst <= 1.0, format!("identity residual {worst} Wh"))?;
    ensure(worst_direct <= 1.0, format!("direct integral differs by {worst_direct} Wh"))?;
    Ok(format!(
        "max residual {worst:.2e} Wh over 4 runs, direct integral within {worst_direct:.2e} Wh; 3964-1045+100+53 = 3072 vs 3073"
    ))
}

fn multi_rate_equivalence() -> Outcome {
    let mut t = testcase("mixed_23km");
    t.sim.hvac_enabled = false;
    let cycle = constant_cycle(15.0, 600.0, t.sim.dt_s);
    let mut v1 = vehicle("midsize_sedan");
    v1.rate_divisors = RateDivisors::all_ones();
    let mut v5 = v1.clone();
    v5.rate_divisors.battery = 5;
    let a = build_engine(&v1, &t, cycle.clone()).map_err(e)?.run().map_err(e)?;
    let b = build_engine(&v5, &t, cycle).map_err(e)?.run().map_err(e)?;
    ensure(b.executions.battery == 1200, format!("battery ran {} times", b.executions.battery))?;
    let d = (a.last().soc - b.last().soc).abs();
    ensure(d <= 1e-9, format!("final SoC differs by {d:e}"))?;
    Ok(format!(
        "final SoC {:.9} (divisor 1) vs {:.9} (divisor 5), |diff| = {d:.1e}",
        a.last().soc,
        b.last().soc
    ))
}

fn coulomb_counting() -> Outcome {
    let v = vehicle("midsize_sedan");
    let b = &v.battery;
    let params = bevsim::battery::rint_params(b);
    let mut m = Rint::new(params, 0.9);
    let p = b.capacity_ah * b.v_nom_v; // 1C at nominal voltage
    let dt = 0.1;
    let mut shortfall: f64 = 0.0;
    for _ in 0..3600 {
        let s = m
            .step(&BatteryInput {
                p_net_w: p,
                t_batt_c: 25.0,
                dt_s: dt,
            })
            .map_err(e)?;
        shortfall = shortfall.max(s.power_shortfall_w);
    }
    ensure(shortfall == 0.0, "current clamp engaged")?;
    let dsoc = 0.9 - m.state().soc;
    let rel = (dsoc - 0.1).abs() / 0.1;
    ensure(rel <= 1e-9, format!("dSoC {dsoc:.12}, relative error {rel:e}"))?;
    Ok(format!("dSoC = {dsoc:.9}, relative error {rel:.1e}"))
}

fn ecm_oracle() -> Outcome {
    let v = vehicle("compact_suv_ecm");
    let p = ecm2rc_params(&v.battery);
    let i = 50.0;
    let tau1 = p.r1_ohm * p.c1_f;
    let tau2 = p.r2_ohm * p.c2_f;
    let horizon = 10.0 * tau1.max(tau2);
    let dt = 0.5;
    let n = (horizon / dt).round() as usize;
    let mut s = BatteryState::at_rest(0.9, p.ocv.ocv(0.9));
    let mut worst_rc: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    for k in 1..=n {
        s = ecm2rc_current_step(&s, i, dt, &p).map_err(e)?;
        let t = k as f64 * dt;
        let rc1 = i * p.r1_ohm * (1.0 - (-t / tau1).exp());
        let rc2 = i * p.r2_ohm * (1.0 - (-t / tau2).exp());
        let soc = 0.9 - i * t / units::ah_to_coulomb(v.battery.capacity_ah);
        let v_exact = p.ocv.ocv(soc) - i * p.r0_ohm - rc1 - rc2;
        let rel_rc = ((s.v_rc1_v + s.v_rc2_v) - (rc1 + rc2)).abs() / (i * (p.r1_ohm + p.r2_ohm));
        worst_rc = worst_rc.max(rel_rc);
        worst_v = worst_v.max((s.v_batt_v - v_exact).abs() / v_exact);
    }
    ensure(worst_rc <= 1e-3, format!("RC voltage error {worst_rc:e}"))?;
    ensure(worst_v <= 1e-3, format!("terminal voltage error {worst_v:e}"))?;
    Ok(format!(
        "{n} steps over 10 tau ({horizon:.0} s): max RC error {worst_rc:.1e}, terminal {worst_v:.1e} (relative)"
    ))
}

fn check_regen_rows(run: &RunOutput, soc_max: f64) -> Result<(usize, usize), String> {
    let mut slow = 0;
    let mut full = 0;
    let mut prev_soc = run.initial.soc;
    for (k, r) in run.rows.iter().enumerate() {
        if r.speed_mps < 0.5 {
            ensure(r.p_regen_w == 0.0, format!("row {k}: regen {} W at {} m/s", r.p_regen_w, r.speed_mps))?;
            slow += 1;
        }
        if prev_soc >= soc_max {
            ensure(r.p_regen_w == 0.0, format!("row {k}: regen {} W with SoC {prev_soc}", r.p_regen_w))?;
            if r.p_friction_w > 0.0 {
                full += 1;
            }
        }
        prev_soc = r.soc;
    }
    Ok((slow, full))
}

fn regen_properties() -> Outcome {
    let t = testcase("city_stop_start");
    let cycle = bevsim::route::load_route(&t).map_err(e)?;
    let mut nets = Vec::new();
    let mut slow_total = 0;
    for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut v = vehicle("midsize_sedan");
        v.regen_blend_factor = beta;
        let run = build_engine(&v, &t, cycle.clone()).map_err(e)?.run().map_err(e)?;
        slow_total += check_regen_rows(&run, v.battery.soc_max)?.0;
        nets.push(integrate_budget(&run.rows).e_net_wh);
    }
    ensure(
        nets.windows(2).all(|w| w[1] <= w[0]),
        format!("e_net not non-increasing in beta: {nets:?}"),
    )?;
    // steady descent starting at the SoC ceiling so the full-pack cutoff is exercised
    let mut v = vehicle("midsize_sedan");
    let mut t_full = testcase("mixed_23km");
    t_full.sim.initial_soc = v.battery.soc_max;
    t_full.environment.grade_rad = units::grade_percent_to_rad(-6.0);
    v.regen_blend_factor = 1.0;
    let descent = constant_cycle(15.0, 120.0, t_full.sim.dt_s);
    let run = build_engine(&v, &t_full, descent).map_err(e)?.run().map_err(e)?;
    let (_, full) = check_regen_rows(&run, v.battery.soc_max)?;
    ensure(full > 0, "full-pack cutoff never exercised")?;
    ensure(run.rows.iter().any(|r| r.p_regen_w > 0.0), "no regen once below the ceiling")?;
    Ok(format!(
        "e_net over beta 0..1: {} Wh; zero regen on {slow_total} rows below 0.5 m/s and {full} braking rows at full pack",
        nets.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>().join(" >= ")
    ))
}

fn plausibility_band() -> Outcome {
    let v = vehicle("midsize_sedan");
    ensure(
        v.mass_kg == 1950.0 && v.cd == 0.21 && v.crr == 0.0065 && v.regen_blend_factor == 0.83,
        "archetype parameters drifted",
    )?;
    let run = simulate(&v, &testcase("mixed_23km")).map_err(e)?;
    let b = integrate_budget(&run.rows);
    let c = b.consumption_kwh_per_100km.ok_or("no distance")?;
    let km = units::m_to_km(run.last().distance_m);
    ensure((10.0..=20.0).contains(&c), format!("{c:.2} kWh/100 km outside 10-20"))?;
    ensure((20.0..=26.0).contains(&km), format!("cycle distance {km:.2} km is not ~23 km"))?;
    let wltp = if resources::names(resources::Kind::Cycle).iter().any(|n| n == "wltp_class3b") {
        let cyc = resources::cycle("wltp_class3b").map_err(e)?;
        let d = units::m_to_km(cyc.resample(0.1).map_err(e)?.distance_m());
        ensure((d - 23.27).abs() <= 0.05, format!("WLTP distance {d:.3} km"))?;
        format!("; WLTP Class 3b trace {d:.3} km")
    } else {
        "; WLTP Class 3b trace not installed, distance sub-check skipped".into()
    };
    Ok(format!("{c:.2} kWh/100 km over {km:.2} km{wltp}"))
}

fn run_case(dir: &Path, overwrite: bool) -> bevsim::Result<std::path::PathBuf> {
    let args = RunArgs {
        case_dir: dir.to_path_buf(),
        vehicle: None,
        testcase: None,
        name: Some("det".into()),
        overwrite,
        quiet: true,
    };
    cmd_run(&args, &mut Vec::new()).map(|r| r.package_dir)
}

fn summary_sans_wall_time(p: &Path) -> Result<serde_json::Value, String> {
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(p).map_err(e)?).map_err(e)?;
    v["meta"].as_object_mut().ok_or("no meta")?.remove("wall_time_s");
    Ok(v)
}

fn determinism_and_packaging() -> Outcome {
    let tmp = tempfile::tempdir().map_err(e)?;
    let case = case_dir(tmp.path(), "midsize_sedan", "mixed_23km");
    let pkg = run_case(&case, false).map_err(e)?;
    let csv_a = fs::read(pkg.join("timeseries.csv")).map_err(e)?;
    let sum_a = summary_sans_wall_time(&pkg.join("summary.json"))?;
    let exists = run_case(&case, false);
    ensure(matches!(exists, Err(Error::Exists(_))), "second run without overwrite did not refuse")?;
    run_case(&case, true).map_err(e)?;
    ensure(csv_a == fs::read(pkg.join("timeseries.csv")).map_err(e)?, "timeseries.csv differs")?;
    ensure(sum_a == summary_sans_wall_time(&pkg.join("summary.json"))?, "summary.json differs")?;
    for f in ARTIFACTS {
        ensure(pkg.join(f).is_file(), format!("missing {f}"))?;
    }
    Ok(format!(
        "byte-identical timeseries ({} bytes) and summary; {} files present",
        csv_a.len(),
        ARTIFACTS.len()
    ))
}

fn plugin_fidelity() -> Outcome {
    let builtin = vehicle("midsize_sedan");
    let mut external = builtin.clone();
    external.battery.model = "external".into();
    external.battery.external_module_path = Some(shipped_plugin("rint_plugin.py"));
    let t = testcase("mixed_23km");
    let cycle = bevsim::route::load_route(&t).map_err(e)?;
    ensure(cycle.duration_s() == 1800.0, "cycle is not 1800 s")?;
    let a = build_engine(&builtin, &t, cycle.clone()).map_err(e)?.run().map_err(e)?;
    let b = build_engine(&external, &t, cycle).map_err(e)?.run().map_err(e)?;
    ensure(a.steps() == b.steps(), "step counts differ")?;
    let mut dsoc: f64 = 0.0;
    let mut dv: f64 = 0.0;
    for (x, y) in a.rows.iter().zip(&b.rows) {
        dsoc = dsoc.max((x.soc - y.soc).abs());
        dv = dv.max((x.v_batt_v - y.v_batt_v).abs());
    }
    ensure(dsoc <= 1e-6 && dv <= 1e-6, format!("max |dSoC| {dsoc:e}, |dV| {dv:e}"))?;

    let short = constant_cycle(10.0, 5.0, 0.1);
    let mut hang = builtin.clone();
    hang.battery.model = "external".into();
    hang.battery.external_module_path = Some(fixture_plugin("hang.py"));
    hang.battery.plugin_timeout_ms = 500;
    let err = build_engine(&hang, &t, short.clone()).map_err(e)?.run().err().ok_or("hang fixture did not fail")?;
    ensure(
        matches!(err, Error::PluginStep { source: PluginError::Timeout { .. }, .. }) && err.exit_code() == 3,
        format!("hang fixture: {err}"),
    )?;
    let mut bad = hang.clone();
    bad.battery.external_module_path = Some(fixture_plugin("malformed.py"));
    let err = build_engine(&bad, &t, short).map_err(e)?.run().err().ok_or("malformed fixture did not fail")?;
    ensure(
        matches!(err, Error::PluginStep { source: PluginError::Protocol { .. }, .. }) && err.exit_code() == 3,
        format!("malformed fixture: {err}"),
    )?;
    Ok(format!(
        "{} steps: max |dSoC| {dsoc:.1e}, |dV| {dv:.1e} V; hang -> timeout (exit 3), malformed -> protocol error (exit 3)",
        a.steps()
    ))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bevsim");
    let tmp = tempfile::tempdir().map_err(e)?;
    let run = |args: &[&str]| Command::new(bin).args(args).current_dir(tmp.path()).output();
    let o = run(&["init", "c"]).map_err(e)?;
    ensure(o.status.code() == Some(0), "init failed")?;
    let mut names: Vec<_> = fs::read_dir(tmp.path().join("c"))
        .map_err(e)?
        .map(|d| d.map(|d| d.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    names.sort();
    ensure(
        names == [".bevsim-case", "README.md", "output", "testcase.yaml", "vehicle.yaml"],
        format!("init created {names:?}"),
    )?;
    let o = run(&["run-example", "sedan_mixed", "--quiet"]).map_err(e)?;
    ensure(o.status.code() == Some(0), format!("run-example exit {:?}", o.status.code()))?;
    let out = String::from_utf8_lossy(&o.stdout);
    let line = out
        .lines()
        .find(|l| l.starts_with("steps="))
        .ok_or("no summary line")?
        .to_string();
    for key in ["distance_km=", "final_soc=", "energy_net_wh="] {
        ensure(line.contains(key), format!("summary line lacks {key}"))?;
    }
    let o = run(&["run-example", "does_not_exist"]).map_err(e)?;
    ensure(o.status.code() == Some(1), format!("unknown example exit {:?}", o.status.code()))?;
    Ok(format!("init -> 5 entries; `{line}`; unknown example -> exit 1"))
}

fn performance() -> Outcome {
    let mut v = vehicle("midsize_sedan");
    v.rate_divisors = RateDivisors::all_ones();
    let t = testcase("mixed_23km");
    let cycle = bevsim::route::load_route(&t).map_err(e)?;
    let engine = build_engine(&v, &t, cycle).map_err(e)?;
    let started = Instant::now();
    let run = engine.run().map_err(e)?;
    let elapsed = started.elapsed();
    ensure(run.steps() == 18000, format!("{} steps", run.steps()))?;
    let x = run.executions;
    let all = [x.longitudinal, x.driveline, x.regen, x.loads_hvac, x.charging, x.battery, x.thermal_trends];
    ensure(all.iter().all(|&n| n == 18000), format!("module executions {all:?}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("{:.3} s", elapsed.as_secs_f64()))?;
    Ok(format!("18000 steps, every module every step, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

// ---- driver -----------------------------------------------------------------

type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("budget identity", 1.0, budget_identity),
        ("multi-rate equivalence", 1.0, multi_rate_equivalence),
        ("coulomb counting", 1.0, coulomb_counting),
        ("ECM closed form", 1.0, ecm_oracle),
        ("regen properties", 5.0, regen_properties),
        ("plausibility band", 2.0, plausibility_band),
        ("determinism and packaging", 2.0, determinism_and_packaging),
        ("plugin fidelity", 10.0, plugin_fidelity),
        ("CLI contract", 5.0, cli_contract),
        ("performance", 1.0, performance),
    ];
    let mut failed = 0;
    for (name, budget_s, check) in criteria {
        let started = Instant::now();
        let mut outcome = check();
        let secs = started.elapsed().as_secs_f64();
        if outcome.is_ok() && secs > budget_s {
            outcome = Err(format!("took {secs:.2} s, budget {budget_s} s"));
        }
        match outcome {
            Ok(detail) => println!("PASS  {name:<26} {detail} [{secs:.2} s / {budget_s} s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<26} {why} [{secs:.2} s / {budget_s} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
