//! Swap the builtin battery for the shipped Python plugin and compare.
//!
//! Needs `python3` on PATH (or `BEVSIM_PYTHON`).

use bevsim::{resources, simulate};

fn main() -> bevsim::Result<()> {
    let testcase = resources::testcase("city_stop_start")?;
    let builtin = resources::vehicle("midsize_sedan")?;
    let mut external = builtin.clone();
    external.battery.model = "external".into();
    external.battery.external_module_path =
        Some(concat!(env!("CARGO_MANIFEST_DIR"), "/plugins/rint_plugin.py").into());

    let a = simulate(&builtin, &testcase)?;
    let b = simulate(&external, &testcase)?;
    let max_dsoc = a.rows.iter().zip(&b.rows).map(|(x, y)| (x.soc - y.soc).abs()).fold(0.0, f64::max);
    let max_dv = a.rows.iter().zip(&b.rows).map(|(x, y)| (x.v_batt_v - y.v_batt_v).abs()).fold(0.0, f64::max);
    println!("builtin  final SoC {:.8}  ({:.3} s)", a.last().soc, a.wall_time_s);
    println!("plugin   final SoC {:.8}  ({:.3} s)", b.last().soc, b.wall_time_s);
    println!("max |dSoC| {max_dsoc:.2e}, max |dV| {max_dv:.2e} V over {} steps", a.steps());
    Ok(())
}
