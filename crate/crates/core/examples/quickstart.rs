//! Simulate a packaged vehicle over a packaged testcase and print the budget.
//!
//!     cargo run --example quickstart [archetype] [testcase]

use bevsim::post::integrate_budget;
use bevsim::{resources, simulate};

fn main() -> bevsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let vehicle_name = args.next().unwrap_or_else(|| "midsize_sedan".into());
    let testcase_name = args.next().unwrap_or_else(|| "mixed_23km".into());
    let vehicle = resources::vehicle(&vehicle_name)?;
    let testcase = resources::testcase(&testcase_name)?;

    let run = simulate(&vehicle, &testcase)?;
    let last = run.last();
    let b = integrate_budget(&run.rows);

    println!("{vehicle_name} on {testcase_name} ({})", run.cycle_name);
    println!("  steps        {}", run.steps());
    println!("  distance     {:.3} km", last.distance_m / 1000.0);
    println!("  SoC          {:.4} -> {:.4}", run.initial.soc, last.soc);
    println!("  aero         {:8.1} Wh", b.e_aero_wh);
    println!("  rolling      {:8.1} Wh", b.e_roll_wh);
    println!("  grade        {:8.1} Wh", b.e_grade_wh);
    println!("  inertia      {:8.1} Wh", b.e_inertia_wh);
    println!("  drive (dc)   {:8.1} Wh", b.e_drive_wh);
    println!("  regen        {:8.1} Wh", b.e_regen_wh);
    println!("  aux + hvac   {:8.1} Wh", b.e_aux_wh + b.e_hvac_wh);
    println!("  net          {:8.1} Wh", b.e_net_wh);
    if let Some(c) = b.consumption_kwh_per_100km {
        println!("  consumption  {c:.2} kWh/100 km");
    }
    Ok(())
}
