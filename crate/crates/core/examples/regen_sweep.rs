//! Net energy on the stop-start cycle as the regenerative blend factor varies.

use bevsim::post::integrate_budget;
use bevsim::{build_engine, resources, route};

fn main() -> bevsim::Result<()> {
    let testcase = resources::testcase("city_stop_start")?;
    let cycle = route::load_route(&testcase)?;
    println!("{:>5} {:>10} {:>10} {:>11} {:>14}", "beta", "regen Wh", "net Wh", "friction Wh", "kWh/100 km");
    for k in 0..=10 {
        let mut vehicle = resources::vehicle("midsize_sedan")?;
        vehicle.regen_blend_factor = k as f64 / 10.0;
        let run = build_engine(&vehicle, &testcase, cycle.clone())?.run()?;
        let b = integrate_budget(&run.rows);
        println!(
            "{:>5.1} {:>10.1} {:>10.1} {:>11.1} {:>14.2}",
            vehicle.regen_blend_factor,
            b.e_regen_wh,
            b.e_net_wh,
            b.e_friction_wh,
            b.consumption_kwh_per_100km.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
