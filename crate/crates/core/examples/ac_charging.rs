//! Parked AC charging of the two-RC pack: constant current, then constant
//! voltage until the taper current falls below the termination threshold.

use bevsim::charging::ChargerMode;
use bevsim::{resources, simulate};

fn main() -> bevsim::Result<()> {
    let vehicle = resources::vehicle("compact_suv_ecm")?;
    let testcase = resources::testcase("ac_charging")?;
    let run = simulate(&vehicle, &testcase)?;

    let mut mode = run.initial.charger_state;
    println!("{:>8} {:>6} {:>8} {:>9} {:>9}", "t s", "mode", "SoC", "V", "I A");
    for r in &run.rows {
        if r.charger_state != mode || (r.time_s % 600.0).abs() < 1e-9 {
            println!(
                "{:>8.1} {:>6} {:>8.4} {:>9.2} {:>9.2}",
                r.time_s, r.charger_state, r.soc, r.v_batt_v, r.i_batt_a
            );
            mode = r.charger_state;
        }
    }
    let done = run.rows.iter().find(|r| r.charger_state == ChargerMode::Done);
    match done {
        Some(r) => println!("charge terminated at {:.1} s, SoC {:.4}", r.time_s, r.soc),
        None => println!("window closed before termination, SoC {:.4}", run.last().soc),
    }
    Ok(())
}
