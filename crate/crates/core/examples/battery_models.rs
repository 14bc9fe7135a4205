//! Internal-resistance and two-RC battery models under the same load pulse.

use bevsim::battery::{ecm2rc_params, rint_params, BatteryInput, BatteryModel, Ecm2rc, Rint};
use bevsim::resources;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suv = resources::vehicle("compact_suv_ecm")?;
    let mut b = suv.battery.clone();
    b.r_int_ohm = Some(b.r0_ohm.unwrap_or(0.0) + b.r1_ohm.unwrap_or(0.0) + b.r2_ohm.unwrap_or(0.0));

    let mut rint = Rint::new(rint_params(&b), 0.8);
    let mut ecm = Ecm2rc::new(ecm2rc_params(&b), 0.8);

    // 60 kW for two minutes, then five minutes of rest
    let dt = 1.0;
    println!("{:>6} {:>8} {:>10} {:>10} {:>9} {:>9}", "t s", "P kW", "Rint V", "2RC V", "Rint SoC", "2RC SoC");
    for k in 1..=420 {
        let p = if k <= 120 { 60_000.0 } else { 0.0 };
        let input = BatteryInput {
            p_net_w: p,
            t_batt_c: 25.0,
            dt_s: dt,
        };
        let a = rint.step(&input)?.state;
        let c = ecm.step(&input)?.state;
        if k % 30 == 0 || k == 1 || k == 121 {
            println!(
                "{k:>6} {:>8.1} {:>10.2} {:>10.2} {:>9.5} {:>9.5}",
                p / 1000.0,
                a.v_batt_v,
                c.v_batt_v,
                a.soc,
                c.soc
            );
        }
    }
    Ok(())
}
