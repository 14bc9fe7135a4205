//! Cabin pull-down from a hot soak and warm-up from a cold soak, with the
//! packaged cabin parameters.

use bevsim::loads::{CabinInput, CabinModel, CabinParams, LumpedCabin};
use bevsim::resources;

fn run(label: &str, params: CabinParams, setpoint: f64, t_amb: f64, solar: f64) -> Result<(), bevsim::error::StepError> {
    let mut cabin = LumpedCabin::new(params, Some(setpoint), t_amb);
    println!("{label}: ambient {t_amb} C, setpoint {setpoint} C, solar {solar} W/m2");
    println!("{:>6} {:>8} {:>9} {:>9}", "t s", "cabin C", "Q_hvac W", "P_hvac W");
    for k in 1..=1800 {
        let s = cabin.step(&CabinInput {
            t_amb_c: t_amb,
            speed_mps: 15.0,
            g_solar_w_per_m2: solar,
            n_occ: 2.0,
            dt_s: 1.0,
        })?;
        if k % 180 == 0 {
            println!("{k:>6} {:>8.2} {:>9.0} {:>9.0}", s.t_cabin_c, s.q_hvac_w, s.p_hvac_w);
        }
    }
    println!();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = resources::vehicle("compact_suv_ecm")?;
    let params = CabinParams::from_config(&v.hvac);
    run("summer", params, 22.0, 35.0, 800.0)?;
    run("winter", params, 21.0, -10.0, 0.0)?;
    Ok(())
}
