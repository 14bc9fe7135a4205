//! Torque envelope and efficiency of the analytical motor next to the
//! packaged efficiency map.

use bevsim::config::units;
use bevsim::driveline::{motor_efficiency_map, motor_efficiency_scalar, EfficiencyBounds, EfficiencyMap, MotorEnvelope, TorqueDirection};
use bevsim::resources;

fn main() -> bevsim::Result<()> {
    let sedan = resources::vehicle("midsize_sedan")?;
    let env = MotorEnvelope::from_config(&sedan.motor);
    let bounds = EfficiencyBounds::from_config(&sedan.motor);

    println!("analytical motor, base speed {:.0} rpm", env.omega_base_radps * 60.0 / (2.0 * std::f64::consts::PI));
    println!("{:>7} {:>10} {:>10} {:>8} {:>8}", "rpm", "T max Nm", "P max kW", "eta@25%", "eta@100%");
    for rpm in (0..=15000).step_by(1500) {
        let w = units::rpm_to_radps(rpm as f64);
        let t = env.torque_limit(w, TorqueDirection::Motoring);
        println!(
            "{rpm:>7} {t:>10.1} {:>10.1} {:>8.3} {:>8.3}",
            units::w_to_kw(t * w),
            motor_efficiency_scalar(&env, 0.25 * t, w, &bounds),
            motor_efficiency_scalar(&env, t, w, &bounds)
        );
    }

    let hatch = resources::vehicle("city_hatchback")?;
    let henv = MotorEnvelope::from_config(&hatch.motor);
    let map = EfficiencyMap::load(hatch.motor.map_path.as_deref().unwrap_or("packaged:compact_pmsm"))?;
    println!("\nmap motor ({} points), efficiency by torque fraction (rows) and rpm (columns)", map.len());
    let speeds = [1000.0, 3000.0, 5000.0, 7000.0, 9000.0, 11000.0];
    print!("{:>6}", "");
    for s in speeds {
        print!("{s:>7.0}");
    }
    println!();
    for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
        print!("{frac:>6.1}");
        for s in speeds {
            let w = units::rpm_to_radps(s);
            let t = frac * henv.torque_limit(w, TorqueDirection::Motoring);
            print!("{:>7.3}", motor_efficiency_map(&map, &henv, t, w));
        }
        println!();
    }
    Ok(())
}
