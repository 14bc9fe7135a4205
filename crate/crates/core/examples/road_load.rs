//! Road-load forces of the packaged sedan across speeds, flat and on a grade.

use bevsim::config::units;
use bevsim::longitudinal::{road_load_at, RoadLoadParams};
use bevsim::resources;

fn main() -> bevsim::Result<()> {
    let v = resources::vehicle("midsize_sedan")?;
    let flat = RoadLoadParams {
        mass_kg: v.mass_kg + 75.0,
        grade_rad: 0.0,
        air_density_kg_per_m3: 1.2,
        cd: v.cd,
        frontal_area_m2: v.frontal_area_m2,
        crr: v.crr,
        wind_speed_mps: 0.0,
    };
    let hill = RoadLoadParams {
        grade_rad: units::grade_percent_to_rad(4.0),
        ..flat
    };

    println!("{:>6} {:>9} {:>9} {:>9} {:>10} {:>12}", "km/h", "aero N", "roll N", "total N", "flat kW", "4 % hill kW");
    for kmh in (0..=150).step_by(10) {
        let speed = units::kmh_to_mps(kmh as f64);
        let f = road_load_at(speed, 0.0, &flat);
        let h = road_load_at(speed, 0.0, &hill);
        println!(
            "{kmh:>6} {:>9.1} {:>9.1} {:>9.1} {:>10.2} {:>12.2}",
            f.f_aero_n,
            f.f_roll_n,
            f.f_wheel_req_n,
            units::w_to_kw(f.p_wheel_w),
            units::w_to_kw(h.p_wheel_w)
        );
    }
    Ok(())
}
