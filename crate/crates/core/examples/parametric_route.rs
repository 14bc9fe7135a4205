//! Build a route from accel/cruise/decel/idle segments instead of a CSV trace.

use bevsim::config::{Segment, SegmentKind};
use bevsim::post::integrate_budget;
use bevsim::{build_engine, resources, route};

fn seg(kind: SegmentKind, duration_s: f64, target_kmh: Option<f64>) -> Segment {
    Segment {
        kind,
        duration_s,
        target_speed_mps: target_kmh.map(|k| k / 3.6),
    }
}

fn main() -> bevsim::Result<()> {
    use SegmentKind::*;
    let segments = [
        seg(Idle, 10.0, None),
        seg(Accel, 15.0, Some(50.0)),
        seg(Cruise, 120.0, None),
        seg(Accel, 20.0, Some(100.0)),
        seg(Cruise, 300.0, None),
        seg(Decel, 25.0, Some(0.0)),
        seg(Idle, 20.0, None),
    ];
    let vehicle = resources::vehicle("midsize_sedan")?;
    let testcase = resources::testcase("parametric_commute")?;
    let cycle = route::build_parametric(&segments, testcase.sim.dt_s)?;
    println!("route: {:.0} s, {:.2} km", cycle.duration_s(), cycle.distance_m() / 1000.0);

    for grade in [-2.0, 0.0, 2.0] {
        let mut t = testcase.clone();
        t.environment.grade_rad = bevsim::config::units::grade_percent_to_rad(grade);
        let run = build_engine(&vehicle, &t, cycle.clone())?.run()?;
        let b = integrate_budget(&run.rows);
        println!(
            "grade {grade:+.0} %: net {:7.1} Wh, grade work {:6.1} Wh, regen {:6.1} Wh",
            b.e_net_wh, b.e_grade_wh, b.e_regen_wh
        );
    }
    Ok(())
}
