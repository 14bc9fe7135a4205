//! Prescribed-speed longitudinal dynamics.
//!
//! Speed is an input. Acceleration, distance, and the force needed at the
//! wheels to follow the trace are derived from it.

/// Standard gravity, m/s².
pub const G: f64 = 9.81;

/// Force decomposition at one operating point. All in newtons except `p_wheel_w`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoadLoadBreakdown {
    pub f_aero_n: f64,
    pub f_roll_n: f64,
    pub f_grade_n: f64,
    pub f_inertia_n: f64,
    pub f_wheel_req_n: f64,
    pub p_wheel_w: f64,
}

/// Road-load parameters that do not change along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadLoadParams {
    pub mass_kg: f64,
    pub grade_rad: f64,
    pub air_density_kg_per_m3: f64,
    pub cd: f64,
    pub frontal_area_m2: f64,
    pub crr: f64,
    /// Headwind positive.
    pub wind_speed_mps: f64,
}

impl RoadLoadParams {
    pub fn v_rel(&self, v: f64) -> f64 {
        v + self.wind_speed_mps
    }
}

pub fn accel_from_trace(v_k: f64, v_k1: f64, dt: f64) -> f64 {
    (v_k1 - v_k) / dt
}

/// Trapezoidal position update.
pub fn advance_distance(x_k: f64, v_k: f64, v_k1: f64, dt: f64) -> f64 {
    x_k + 0.5 * (v_k + v_k1) * dt
}

/// Resistive forces at speed `v`. `f_inertia_n`, `f_wheel_req_n` and
/// `p_wheel_w` are left at zero; see [`road_load_at`].
pub fn road_load(v_rel: f64, v: f64, p: &RoadLoadParams) -> RoadLoadBreakdown {
    let m = p.mass_kg;
    let f_aero_n = 0.5 * p.air_density_kg_per_m3 * p.cd * p.frontal_area_m2 * v_rel * v_rel.abs();
    let f_roll_n = if v == 0.0 {
        0.0
    } else {
        m * G * p.crr * p.grade_rad.cos() * (1.0 + 0.01 * v)
    };
    let f_grade_n = m * G * p.grade_rad.sin();
    RoadLoadBreakdown {
        f_aero_n,
        f_roll_n,
        f_grade_n,
        ..Default::default()
    }
}

/// Full breakdown including inertia, the required wheel force, and wheel power.
pub fn road_load_at(v: f64, a: f64, p: &RoadLoadParams) -> RoadLoadBreakdown {
    let mut b = road_load(p.v_rel(v), v, p);
    b.f_inertia_n = p.mass_kg * a;
    b.f_wheel_req_n = b.f_inertia_n + b.f_aero_n + b.f_roll_n + b.f_grade_n;
    b.p_wheel_w = b.f_wheel_req_n * v;
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WheelDemand {
    pub p_wheel_w: f64,
    pub throttle_frac: f64,
    pub brake_frac: f64,
    pub brake_demand_flag: bool,
}

pub fn wheel_demand(
    f_wheel_req_n: f64,
    v: f64,
    drive_force_limit_n: f64,
    brake_force_limit_n: f64,
) -> WheelDemand {
    let f = f_wheel_req_n;
    WheelDemand {
        p_wheel_w: f * v,
        throttle_frac: if f > 0.0 {
            (f / drive_force_limit_n).clamp(0.0, 1.0)
        } else {
            0.0
        },
        brake_frac: if f < 0.0 {
            (-f / brake_force_limit_n).clamp(0.0, 1.0)
        } else {
            0.0
        },
        brake_demand_flag: f < 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(m: f64, crr: f64) -> RoadLoadParams {
        RoadLoadParams {
            mass_kg: m,
            grade_rad: 0.0,
            air_density_kg_per_m3: 1.2,
            cd: 0.28,
            frontal_area_m2: 2.3,
            crr,
            wind_speed_mps: 0.0,
        }
    }

    #[test]
    fn kinematics() {
        assert!((accel_from_trace(10.0, 10.1, 0.1) - 1.0).abs() < 1e-12);
        assert_eq!(accel_from_trace(7.0, 7.0, 0.1), 0.0);
        assert!((accel_from_trace(10.0, 9.5, 0.1) + 5.0).abs() < 1e-12);
        assert!((advance_distance(0.0, 10.0, 12.0, 0.1) - 1.1).abs() < 1e-12);
        assert_eq!(advance_distance(3.0, 0.0, 0.0, 0.1), 3.0);
        let mut x = 0.0;
        for _ in 0..18000 {
            x = advance_distance(x, 10.0, 10.0, 0.1);
        }
        assert!((x - 18_000.0).abs() < 1e-6);
    }

    #[test]
    fn aero_and_rolling_hand_values() {
        let p = params(1800.0, 0.007);
        // 0.5 * 1.2 * 0.28 * 2.3 * 27.78^2
        let expect = 0.5 * 1.2 * 0.28 * 2.3 * 27.78_f64.powi(2);
        let b = road_load(27.78, 27.78, &p);
        assert!((b.f_aero_n - expect).abs() < 1e-9);
        assert!((b.f_aero_n - 298.2).abs() < 0.1);
        let b = road_load(10.0, 10.0, &p);
        assert!((b.f_roll_n - 1800.0 * 9.81 * 0.007 * 1.1).abs() < 1e-9);
        assert!((b.f_roll_n - 135.97).abs() < 0.01);
        assert_eq!(b.f_grade_n, 0.0);
    }

    #[test]
    fn standstill_has_no_rolling_drag() {
        let b = road_load(0.0, 0.0, &params(1500.0, 0.01));
        assert_eq!(b.f_roll_n, 0.0);
        assert_eq!(b.f_aero_n, 0.0);
    }

    #[test]
    fn tailwind_faster_than_vehicle_pushes() {
        let mut p = params(1500.0, 0.01);
        p.wind_speed_mps = -15.0;
        let b = road_load(p.v_rel(5.0), 5.0, &p);
        assert!(b.f_aero_n < 0.0);
    }

    #[test]
    fn wheel_demand_cases() {
        let d = wheel_demand(2000.0, 10.0, 8000.0, 8000.0);
        assert_eq!((d.throttle_frac, d.brake_frac, d.brake_demand_flag), (0.25, 0.0, false));
        let d = wheel_demand(0.0, 10.0, 8000.0, 8000.0);
        assert_eq!((d.throttle_frac, d.brake_frac, d.brake_demand_flag), (0.0, 0.0, false));
        let d = wheel_demand(-3000.0, 15.0, 8000.0, 8000.0);
        assert_eq!(d.p_wheel_w, -45_000.0);
        assert!(d.brake_demand_flag);
        assert_eq!(d.brake_frac, 0.375);
    }

    proptest! {
        #[test]
        fn breakdown_sums_and_signs(
            v in 0.0f64..70.0,
            a in -8.0f64..8.0,
            m in 500.0f64..4000.0,
            theta in -std::f64::consts::FRAC_PI_4..std::f64::consts::FRAC_PI_4,
            crr in 0.0f64..0.03,
            wind in 0.0f64..30.0,
        ) {
            let p = RoadLoadParams { grade_rad: theta, wind_speed_mps: wind, ..params(m, crr) };
            let b = road_load_at(v, a, &p);
            prop_assert_eq!(b.f_wheel_req_n, b.f_inertia_n + b.f_aero_n + b.f_roll_n + b.f_grade_n);
            prop_assert!(b.f_aero_n >= 0.0);
            prop_assert!(b.f_roll_n >= 0.0);
            prop_assert!(b.f_wheel_req_n.is_finite() && b.p_wheel_w.is_finite());
        }
    }
}
