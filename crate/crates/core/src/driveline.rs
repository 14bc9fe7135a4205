//! Fixed-ratio reducer, envelope-limited traction motor, and inverter.

use crate::config::registry::ModelContext;
use crate::config::{MotorConfig, PACKAGED_PREFIX};
use crate::error::{Error, Result};
use crate::resources;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducerSpeeds {
    pub omega_wheel_radps: f64,
    pub omega_motor_radps: f64,
}

pub fn reducer_map(v: f64, wheel_radius_m: f64, ratio_total: f64) -> ReducerSpeeds {
    let omega_wheel_radps = v / wheel_radius_m;
    ReducerSpeeds {
        omega_wheel_radps,
        omega_motor_radps: ratio_total * omega_wheel_radps,
    }
}

/// Motor-shaft torque needed for a wheel force. Transmission losses raise the
/// torque when driving and lower it when braking.
pub fn motor_torque_demand(
    f_wheel_n: f64,
    wheel_radius_m: f64,
    ratio_total: f64,
    transmission_efficiency: f64,
) -> f64 {
    let t_wheel = f_wheel_n * wheel_radius_m;
    if t_wheel >= 0.0 {
        t_wheel / (ratio_total * transmission_efficiency)
    } else {
        t_wheel * transmission_efficiency / ratio_total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorqueDirection {
    Motoring,
    Regen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorEnvelope {
    pub t_pk_nm: f64,
    pub p_pk_w: f64,
    pub omega_base_radps: f64,
    pub omega_max_radps: f64,
    pub t_regen_max_nm: f64,
    pub p_regen_max_w: f64,
}

impl MotorEnvelope {
    pub fn from_config(m: &MotorConfig) -> Self {
        Self {
            t_pk_nm: m.peak_torque_nm,
            p_pk_w: m.peak_power_w,
            omega_base_radps: m.base_speed_radps,
            omega_max_radps: m.max_speed_radps,
            t_regen_max_nm: m.max_regen_torque_nm,
            p_regen_max_w: m.max_regen_power_w,
        }
    }

    /// Torque ceiling (magnitude) at shaft speed `omega`.
    pub fn torque_limit(&self, omega: f64, direction: TorqueDirection) -> f64 {
        let (t, p) = match direction {
            TorqueDirection::Motoring => (self.t_pk_nm, self.p_pk_w),
            TorqueDirection::Regen => (self.t_regen_max_nm, self.p_regen_max_w),
        };
        let omega = omega.abs();
        if omega <= self.omega_base_radps || omega == 0.0 {
            t
        } else {
            t.min(p / omega)
        }
    }

    /// Clamps a signed torque request into `[-T_lim,regen(ω), T_lim,mot(ω)]`.
    pub fn clamp_torque(&self, torque: f64, omega: f64) -> f64 {
        torque.clamp(
            -self.torque_limit(omega, TorqueDirection::Regen),
            self.torque_limit(omega, TorqueDirection::Motoring),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyBounds {
    pub base: f64,
    pub min: f64,
    pub max: f64,
}

impl EfficiencyBounds {
    pub fn from_config(m: &MotorConfig) -> Self {
        Self {
            base: m.base_efficiency,
            min: m.min_efficiency,
            max: m.max_efficiency,
        }
    }
}

/// Load- and speed-dependent scalar efficiency: lowest at light load, slightly
/// reduced toward top speed.
pub fn motor_efficiency_scalar(
    env: &MotorEnvelope,
    torque: f64,
    omega: f64,
    eff: &EfficiencyBounds,
) -> f64 {
    let lambda_t = (torque.abs() / env.t_pk_nm).min(1.0);
    let lambda_w = (omega.abs() / env.omega_max_radps).min(1.0);
    (eff.base - 0.06 * (1.0 - lambda_t) - 0.03 * lambda_w).clamp(eff.min, eff.max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub speed_radps: f64,
    pub torque_nm: f64,
    pub efficiency: f64,
}

/// Scattered (speed, torque, efficiency) points with nearest-neighbour lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMap {
    points: Vec<MapPoint>,
}

const MAP_HEADER: [&str; 3] = ["speed_radps", "torque_nm", "efficiency"];

impl EfficiencyMap {
    pub fn new(points: Vec<MapPoint>) -> Result<Self, String> {
        if points.is_empty() {
            return Err("map has no points".into());
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.speed_radps.is_finite() && p.torque_nm.is_finite()) {
                return Err(format!("point {i}: non-finite coordinate"));
            }
            if !(p.efficiency > 0.0 && p.efficiency <= 1.0) {
                return Err(format!(
                    "point {i}: efficiency must lie in (0, 1] (got {})",
                    p.efficiency
                ));
            }
        }
        Ok(Self { points })
    }

    /// Parses CSV with header `speed_radps,torque_nm,efficiency`.
    pub fn parse(label: &str, text: &str) -> Result<Self> {
        let err = |message: String| Error::MapFormat {
            path: label.to_string(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| err(e.to_string()))?;
        if header.iter().collect::<Vec<_>>() != MAP_HEADER {
            return Err(err(format!(
                "header must be `{}`",
                MAP_HEADER.join(",")
            )));
        }
        let mut points = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| err(format!("line {row}: {e}")))?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| err(format!("line {row}: missing column {}", MAP_HEADER[k])))?
                    .parse::<f64>()
                    .map_err(|e| err(format!("line {row}: {}: {e}", MAP_HEADER[k])))
            };
            points.push(MapPoint {
                speed_radps: field(0)?,
                torque_nm: field(1)?,
                efficiency: field(2)?,
            });
        }
        Self::new(points).map_err(err)
    }

    /// Loads a map from a file path or a `packaged:` reference.
    pub fn load(reference: &str) -> Result<Self> {
        match reference.strip_prefix(PACKAGED_PREFIX) {
            Some(name) => resources::map(name),
            None => {
                let text = std::fs::read_to_string(reference)
                    .map_err(|e| Error::io(format!("reading efficiency map {reference}"), e))?;
                Self::parse(reference, &text)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[MapPoint] {
        &self.points
    }

    /// Efficiency of the nearest point, with speed scaled by `omega_scale`
    /// and torque by `torque_scale`. Ties go to the earlier point.
    pub fn lookup(&self, torque: f64, omega: f64, omega_scale: f64, torque_scale: f64) -> f64 {
        let qw = omega / omega_scale;
        let qt = torque / torque_scale;
        let mut best = self.points[0].efficiency;
        let mut best_d = f64::INFINITY;
        for p in &self.points {
            let dw = p.speed_radps / omega_scale - qw;
            let dt = p.torque_nm / torque_scale - qt;
            let d = dw * dw + dt * dt;
            if d < best_d {
                best_d = d;
                best = p.efficiency;
            }
        }
        best
    }
}

/// Map lookup normalized by the envelope's top speed and peak torque. The map
/// covers the motoring quadrant, so queries use torque and speed magnitudes.
pub fn motor_efficiency_map(map: &EfficiencyMap, env: &MotorEnvelope, torque: f64, omega: f64) -> f64 {
    map.lookup(torque.abs(), omega.abs(), env.omega_max_radps, env.t_pk_nm)
}

/// Motor efficiency model selected by `motor.model`.
#[derive(Debug, Clone, PartialEq)]
pub enum EfficiencyModel {
    Scalar {
        envelope: MotorEnvelope,
        bounds: EfficiencyBounds,
    },
    Map {
        envelope: MotorEnvelope,
        bounds: EfficiencyBounds,
        map: EfficiencyMap,
    },
}

impl EfficiencyModel {
    pub fn envelope(&self) -> &MotorEnvelope {
        match self {
            EfficiencyModel::Scalar { envelope, .. } | EfficiencyModel::Map { envelope, .. } => {
                envelope
            }
        }
    }

    /// Efficiency at an operating point, always within `[η_min, η_max]`.
    pub fn efficiency(&self, torque: f64, omega: f64) -> f64 {
        match self {
            EfficiencyModel::Scalar { envelope, bounds } => {
                motor_efficiency_scalar(envelope, torque, omega, bounds)
            }
            EfficiencyModel::Map {
                envelope,
                bounds,
                map,
            } => motor_efficiency_map(map, envelope, torque, omega).clamp(bounds.min, bounds.max),
        }
    }
}

pub fn analytical_factory(ctx: &ModelContext<'_>) -> Result<EfficiencyModel> {
    let m = &ctx.vehicle.motor;
    Ok(EfficiencyModel::Scalar {
        envelope: MotorEnvelope::from_config(m),
        bounds: EfficiencyBounds::from_config(m),
    })
}

pub fn efficiency_map_factory(ctx: &ModelContext<'_>) -> Result<EfficiencyModel> {
    let m = &ctx.vehicle.motor;
    let reference = m
        .map_path
        .as_deref()
        .ok_or_else(|| Error::schema("motor.map_path", "is required when motor.model is `efficiency_map`"))?;
    Ok(EfficiencyModel::Map {
        envelope: MotorEnvelope::from_config(m),
        bounds: EfficiencyBounds::from_config(m),
        map: EfficiencyMap::load(reference)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalDemand {
    pub p_mech_w: f64,
    pub p_drive_dc_w: f64,
}

/// Battery-side traction power. Braking shaft power is not returned here;
/// recovered energy is accounted by the regenerative braking model.
pub fn electrical_demand(torque: f64, omega: f64, eta_motor: f64, eta_inverter: f64) -> ElectricalDemand {
    let p_mech_w = torque * omega;
    let p_drive_dc_w = if p_mech_w > 0.0 {
        p_mech_w / (eta_motor * eta_inverter)
    } else {
        0.0
    };
    ElectricalDemand {
        p_mech_w,
        p_drive_dc_w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn env() -> MotorEnvelope {
        MotorEnvelope {
            t_pk_nm: 350.0,
            p_pk_w: 150_000.0,
            omega_base_radps: 150_000.0 / 350.0,
            omega_max_radps: 1500.0,
            t_regen_max_nm: 350.0,
            p_regen_max_w: 150_000.0,
        }
    }

    const BOUNDS: EfficiencyBounds = EfficiencyBounds {
        base: 0.93,
        min: 0.80,
        max: 0.96,
    };

    #[test]
    fn reducer_hand_values() {
        let s = reducer_map(20.0, 0.34, 10.0);
        assert!((s.omega_wheel_radps - 58.8235).abs() < 1e-4);
        assert!((s.omega_motor_radps - 588.235).abs() < 1e-3);
        let s = reducer_map(0.0, 0.34, 10.0);
        assert_eq!((s.omega_wheel_radps, s.omega_motor_radps), (0.0, 0.0));
    }

    #[test]
    fn torque_limit_regions() {
        let e = env();
        assert!((e.torque_limit(500.0, TorqueDirection::Motoring) - 300.0).abs() < 1e-9);
        assert_eq!(e.torque_limit(100.0, TorqueDirection::Motoring), 350.0);
        assert!((e.torque_limit(500.0, TorqueDirection::Regen) - 300.0).abs() < 1e-9);
        assert_eq!(e.torque_limit(0.0, TorqueDirection::Motoring), 350.0);
    }

    #[test]
    fn scalar_efficiency_corners() {
        let e = env();
        let wide = EfficiencyBounds { min: 0.5, max: 1.0, ..BOUNDS };
        assert!((motor_efficiency_scalar(&e, 350.0, 0.0, &wide) - 0.93).abs() < 1e-12);
        assert!((motor_efficiency_scalar(&e, 0.0, 0.0, &wide) - 0.87).abs() < 1e-12);
        assert!((motor_efficiency_scalar(&e, 350.0, 1500.0, &wide) - 0.90).abs() < 1e-12);
        // clipped by the configured floor
        let tight = EfficiencyBounds { min: 0.88, ..BOUNDS };
        assert_eq!(motor_efficiency_scalar(&e, 0.0, 0.0, &tight), 0.88);
    }

    #[test]
    fn map_nearest_neighbour() {
        let p = |w, t, e| MapPoint {
            speed_radps: w,
            torque_nm: t,
            efficiency: e,
        };
        let single = EfficiencyMap::new(vec![p(100.0, 50.0, 0.9)]).unwrap();
        assert_eq!(single.lookup(300.0, 1000.0, 1500.0, 350.0), 0.9);

        let two = EfficiencyMap::new(vec![p(100.0, 100.0, 0.85), p(800.0, 200.0, 0.95)]).unwrap();
        assert_eq!(two.lookup(100.0, 100.0, 1500.0, 350.0), 0.85);
        assert_eq!(two.lookup(180.0, 700.0, 1500.0, 350.0), 0.95);
        // raw Euclidean distance would pick the first point here
        assert_eq!(two.lookup(200.0, 400.0, 1500.0, 350.0), 0.95);
    }

    #[test]
    fn map_csv_errors() {
        assert!(matches!(
            EfficiencyMap::parse("m", "speed,torque,eff\n0,0,0.9\n"),
            Err(Error::MapFormat { .. })
        ));
        assert!(matches!(
            EfficiencyMap::parse("m", "speed_radps,torque_nm,efficiency\n0,0,1.2\n"),
            Err(Error::MapFormat { .. })
        ));
        assert!(matches!(
            EfficiencyMap::parse("m", "speed_radps,torque_nm,efficiency\n"),
            Err(Error::MapFormat { .. })
        ));
        assert!(matches!(
            EfficiencyMap::parse("m", "speed_radps,torque_nm,efficiency\n0,x,0.9\n"),
            Err(Error::MapFormat { .. })
        ));
    }

    #[test]
    fn electrical_demand_hand_values() {
        let d = electrical_demand(200.0, 400.0, 0.92, 0.985);
        assert_eq!(d.p_mech_w, 80_000.0);
        assert!((d.p_drive_dc_w - 88_280.0).abs() < 1.0);
        let d = electrical_demand(0.0, 400.0, 0.92, 0.985);
        assert_eq!((d.p_mech_w, d.p_drive_dc_w), (0.0, 0.0));
        let d = electrical_demand(-100.0, 400.0, 0.92, 0.985);
        assert_eq!(d.p_drive_dc_w, 0.0);
    }

    #[test]
    fn torque_demand_respects_transmission_losses() {
        let t_drive = motor_torque_demand(1000.0, 0.3, 10.0, 0.95);
        let t_brake = motor_torque_demand(-1000.0, 0.3, 10.0, 0.95);
        assert!((t_drive - 30.0 / 0.95).abs() < 1e-12);
        assert!((t_brake + 30.0 * 0.95).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn clamped_torque_within_envelope(t in -2000.0f64..2000.0, w in 0.0f64..1600.0) {
            let e = env();
            let c = e.clamp_torque(t, w);
            prop_assert!(c <= e.torque_limit(w, TorqueDirection::Motoring));
            prop_assert!(c >= -e.torque_limit(w, TorqueDirection::Regen));
        }

        #[test]
        fn limit_non_increasing_above_base(w1 in 0.0f64..1600.0, dw in 0.0f64..500.0) {
            let e = env();
            let a = e.torque_limit(w1, TorqueDirection::Motoring);
            let b = e.torque_limit(w1 + dw, TorqueDirection::Motoring);
            prop_assert!(b <= a);
            if w1 + dw <= e.omega_base_radps {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn efficiency_bounded_and_dc_exceeds_mech(t in 0.0f64..350.0, w in 0.0f64..1500.0) {
            let e = env();
            let eta = motor_efficiency_scalar(&e, t, w, &BOUNDS);
            prop_assert!((BOUNDS.min..=BOUNDS.max).contains(&eta));
            let d = electrical_demand(t, w, eta, 0.985);
            prop_assert!(d.p_drive_dc_w >= d.p_mech_w);
        }
    }
}
