use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    base_dir_of, either_unit, finite, non_negative, parse_yaml, positive, read_text, required,
    resolve_file_ref, units, VehicleConfig,
};
use crate::error::{Error, Result};

pub const DEFAULT_DT_S: f64 = 0.1;

/// Validated mission definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestcaseConfig {
    pub name: String,
    pub route: Route,
    pub environment: Environment,
    pub payload: Payload,
    /// Occupants contributing metabolic heat to the cabin.
    pub occupants: u32,
    pub charging: ChargingWindow,
    pub sim: SimSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteMode {
    CycleCsv,
    Parametric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Route {
    pub mode: RouteMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<Segment>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Accel,
    Cruise,
    Decel,
    Idle,
}

/// One piece of a parametric route. `target_speed_mps` is the speed reached
/// at the end of an accel/decel segment; cruise holds the incoming speed and
/// idle holds zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_speed_mps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub ambient_temp_c: f64,
    pub solar_irradiance_w_per_m2: f64,
    pub air_density_kg_per_m3: f64,
    pub grade_rad: f64,
    /// Headwind positive.
    pub wind_speed_mps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cabin_setpoint_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Payload {
    pub passenger_count: u32,
    pub passenger_mass_kg: f64,
    pub cargo_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargingWindow {
    pub enabled: bool,
    pub window_start_s: f64,
    pub window_end_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSettings {
    pub dt_s: f64,
    pub initial_soc: f64,
    pub initial_temps_c: InitialTemps,
    pub hvac_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialTemps {
    pub battery: f64,
    pub motor: f64,
    pub coolant: f64,
    pub cabin: f64,
}

// ---- user-facing schema ----------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestcase {
    name: Option<String>,
    route: RawRoute,
    environment: RawEnvironment,
    #[serde(default)]
    payload: RawPayload,
    occupants: Option<u32>,
    #[serde(default)]
    charging: RawCharging,
    sim: RawSim,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoute {
    mode: RouteMode,
    cycle_path: Option<String>,
    segments: Option<Vec<RawSegment>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    kind: SegmentKind,
    duration_s: f64,
    target_speed_mps: Option<f64>,
    target_speed_kmh: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    ambient_temp_c: f64,
    #[serde(default)]
    solar_irradiance_w_per_m2: f64,
    #[serde(default = "default_air_density")]
    air_density_kg_per_m3: f64,
    grade_rad: Option<f64>,
    grade_percent: Option<f64>,
    wind_speed_mps: Option<f64>,
    wind_speed_kmh: Option<f64>,
    cabin_setpoint_c: Option<f64>,
}

fn default_air_density() -> f64 {
    1.2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPayload {
    passenger_count: u32,
    passenger_mass_kg: f64,
    cargo_mass_kg: f64,
}

impl Default for RawPayload {
    fn default() -> Self {
        Self {
            passenger_count: 1,
            passenger_mass_kg: 75.0,
            cargo_mass_kg: 0.0,
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCharging {
    #[serde(default)]
    enabled: bool,
    window_start_s: Option<f64>,
    window_end_s: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    #[serde(default = "default_dt")]
    dt_s: f64,
    initial_soc: f64,
    #[serde(default)]
    initial_temps_c: RawInitialTemps,
    #[serde(default = "default_true")]
    hvac_enabled: bool,
}

fn default_dt() -> f64 {
    DEFAULT_DT_S
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInitialTemps {
    battery: Option<f64>,
    motor: Option<f64>,
    coolant: Option<f64>,
    cabin: Option<f64>,
}

/// Loads and validates a testcase YAML file.
pub fn load_testcase(path: impl AsRef<Path>) -> Result<TestcaseConfig> {
    let path = path.as_ref();
    let text = read_text(path)?;
    TestcaseConfig::from_yaml_str(&text, &base_dir_of(path), &path.display().to_string())
}

impl TestcaseConfig {
    pub fn from_yaml_str(text: &str, base_dir: &Path, label: &str) -> Result<Self> {
        let raw: RawTestcase = parse_yaml(label, text)?;
        let fallback_name = Path::new(label)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "testcase".into());
        raw.resolve(base_dir, fallback_name)
    }

    pub fn to_resolved_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("testcase config serializes")
    }

    /// Cross-checks that need both files: initial SoC window, charger
    /// presence, and explicit-Euler stability of the thermal trend models.
    pub fn validate_against(&self, vehicle: &VehicleConfig) -> Result<()> {
        let b = &vehicle.battery;
        if !(self.sim.initial_soc >= b.soc_min && self.sim.initial_soc <= b.soc_max) {
            return Err(Error::schema(
                "sim.initial_soc",
                format!(
                    "must lie in [battery.soc_min, battery.soc_max] = [{}, {}] (got {})",
                    b.soc_min, b.soc_max, self.sim.initial_soc
                ),
            ));
        }
        if self.charging.enabled && vehicle.charger.is_none() {
            return Err(Error::schema(
                "charging.enabled",
                "charging requires a `charger` section in the vehicle file",
            ));
        }
        let dt_eff = self.sim.dt_s * f64::from(vehicle.rate_divisors.thermal_trends);
        let th = &vehicle.thermal;
        for (field, tau) in [
            ("thermal.tau_batt_s", th.tau_batt_s),
            ("thermal.tau_motor_s", th.tau_motor_s),
            ("thermal.tau_coolant_s", th.tau_coolant_s),
        ] {
            if dt_eff >= tau {
                return Err(Error::schema(
                    field,
                    format!("must exceed the thermal update interval {dt_eff} s for a stable explicit step"),
                ));
            }
        }
        Ok(())
    }
}

/// Vehicle mass including payload.
pub fn effective_mass(vehicle: &VehicleConfig, testcase: &TestcaseConfig) -> f64 {
    let p = &testcase.payload;
    vehicle.mass_kg + f64::from(p.passenger_count) * p.passenger_mass_kg + p.cargo_mass_kg
}

impl RawTestcase {
    fn resolve(self, base_dir: &Path, fallback_name: String) -> Result<TestcaseConfig> {
        let route = self.route.resolve(base_dir)?;

        let e = self.environment;
        let grade_rad = either_unit(
            "environment",
            "grade_rad",
            e.grade_rad,
            "grade_percent",
            e.grade_percent,
            units::grade_percent_to_rad,
        )?
        .unwrap_or(0.0);
        if grade_rad.is_nan() || grade_rad.abs() > std::f64::consts::FRAC_PI_4 {
            return Err(Error::schema(
                "environment.grade_rad",
                "must lie within ±π/4",
            ));
        }
        let wind = either_unit(
            "environment",
            "wind_speed_mps",
            e.wind_speed_mps,
            "wind_speed_kmh",
            e.wind_speed_kmh,
            units::kmh_to_mps,
        )?
        .unwrap_or(0.0);
        let ambient = finite("environment.ambient_temp_c", e.ambient_temp_c)?;
        let environment = Environment {
            ambient_temp_c: ambient,
            solar_irradiance_w_per_m2: non_negative(
                "environment.solar_irradiance_w_per_m2",
                e.solar_irradiance_w_per_m2,
            )?,
            air_density_kg_per_m3: positive(
                "environment.air_density_kg_per_m3",
                e.air_density_kg_per_m3,
            )?,
            grade_rad,
            wind_speed_mps: finite("environment.wind_speed_mps", wind)?,
            cabin_setpoint_c: e
                .cabin_setpoint_c
                .map(|v| finite("environment.cabin_setpoint_c", v))
                .transpose()?,
        };

        let payload = Payload {
            passenger_count: self.payload.passenger_count,
            passenger_mass_kg: non_negative(
                "payload.passenger_mass_kg",
                self.payload.passenger_mass_kg,
            )?,
            cargo_mass_kg: non_negative("payload.cargo_mass_kg", self.payload.cargo_mass_kg)?,
        };

        let c = self.charging;
        let charging = if c.enabled {
            let start = required("charging.window_start_s", c.window_start_s)?;
            let end = required("charging.window_end_s", c.window_end_s)?;
            if !(start >= 0.0 && start < end && end.is_finite()) {
                return Err(Error::schema(
                    "charging.window_start_s",
                    format!("requires 0 <= window_start_s < window_end_s (got {start} .. {end})"),
                ));
            }
            ChargingWindow {
                enabled: true,
                window_start_s: start,
                window_end_s: end,
            }
        } else {
            ChargingWindow {
                enabled: false,
                window_start_s: c.window_start_s.unwrap_or(0.0),
                window_end_s: c.window_end_s.unwrap_or(0.0),
            }
        };

        let s = self.sim;
        let temp = |field: &str, v: Option<f64>| finite(field, v.unwrap_or(ambient));
        let sim = SimSettings {
            dt_s: positive("sim.dt_s", s.dt_s)?,
            initial_soc: super::unit_interval("sim.initial_soc", s.initial_soc)?,
            initial_temps_c: InitialTemps {
                battery: temp("sim.initial_temps_c.battery", s.initial_temps_c.battery)?,
                motor: temp("sim.initial_temps_c.motor", s.initial_temps_c.motor)?,
                coolant: temp("sim.initial_temps_c.coolant", s.initial_temps_c.coolant)?,
                cabin: temp("sim.initial_temps_c.cabin", s.initial_temps_c.cabin)?,
            },
            hvac_enabled: s.hvac_enabled,
        };

        Ok(TestcaseConfig {
            name: self.name.unwrap_or(fallback_name),
            occupants: self.occupants.unwrap_or(payload.passenger_count),
            route,
            environment,
            payload,
            charging,
            sim,
        })
    }
}

impl RawRoute {
    fn resolve(self, base_dir: &Path) -> Result<Route> {
        match self.mode {
            RouteMode::CycleCsv => {
                if self.segments.is_some() {
                    return Err(Error::schema(
                        "route.segments",
                        "not allowed when route.mode is `cycle_csv`",
                    ));
                }
                let path = required("route.cycle_path", self.cycle_path)?;
                Ok(Route {
                    mode: RouteMode::CycleCsv,
                    cycle_path: Some(resolve_file_ref(base_dir, &path)),
                    segments: None,
                })
            }
            RouteMode::Parametric => {
                if self.cycle_path.is_some() {
                    return Err(Error::schema(
                        "route.cycle_path",
                        "not allowed when route.mode is `parametric`",
                    ));
                }
                let raw = required("route.segments", self.segments)?;
                if raw.is_empty() {
                    return Err(Error::schema("route.segments", "must not be empty"));
                }
                let segments = raw
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| s.resolve(i))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Route {
                    mode: RouteMode::Parametric,
                    cycle_path: None,
                    segments: Some(segments),
                })
            }
        }
    }
}

impl RawSegment {
    fn resolve(self, index: usize) -> Result<Segment> {
        let prefix = format!("route.segments[{index}]");
        let target = either_unit(
            &prefix,
            "target_speed_mps",
            self.target_speed_mps,
            "target_speed_kmh",
            self.target_speed_kmh,
            units::kmh_to_mps,
        )?;
        let target = target
            .map(|v| non_negative(&format!("{prefix}.target_speed_mps"), v))
            .transpose()?;
        if self.kind == SegmentKind::Accel && target.is_none() {
            return Err(Error::schema(
                format!("{prefix}.target_speed_mps"),
                "is required for accel segments",
            ));
        }
        Ok(Segment {
            kind: self.kind,
            duration_s: positive(&format!("{prefix}.duration_s"), self.duration_s)?,
            target_speed_mps: target,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const CITY: &str = r#"
name: city
route:
  mode: cycle_csv
  cycle_path: packaged:urban_stop_start
environment:
  ambient_temp_c: 35
  solar_irradiance_w_per_m2: 800
payload:
  passenger_count: 2
  passenger_mass_kg: 75
  cargo_mass_kg: 20
charging:
  enabled: true
  window_start_s: 600
  window_end_s: 1200
sim:
  initial_soc: 0.9
"#;

    fn load(text: &str) -> Result<TestcaseConfig> {
        TestcaseConfig::from_yaml_str(text, Path::new("."), "testcase.yaml")
    }

    #[test]
    fn environment_stored_verbatim_and_defaults_filled() {
        let t = load(CITY).unwrap();
        assert_eq!(t.environment.ambient_temp_c, 35.0);
        assert_eq!(t.environment.solar_irradiance_w_per_m2, 800.0);
        assert_eq!(t.sim.dt_s, 0.1);
        assert_eq!(t.sim.initial_temps_c.cabin, 35.0);
        assert_eq!(t.occupants, 2);
        assert!(t.charging.enabled);
        assert_eq!((t.charging.window_start_s, t.charging.window_end_s), (600.0, 1200.0));
    }

    #[test]
    fn inverted_window_rejected() {
        let text = CITY
            .replace("window_start_s: 600", "window_start_s: 1200")
            .replace("window_end_s: 1200", "window_end_s: 600");
        assert!(matches!(load(&text), Err(Error::Schema { ref field, .. }) if field == "charging.window_start_s"));
    }

    #[test]
    fn negative_cargo_rejected() {
        let text = CITY.replace("cargo_mass_kg: 20", "cargo_mass_kg: -5");
        assert!(matches!(load(&text), Err(Error::Schema { ref field, .. }) if field == "payload.cargo_mass_kg"));
    }

    #[test]
    fn route_source_must_match_mode() {
        let text = CITY.replace("mode: cycle_csv", "mode: parametric");
        assert!(load(&text).is_err());
        let text = CITY.replace("  cycle_path: packaged:urban_stop_start\n", "");
        assert!(matches!(load(&text), Err(Error::Schema { ref field, .. }) if field == "route.cycle_path"));
    }

    #[test]
    fn empty_segment_list_rejected() {
        let text = CITY.replace(
            "  mode: cycle_csv\n  cycle_path: packaged:urban_stop_start",
            "  mode: parametric\n  segments: []",
        );
        assert!(matches!(load(&text), Err(Error::Schema { ref field, .. }) if field == "route.segments"));
    }

    #[test]
    fn effective_mass_sums_payload() {
        let v = VehicleConfig::from_yaml_str(
            crate::config::vehicle::tests::SEDAN,
            Path::new("."),
            "v.yaml",
        )
        .unwrap();
        let t = load(CITY).unwrap();
        assert_eq!(effective_mass(&v, &t), 1970.0);
        let t0 = load(&CITY.replace("passenger_count: 2", "passenger_count: 0").replace("cargo_mass_kg: 20", "cargo_mass_kg: 0")).unwrap();
        assert_eq!(effective_mass(&v, &t0), 1800.0);
    }

    #[test]
    fn resolved_yaml_reloads_identically() {
        let t = load(CITY).unwrap();
        let again = load(&t.to_resolved_yaml()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn initial_soc_checked_against_battery_window() {
        let v = VehicleConfig::from_yaml_str(
            crate::config::vehicle::tests::SEDAN,
            Path::new("."),
            "v.yaml",
        )
        .unwrap();
        let t = load(&CITY.replace("initial_soc: 0.9", "initial_soc: 0.99")).unwrap();
        assert!(matches!(t.validate_against(&v), Err(Error::Schema { ref field, .. }) if field == "sim.initial_soc"));
    }

    #[test]
    fn thermal_interval_must_be_below_time_constants() {
        let v = VehicleConfig::from_yaml_str(
            &crate::config::vehicle::tests::SEDAN.replace("tau_coolant_s: 300", "tau_coolant_s: 0.4"),
            Path::new("."),
            "v.yaml",
        )
        .unwrap();
        let t = load(&CITY.replace("enabled: true", "enabled: false")).unwrap();
        let err = t.validate_against(&v).unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "thermal.tau_coolant_s"), "{err}");
    }
}
