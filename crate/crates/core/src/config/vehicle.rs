use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry::{ModelSlot, Registry};
use super::{
    base_dir_of, efficiency, either_unit, finite, join, non_negative, parse_yaml, positive,
    read_text, required, resolve_file_ref, unit_interval, units,
};
use crate::error::{Error, Result};

pub const DEFAULT_SOC_MIN: f64 = 0.05;
pub const DEFAULT_SOC_MAX: f64 = 0.98;
pub const DEFAULT_PLUGIN_TIMEOUT_MS: u64 = 2000;
pub const DEFAULT_HVAC_GAIN_W_PER_K: f64 = 400.0;
pub const DEFAULT_BETA_BATT_K_PER_J: f64 = 2e-5;
pub const DEFAULT_BETA_MOTOR_K_PER_J: f64 = 1e-5;

/// Validated, unit-normalized vehicle description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleConfig {
    pub name: String,
    pub mass_kg: f64,
    pub cd: f64,
    pub frontal_area_m2: f64,
    pub crr: f64,
    pub wheel_radius_m: f64,
    pub reducer_ratio_primary: f64,
    pub reducer_ratio_secondary: f64,
    pub transmission_efficiency: f64,
    pub inverter_efficiency: f64,
    pub regen_blend_factor: f64,
    /// Hardware ceiling on regenerative power at the wheel.
    pub max_regen_power_w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_force_limit_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brake_force_limit_n: Option<f64>,
    pub motor: MotorConfig,
    pub battery: BatteryConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charger: Option<ChargerConfig>,
    pub aux: AuxConfig,
    pub hvac: HvacConfig,
    pub thermal: ThermalConfig,
    pub rate_divisors: RateDivisors,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotorConfig {
    pub model: String,
    pub peak_torque_nm: f64,
    pub peak_power_w: f64,
    pub max_speed_radps: f64,
    pub base_speed_radps: f64,
    pub base_efficiency: f64,
    pub min_efficiency: f64,
    pub max_efficiency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regen_efficiency: Option<f64>,
    pub max_regen_torque_nm: f64,
    pub max_regen_power_w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub model: String,
    pub v_nom_v: f64,
    pub capacity_ah: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_int_ohm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_ohm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1_ohm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2_ohm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2_f: Option<f64>,
    pub soc_min: f64,
    pub soc_max: f64,
    pub c_rate_charge_max: f64,
    pub c_rate_discharge_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ocv_table: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_module_path: Option<String>,
    pub plugin_timeout_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargerConfig {
    pub model: String,
    pub ac_power_limit_w: f64,
    pub charge_efficiency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_charge_current_a: Option<f64>,
    pub target_voltage_v: f64,
    pub charge_resistance_ohm: f64,
    pub termination_current_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp_min_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp_max_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct AuxConfig {
    pub headlights_w: f64,
    pub adas_w: f64,
    pub infotainment_w: f64,
    pub steering_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HvacConfig {
    pub model: String,
    pub ua_body_w_per_k: f64,
    pub k_v_w_per_k_per_mps: f64,
    pub glass_area_m2: f64,
    pub solar_transmittance: f64,
    pub air_massflow_kg_per_s: f64,
    pub occupant_heat_w: f64,
    pub cabin_capacitance_j_per_k: f64,
    pub rated_thermal_power_w: f64,
    pub cop_cooling: f64,
    pub cop_heating: f64,
    pub setpoint_c: f64,
    pub controller_gain_w_per_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_module_path: Option<String>,
    pub plugin_timeout_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalConfig {
    pub tau_batt_s: f64,
    pub beta_batt_k_per_j: f64,
    pub tau_motor_s: f64,
    pub beta_motor_k_per_j: f64,
    pub tau_coolant_s: f64,
}

/// Update interval of each engine module in master steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateDivisors {
    pub longitudinal: u32,
    pub driveline: u32,
    pub regen: u32,
    pub loads_hvac: u32,
    pub charging: u32,
    pub battery: u32,
    pub thermal_trends: u32,
}

impl Default for RateDivisors {
    fn default() -> Self {
        Self {
            longitudinal: 1,
            driveline: 1,
            regen: 1,
            loads_hvac: 5,
            charging: 1,
            battery: 5,
            thermal_trends: 5,
        }
    }
}

impl RateDivisors {
    /// All modules every master step.
    pub fn all_ones() -> Self {
        Self {
            longitudinal: 1,
            driveline: 1,
            regen: 1,
            loads_hvac: 1,
            charging: 1,
            battery: 1,
            thermal_trends: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let fast = [
            ("longitudinal", self.longitudinal),
            ("driveline", self.driveline),
            ("regen", self.regen),
        ];
        for (name, d) in fast {
            if d != 1 {
                return Err(Error::schema(
                    format!("rate_divisors.{name}"),
                    "fast modules follow the prescribed speed trace and must run every master step (divisor 1)",
                ));
            }
        }
        let slow = [
            ("loads_hvac", self.loads_hvac),
            ("charging", self.charging),
            ("battery", self.battery),
            ("thermal_trends", self.thermal_trends),
        ];
        for (name, d) in slow {
            if d == 0 {
                return Err(Error::schema(
                    format!("rate_divisors.{name}"),
                    "must be a positive integer",
                ));
            }
        }
        Ok(())
    }
}

// ---- user-facing schema ----------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    name: Option<String>,
    mass_kg: f64,
    cd: f64,
    frontal_area_m2: f64,
    crr: f64,
    wheel_radius_m: f64,
    reducer_ratio_primary: f64,
    #[serde(default = "one")]
    reducer_ratio_secondary: f64,
    #[serde(default = "one")]
    transmission_efficiency: f64,
    inverter_efficiency: f64,
    regen_blend_factor: f64,
    max_regen_power_w: Option<f64>,
    max_regen_power_kw: Option<f64>,
    drive_force_limit_n: Option<f64>,
    brake_force_limit_n: Option<f64>,
    motor: RawMotor,
    battery: RawBattery,
    charger: Option<RawCharger>,
    #[serde(default)]
    aux: RawAux,
    hvac: RawHvac,
    thermal: RawThermal,
    #[serde(default)]
    rate_divisors: RateDivisors,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMotor {
    #[serde(default = "default_motor_model")]
    model: String,
    peak_torque_nm: f64,
    peak_power_w: Option<f64>,
    peak_power_kw: Option<f64>,
    max_speed_radps: Option<f64>,
    max_speed_rpm: Option<f64>,
    base_speed_radps: Option<f64>,
    base_speed_rpm: Option<f64>,
    base_efficiency: f64,
    min_efficiency: f64,
    max_efficiency: f64,
    regen_efficiency: Option<f64>,
    max_regen_torque_nm: Option<f64>,
    max_regen_power_w: Option<f64>,
    max_regen_power_kw: Option<f64>,
    map_path: Option<String>,
}

fn default_motor_model() -> String {
    "analytical".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBattery {
    #[serde(default = "default_battery_model")]
    model: String,
    v_nom_v: f64,
    capacity_ah: Option<f64>,
    capacity_kwh: Option<f64>,
    r_int_ohm: Option<f64>,
    r0_ohm: Option<f64>,
    r1_ohm: Option<f64>,
    c1_f: Option<f64>,
    r2_ohm: Option<f64>,
    c2_f: Option<f64>,
    soc_min: Option<f64>,
    soc_max: Option<f64>,
    c_rate_charge_max: f64,
    c_rate_discharge_max: f64,
    ocv_table: Option<Vec<[f64; 2]>>,
    external_module_path: Option<String>,
    plugin_timeout_ms: Option<u64>,
}

fn default_battery_model() -> String {
    "rint".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCharger {
    #[serde(default = "default_charger_model")]
    model: String,
    ac_power_limit_w: Option<f64>,
    ac_power_limit_kw: Option<f64>,
    charge_efficiency: f64,
    max_charge_current_a: Option<f64>,
    target_voltage_v: f64,
    charge_resistance_ohm: f64,
    termination_current_a: f64,
    temp_min_c: Option<f64>,
    temp_max_c: Option<f64>,
}

fn default_charger_model() -> String {
    "ac_basic".into()
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RawAux {
    headlights_w: f64,
    adas_w: f64,
    infotainment_w: f64,
    steering_w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHvac {
    #[serde(default = "default_hvac_model")]
    model: String,
    #[serde(default)]
    ua_body_w_per_k: f64,
    #[serde(default)]
    k_v_w_per_k_per_mps: f64,
    #[serde(default)]
    glass_area_m2: f64,
    #[serde(default)]
    solar_transmittance: f64,
    #[serde(default)]
    air_massflow_kg_per_s: f64,
    #[serde(default)]
    occupant_heat_w: f64,
    cabin_capacitance_j_per_k: f64,
    rated_thermal_power_w: Option<f64>,
    rated_thermal_power_kw: Option<f64>,
    cop_cooling: f64,
    cop_heating: f64,
    #[serde(default = "default_setpoint")]
    setpoint_c: f64,
    controller_gain_w_per_k: Option<f64>,
    external_module_path: Option<String>,
    plugin_timeout_ms: Option<u64>,
}

fn default_hvac_model() -> String {
    "lumped_cabin".into()
}

fn default_setpoint() -> f64 {
    22.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    tau_batt_s: f64,
    beta_batt_k_per_j: Option<f64>,
    tau_motor_s: f64,
    beta_motor_k_per_j: Option<f64>,
    tau_coolant_s: f64,
}

/// Loads and validates a vehicle YAML file.
pub fn load_vehicle(path: impl AsRef<Path>) -> Result<VehicleConfig> {
    let path = path.as_ref();
    let text = read_text(path)?;
    VehicleConfig::from_yaml_str(&text, &base_dir_of(path), &path.display().to_string())
}

impl VehicleConfig {
    /// Parses vehicle YAML. Relative file references resolve against `base_dir`.
    pub fn from_yaml_str(text: &str, base_dir: &Path, label: &str) -> Result<Self> {
        let raw: RawVehicle = parse_yaml(label, text)?;
        let fallback_name = Path::new(label)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "vehicle".into());
        raw.resolve(base_dir, fallback_name)
    }

    /// Resolved YAML: SI field names, defaults filled, absolute file paths.
    pub fn to_resolved_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("vehicle config serializes")
    }

    /// Total reducer ratio.
    pub fn reducer_ratio_total(&self) -> f64 {
        self.reducer_ratio_primary * self.reducer_ratio_secondary
    }

    /// Usable capacity expressed as energy at nominal voltage, in Wh.
    pub fn battery_energy_wh(&self) -> f64 {
        self.battery.capacity_ah * self.battery.v_nom_v
    }
}

impl RawVehicle {
    fn resolve(self, base_dir: &Path, fallback_name: String) -> Result<VehicleConfig> {
        let registry = Registry::builtin();
        let motor = self.motor.resolve(base_dir, &registry)?;
        let battery = self.battery.resolve(base_dir, &registry)?;
        let charger = self
            .charger
            .map(|c| c.resolve(&registry))
            .transpose()?;
        let hvac = self.hvac.resolve(base_dir, &registry)?;
        self.rate_divisors.validate()?;

        let max_regen_power_w = either_unit(
            "",
            "max_regen_power_w",
            self.max_regen_power_w,
            "max_regen_power_kw",
            self.max_regen_power_kw,
            units::kw_to_w,
        )?
        .unwrap_or(motor.max_regen_power_w);

        let aux = AuxConfig {
            headlights_w: non_negative("aux.headlights_w", self.aux.headlights_w)?,
            adas_w: non_negative("aux.adas_w", self.aux.adas_w)?,
            infotainment_w: non_negative("aux.infotainment_w", self.aux.infotainment_w)?,
            steering_w: non_negative("aux.steering_w", self.aux.steering_w)?,
        };

        let t = self.thermal;
        let thermal = ThermalConfig {
            tau_batt_s: positive("thermal.tau_batt_s", t.tau_batt_s)?,
            beta_batt_k_per_j: non_negative(
                "thermal.beta_batt_k_per_j",
                t.beta_batt_k_per_j.unwrap_or(DEFAULT_BETA_BATT_K_PER_J),
            )?,
            tau_motor_s: positive("thermal.tau_motor_s", t.tau_motor_s)?,
            beta_motor_k_per_j: non_negative(
                "thermal.beta_motor_k_per_j",
                t.beta_motor_k_per_j.unwrap_or(DEFAULT_BETA_MOTOR_K_PER_J),
            )?,
            tau_coolant_s: positive("thermal.tau_coolant_s", t.tau_coolant_s)?,
        };

        Ok(VehicleConfig {
            name: self.name.unwrap_or(fallback_name),
            mass_kg: positive("mass_kg", self.mass_kg)?,
            cd: positive("cd", self.cd)?,
            frontal_area_m2: positive("frontal_area_m2", self.frontal_area_m2)?,
            crr: non_negative("crr", self.crr)?,
            wheel_radius_m: positive("wheel_radius_m", self.wheel_radius_m)?,
            reducer_ratio_primary: positive("reducer_ratio_primary", self.reducer_ratio_primary)?,
            reducer_ratio_secondary: positive(
                "reducer_ratio_secondary",
                self.reducer_ratio_secondary,
            )?,
            transmission_efficiency: efficiency(
                "transmission_efficiency",
                self.transmission_efficiency,
            )?,
            inverter_efficiency: efficiency("inverter_efficiency", self.inverter_efficiency)?,
            regen_blend_factor: unit_interval("regen_blend_factor", self.regen_blend_factor)?,
            max_regen_power_w: positive("max_regen_power_w", max_regen_power_w)?,
            drive_force_limit_n: self
                .drive_force_limit_n
                .map(|v| positive("drive_force_limit_n", v))
                .transpose()?,
            brake_force_limit_n: self
                .brake_force_limit_n
                .map(|v| positive("brake_force_limit_n", v))
                .transpose()?,
            motor,
            battery,
            charger,
            aux,
            hvac,
            thermal,
            rate_divisors: self.rate_divisors,
        })
    }
}

impl RawMotor {
    fn resolve(self, base_dir: &Path, registry: &Registry) -> Result<MotorConfig> {
        const P: &str = "motor";
        registry.check(ModelSlot::Motor, &self.model)?;
        let peak_torque_nm = positive("motor.peak_torque_nm", self.peak_torque_nm)?;
        let peak_power_w = required(
            "motor.peak_power_w",
            either_unit(P, "peak_power_w", self.peak_power_w, "peak_power_kw", self.peak_power_kw, units::kw_to_w)?,
        )?;
        let peak_power_w = positive("motor.peak_power_w", peak_power_w)?;
        let max_speed_radps = required(
            "motor.max_speed_radps",
            either_unit(P, "max_speed_radps", self.max_speed_radps, "max_speed_rpm", self.max_speed_rpm, units::rpm_to_radps)?,
        )?;
        let max_speed_radps = positive("motor.max_speed_radps", max_speed_radps)?;
        let base_speed_radps = match either_unit(
            P,
            "base_speed_radps",
            self.base_speed_radps,
            "base_speed_rpm",
            self.base_speed_rpm,
            units::rpm_to_radps,
        )? {
            Some(w) => positive("motor.base_speed_radps", w)?,
            None => peak_power_w / peak_torque_nm,
        }
        .min(max_speed_radps);

        let base_efficiency = efficiency("motor.base_efficiency", self.base_efficiency)?;
        let min_efficiency = efficiency("motor.min_efficiency", self.min_efficiency)?;
        let max_efficiency = efficiency("motor.max_efficiency", self.max_efficiency)?;
        if !(min_efficiency <= base_efficiency && base_efficiency <= max_efficiency) {
            return Err(Error::schema(
                "motor.base_efficiency",
                "min_efficiency <= base_efficiency <= max_efficiency",
            ));
        }
        let regen_efficiency = self
            .regen_efficiency
            .map(|v| efficiency("motor.regen_efficiency", v))
            .transpose()?;
        let max_regen_torque_nm = positive(
            "motor.max_regen_torque_nm",
            self.max_regen_torque_nm.unwrap_or(peak_torque_nm),
        )?;
        let max_regen_power_w = either_unit(
            P,
            "max_regen_power_w",
            self.max_regen_power_w,
            "max_regen_power_kw",
            self.max_regen_power_kw,
            units::kw_to_w,
        )?
        .unwrap_or(peak_power_w);
        let max_regen_power_w = positive("motor.max_regen_power_w", max_regen_power_w)?;

        if self.model == "efficiency_map" && self.map_path.is_none() {
            return Err(Error::schema(
                "motor.map_path",
                "is required when motor.model is `efficiency_map`",
            ));
        }
        Ok(MotorConfig {
            model: self.model,
            peak_torque_nm,
            peak_power_w,
            max_speed_radps,
            base_speed_radps,
            base_efficiency,
            min_efficiency,
            max_efficiency,
            regen_efficiency,
            max_regen_torque_nm,
            max_regen_power_w,
            map_path: self.map_path.map(|p| resolve_file_ref(base_dir, &p)),
        })
    }
}

impl RawBattery {
    fn resolve(self, base_dir: &Path, registry: &Registry) -> Result<BatteryConfig> {
        const P: &str = "battery";
        registry.check(ModelSlot::Battery, &self.model)?;
        let v_nom_v = positive("battery.v_nom_v", self.v_nom_v)?;
        let capacity_ah = required(
            "battery.capacity_ah",
            either_unit(P, "capacity_ah", self.capacity_ah, "capacity_kwh", self.capacity_kwh, |kwh| {
                units::kwh_to_ah(kwh, v_nom_v)
            })?,
        )?;
        let capacity_ah = positive("battery.capacity_ah", capacity_ah)?;
        let soc_min = self.soc_min.unwrap_or(DEFAULT_SOC_MIN);
        let soc_max = self.soc_max.unwrap_or(DEFAULT_SOC_MAX);
        if !(soc_min > 0.0 && soc_min < soc_max && soc_max <= 1.0) {
            return Err(Error::schema(
                "battery.soc_min",
                format!("requires 0 < soc_min < soc_max <= 1 (got soc_min={soc_min}, soc_max={soc_max})"),
            ));
        }

        let opt_pos = |name: &str, v: Option<f64>| -> Result<Option<f64>> {
            v.map(|v| positive(&join(P, name), v)).transpose()
        };
        let r_int_ohm = self
            .r_int_ohm
            .map(|v| non_negative("battery.r_int_ohm", v))
            .transpose()?;
        let r0_ohm = self
            .r0_ohm
            .map(|v| non_negative("battery.r0_ohm", v))
            .transpose()?;
        let r1_ohm = opt_pos("r1_ohm", self.r1_ohm)?;
        let c1_f = opt_pos("c1_f", self.c1_f)?;
        let r2_ohm = opt_pos("r2_ohm", self.r2_ohm)?;
        let c2_f = opt_pos("c2_f", self.c2_f)?;

        match self.model.as_str() {
            "rint" => {
                required("battery.r_int_ohm", r_int_ohm)?;
            }
            "ecm_2rc" => {
                required("battery.r0_ohm", r0_ohm)?;
                required("battery.r1_ohm", r1_ohm)?;
                required("battery.c1_f", c1_f)?;
                required("battery.r2_ohm", r2_ohm)?;
                required("battery.c2_f", c2_f)?;
            }
            "external" if self.external_module_path.is_none() => {
                return Err(Error::schema(
                    "battery.external_module_path",
                    "is required when battery.model is `external`",
                ));
            }
            _ => {}
        }
        if let Some(table) = &self.ocv_table {
            crate::battery::OcvCurve::new(table.iter().map(|[s, v]| (*s, *v)).collect())
                .map_err(|msg| Error::schema("battery.ocv_table", msg))?;
        }

        Ok(BatteryConfig {
            model: self.model,
            v_nom_v,
            capacity_ah,
            r_int_ohm,
            r0_ohm,
            r1_ohm,
            c1_f,
            r2_ohm,
            c2_f,
            soc_min,
            soc_max,
            c_rate_charge_max: positive("battery.c_rate_charge_max", self.c_rate_charge_max)?,
            c_rate_discharge_max: positive(
                "battery.c_rate_discharge_max",
                self.c_rate_discharge_max,
            )?,
            ocv_table: self.ocv_table,
            external_module_path: self
                .external_module_path
                .map(|p| resolve_file_ref(base_dir, &p)),
            plugin_timeout_ms: self.plugin_timeout_ms.unwrap_or(DEFAULT_PLUGIN_TIMEOUT_MS),
        })
    }
}

impl RawCharger {
    fn resolve(self, registry: &Registry) -> Result<ChargerConfig> {
        registry.check(ModelSlot::Charger, &self.model)?;
        let ac_power_limit_w = required(
            "charger.ac_power_limit_w",
            either_unit(
                "charger",
                "ac_power_limit_w",
                self.ac_power_limit_w,
                "ac_power_limit_kw",
                self.ac_power_limit_kw,
                units::kw_to_w,
            )?,
        )?;
        if let (Some(lo), Some(hi)) = (self.temp_min_c, self.temp_max_c) {
            if lo >= hi {
                return Err(Error::schema("charger.temp_min_c", "must be < temp_max_c"));
            }
        }
        Ok(ChargerConfig {
            model: self.model,
            ac_power_limit_w: positive("charger.ac_power_limit_w", ac_power_limit_w)?,
            charge_efficiency: efficiency("charger.charge_efficiency", self.charge_efficiency)?,
            max_charge_current_a: self
                .max_charge_current_a
                .map(|v| positive("charger.max_charge_current_a", v))
                .transpose()?,
            target_voltage_v: positive("charger.target_voltage_v", self.target_voltage_v)?,
            charge_resistance_ohm: positive(
                "charger.charge_resistance_ohm",
                self.charge_resistance_ohm,
            )?,
            termination_current_a: non_negative(
                "charger.termination_current_a",
                self.termination_current_a,
            )?,
            temp_min_c: self
                .temp_min_c
                .map(|v| finite("charger.temp_min_c", v))
                .transpose()?,
            temp_max_c: self
                .temp_max_c
                .map(|v| finite("charger.temp_max_c", v))
                .transpose()?,
        })
    }
}

impl RawHvac {
    fn resolve(self, base_dir: &Path, registry: &Registry) -> Result<HvacConfig> {
        registry.check(ModelSlot::Hvac, &self.model)?;
        if self.model == "external" && self.external_module_path.is_none() {
            return Err(Error::schema(
                "hvac.external_module_path",
                "is required when hvac.model is `external`",
            ));
        }
        let rated = required(
            "hvac.rated_thermal_power_w",
            either_unit(
                "hvac",
                "rated_thermal_power_w",
                self.rated_thermal_power_w,
                "rated_thermal_power_kw",
                self.rated_thermal_power_kw,
                units::kw_to_w,
            )?,
        )?;
        Ok(HvacConfig {
            model: self.model,
            ua_body_w_per_k: non_negative("hvac.ua_body_w_per_k", self.ua_body_w_per_k)?,
            k_v_w_per_k_per_mps: non_negative(
                "hvac.k_v_w_per_k_per_mps",
                self.k_v_w_per_k_per_mps,
            )?,
            glass_area_m2: non_negative("hvac.glass_area_m2", self.glass_area_m2)?,
            solar_transmittance: unit_interval(
                "hvac.solar_transmittance",
                self.solar_transmittance,
            )?,
            air_massflow_kg_per_s: non_negative(
                "hvac.air_massflow_kg_per_s",
                self.air_massflow_kg_per_s,
            )?,
            occupant_heat_w: non_negative("hvac.occupant_heat_w", self.occupant_heat_w)?,
            cabin_capacitance_j_per_k: positive(
                "hvac.cabin_capacitance_j_per_k",
                self.cabin_capacitance_j_per_k,
            )?,
            rated_thermal_power_w: non_negative("hvac.rated_thermal_power_w", rated)?,
            cop_cooling: positive("hvac.cop_cooling", self.cop_cooling)?,
            cop_heating: positive("hvac.cop_heating", self.cop_heating)?,
            setpoint_c: finite("hvac.setpoint_c", self.setpoint_c)?,
            controller_gain_w_per_k: non_negative(
                "hvac.controller_gain_w_per_k",
                self.controller_gain_w_per_k
                    .unwrap_or(DEFAULT_HVAC_GAIN_W_PER_K),
            )?,
            external_module_path: self
                .external_module_path
                .map(|p| resolve_file_ref(base_dir, &p)),
            plugin_timeout_ms: self.plugin_timeout_ms.unwrap_or(DEFAULT_PLUGIN_TIMEOUT_MS),
        })
    }
}
