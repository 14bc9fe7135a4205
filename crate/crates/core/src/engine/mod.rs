//! Fixed-step, multi-rate simulation engine.
//!
//! Each master step covers one interval of the resampled speed trace. Modules
//! run in a fixed order, and a module with rate divisor `d` updates on 1-based
//! master step `n` when `n % d == 0` or `n` is the final step. Between updates
//! it holds its outputs, and the inputs it would have seen are averaged in an
//! [`Accumulator`] and handed over as a window mean with the window length as
//! its time step.

mod accumulator;

use std::time::Instant;

use serde::Serialize;

pub use accumulator::{Accumulator, Flushed};

use crate::battery::{self, BatteryInput, BatteryModel};
use crate::charging::{self, BatteryReading, ChargeWindow, ChargerMode, ChargerParams, ChargerState};
use crate::config::registry::ModelContext;
use crate::config::{effective_mass, Registry, TestcaseConfig, ThermalConfig, VehicleConfig};
use crate::driveline::{self, EfficiencyModel};
use crate::error::{Error, NumericalIssue, Result, StepError};
use crate::loads::{self, CabinInput, CabinModel};
use crate::longitudinal::{self, RoadLoadParams, G};
use crate::regen::{self, RegenParams};
use crate::route::{self, DriveCycle};
use crate::thermal::{self, ThermalInput, ThermalState};

/// Module execution order within a master step.
pub const MODULES: [&str; 7] = [
    "longitudinal",
    "driveline",
    "regen",
    "loads_hvac",
    "charging",
    "battery",
    "thermal_trends",
];

/// Every signal on the shared state bus at the end of one master step.
///
/// Speed and the quantities derived from it refer to the step mean
/// `(v_k + v_{k+1}) / 2`; `time_s` is the end of the step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SimState {
    pub time_s: f64,
    pub dt_s: f64,
    pub speed_mps: f64,
    pub accel_mps2: f64,
    pub distance_m: f64,
    pub f_aero_n: f64,
    pub f_roll_n: f64,
    pub f_grade_n: f64,
    pub f_inertia_n: f64,
    pub wheel_force_n: f64,
    pub wheel_power_w: f64,
    pub throttle_frac: f64,
    pub brake_frac: f64,
    pub brake_demand_flag: bool,
    pub motor_speed_radps: f64,
    pub motor_torque_nm: f64,
    pub motor_eff: f64,
    pub p_drive_dc_w: f64,
    pub p_regen_w: f64,
    pub p_friction_w: f64,
    pub p_aux_w: f64,
    pub p_hvac_w: f64,
    pub q_hvac_w: f64,
    pub p_charge_req_w: f64,
    pub p_batt_net_w: f64,
    pub i_batt_a: f64,
    pub v_batt_v: f64,
    pub soc: f64,
    pub t_batt_c: f64,
    pub t_motor_c: f64,
    pub t_coolant_c: f64,
    pub t_cabin_c: f64,
    pub t_amb_c: f64,
    pub charger_state: ChargerMode,
    pub power_shortfall_w: f64,
}

impl SimState {
    /// Name and value of every floating-point signal.
    pub fn numeric_fields(&self) -> [(&'static str, f64); 33] {
        [
            ("time_s", self.time_s),
            ("dt_s", self.dt_s),
            ("speed_mps", self.speed_mps),
            ("accel_mps2", self.accel_mps2),
            ("distance_m", self.distance_m),
            ("f_aero_n", self.f_aero_n),
            ("f_roll_n", self.f_roll_n),
            ("f_grade_n", self.f_grade_n),
            ("f_inertia_n", self.f_inertia_n),
            ("wheel_force_n", self.wheel_force_n),
            ("wheel_power_w", self.wheel_power_w),
            ("throttle_frac", self.throttle_frac),
            ("brake_frac", self.brake_frac),
            ("motor_speed_radps", self.motor_speed_radps),
            ("motor_torque_nm", self.motor_torque_nm),
            ("motor_eff", self.motor_eff),
            ("p_drive_dc_w", self.p_drive_dc_w),
            ("p_regen_w", self.p_regen_w),
            ("p_friction_w", self.p_friction_w),
            ("p_aux_w", self.p_aux_w),
            ("p_hvac_w", self.p_hvac_w),
            ("q_hvac_w", self.q_hvac_w),
            ("p_charge_req_w", self.p_charge_req_w),
            ("p_batt_net_w", self.p_batt_net_w),
            ("i_batt_a", self.i_batt_a),
            ("v_batt_v", self.v_batt_v),
            ("soc", self.soc),
            ("t_batt_c", self.t_batt_c),
            ("t_motor_c", self.t_motor_c),
            ("t_coolant_c", self.t_coolant_c),
            ("t_cabin_c", self.t_cabin_c),
            ("t_amb_c", self.t_amb_c),
            ("power_shortfall_w", self.power_shortfall_w),
        ]
    }

    fn check_finite(&self) -> Result<(), NumericalIssue> {
        for (name, v) in self.numeric_fields() {
            NumericalIssue::check_finite(name, v)?;
        }
        Ok(())
    }
}

/// How many times each module updated, in [`MODULES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ExecutionCounts {
    pub longitudinal: u64,
    pub driveline: u64,
    pub regen: u64,
    pub loads_hvac: u64,
    pub charging: u64,
    pub battery: u64,
    pub thermal_trends: u64,
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// State before the first step.
    pub initial: SimState,
    /// One snapshot per master step.
    pub rows: Vec<SimState>,
    pub executions: ExecutionCounts,
    pub cycle_name: String,
    pub wall_time_s: f64,
}

impl RunOutput {
    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    pub fn last(&self) -> &SimState {
        self.rows.last().unwrap_or(&self.initial)
    }
}

fn due(n: usize, divisor: u32, total: usize) -> bool {
    n.is_multiple_of(divisor as usize) || n == total
}

pub struct Engine {
    cycle: DriveCycle,
    total: usize,
    n: usize,
    state: SimState,
    counts: ExecutionCounts,

    road: RoadLoadParams,
    drive_force_limit_n: f64,
    brake_force_limit_n: f64,
    wheel_radius_m: f64,
    ratio_total: f64,
    transmission_efficiency: f64,
    inverter_efficiency: f64,
    motor: EfficiencyModel,
    regen: RegenParams,
    regen_efficiency: Option<f64>,

    p_aux_w: f64,
    g_solar: f64,
    n_occ: f64,
    cabin: Box<dyn CabinModel>,
    cabin_acc: Accumulator<2>,

    charger: Option<ChargerParams>,
    window: ChargeWindow,
    charger_state: ChargerState,

    battery: Box<dyn BatteryModel>,
    battery_acc: Accumulator<1>,

    thermal_cfg: ThermalConfig,
    thermal: ThermalState,
    thermal_acc: Accumulator<4>,

    divisors: crate::config::RateDivisors,
}

/// Instantiates every module for a run and sets the initial state.
pub fn build_engine(vehicle: &VehicleConfig, testcase: &TestcaseConfig, cycle: DriveCycle) -> Result<Engine> {
    testcase.validate_against(vehicle)?;
    if cycle.samples().len() < 2 {
        return Err(Error::Usage(format!(
            "drive cycle {} has no steps to simulate",
            cycle.name()
        )));
    }
    let registry = Registry::builtin();
    let ctx = ModelContext { vehicle, testcase };
    let motor = registry.motor(&vehicle.motor.model)?(&ctx)?;
    let cabin = registry.hvac(&vehicle.hvac.model)?(&ctx)?;
    let charger = if testcase.charging.enabled {
        let key = vehicle
            .charger
            .as_ref()
            .map(|c| c.model.as_str())
            .unwrap_or("ac_basic");
        Some(registry.charger(key)?(&ctx)?)
    } else {
        None
    };
    let battery = registry.battery(&vehicle.battery.model)?(&ctx)?;

    let env = &testcase.environment;
    let mass = effective_mass(vehicle, testcase);
    let temps = &testcase.sim.initial_temps_c;
    let b0 = battery.state();
    let first = cycle.samples()[0];
    let total = cycle.samples().len() - 1;
    let state = SimState {
        time_s: first.time_s,
        speed_mps: first.speed_mps,
        p_aux_w: loads::aux_power(&vehicle.aux),
        i_batt_a: b0.i_batt_a,
        v_batt_v: b0.v_batt_v,
        soc: b0.soc,
        t_batt_c: temps.battery,
        t_motor_c: temps.motor,
        t_coolant_c: temps.coolant,
        t_cabin_c: cabin.state().t_cabin_c,
        t_amb_c: env.ambient_temp_c,
        motor_eff: vehicle.motor.base_efficiency,
        ..Default::default()
    };
    Ok(Engine {
        total,
        n: 0,
        state,
        counts: ExecutionCounts::default(),
        road: RoadLoadParams {
            mass_kg: mass,
            grade_rad: env.grade_rad,
            air_density_kg_per_m3: env.air_density_kg_per_m3,
            cd: vehicle.cd,
            frontal_area_m2: vehicle.frontal_area_m2,
            crr: vehicle.crr,
            wind_speed_mps: env.wind_speed_mps,
        },
        drive_force_limit_n: vehicle.drive_force_limit_n.unwrap_or(mass * G),
        brake_force_limit_n: vehicle.brake_force_limit_n.unwrap_or(mass * G),
        wheel_radius_m: vehicle.wheel_radius_m,
        ratio_total: vehicle.reducer_ratio_total(),
        transmission_efficiency: vehicle.transmission_efficiency,
        inverter_efficiency: vehicle.inverter_efficiency,
        motor,
        regen: RegenParams {
            beta: vehicle.regen_blend_factor,
            eta_regen: vehicle.motor.regen_efficiency.unwrap_or(vehicle.motor.base_efficiency),
            p_regen_max_w: vehicle.max_regen_power_w,
            soc_upper_limit: vehicle.battery.soc_max,
        },
        regen_efficiency: vehicle.motor.regen_efficiency,
        p_aux_w: loads::aux_power(&vehicle.aux),
        g_solar: env.solar_irradiance_w_per_m2,
        n_occ: f64::from(testcase.occupants),
        cabin,
        cabin_acc: Accumulator::new(),
        charger,
        window: ChargeWindow {
            enabled: testcase.charging.enabled,
            start_s: testcase.charging.window_start_s,
            end_s: testcase.charging.window_end_s,
        },
        charger_state: ChargerState::default(),
        battery,
        battery_acc: Accumulator::new(),
        thermal_cfg: vehicle.thermal.clone(),
        thermal: ThermalState {
            t_batt_c: temps.battery,
            t_motor_c: temps.motor,
            t_coolant_c: temps.coolant,
        },
        thermal_acc: Accumulator::new(),
        divisors: vehicle.rate_divisors,
        cycle,
    })
}

impl Engine {
    pub fn total_steps(&self) -> usize {
        self.total
    }

    pub fn steps_done(&self) -> usize {
        self.n
    }

    pub fn is_finished(&self) -> bool {
        self.n >= self.total
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn executions(&self) -> ExecutionCounts {
        self.counts
    }

    pub fn cycle(&self) -> &DriveCycle {
        &self.cycle
    }

    pub fn battery_kind(&self) -> &'static str {
        self.battery.kind()
    }

    /// Advances one master step and returns the new state.
    pub fn step(&mut self) -> Result<SimState> {
        if self.is_finished() {
            return Err(Error::Usage("simulation already reached the end of the cycle".into()));
        }
        let n = self.n + 1;
        self.advance(n).map_err(|e| e.at_step(n))?;
        self.n = n;
        Ok(self.state)
    }

    fn advance(&mut self, n: usize) -> Result<(), StepError> {
        let total = self.total;
        let d = self.divisors;
        let prev = self.state;
        let s0 = self.cycle.samples()[n - 1];
        let s1 = self.cycle.samples()[n];
        let dt = s1.time_s - s0.time_s;
        let mut st = prev;
        st.time_s = s1.time_s;
        st.dt_s = dt;

        // longitudinal
        let v = 0.5 * (s0.speed_mps + s1.speed_mps);
        let a = longitudinal::accel_from_trace(s0.speed_mps, s1.speed_mps, dt);
        st.speed_mps = v;
        st.accel_mps2 = a;
        st.distance_m = longitudinal::advance_distance(prev.distance_m, s0.speed_mps, s1.speed_mps, dt);
        let load = longitudinal::road_load_at(v, a, &self.road);
        let demand = longitudinal::wheel_demand(
            load.f_wheel_req_n,
            v,
            self.drive_force_limit_n,
            self.brake_force_limit_n,
        );
        st.f_aero_n = load.f_aero_n;
        st.f_roll_n = load.f_roll_n;
        st.f_grade_n = load.f_grade_n;
        st.f_inertia_n = load.f_inertia_n;
        st.wheel_force_n = load.f_wheel_req_n;
        st.wheel_power_w = demand.p_wheel_w;
        st.throttle_frac = demand.throttle_frac;
        st.brake_frac = demand.brake_frac;
        st.brake_demand_flag = demand.brake_demand_flag;
        self.counts.longitudinal += 1;

        // driveline
        let omega = driveline::reducer_map(v, self.wheel_radius_m, self.ratio_total).omega_motor_radps;
        let t_req = driveline::motor_torque_demand(
            load.f_wheel_req_n,
            self.wheel_radius_m,
            self.ratio_total,
            self.transmission_efficiency,
        );
        let torque = self.motor.envelope().clamp_torque(t_req, omega);
        let eta = self.motor.efficiency(torque, omega);
        let elec = driveline::electrical_demand(torque, omega, eta, self.inverter_efficiency);
        st.motor_speed_radps = omega;
        st.motor_torque_nm = torque;
        st.motor_eff = eta;
        st.p_drive_dc_w = elec.p_drive_dc_w;
        self.counts.driveline += 1;

        // regen
        let params = RegenParams {
            eta_regen: self.regen_efficiency.unwrap_or(eta),
            ..self.regen
        };
        let split = regen::regen_split(demand.p_wheel_w, v, demand.brake_demand_flag, prev.soc, &params);
        st.p_regen_w = split.p_regen_w;
        st.p_friction_w = split.p_friction_w;
        self.counts.regen += 1;

        // loads_hvac
        st.p_aux_w = self.p_aux_w;
        self.cabin_acc.push(dt, [v, st.t_amb_c]);
        if due(n, d.loads_hvac, total) {
            let f = self.cabin_acc.flush().expect("window has samples");
            let cabin = self.cabin.step(&CabinInput {
                speed_mps: f.mean[0],
                t_amb_c: f.mean[1],
                g_solar_w_per_m2: self.g_solar,
                n_occ: self.n_occ,
                dt_s: f.dt_eff,
            })?;
            st.t_cabin_c = cabin.t_cabin_c;
            st.q_hvac_w = cabin.q_hvac_w;
            st.p_hvac_w = cabin.p_hvac_w;
            self.counts.loads_hvac += 1;
        }

        // charging
        if due(n, d.charging, total) {
            if let Some(p) = &self.charger {
                let out = charging::charge_step(
                    &self.charger_state,
                    &BatteryReading {
                        v_batt_v: prev.v_batt_v,
                        i_batt_a: prev.i_batt_a,
                        soc: prev.soc,
                        t_batt_c: prev.t_batt_c,
                    },
                    s0.time_s,
                    p,
                    &self.window,
                );
                self.charger_state = out.charger;
                st.p_charge_req_w = out.p_charge_req_w;
            }
            st.charger_state = self.charger_state.mode;
            self.counts.charging += 1;
        }

        // battery
        let p_net = battery::net_power(
            st.p_drive_dc_w,
            st.p_hvac_w,
            st.p_aux_w,
            st.p_regen_w,
            st.p_charge_req_w,
        );
        st.p_batt_net_w = p_net;
        self.battery_acc.push(dt, [p_net]);
        if due(n, d.battery, total) {
            let f = self.battery_acc.flush().expect("window has samples");
            let out = self.battery.step(&BatteryInput {
                p_net_w: f.mean[0],
                t_batt_c: prev.t_batt_c,
                dt_s: f.dt_eff,
            })?;
            st.soc = out.state.soc;
            st.v_batt_v = out.state.v_batt_v;
            st.i_batt_a = out.state.i_batt_a;
            st.power_shortfall_w = out.power_shortfall_w;
            self.counts.battery += 1;
        }

        // thermal_trends
        self.thermal_acc
            .push(dt, [st.i_batt_a.abs(), torque.abs(), omega, eta]);
        if due(n, d.thermal_trends, total) {
            let f = self.thermal_acc.flush().expect("window has samples");
            self.thermal = thermal::thermal_step(
                &self.thermal,
                &ThermalInput {
                    t_amb_c: st.t_amb_c,
                    i_batt_abs_a: f.mean[0],
                    motor_torque_abs_nm: f.mean[1],
                    motor_speed_radps: f.mean[2],
                    motor_eff: f.mean[3],
                    dt_s: f.dt_eff,
                },
                &self.thermal_cfg,
            )?;
            st.t_batt_c = self.thermal.t_batt_c;
            st.t_motor_c = self.thermal.t_motor_c;
            st.t_coolant_c = self.thermal.t_coolant_c;
            self.counts.thermal_trends += 1;
        }

        st.check_finite()?;
        self.state = st;
        Ok(())
    }

    /// Runs to the end of the cycle.
    pub fn run(self) -> Result<RunOutput> {
        self.run_with_progress(|_, _| {})
    }

    /// Runs to the end, calling `progress(done, total)` after every step.
    pub fn run_with_progress(mut self, mut progress: impl FnMut(usize, usize)) -> Result<RunOutput> {
        let started = Instant::now();
        let initial = self.state;
        let mut rows = Vec::with_capacity(self.total);
        while !self.is_finished() {
            rows.push(self.step()?);
            progress(self.n, self.total);
        }
        Ok(RunOutput {
            initial,
            rows,
            executions: self.counts,
            cycle_name: self.cycle.name().to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
        })
    }
}

/// Loads the route named by the testcase, builds the engine, and runs it.
pub fn simulate(vehicle: &VehicleConfig, testcase: &TestcaseConfig) -> Result<RunOutput> {
    let cycle = route::load_route(testcase)?;
    build_engine(vehicle, testcase, cycle)?.run()
}
