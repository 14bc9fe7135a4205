//! First-order thermal trends for battery, motor, and coolant.

use crate::config::ThermalConfig;
use crate::error::NumericalIssue;

/// Temperatures outside this band abort the run.
pub const SANITY_BAND_C: (f64, f64) = (-60.0, 200.0);

/// Joule-loss scaling for the battery trend: `Q_loss = 3·|I|`.
pub const BATTERY_LOSS_W_PER_A: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThermalState {
    pub t_batt_c: f64,
    pub t_motor_c: f64,
    pub t_coolant_c: f64,
}

/// Window-mean inputs for one thermal update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalInput {
    pub t_amb_c: f64,
    pub i_batt_abs_a: f64,
    pub motor_torque_abs_nm: f64,
    pub motor_speed_radps: f64,
    pub motor_eff: f64,
    pub dt_s: f64,
}

fn relax(t: f64, target: f64, tau: f64, dt: f64) -> f64 {
    t + (target - t) / tau * dt
}

pub fn battery_thermal_step(t_batt: f64, t_amb: f64, i_batt_mean: f64, dt: f64, tau: f64, beta: f64) -> f64 {
    let q_loss = BATTERY_LOSS_W_PER_A * i_batt_mean.abs();
    relax(t_batt, t_amb, tau, dt) + beta * q_loss * dt
}

pub fn motor_loss_w(torque: f64, omega: f64, eta: f64) -> f64 {
    (torque * omega).abs() * (1.0 - eta)
}

#[allow(clippy::too_many_arguments)]
pub fn motor_thermal_step(
    t_motor: f64,
    t_amb: f64,
    torque_mean: f64,
    omega_mean: f64,
    eta_mean: f64,
    dt: f64,
    tau: f64,
    beta: f64,
) -> f64 {
    relax(t_motor, t_amb, tau, dt) + beta * motor_loss_w(torque_mean, omega_mean, eta_mean) * dt
}

/// Coolant follows the mean of battery and motor temperatures.
pub fn coolant_step(t_coolant: f64, t_batt: f64, t_motor: f64, dt: f64, tau: f64) -> f64 {
    relax(t_coolant, 0.5 * (t_batt + t_motor), tau, dt)
}

fn in_band(signal: &'static str, t: f64) -> Result<f64, NumericalIssue> {
    let (lo, hi) = SANITY_BAND_C;
    if t.is_finite() && (lo..=hi).contains(&t) {
        Ok(t)
    } else {
        Err(NumericalIssue::new(signal, t))
    }
}

/// Battery and motor first, then coolant toward their updated mean.
pub fn thermal_step(
    s: &ThermalState,
    input: &ThermalInput,
    p: &ThermalConfig,
) -> Result<ThermalState, NumericalIssue> {
    let dt = input.dt_s;
    let t_batt_c = battery_thermal_step(
        s.t_batt_c,
        input.t_amb_c,
        input.i_batt_abs_a,
        dt,
        p.tau_batt_s,
        p.beta_batt_k_per_j,
    );
    let t_motor_c = motor_thermal_step(
        s.t_motor_c,
        input.t_amb_c,
        input.motor_torque_abs_nm,
        input.motor_speed_radps,
        input.motor_eff,
        dt,
        p.tau_motor_s,
        p.beta_motor_k_per_j,
    );
    let t_coolant_c = coolant_step(s.t_coolant_c, t_batt_c, t_motor_c, dt, p.tau_coolant_s);
    Ok(ThermalState {
        t_batt_c: in_band("t_batt_c", t_batt_c)?,
        t_motor_c: in_band("t_motor_c", t_motor_c)?,
        t_coolant_c: in_band("t_coolant_c", t_coolant_c)?,
    })
}
