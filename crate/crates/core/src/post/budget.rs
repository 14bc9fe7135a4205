use serde::Serialize;

use crate::config::units;
use crate::engine::SimState;

/// Energy totals over a run, Wh.
///
/// Road-load terms count the work delivered against each resistance (positive
/// phases only). `e_inertia_wh` is the work spent accelerating, part of which
/// `e_regen_wh` later recovers. `e_net_wh` is reported as
/// `e_drive − e_regen + e_aux + e_hvac` and excludes external charging, which
/// is listed separately.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyBudget {
    pub e_aero_wh: f64,
    pub e_roll_wh: f64,
    pub e_grade_wh: f64,
    pub e_inertia_wh: f64,
    pub e_wheel_wh: f64,
    pub e_drive_wh: f64,
    pub e_regen_wh: f64,
    pub e_friction_wh: f64,
    pub e_aux_wh: f64,
    pub e_hvac_wh: f64,
    pub e_net_wh: f64,
    pub e_charge_wh: f64,
    pub e_batt_net_wh: f64,
    /// `None` when the vehicle did not move.
    pub consumption_kwh_per_100km: Option<f64>,
}

pub fn net_identity(e_drive: f64, e_regen: f64, e_aux: f64, e_hvac: f64) -> f64 {
    e_drive - e_regen + e_aux + e_hvac
}

/// Integrates the per-step powers. Each row holds the powers over its own step,
/// so the integral is the sum of `P·dt`.
pub fn integrate_budget(rows: &[SimState]) -> EnergyBudget {
    let mut j = EnergyBudget::default();
    let pos = |x: f64| x.max(0.0);
    for r in rows {
        let dt = r.dt_s;
        let v = r.speed_mps;
        j.e_aero_wh += pos(r.f_aero_n * v) * dt;
        j.e_roll_wh += pos(r.f_roll_n * v) * dt;
        j.e_grade_wh += pos(r.f_grade_n * v) * dt;
        j.e_inertia_wh += pos(r.f_inertia_n * v) * dt;
        j.e_wheel_wh += pos(r.wheel_power_w) * dt;
        j.e_drive_wh += r.p_drive_dc_w * dt;
        j.e_regen_wh += r.p_regen_w * dt;
        j.e_friction_wh += r.p_friction_w * dt;
        j.e_aux_wh += r.p_aux_w * dt;
        j.e_hvac_wh += r.p_hvac_w * dt;
        j.e_charge_wh += -r.p_charge_req_w * dt;
        j.e_batt_net_wh += r.p_batt_net_w * dt;
    }
    let wh = units::joule_to_wh;
    let mut b = EnergyBudget {
        e_aero_wh: wh(j.e_aero_wh),
        e_roll_wh: wh(j.e_roll_wh),
        e_grade_wh: wh(j.e_grade_wh),
        e_inertia_wh: wh(j.e_inertia_wh),
        e_wheel_wh: wh(j.e_wheel_wh),
        e_drive_wh: wh(j.e_drive_wh),
        e_regen_wh: wh(j.e_regen_wh),
        e_friction_wh: wh(j.e_friction_wh),
        e_aux_wh: wh(j.e_aux_wh),
        e_hvac_wh: wh(j.e_hvac_wh),
        e_net_wh: 0.0,
        e_charge_wh: wh(j.e_charge_wh),
        e_batt_net_wh: wh(j.e_batt_net_wh),
        consumption_kwh_per_100km: None,
    };
    b.e_net_wh = net_identity(b.e_drive_wh, b.e_regen_wh, b.e_aux_wh, b.e_hvac_wh);
    let distance_m = rows.last().map_or(0.0, |r| r.distance_m);
    if distance_m > 0.0 {
        b.consumption_kwh_per_100km = Some(units::wh_per_m_to_kwh_per_100km(b.e_net_wh / distance_m));
    }
    b
}
