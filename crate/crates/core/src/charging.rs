//! AC charging controller: constant current, then a constant-voltage taper.

use std::fmt;

use serde::Serialize;

use crate::config::registry::ModelContext;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargerMode {
    #[default]
    Idle,
    Cc,
    Cv,
    Done,
    Blocked,
}

impl ChargerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChargerMode::Idle => "idle",
            ChargerMode::Cc => "cc",
            ChargerMode::Cv => "cv",
            ChargerMode::Done => "done",
            ChargerMode::Blocked => "blocked",
        }
    }
}

impl fmt::Display for ChargerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChargerState {
    pub mode: ChargerMode,
    pub window_active: bool,
    /// Set once the taper has started; CC is not re-entered afterwards.
    pub cv_latched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargerParams {
    pub ac_power_limit_w: f64,
    pub charge_efficiency: f64,
    pub max_charge_current_a: Option<f64>,
    pub target_voltage_v: f64,
    pub charge_resistance_ohm: f64,
    pub termination_current_a: f64,
    pub temp_min_c: Option<f64>,
    pub temp_max_c: Option<f64>,
    /// Charging ends when SoC reaches this value.
    pub soc_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeWindow {
    pub enabled: bool,
    pub start_s: f64,
    pub end_s: f64,
}

impl ChargeWindow {
    pub const DISABLED: ChargeWindow = ChargeWindow {
        enabled: false,
        start_s: 0.0,
        end_s: 0.0,
    };

    /// Plugged in on `[start, end)`.
    pub fn contains(&self, t: f64) -> bool {
        self.enabled && t >= self.start_s && t < self.end_s
    }
}

/// Battery quantities the controller observes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryReading {
    pub v_batt_v: f64,
    pub i_batt_a: f64,
    pub soc: f64,
    pub t_batt_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeOutput {
    /// Requested battery power, never positive.
    pub p_charge_req_w: f64,
    pub charger: ChargerState,
}

/// Taper current from the estimated open-circuit voltage.
pub fn cv_taper_current(v_batt: f64, i_batt: f64, p: &ChargerParams) -> f64 {
    let v_ocv_est = v_batt + i_batt * p.charge_resistance_ohm;
    ((p.target_voltage_v - v_ocv_est) / p.charge_resistance_ohm).max(0.0)
}

fn cc_power(v_batt: f64, p: &ChargerParams) -> f64 {
    let mut magnitude = p.charge_efficiency * p.ac_power_limit_w;
    if let Some(i_max) = p.max_charge_current_a {
        magnitude = magnitude.min(i_max * v_batt.max(0.0));
    }
    -magnitude
}

fn temperature_ok(t: f64, p: &ChargerParams) -> bool {
    p.temp_min_c.is_none_or(|lo| t >= lo) && p.temp_max_c.is_none_or(|hi| t <= hi)
}

pub fn charge_step(
    charger: &ChargerState,
    batt: &BatteryReading,
    time_s: f64,
    p: &ChargerParams,
    window: &ChargeWindow,
) -> ChargeOutput {
    let window_active = window.contains(time_s);
    let out = |mode, p_charge_req_w, cv_latched| ChargeOutput {
        p_charge_req_w,
        charger: ChargerState {
            mode,
            window_active,
            cv_latched,
        },
    };
    if charger.mode == ChargerMode::Done {
        return out(ChargerMode::Done, 0.0, charger.cv_latched);
    }
    if !window_active {
        return out(ChargerMode::Idle, 0.0, charger.cv_latched);
    }
    if !temperature_ok(batt.t_batt_c, p) {
        return out(ChargerMode::Blocked, 0.0, charger.cv_latched);
    }
    if batt.soc >= p.soc_max {
        return out(ChargerMode::Done, 0.0, charger.cv_latched);
    }
    let cv = charger.cv_latched || batt.v_batt_v >= p.target_voltage_v;
    if !cv {
        return out(ChargerMode::Cc, cc_power(batt.v_batt_v, p), false);
    }
    let i_cv = cv_taper_current(batt.v_batt_v, batt.i_batt_a, p);
    if i_cv < p.termination_current_a {
        return out(ChargerMode::Done, 0.0, true);
    }
    let p_req = (-i_cv * p.target_voltage_v).max(cc_power(batt.v_batt_v, p));
    out(ChargerMode::Cv, p_req, true)
}

pub fn ac_basic_factory(ctx: &ModelContext<'_>) -> Result<ChargerParams> {
    let c = ctx
        .vehicle
        .charger
        .as_ref()
        .ok_or_else(|| Error::schema("charger", "is required when charging is enabled"))?;
    Ok(ChargerParams {
        ac_power_limit_w: c.ac_power_limit_w,
        charge_efficiency: c.charge_efficiency,
        max_charge_current_a: c.max_charge_current_a,
        target_voltage_v: c.target_voltage_v,
        charge_resistance_ohm: c.charge_resistance_ohm,
        termination_current_a: c.termination_current_a,
        temp_min_c: c.temp_min_c,
        temp_max_c: c.temp_max_c,
        soc_max: ctx.vehicle.battery.soc_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ChargerParams = ChargerParams {
        ac_power_limit_w: 7_400.0,
        charge_efficiency: 0.92,
        max_charge_current_a: None,
        target_voltage_v: 396.0,
        charge_resistance_ohm: 0.1,
        termination_current_a: 1.0,
        temp_min_c: Some(0.0),
        temp_max_c: Some(45.0),
        soc_max: 0.98,
    };

    const W: ChargeWindow = ChargeWindow {
        enabled: true,
        start_s: 600.0,
        end_s: 1200.0,
    };

    fn reading(v: f64, i: f64, t: f64) -> BatteryReading {
        BatteryReading {
            v_batt_v: v,
            i_batt_a: i,
            soc: 0.5,
            t_batt_c: t,
        }
    }

    #[test]
    fn cc_power_hand_value() {
        let o = charge_step(&ChargerState::default(), &reading(380.0, 0.0, 20.0), 700.0, &P, &W);
        assert_eq!(o.charger.mode, ChargerMode::Cc);
        assert!((o.p_charge_req_w + 6_808.0).abs() < 1e-9);
    }

    #[test]
    fn cc_current_limit() {
        let p = ChargerParams {
            max_charge_current_a: Some(10.0),
            ..P
        };
        let o = charge_step(&ChargerState::default(), &reading(380.0, 0.0, 20.0), 700.0, &p, &W);
        assert!((o.p_charge_req_w + 3_800.0).abs() < 1e-9);
    }

    #[test]
    fn cv_taper_hand_value() {
        assert!((cv_taper_current(395.0, -20.0, &P) - 30.0).abs() < 1e-9);
        let o = charge_step(&ChargerState::default(), &reading(396.5, -20.0, 20.0), 700.0, &P, &W);
        assert_eq!(o.charger.mode, ChargerMode::Cv);
        // V_ocv,est = 394.5, I_cv = 15 A
        assert!((o.p_charge_req_w + 15.0 * 396.0).abs() < 1e-9);
    }

    #[test]
    fn blocked_by_cold_battery() {
        let o = charge_step(&ChargerState::default(), &reading(380.0, 0.0, -5.0), 700.0, &P, &W);
        assert_eq!(o.charger.mode, ChargerMode::Blocked);
        assert_eq!(o.p_charge_req_w, 0.0);
    }

    #[test]
    fn outside_window_and_disabled_are_idle() {
        let s = ChargerState::default();
        let o = charge_step(&s, &reading(380.0, 0.0, 20.0), 100.0, &P, &W);
        assert_eq!((o.charger.mode, o.p_charge_req_w), (ChargerMode::Idle, 0.0));
        let o = charge_step(&s, &reading(380.0, 0.0, 20.0), 1200.0, &P, &W);
        assert_eq!(o.charger.mode, ChargerMode::Idle);
        let o = charge_step(&s, &reading(380.0, 0.0, 20.0), 700.0, &P, &ChargeWindow::DISABLED);
        assert_eq!(o.charger.mode, ChargerMode::Idle);
    }

    #[test]
    fn termination_is_absorbing() {
        let o = charge_step(&ChargerState::default(), &reading(396.0, -9.95, 20.0), 700.0, &P, &W);
        // V_ocv,est = 395.005, I_cv = 9.95 A: still tapering
        assert_eq!(o.charger.mode, ChargerMode::Cv);
        let o = charge_step(&o.charger, &reading(396.0, -0.5, 20.0), 701.0, &P, &W);
        // V_ocv,est = 395.95, I_cv = 0.5 A < 1 A
        assert_eq!(o.charger.mode, ChargerMode::Done);
        let o = charge_step(&o.charger, &reading(300.0, 0.0, 20.0), 702.0, &P, &W);
        assert_eq!((o.charger.mode, o.p_charge_req_w), (ChargerMode::Done, 0.0));
    }

    #[test]
    fn full_pack_ends_charging() {
        let mut r = reading(380.0, 0.0, 20.0);
        r.soc = 0.98;
        let o = charge_step(&ChargerState::default(), &r, 700.0, &P, &W);
        assert_eq!(o.charger.mode, ChargerMode::Done);
    }

    #[test]
    fn modes_progress_monotonically_on_a_synthetic_pack() {
        // Rint-like pack whose OCV rises with charge: V = ocv - I*R
        let mut state = ChargerState::default();
        let mut ocv = 385.0;
        let mut i = 0.0;
        let order = |m: ChargerMode| match m {
            ChargerMode::Idle => 0,
            ChargerMode::Cc => 1,
            ChargerMode::Cv => 2,
            ChargerMode::Done => 3,
            ChargerMode::Blocked => unreachable!(),
        };
        let mut last = 0;
        for k in 0..20_000 {
            let t = 600.0 + f64::from(k);
            let window = ChargeWindow { end_s: 1e9, ..W };
            let o = charge_step(&state, &reading(ocv - i * 0.1, i, 20.0), t, &P, &window);
            let rank = order(o.charger.mode);
            assert!(rank >= last, "mode went backwards at step {k}");
            last = rank;
            state = o.charger;
            i = o.p_charge_req_w / 390.0;
            ocv -= i * 1.0 / 3600.0 * 0.2;
        }
        assert_eq!(state.mode, ChargerMode::Done);
    }
}
