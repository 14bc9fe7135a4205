//! Auxiliary electrical loads and the lumped-cabin HVAC model.

use crate::config::registry::ModelContext;
use crate::config::{AuxConfig, HvacConfig};
use crate::error::{NumericalIssue, Result, StepError};

/// Specific heat of air, J/(kg·K).
pub const CP_AIR: f64 = 1005.0;

pub fn aux_power(aux: &AuxConfig) -> f64 {
    aux.headlights_w + aux.adas_w + aux.infotainment_w + aux.steering_w
}

/// Passive heat flows into the cabin, W. Positive heats the cabin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PassiveHeat {
    pub envelope_w: f64,
    pub solar_w: f64,
    pub vent_w: f64,
    pub occupants_w: f64,
    pub total_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CabinParams {
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
    pub controller_gain_w_per_k: f64,
}

impl CabinParams {
    pub fn from_config(h: &HvacConfig) -> Self {
        Self {
            ua_body_w_per_k: h.ua_body_w_per_k,
            k_v_w_per_k_per_mps: h.k_v_w_per_k_per_mps,
            glass_area_m2: h.glass_area_m2,
            solar_transmittance: h.solar_transmittance,
            air_massflow_kg_per_s: h.air_massflow_kg_per_s,
            occupant_heat_w: h.occupant_heat_w,
            cabin_capacitance_j_per_k: h.cabin_capacitance_j_per_k,
            rated_thermal_power_w: h.rated_thermal_power_w,
            cop_cooling: h.cop_cooling,
            cop_heating: h.cop_heating,
            controller_gain_w_per_k: h.controller_gain_w_per_k,
        }
    }
}

pub fn cabin_passive_heat(
    t_cabin_c: f64,
    t_amb_c: f64,
    v: f64,
    g_solar_w_per_m2: f64,
    n_occ: f64,
    p: &CabinParams,
) -> PassiveHeat {
    let dt = t_amb_c - t_cabin_c;
    let ua_tot = p.ua_body_w_per_k + p.k_v_w_per_k_per_mps * v;
    let envelope_w = ua_tot * dt;
    let solar_w = g_solar_w_per_m2 * p.glass_area_m2 * p.solar_transmittance;
    let vent_w = p.air_massflow_kg_per_s * CP_AIR * dt;
    let occupants_w = n_occ * p.occupant_heat_w;
    PassiveHeat {
        envelope_w,
        solar_w,
        vent_w,
        occupants_w,
        total_w: envelope_w + solar_w + vent_w + occupants_w,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CabinState {
    pub t_cabin_c: f64,
    /// Thermal power delivered by the HVAC unit, heating positive.
    pub q_hvac_w: f64,
    /// Electrical input power, never negative.
    pub p_hvac_w: f64,
    /// Net heat into the cabin over the last update.
    pub q_net_w: f64,
}

/// Electrical power for a signed thermal request.
pub fn hvac_electrical_power(q_hvac_w: f64, p: &CabinParams) -> f64 {
    if q_hvac_w < 0.0 {
        -q_hvac_w / p.cop_cooling
    } else if q_hvac_w > 0.0 {
        q_hvac_w / p.cop_heating
    } else {
        0.0
    }
}

/// Proportional control toward the setpoint with the passive load cancelled,
/// clipped to the rated thermal power.
pub fn hvac_request(t_cabin_c: f64, setpoint_c: f64, q_passive_w: f64, p: &CabinParams) -> f64 {
    let rated = p.rated_thermal_power_w;
    (p.controller_gain_w_per_k * (setpoint_c - t_cabin_c) - q_passive_w).clamp(-rated, rated)
}

pub fn hvac_step(
    cabin: &CabinState,
    q_passive_w: f64,
    setpoint_c: Option<f64>,
    dt: f64,
    p: &CabinParams,
) -> CabinState {
    let q_hvac_w = match setpoint_c {
        Some(sp) => hvac_request(cabin.t_cabin_c, sp, q_passive_w, p),
        None => 0.0,
    };
    let q_net_w = q_passive_w + q_hvac_w;
    CabinState {
        t_cabin_c: cabin.t_cabin_c + q_net_w * dt / p.cabin_capacitance_j_per_k,
        q_hvac_w,
        p_hvac_w: hvac_electrical_power(q_hvac_w, p),
        q_net_w,
    }
}

/// Inputs handed to a cabin model at each of its updates, averaged over the
/// update window where they vary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CabinInput {
    pub t_amb_c: f64,
    pub speed_mps: f64,
    pub g_solar_w_per_m2: f64,
    pub n_occ: f64,
    pub dt_s: f64,
}

/// Runtime interface of the HVAC slot.
pub trait CabinModel: Send {
    fn kind(&self) -> &'static str;
    fn state(&self) -> CabinState;
    fn step(&mut self, input: &CabinInput) -> Result<CabinState, StepError>;
}

pub struct LumpedCabin {
    params: CabinParams,
    /// `None` when the HVAC unit is switched off.
    setpoint_c: Option<f64>,
    state: CabinState,
}

impl LumpedCabin {
    pub fn new(params: CabinParams, setpoint_c: Option<f64>, t_cabin_c: f64) -> Self {
        Self {
            params,
            setpoint_c,
            state: CabinState {
                t_cabin_c,
                ..Default::default()
            },
        }
    }
}

impl CabinModel for LumpedCabin {
    fn kind(&self) -> &'static str {
        "lumped_cabin"
    }

    fn state(&self) -> CabinState {
        self.state
    }

    fn step(&mut self, input: &CabinInput) -> Result<CabinState, StepError> {
        let q = cabin_passive_heat(
            self.state.t_cabin_c,
            input.t_amb_c,
            input.speed_mps,
            input.g_solar_w_per_m2,
            input.n_occ,
            &self.params,
        );
        let next = hvac_step(&self.state, q.total_w, self.setpoint_c, input.dt_s, &self.params);
        NumericalIssue::check_finite("t_cabin_c", next.t_cabin_c)?;
        self.state = next;
        Ok(next)
    }
}

/// Cabin setpoint in effect for a run, or `None` with HVAC disabled.
pub fn effective_setpoint(ctx: &ModelContext<'_>) -> Option<f64> {
    ctx.testcase.sim.hvac_enabled.then(|| {
        ctx.testcase
            .environment
            .cabin_setpoint_c
            .unwrap_or(ctx.vehicle.hvac.setpoint_c)
    })
}

pub fn lumped_cabin_factory(ctx: &ModelContext<'_>) -> Result<Box<dyn CabinModel>> {
    Ok(Box::new(LumpedCabin::new(
        CabinParams::from_config(&ctx.vehicle.hvac),
        effective_setpoint(ctx),
        ctx.testcase.sim.initial_temps_c.cabin,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: CabinParams = CabinParams {
        ua_body_w_per_k: 25.0,
        k_v_w_per_k_per_mps: 0.4,
        glass_area_m2: 1.8,
        solar_transmittance: 0.6,
        air_massflow_kg_per_s: 0.0,
        occupant_heat_w: 100.0,
        cabin_capacitance_j_per_k: 100_000.0,
        rated_thermal_power_w: 5_000.0,
        cop_cooling: 2.5,
        cop_heating: 2.0,
        controller_gain_w_per_k: 400.0,
    };

    #[test]
    fn aux_sum() {
        let a = AuxConfig {
            headlights_w: 120.0,
            adas_w: 80.0,
            infotainment_w: 60.0,
            steering_w: 40.0,
        };
        assert_eq!(aux_power(&a), 300.0);
        let z = AuxConfig {
            headlights_w: 0.0,
            adas_w: 0.0,
            infotainment_w: 0.0,
            steering_w: 0.0,
        };
        assert_eq!(aux_power(&z), 0.0);
    }

    #[test]
    fn passive_terms_hand_values() {
        let q = cabin_passive_heat(22.0, 35.0, 20.0, 0.0, 0.0, &P);
        assert!((q.envelope_w - 429.0).abs() < 1e-9);
        let q = cabin_passive_heat(22.0, 22.0, 0.0, 800.0, 0.0, &P);
        assert!((q.solar_w - 864.0).abs() < 1e-9);
        let q = cabin_passive_heat(22.0, 22.0, 10.0, 0.0, 0.0, &P);
        assert_eq!(q.total_w, 0.0);
        let vent = CabinParams {
            air_massflow_kg_per_s: 0.02,
            ..P
        };
        let q = cabin_passive_heat(20.0, 30.0, 0.0, 0.0, 0.0, &vent);
        assert!((q.vent_w - 0.02 * 1005.0 * 10.0).abs() < 1e-9);
    }

    #[test]
    fn cop_split() {
        assert!((hvac_electrical_power(-3_000.0, &P) - 1_200.0).abs() < 1e-9);
        assert_eq!(hvac_electrical_power(0.0, &P), 0.0);
        assert_eq!(hvac_electrical_power(3_000.0, &P), 1_500.0);
    }

    #[test]
    fn request_is_clipped_to_rating() {
        assert_eq!(hvac_request(40.0, 22.0, 2_000.0, &P), -5_000.0);
        assert_eq!(hvac_request(-10.0, 22.0, -500.0, &P), 5_000.0);
    }

    #[test]
    fn disabled_hvac_drifts_passively() {
        let s = CabinState {
            t_cabin_c: 22.0,
            ..Default::default()
        };
        let next = hvac_step(&s, 1_000.0, None, 10.0, &P);
        assert_eq!(next.q_hvac_w, 0.0);
        assert_eq!(next.p_hvac_w, 0.0);
        assert!((next.t_cabin_c - 22.1).abs() < 1e-12);
    }

    #[test]
    fn cabin_energy_bookkeeping() {
        let mut cabin = LumpedCabin::new(P, Some(21.0), 35.0);
        let mut sum_q = 0.0;
        for k in 0..2000 {
            let input = CabinInput {
                t_amb_c: 35.0,
                speed_mps: f64::from(k % 30),
                g_solar_w_per_m2: 800.0,
                n_occ: 2.0,
                dt_s: 0.5,
            };
            let s = cabin.step(&input).unwrap();
            sum_q += s.q_net_w * 0.5;
        }
        let de = P.cabin_capacitance_j_per_k * (cabin.state().t_cabin_c - 35.0);
        assert!((de - sum_q).abs() <= 1e-6 * sum_q.abs());
    }

    proptest! {
        #[test]
        fn passive_relaxation_is_monotone(t0 in -30.0f64..60.0, amb in -30.0f64..45.0, v in 0.0f64..40.0) {
            let p = CabinParams { occupant_heat_w: 0.0, air_massflow_kg_per_s: 0.0, ..P };
            let mut cabin = LumpedCabin::new(p, None, t0);
            let mut gap = (t0 - amb).abs();
            for _ in 0..500 {
                let s = cabin.step(&CabinInput { t_amb_c: amb, speed_mps: v, g_solar_w_per_m2: 0.0, n_occ: 0.0, dt_s: 1.0 }).unwrap();
                let g = (s.t_cabin_c - amb).abs();
                prop_assert!(g <= gap + 1e-12);
                prop_assert!((s.t_cabin_c - amb) * (t0 - amb) >= 0.0);
                gap = g;
            }
        }

        #[test]
        fn electrical_power_nonnegative_and_request_bounded(
            t in -30.0f64..60.0, sp in 16.0f64..28.0, qp in -10_000.0f64..10_000.0,
        ) {
            let s = hvac_step(&CabinState { t_cabin_c: t, ..Default::default() }, qp, Some(sp), 0.5, &P);
            prop_assert!(s.p_hvac_w >= 0.0);
            prop_assert!(s.q_hvac_w.abs() <= P.rated_thermal_power_w);
        }
    }
}
