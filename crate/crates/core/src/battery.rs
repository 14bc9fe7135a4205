//! Battery models: net power resolution, SoC integration, terminal voltage.
//!
//! Sign convention: positive current and power discharge the pack.

use crate::config::registry::ModelContext;
use crate::config::{units, BatteryConfig};
use crate::error::{NumericalIssue, Result, StepError};

/// Net battery power: traction, HVAC and auxiliaries, minus regen, plus the
/// (non-positive) charger request.
pub fn net_power(p_drive_dc: f64, p_hvac: f64, p_aux: f64, p_regen: f64, p_charge_req: f64) -> f64 {
    p_drive_dc + p_hvac + p_aux - p_regen + p_charge_req
}

/// Piecewise-linear open-circuit voltage versus SoC, held flat beyond the
/// first and last knots.
#[derive(Debug, Clone, PartialEq)]
pub struct OcvCurve {
    knots: Vec<(f64, f64)>,
}

impl OcvCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, String> {
        if knots.len() < 2 {
            return Err("needs at least two (soc, volts) points".into());
        }
        for (i, &(s, v)) in knots.iter().enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(format!("point {i}: soc must lie in [0, 1] (got {s})"));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("point {i}: voltage must be > 0 (got {v})"));
            }
            if i > 0 {
                let (ps, pv) = knots[i - 1];
                if s <= ps {
                    return Err(format!("point {i}: soc must be strictly increasing"));
                }
                if v < pv {
                    return Err(format!("point {i}: voltage must not decrease with soc"));
                }
            }
        }
        Ok(Self { knots })
    }

    /// Generic shape scaled to the nominal voltage.
    pub fn default_for(v_nom: f64) -> Self {
        let shape = [(0.0, 0.85), (0.1, 0.93), (0.5, 1.00), (0.9, 1.06), (1.0, 1.10)];
        Self {
            knots: shape.iter().map(|&(s, k)| (s, k * v_nom)).collect(),
        }
    }

    pub fn from_config(b: &BatteryConfig) -> Self {
        match &b.ocv_table {
            Some(t) => Self::new(t.iter().map(|[s, v]| (*s, *v)).collect())
                .expect("ocv table validated at load"),
            None => Self::default_for(b.v_nom_v),
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn ocv(&self, soc: f64) -> f64 {
        let k = &self.knots;
        if soc <= k[0].0 {
            return k[0].1;
        }
        for w in k.windows(2) {
            let ((s0, v0), (s1, v1)) = (w[0], w[1]);
            if soc <= s1 {
                return v0 + (v1 - v0) * (soc - s0) / (s1 - s0);
            }
        }
        k[k.len() - 1].1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatteryState {
    pub soc: f64,
    pub v_batt_v: f64,
    pub i_batt_a: f64,
    pub v_rc1_v: f64,
    pub v_rc2_v: f64,
}

impl BatteryState {
    pub fn at_rest(soc: f64, v_batt_v: f64) -> Self {
        Self {
            soc,
            v_batt_v,
            ..Default::default()
        }
    }
}

/// Capacity, SoC window, and C-rate clamps shared by all builtin models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackLimits {
    pub capacity_ah: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub c_rate_charge_max: f64,
    pub c_rate_discharge_max: f64,
}

impl PackLimits {
    pub fn from_config(b: &BatteryConfig) -> Self {
        Self {
            capacity_ah: b.capacity_ah,
            soc_min: b.soc_min,
            soc_max: b.soc_max,
            c_rate_charge_max: b.c_rate_charge_max,
            c_rate_discharge_max: b.c_rate_discharge_max,
        }
    }

    pub fn clamp_current(&self, i: f64) -> f64 {
        i.clamp(
            -self.c_rate_charge_max * self.capacity_ah,
            self.c_rate_discharge_max * self.capacity_ah,
        )
    }

    /// Coulomb counting, clipped to the SoC window.
    pub fn integrate_soc(&self, soc: f64, i: f64, dt: f64) -> f64 {
        (soc - i * dt / units::ah_to_coulomb(self.capacity_ah)).clamp(self.soc_min, self.soc_max)
    }
}

/// Result of one battery update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatteryStep {
    pub state: BatteryState,
    /// Requested power the current clamp did not deliver (magnitude).
    pub power_shortfall_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RintParams {
    pub v_nom_v: f64,
    pub r_int_ohm: f64,
    pub limits: PackLimits,
}

pub fn rint_step(
    state: &BatteryState,
    p_net_w: f64,
    dt: f64,
    p: &RintParams,
) -> Result<BatteryStep, NumericalIssue> {
    let i_ideal = p_net_w / p.v_nom_v;
    let i = p.limits.clamp_current(i_ideal);
    let v = p.v_nom_v - i * p.r_int_ohm;
    if v <= 0.0 || !v.is_finite() {
        return Err(NumericalIssue::new("v_batt_v", v));
    }
    Ok(BatteryStep {
        state: BatteryState {
            soc: p.limits.integrate_soc(state.soc, i, dt),
            v_batt_v: v,
            i_batt_a: i,
            v_rc1_v: 0.0,
            v_rc2_v: 0.0,
        },
        power_shortfall_w: ((i_ideal - i) * p.v_nom_v).abs(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ecm2rcParams {
    pub r0_ohm: f64,
    pub r1_ohm: f64,
    pub c1_f: f64,
    pub r2_ohm: f64,
    pub c2_f: f64,
    pub ocv: OcvCurve,
    pub limits: PackLimits,
}

impl Ecm2rcParams {
    /// Per-branch decay factors `exp(-dt / RC)`.
    pub fn alphas(&self, dt: f64) -> (f64, f64) {
        (
            (-dt / (self.r1_ohm * self.c1_f)).exp(),
            (-dt / (self.r2_ohm * self.c2_f)).exp(),
        )
    }
}

/// Exact zero-order-hold update of one RC branch for constant current `i`.
pub fn rc_update(v_rc: f64, i: f64, r: f64, alpha: f64) -> f64 {
    alpha * v_rc + (1.0 - alpha) * i * r
}

/// Current is taken from the requested power at the previous terminal
/// voltage, which avoids solving `P = I·V(I)` within the step.
pub fn ecm2rc_step(
    state: &BatteryState,
    p_net_w: f64,
    dt: f64,
    p: &Ecm2rcParams,
) -> Result<BatteryStep, NumericalIssue> {
    let v_prev = state.v_batt_v;
    if v_prev <= 0.0 || !v_prev.is_finite() {
        return Err(NumericalIssue::new("v_batt_v", v_prev));
    }
    let i_ideal = p_net_w / v_prev;
    let i = p.limits.clamp_current(i_ideal);
    ecm2rc_current_step(state, i, dt, p).map(|state| BatteryStep {
        state,
        power_shortfall_w: ((i_ideal - i) * v_prev).abs(),
    })
}

/// ECM update for an imposed (already clamped) current.
pub fn ecm2rc_current_step(
    state: &BatteryState,
    i: f64,
    dt: f64,
    p: &Ecm2rcParams,
) -> Result<BatteryState, NumericalIssue> {
    let (a1, a2) = p.alphas(dt);
    let v_rc1_v = rc_update(state.v_rc1_v, i, p.r1_ohm, a1);
    let v_rc2_v = rc_update(state.v_rc2_v, i, p.r2_ohm, a2);
    let soc = p.limits.integrate_soc(state.soc, i, dt);
    let v = p.ocv.ocv(soc) - i * p.r0_ohm - v_rc1_v - v_rc2_v;
    if v <= 0.0 || !v.is_finite() {
        return Err(NumericalIssue::new("v_batt_v", v));
    }
    Ok(BatteryState {
        soc,
        v_batt_v: v,
        i_batt_a: i,
        v_rc1_v,
        v_rc2_v,
    })
}

/// Inputs handed to a battery model at each of its updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryInput {
    /// Mean net power over the update window.
    pub p_net_w: f64,
    pub t_batt_c: f64,
    /// Length of the update window.
    pub dt_s: f64,
}

/// Runtime interface of the battery slot.
pub trait BatteryModel: Send {
    fn kind(&self) -> &'static str;
    fn state(&self) -> BatteryState;
    fn step(&mut self, input: &BatteryInput) -> Result<BatteryStep, StepError>;
}

pub struct Rint {
    params: RintParams,
    state: BatteryState,
}

impl Rint {
    pub fn new(params: RintParams, initial_soc: f64) -> Self {
        Self {
            state: BatteryState::at_rest(initial_soc, params.v_nom_v),
            params,
        }
    }
}

impl BatteryModel for Rint {
    fn kind(&self) -> &'static str {
        "rint"
    }

    fn state(&self) -> BatteryState {
        self.state
    }

    fn step(&mut self, input: &BatteryInput) -> Result<BatteryStep, StepError> {
        let out = rint_step(&self.state, input.p_net_w, input.dt_s, &self.params)?;
        self.state = out.state;
        Ok(out)
    }
}

pub struct Ecm2rc {
    params: Ecm2rcParams,
    state: BatteryState,
}

impl Ecm2rc {
    pub fn new(params: Ecm2rcParams, initial_soc: f64) -> Self {
        let v = params.ocv.ocv(initial_soc);
        Self {
            state: BatteryState::at_rest(initial_soc, v),
            params,
        }
    }
}

impl BatteryModel for Ecm2rc {
    fn kind(&self) -> &'static str {
        "ecm_2rc"
    }

    fn state(&self) -> BatteryState {
        self.state
    }

    fn step(&mut self, input: &BatteryInput) -> Result<BatteryStep, StepError> {
        let out = ecm2rc_step(&self.state, input.p_net_w, input.dt_s, &self.params)?;
        self.state = out.state;
        Ok(out)
    }
}

pub fn rint_params(b: &BatteryConfig) -> RintParams {
    RintParams {
        v_nom_v: b.v_nom_v,
        r_int_ohm: b.r_int_ohm.unwrap_or(0.0),
        limits: PackLimits::from_config(b),
    }
}

pub fn ecm2rc_params(b: &BatteryConfig) -> Ecm2rcParams {
    Ecm2rcParams {
        r0_ohm: b.r0_ohm.unwrap_or(0.0),
        r1_ohm: b.r1_ohm.unwrap_or(f64::NAN),
        c1_f: b.c1_f.unwrap_or(f64::NAN),
        r2_ohm: b.r2_ohm.unwrap_or(f64::NAN),
        c2_f: b.c2_f.unwrap_or(f64::NAN),
        ocv: OcvCurve::from_config(b),
        limits: PackLimits::from_config(b),
    }
}

pub fn rint_factory(ctx: &ModelContext<'_>) -> Result<Box<dyn BatteryModel>> {
    Ok(Box::new(Rint::new(
        rint_params(&ctx.vehicle.battery),
        ctx.testcase.sim.initial_soc,
    )))
}

pub fn ecm2rc_factory(ctx: &ModelContext<'_>) -> Result<Box<dyn BatteryModel>> {
    Ok(Box::new(Ecm2rc::new(
        ecm2rc_params(&ctx.vehicle.battery),
        ctx.testcase.sim.initial_soc,
    )))
}
