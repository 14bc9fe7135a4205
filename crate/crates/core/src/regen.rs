//! Blended regenerative braking.

/// Below this speed no braking energy is recovered.
pub const SPEED_CUTOFF_MPS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegenParams {
    /// Share of braking opportunity routed to the motor (β).
    pub beta: f64,
    pub eta_regen: f64,
    pub p_regen_max_w: f64,
    pub soc_upper_limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegenSplit {
    /// Braking power available at the wheels.
    pub p_kinetic_w: f64,
    /// Portion taken by the motor before conversion losses.
    pub p_hw_w: f64,
    /// Electrical power returned to the battery.
    pub p_regen_w: f64,
    /// Remainder dissipated by the friction brakes.
    pub p_friction_w: f64,
}

pub fn regen_split(p_wheel_w: f64, v: f64, brake_flag: bool, soc: f64, p: &RegenParams) -> RegenSplit {
    let p_kinetic_w = (-p_wheel_w).max(0.0);
    let suppressed = v < SPEED_CUTOFF_MPS || !brake_flag || soc >= p.soc_upper_limit;
    let p_hw_w = if suppressed {
        0.0
    } else {
        (p.beta * p_kinetic_w).min(p.p_regen_max_w)
    };
    RegenSplit {
        p_kinetic_w,
        p_hw_w,
        p_regen_w: p.eta_regen * p_hw_w,
        p_friction_w: p_kinetic_w - p_hw_w,
    }
}

/// Electrical regen power delivered to the battery.
pub fn regen_power(p_wheel_w: f64, v: f64, brake_flag: bool, soc: f64, p: &RegenParams) -> f64 {
    regen_split(p_wheel_w, v, brake_flag, soc, p).p_regen_w
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: RegenParams = RegenParams {
        beta: 0.8,
        eta_regen: 0.9,
        p_regen_max_w: 60_000.0,
        soc_upper_limit: 0.98,
    };

    #[test]
    fn chain_hand_value() {
        let p = regen_power(-50_000.0, 20.0, true, 0.5, &P);
        assert!((p - 36_000.0).abs() < 1e-9);
        let s = regen_split(-50_000.0, 20.0, true, 0.5, &P);
        assert!((s.p_friction_w - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn suppression() {
        assert_eq!(regen_power(-50_000.0, 0.3, true, 0.5, &P), 0.0);
        assert_eq!(regen_power(30_000.0, 20.0, false, 0.5, &P), 0.0);
        assert_eq!(regen_power(-50_000.0, 20.0, false, 0.5, &P), 0.0);
        assert_eq!(regen_power(-50_000.0, 20.0, true, 0.98, &P), 0.0);
        // all braking goes to friction while suppressed
        let s = regen_split(-50_000.0, 0.3, true, 0.5, &P);
        assert_eq!(s.p_friction_w, 50_000.0);
    }

    #[test]
    fn ceiling_applies_before_conversion() {
        let p = regen_power(-200_000.0, 30.0, true, 0.5, &P);
        assert!((p - 0.9 * 60_000.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn bounded_and_monotone_in_beta(
            pw in -300_000.0f64..100_000.0,
            v in 0.0f64..60.0,
            soc in 0.0f64..1.0,
            b1 in 0.0f64..1.0,
            b2 in 0.0f64..1.0,
            eta in 0.01f64..1.0,
        ) {
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            let p_lo = RegenParams { beta: lo, eta_regen: eta, ..P };
            let p_hi = RegenParams { beta: hi, eta_regen: eta, ..P };
            let r_lo = regen_power(pw, v, pw < 0.0, soc, &p_lo);
            let r_hi = regen_power(pw, v, pw < 0.0, soc, &p_hi);
            prop_assert!(r_lo >= 0.0 && r_hi <= eta * P.p_regen_max_w + 1e-9);
            prop_assert!(r_lo <= r_hi);
            let zero = RegenParams { beta: 0.0, ..P };
            prop_assert_eq!(regen_power(pw, v, pw < 0.0, soc, &zero), 0.0);
        }

        #[test]
        fn lossless_full_blend_returns_everything(pw in -300_000.0f64..0.0, v in 0.5f64..60.0) {
            let p = RegenParams { beta: 1.0, eta_regen: 1.0, p_regen_max_w: f64::INFINITY, soc_upper_limit: 1.0 };
            prop_assert_eq!(regen_power(pw, v, true, 0.5, &p), -pw);
        }
    }
}
