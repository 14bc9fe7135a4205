//! The only place where user-facing units are converted. Everything past the
//! loader works in SI, degrees Celsius, and SoC fractions.

use std::f64::consts::PI;

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

pub fn mps_to_kmh(mps: f64) -> f64 {
    mps * 3.6
}

pub fn kw_to_w(kw: f64) -> f64 {
    kw * 1000.0
}

pub fn w_to_kw(w: f64) -> f64 {
    w / 1000.0
}

pub fn rpm_to_radps(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}

/// Pack energy to charge capacity at the given nominal voltage.
pub fn kwh_to_ah(kwh: f64, v_nom: f64) -> f64 {
    kwh * 1000.0 / v_nom
}

pub fn ah_to_coulomb(ah: f64) -> f64 {
    ah * 3600.0
}

pub fn joule_to_wh(j: f64) -> f64 {
    j / 3600.0
}

pub fn m_to_km(m: f64) -> f64 {
    m / 1000.0
}

/// Road grade given in percent (rise over run × 100) to an angle.
pub fn grade_percent_to_rad(percent: f64) -> f64 {
    (percent / 100.0).atan()
}

/// Wh per metre is numerically kWh per km; scale to kWh/100 km.
pub fn wh_per_m_to_kwh_per_100km(wh_per_m: f64) -> f64 {
    wh_per_m * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(kmh_to_mps(36.0), 10.0);
        assert_eq!(kw_to_w(150.0), 150_000.0);
        assert!((rpm_to_radps(60.0) - 2.0 * PI).abs() < 1e-12);
        assert!((kwh_to_ah(84.0, 700.0) - 120.0).abs() < 1e-12);
        assert_eq!(joule_to_wh(3600.0), 1.0);
        assert!((grade_percent_to_rad(100.0) - PI / 4.0).abs() < 1e-12);
    }
}
