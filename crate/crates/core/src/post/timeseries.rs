use std::io::Write;

use crate::engine::SimState;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 24] = [
    "time_s",
    "speed_mps",
    "accel_mps2",
    "distance_m",
    "wheel_force_n",
    "wheel_power_w",
    "motor_speed_radps",
    "motor_torque_nm",
    "motor_eff",
    "p_drive_dc_w",
    "p_regen_w",
    "p_friction_w",
    "p_aux_w",
    "p_hvac_w",
    "p_batt_net_w",
    "i_batt_a",
    "v_batt_v",
    "soc",
    "t_batt_c",
    "t_motor_c",
    "t_coolant_c",
    "t_cabin_c",
    "charger_state",
    "power_shortfall_w",
];

/// Six significant digits, plain notation for moderate magnitudes.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa.to_string()));
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = digits.chars().filter(|c| *c != '.').collect();
    let mut out = String::with_capacity(16);
    out.push_str(sign);
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let point = exp as usize + 1;
        out.push_str(&digits[..point]);
        out.push('.');
        out.push_str(&digits[point..]);
    }
    trim_zeros(out)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

fn row_fields(r: &SimState) -> [String; 24] {
    let f = format_sig6;
    [
        f(r.time_s),
        f(r.speed_mps),
        f(r.accel_mps2),
        f(r.distance_m),
        f(r.wheel_force_n),
        f(r.wheel_power_w),
        f(r.motor_speed_radps),
        f(r.motor_torque_nm),
        f(r.motor_eff),
        f(r.p_drive_dc_w),
        f(r.p_regen_w),
        f(r.p_friction_w),
        f(r.p_aux_w),
        f(r.p_hvac_w),
        f(r.p_batt_net_w),
        f(r.i_batt_a),
        f(r.v_batt_v),
        f(r.soc),
        f(r.t_batt_c),
        f(r.t_motor_c),
        f(r.t_coolant_c),
        f(r.t_cabin_c),
        r.charger_state.as_str().to_string(),
        f(r.power_shortfall_w),
    ]
}

pub fn write_timeseries(out: impl Write, rows: &[SimState]) -> Result<()> {
    let io_err = |e: csv::Error| Error::Usage(format!("writing timeseries: {e}"));
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(COLUMNS).map_err(io_err)?;
    for r in rows {
        w.write_record(row_fields(r)).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::io("writing timeseries", e))?;
    Ok(())
}

pub fn timeseries_string(rows: &[SimState]) -> Result<String> {
    let mut buf = Vec::new();
    write_timeseries(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}
