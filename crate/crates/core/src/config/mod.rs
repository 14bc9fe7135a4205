//! Loading, validation, and unit normalization of vehicle and testcase YAML.
//!
//! Both files accept conventional units through suffixed field names
//! (`peak_power_kw`, `max_speed_rpm`, `capacity_kwh`, `wind_speed_kmh`, ...)
//! alongside their SI spellings. Exactly one spelling may be given per
//! quantity. The resolved form written into a case package uses the SI
//! spellings with every default filled in, and loads back to an identical
//! value.

pub mod registry;
pub mod testcase;
pub mod units;
pub mod vehicle;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

pub use registry::{ModelSlot, Registry};
pub use testcase::{
    effective_mass, load_testcase, ChargingWindow, Environment, InitialTemps, Payload, Route,
    RouteMode, Segment, SegmentKind, SimSettings, TestcaseConfig,
};
pub use vehicle::{
    load_vehicle, AuxConfig, BatteryConfig, ChargerConfig, HvacConfig, MotorConfig,
    RateDivisors, ThermalConfig, VehicleConfig,
};

/// Prefix marking a drive-cycle reference into the packaged resources.
pub const PACKAGED_PREFIX: &str = "packaged:";

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

/// Parses YAML into `T`, reporting malformed YAML as [`Error::Parse`] and
/// shape mismatches (unknown keys, wrong types) as [`Error::Schema`] with the
/// offending field path.
pub(crate) fn parse_yaml<T: DeserializeOwned>(label: &str, text: &str) -> Result<T> {
    let value: serde_yaml::Value = serde_yaml::from_str(text).map_err(|e| Error::Parse {
        path: label.to_string(),
        message: e.to_string(),
    })?;
    if !value.is_mapping() {
        return Err(Error::Parse {
            path: label.to_string(),
            message: "top level must be a mapping".into(),
        });
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut field = e.path().to_string();
        let message = e.inner().to_string();
        if let Some(name) = unknown_field_name(&message) {
            let already = field == name || field.ends_with(&format!(".{name}"));
            field = if already {
                field
            } else if field == "." {
                name.to_string()
            } else {
                format!("{field}.{name}")
            };
        }
        Error::schema(field, message)
    })
}

fn unknown_field_name(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

pub(crate) fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

pub(crate) fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::schema(field, format!("must be > 0 (got {v})")))
    }
}

pub(crate) fn non_negative(field: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::schema(field, format!("must be >= 0 (got {v})")))
    }
}

/// Efficiency-like quantity in (0, 1].
pub(crate) fn efficiency(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::schema(field, format!("must lie in (0, 1] (got {v})")))
    }
}

pub(crate) fn unit_interval(field: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::schema(field, format!("must lie in [0, 1] (got {v})")))
    }
}

pub(crate) fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::schema(field, format!("must be finite (got {v})")))
    }
}

pub(crate) fn required<T>(field: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::schema(field, "is required"))
}

/// Accepts a quantity given either in SI (`si_name`) or in a conventional
/// unit (`alt_name`, converted with `convert`). Giving both is an error.
pub(crate) fn either_unit(
    prefix: &str,
    si_name: &str,
    si: Option<f64>,
    alt_name: &str,
    alt: Option<f64>,
    convert: impl Fn(f64) -> f64,
) -> Result<Option<f64>> {
    match (si, alt) {
        (Some(_), Some(_)) => Err(Error::schema(
            join(prefix, alt_name),
            format!("give either `{si_name}` or `{alt_name}`, not both"),
        )),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(convert(v))),
        (None, None) => Ok(None),
    }
}

/// Makes a file reference absolute relative to the directory of the YAML file
/// that contains it. Packaged references are kept verbatim.
pub(crate) fn resolve_file_ref(base_dir: &Path, reference: &str) -> String {
    if reference.starts_with(PACKAGED_PREFIX) {
        return reference.to_string();
    }
    let p = PathBuf::from(reference);
    let joined = if p.is_absolute() { p } else { base_dir.join(p) };
    joined
        .canonicalize()
        .unwrap_or(joined)
        .to_string_lossy()
        .into_owned()
}

pub(crate) fn base_dir_of(path: &Path) -> PathBuf {
    path.parent()
        .map(Path::to_path_buf)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."))
}
