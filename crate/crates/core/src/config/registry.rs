//! Maps model-selection strings from vehicle YAML to runtime constructors.

use std::fmt;

use super::{TestcaseConfig, VehicleConfig};
use crate::battery::{self, BatteryModel};
use crate::charging::{self, ChargerParams};
use crate::driveline::{self, EfficiencyModel};
use crate::error::{Error, Result};
use crate::loads::{self, CabinModel};
use crate::plugin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelSlot {
    Motor,
    Battery,
    Hvac,
    Charger,
}

impl ModelSlot {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelSlot::Motor => "motor",
            ModelSlot::Battery => "battery",
            ModelSlot::Hvac => "hvac",
            ModelSlot::Charger => "charger",
        }
    }
}

impl fmt::Display for ModelSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a factory may read when instantiating a model.
#[derive(Debug, Clone, Copy)]
pub struct ModelContext<'a> {
    pub vehicle: &'a VehicleConfig,
    pub testcase: &'a TestcaseConfig,
}

impl ModelContext<'_> {
    /// Nominal update interval for a slot running at `divisor`.
    pub fn dt_eff(&self, divisor: u32) -> f64 {
        self.testcase.sim.dt_s * f64::from(divisor)
    }
}

pub type EfficiencyFactory = fn(&ModelContext<'_>) -> Result<EfficiencyModel>;
pub type BatteryFactory = fn(&ModelContext<'_>) -> Result<Box<dyn BatteryModel>>;
pub type CabinFactory = fn(&ModelContext<'_>) -> Result<Box<dyn CabinModel>>;
pub type ChargerFactory = fn(&ModelContext<'_>) -> Result<ChargerParams>;

/// Constructor handle returned by [`Registry::resolve`].
#[derive(Clone, Copy)]
pub enum Factory {
    Motor(EfficiencyFactory),
    Battery(BatteryFactory),
    Hvac(CabinFactory),
    Charger(ChargerFactory),
}

impl fmt::Debug for Factory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slot = match self {
            Factory::Motor(_) => "motor",
            Factory::Battery(_) => "battery",
            Factory::Hvac(_) => "hvac",
            Factory::Charger(_) => "charger",
        };
        write!(f, "Factory({slot})")
    }
}

pub struct Registry {
    motor: Vec<(&'static str, EfficiencyFactory)>,
    battery: Vec<(&'static str, BatteryFactory)>,
    hvac: Vec<(&'static str, CabinFactory)>,
    charger: Vec<(&'static str, ChargerFactory)>,
}

impl Registry {
    pub fn builtin() -> Self {
        Self {
            motor: vec![
                ("analytical", driveline::analytical_factory),
                ("efficiency_map", driveline::efficiency_map_factory),
            ],
            battery: vec![
                ("rint", battery::rint_factory),
                ("ecm_2rc", battery::ecm2rc_factory),
                ("external", plugin::external_battery_factory),
            ],
            hvac: vec![
                ("lumped_cabin", loads::lumped_cabin_factory),
                ("external", plugin::external_cabin_factory),
            ],
            charger: vec![("ac_basic", charging::ac_basic_factory)],
        }
    }

    /// Registered keys for a slot, in registration order.
    pub fn keys(&self, slot: ModelSlot) -> Vec<&'static str> {
        match slot {
            ModelSlot::Motor => self.motor.iter().map(|(k, _)| *k).collect(),
            ModelSlot::Battery => self.battery.iter().map(|(k, _)| *k).collect(),
            ModelSlot::Hvac => self.hvac.iter().map(|(k, _)| *k).collect(),
            ModelSlot::Charger => self.charger.iter().map(|(k, _)| *k).collect(),
        }
    }

    pub fn check(&self, slot: ModelSlot, key: &str) -> Result<()> {
        self.resolve(slot, key).map(|_| ())
    }

    pub fn resolve(&self, slot: ModelSlot, key: &str) -> Result<Factory> {
        fn find<F: Copy>(table: &[(&'static str, F)], key: &str) -> Option<F> {
            table.iter().find(|(k, _)| *k == key).map(|(_, f)| *f)
        }
        let found = match slot {
            ModelSlot::Motor => find(&self.motor, key).map(Factory::Motor),
            ModelSlot::Battery => find(&self.battery, key).map(Factory::Battery),
            ModelSlot::Hvac => find(&self.hvac, key).map(Factory::Hvac),
            ModelSlot::Charger => find(&self.charger, key).map(Factory::Charger),
        };
        found.ok_or_else(|| Error::UnknownModel {
            slot: slot.as_str(),
            key: key.to_string(),
            available: self.keys(slot),
        })
    }

    pub fn battery(&self, key: &str) -> Result<BatteryFactory> {
        match self.resolve(ModelSlot::Battery, key)? {
            Factory::Battery(f) => Ok(f),
            _ => unreachable!(),
        }
    }

    pub fn hvac(&self, key: &str) -> Result<CabinFactory> {
        match self.resolve(ModelSlot::Hvac, key)? {
            Factory::Hvac(f) => Ok(f),
            _ => unreachable!(),
        }
    }

    pub fn motor(&self, key: &str) -> Result<EfficiencyFactory> {
        match self.resolve(ModelSlot::Motor, key)? {
            Factory::Motor(f) => Ok(f),
            _ => unreachable!(),
        }
    }

    pub fn charger(&self, key: &str) -> Result<ChargerFactory> {
        match self.resolve(ModelSlot::Charger, key)? {
            Factory::Charger(f) => Ok(f),
            _ => unreachable!(),
        }
    }
}
