//! Deterministic, configuration-driven simulation of battery-electric vehicles
//! over prescribed drive cycles.
//!
//! A run is described by two YAML files, a vehicle and a testcase. The engine
//! steps a fixed set of modules (road load, driveline, regenerative braking,
//! cabin and auxiliary loads, charging, battery, thermal trends) over the
//! resampled speed trace, and [`post`] turns the result into a case package.
//!
//! ```no_run
//! let vehicle = bevsim::config::load_vehicle("case/vehicle.yaml")?;
//! let testcase = bevsim::config::load_testcase("case/testcase.yaml")?;
//! let run = bevsim::simulate(&vehicle, &testcase)?;
//! println!("final SoC {:.3}", run.last().soc);
//! # Ok::<(), bevsim::Error>(())
//! ```

pub mod battery;
pub mod charging;
pub mod cli;
pub mod config;
pub mod driveline;
pub mod engine;
pub mod error;
pub mod loads;
pub mod longitudinal;
pub mod plugin;
pub mod post;
pub mod regen;
pub mod resources;
pub mod route;
pub mod thermal;

pub use engine::{build_engine, simulate, Engine, RunOutput, SimState};
pub use error::{Error, Result};
