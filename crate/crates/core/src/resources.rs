//! Packaged archetypes, testcases, drive cycles, and efficiency maps.
//!
//! The packaged set is compiled into the binary. Setting `BEVSIM_RESOURCE_DIR`
//! to a directory with any of the subdirectories `archetypes/`, `testcases/`,
//! `cycles/`, `maps/` adds files to the set (or replaces packaged entries of
//! the same name) without rebuilding.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::config::{TestcaseConfig, VehicleConfig};
use crate::driveline::EfficiencyMap;
use crate::error::{Error, Result};
use crate::route::{self, CycleError, DriveCycle};

pub const RESOURCE_DIR_ENV: &str = "BEVSIM_RESOURCE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Archetype,
    Testcase,
    Cycle,
    Map,
}

impl Kind {
    fn subdir(self) -> &'static str {
        match self {
            Kind::Archetype => "archetypes",
            Kind::Testcase => "testcases",
            Kind::Cycle => "cycles",
            Kind::Map => "maps",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Kind::Archetype | Kind::Testcase => "yaml",
            Kind::Cycle | Kind::Map => "csv",
        }
    }
}

macro_rules! embed {
    ($dir:literal, $name:literal, $ext:literal) => {
        (
            $name,
            include_str!(concat!("../data/", $dir, "/", $name, ".", $ext)),
        )
    };
}

const ARCHETYPES: &[(&str, &str)] = &[
    embed!("archetypes", "city_hatchback", "yaml"),
    embed!("archetypes", "compact_suv_ecm", "yaml"),
    embed!("archetypes", "midsize_sedan", "yaml"),
];

const TESTCASES: &[(&str, &str)] = &[
    embed!("testcases", "ac_charging", "yaml"),
    embed!("testcases", "city_stop_start", "yaml"),
    embed!("testcases", "cold_morning", "yaml"),
    embed!("testcases", "highway", "yaml"),
    embed!("testcases", "mixed_23km", "yaml"),
    embed!("testcases", "parametric_commute", "yaml"),
];

const CYCLES: &[(&str, &str)] = &[
    embed!("cycles", "highway_synthetic", "csv"),
    embed!("cycles", "mixed_synthetic", "csv"),
    embed!("cycles", "urban_stop_start", "csv"),
];

const MAPS: &[(&str, &str)] = &[embed!("maps", "compact_pmsm", "csv")];

fn embedded(kind: Kind) -> &'static [(&'static str, &'static str)] {
    match kind {
        Kind::Archetype => ARCHETYPES,
        Kind::Testcase => TESTCASES,
        Kind::Cycle => CYCLES,
        Kind::Map => MAPS,
    }
}

fn override_dir(kind: Kind) -> Option<PathBuf> {
    let root = std::env::var_os(RESOURCE_DIR_ENV)?;
    let dir = PathBuf::from(root).join(kind.subdir());
    dir.is_dir().then_some(dir)
}

/// Names available for `kind`, sorted.
pub fn names(kind: Kind) -> Vec<String> {
    let mut all: BTreeMap<String, ()> = embedded(kind)
        .iter()
        .map(|(n, _)| (n.to_string(), ()))
        .collect();
    if let Some(dir) = override_dir(kind) {
        if let Ok(entries) = std::fs::read_dir(dir) {
            for entry in entries.flatten() {
                let path = entry.path();
                if path.extension().and_then(|e| e.to_str()) == Some(kind.extension()) {
                    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                        all.insert(stem.to_string(), ());
                    }
                }
            }
        }
    }
    all.into_keys().collect()
}

/// Raw text of a packaged resource, if it exists.
pub fn text(kind: Kind, name: &str) -> Option<String> {
    if let Some(dir) = override_dir(kind) {
        let path = dir.join(format!("{name}.{}", kind.extension()));
        if let Ok(t) = std::fs::read_to_string(path) {
            return Some(t);
        }
    }
    embedded(kind)
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
}

/// Packaged drive cycle at its native sampling.
pub fn cycle(name: &str) -> Result<DriveCycle> {
    let text = text(Kind::Cycle, name).ok_or_else(|| {
        Error::Cycle(CycleError::Format {
            name: name.to_string(),
            message: format!(
                "no packaged cycle with this name (available: {})",
                names(Kind::Cycle).join(", ")
            ),
        })
    })?;
    Ok(route::parse_cycle_csv(name, &text)?)
}

/// Packaged efficiency map.
pub fn map(name: &str) -> Result<EfficiencyMap> {
    let text = text(Kind::Map, name).ok_or_else(|| Error::MapFormat {
        path: format!("packaged:{name}"),
        message: format!(
            "no packaged map with this name (available: {})",
            names(Kind::Map).join(", ")
        ),
    })?;
    EfficiencyMap::parse(&format!("packaged:{name}"), &text)
}

/// Packaged vehicle archetype, parsed and validated.
pub fn vehicle(name: &str) -> Result<VehicleConfig> {
    let text = text(Kind::Archetype, name).ok_or_else(|| {
        Error::Usage(format!(
            "no packaged archetype `{name}` (available: {})",
            names(Kind::Archetype).join(", ")
        ))
    })?;
    VehicleConfig::from_yaml_str(&text, Path::new("."), &format!("packaged:{name}"))
}

/// Packaged testcase, parsed and validated.
pub fn testcase(name: &str) -> Result<TestcaseConfig> {
    let text = text(Kind::Testcase, name).ok_or_else(|| {
        Error::Usage(format!(
            "no packaged testcase `{name}` (available: {})",
            names(Kind::Testcase).join(", ")
        ))
    })?;
    TestcaseConfig::from_yaml_str(&text, Path::new("."), &format!("packaged:{name}"))
}

/// A runnable pairing of a packaged archetype and testcase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackagedExample {
    pub name: &'static str,
    pub vehicle: &'static str,
    pub testcase: &'static str,
    pub description: &'static str,
}

pub const EXAMPLES: &[PackagedExample] = &[
    PackagedExample {
        name: "hatchback_mixed",
        vehicle: "city_hatchback",
        testcase: "mixed_23km",
        description: "map-based motor efficiency on the mixed cycle",
    },
    PackagedExample {
        name: "sedan_city",
        vehicle: "midsize_sedan",
        testcase: "city_stop_start",
        description: "urban stop-start driving",
    },
    PackagedExample {
        name: "sedan_highway",
        vehicle: "midsize_sedan",
        testcase: "highway",
        description: "steady highway run with headwind",
    },
    PackagedExample {
        name: "sedan_mixed",
        vehicle: "midsize_sedan",
        testcase: "mixed_23km",
        description: "mixed 1800 s cycle, about 23 km",
    },
    PackagedExample {
        name: "sedan_parametric",
        vehicle: "midsize_sedan",
        testcase: "parametric_commute",
        description: "segment-defined commute on a slight grade",
    },
    PackagedExample {
        name: "suv_charging",
        vehicle: "compact_suv_ecm",
        testcase: "ac_charging",
        description: "two-RC battery on an AC wallbox, CC then CV",
    },
    PackagedExample {
        name: "suv_cold_mixed",
        vehicle: "compact_suv_ecm",
        testcase: "cold_morning",
        description: "two-RC battery, cabin heating from a -5 C soak",
    },
];

pub fn example(name: &str) -> Option<&'static PackagedExample> {
    EXAMPLES.iter().find(|e| e.name == name)
}
