//! Write a full case package (summary, timeseries, inputs, plots) into a
//! directory.
//!
//!     cargo run --example case_package [out_dir]

use std::path::PathBuf;

use bevsim::post::{write_case_package, PackageInputs, ARTIFACTS};
use bevsim::resources::{self, Kind};
use bevsim::simulate;

fn main() -> bevsim::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("bevsim_case_package"));
    let vehicle_text = resources::text(Kind::Archetype, "midsize_sedan").expect("packaged");
    let testcase_text = resources::text(Kind::Testcase, "highway").expect("packaged");
    let vehicle = resources::vehicle("midsize_sedan")?;
    let testcase = resources::testcase("highway")?;

    let run = simulate(&vehicle, &testcase)?;
    let inputs = PackageInputs {
        vehicle_source: "packaged:midsize_sedan",
        vehicle_text: &vehicle_text,
        vehicle: &vehicle,
        testcase_source: "packaged:highway",
        testcase_text: &testcase_text,
        testcase: &testcase,
    };
    let dir = write_case_package(&run, &inputs, &out, "highway_demo", true)?;
    println!("wrote {}", dir.display());
    for f in ARTIFACTS {
        let len = std::fs::metadata(dir.join(f)).map(|m| m.len()).unwrap_or(0);
        println!("  {f:<26} {len:>9} bytes");
    }
    Ok(())
}
