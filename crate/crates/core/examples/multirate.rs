//! Slow-module rate divisors: execution counts and their effect on results.

use bevsim::config::RateDivisors;
use bevsim::{resources, simulate};

fn main() -> bevsim::Result<()> {
    let testcase = resources::testcase("mixed_23km")?;
    let base = resources::vehicle("midsize_sedan")?;
    let reference = {
        let mut v = base.clone();
        v.rate_divisors = RateDivisors::all_ones();
        simulate(&v, &testcase)?
    };
    println!("{:>4} {:>9} {:>9} {:>12} {:>12} {:>10}", "d", "battery", "thermal", "final SoC", "dSoC vs d=1", "T_batt C");
    for d in [1, 2, 5, 10, 20, 50] {
        let mut v = base.clone();
        v.rate_divisors = RateDivisors {
            battery: d,
            loads_hvac: d,
            thermal_trends: d,
            ..RateDivisors::all_ones()
        };
        let run = simulate(&v, &testcase)?;
        println!(
            "{d:>4} {:>9} {:>9} {:>12.8} {:>12.2e} {:>10.3}",
            run.executions.battery,
            run.executions.thermal_trends,
            run.last().soc,
            run.last().soc - reference.last().soc,
            run.last().t_batt_c
        );
    }
    Ok(())
}
