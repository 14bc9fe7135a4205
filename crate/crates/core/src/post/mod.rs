//! Post-processing of a finished run: energy budget, timeseries, plots, and
//! the on-disk case package.

pub mod budget;
pub mod package;
pub mod plots;
pub mod timeseries;

pub use budget::{integrate_budget, net_identity, EnergyBudget};
pub use package::{sha256_hex, summarize, write_case_package, PackageInputs, RunSummary, ARTIFACTS};
pub use plots::{render_plots, Plot};
pub use timeseries::{format_sig6, timeseries_string, write_timeseries, COLUMNS};
