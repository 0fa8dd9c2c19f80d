//! Reproducible runs: configuration files, CSV result tables, the guided
//! eigenmode cache, parameter sweeps, and figure presets.

pub mod cache;
pub mod commands;
pub mod config;
pub mod presets;
pub mod table;

pub use cache::ModeCache;
pub use commands::{cmd_ddi, cmd_dynamics, cmd_figure, cmd_modes, cmd_rates};
pub use config::RunConfig;
pub use table::ResultTable;
