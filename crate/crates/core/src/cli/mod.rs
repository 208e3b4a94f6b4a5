//! Configuration files, result files and the command drivers used by the
//! `polyfrac` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{parse_config, parse_config_str, RunConfig, Units};
pub use output::{emit_curve, emit_vtk, read_curve, write_curve, write_vtk, CURVE_HEADER};
