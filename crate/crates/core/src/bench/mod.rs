//! Verification problems and benchmark setups: the linear-elastic solve,
//! the Kirsch plate-with-hole field and convergence study, error norms,
//! patch tests and preset configurations.

mod convergence;
mod elastic;
mod kirsch;
mod norms;
mod patch;
pub mod presets;

pub use convergence::{fit_slope, ConvergenceReport, ConvergenceRow, PlateHoleStudy};
pub use elastic::solve_elastic;
pub use kirsch::{kirsch_exact, KirschField};
pub use norms::error_norms;
pub use patch::{hanging_node_patch_mesh, patch_test, AffineField, PatchReport};
pub use presets::{preset, preset_benchmarks, Preset};
