//! Polygonal finite elements with an assumed-strain (least-squares projected)
//! strain field, coupled to an integral-type nonlocal isotropic damage model
//! for quasi-brittle fracture.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: polygonal meshes, structured and mapped generators, polytree
//!   refinement with hanging nodes stored as ring vertices, text I/O.
//! - [`basis`]: piecewise-linear shape functions on the centroid fan,
//!   sub-triangle quadrature and the compatible strain operator.
//! - [`projection`]: the element-wise linear strain projection and the
//!   assumed-strain operator `B̃`.
//! - [`material`]: damaged elasticity, Mazars / modified von Mises equivalent
//!   strains with their derivatives, exponential softening, history update.
//! - [`nonlocal`]: kernels, the precomputed interaction table and nonlocal
//!   averaging.
//! - [`solver`]: assembly of internal forces and the consistent
//!   local + nonlocal tangent, displacement-controlled Newton stepping.
//! - [`bench`]: linear-elastic path, Kirsch plate-with-hole study, patch test
//!   and benchmark presets.
//! - [`cli`]: run configuration files, CSV / VTK output and the command
//!   drivers behind the `polyfrac` binary.
//!
//! Runnable walkthroughs of each capability live in this crate's `examples/`
//! directory (`cargo run --release --example <name>`).

pub mod basis;
pub mod bench;
pub mod cli;
pub mod error;
pub mod grid;
pub mod material;
pub mod mesh;
pub mod nonlocal;
pub mod projection;
pub mod solver;

pub use error::{Error, Result};

/// 2D point type used throughout the crate.
pub type Point = nalgebra::Point2<f64>;
