//! High-precision tools for the quadratic family z² + c: special parameters,
//! Böttcher coordinates, decorated model sets, deep-zoom rendering and
//! numerical verification.

pub mod bottcher;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod hp;
pub mod model;
pub mod render;
mod newton;
pub mod solvers;
pub mod verify;

pub use dynamics::{find_cycle, iterate, CycleKind, CycleRecord, IterateOptions, OrbitRecord, OrbitState};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hp::{HpComplex, DEFAULT_PRECISION};
pub use num_complex::Complex64;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
