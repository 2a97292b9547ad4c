//! Numerical diagnostics for composition operators `C_φ f = f∘φ` on
//! Dirichlet-type spaces of the unit disc.

pub mod boundary_sets;
pub mod capacity;
pub mod compop_diag;
pub mod constructions;
pub mod error;
pub mod hs_diag;
pub mod quadrature;
pub mod series;
pub mod spaces;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::{BoundaryGrid, PowerSeries};
pub use symbols::{Symbol, SymbolSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
