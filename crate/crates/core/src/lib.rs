//! Open three-spin XX chain between two thermal baths.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod global_me;
mod linalg;
pub mod local_me;
pub mod model;
pub mod quadrature;
pub mod spin_algebra;
pub mod steady_state;
pub mod transport;

pub use error::{Error, Result};
