pub mod analysis;
pub mod cli;
pub mod error;
pub mod format;
pub mod geometry;
pub mod symbolic;
pub mod system;
pub mod transform;

pub use error::{Error, Result};
