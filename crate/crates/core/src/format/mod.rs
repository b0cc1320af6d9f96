//! File formats: the system description and report rendering.

pub mod report;
pub mod system_file;

pub use report::*;
pub use system_file::{parse_system_file, SystemFile};
