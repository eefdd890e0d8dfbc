//! File formats, bundled scenarios, report emission and the commands of
//! the `evoform` binary, on top of `evoform-core`.

pub mod bundled;
pub mod error;
pub mod gridcsv;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use report::{emit, Format, Report};
