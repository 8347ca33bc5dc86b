//! Text formats: the exact instance file, sweep reports (JSON, optional
//! CSV) and the shadow SVG.

mod instance;
mod report;
mod svg;

pub use instance::{parse_instance, serialize_instance};
pub use report::{csv_report, JsonRational, ReportFile, ReportRecord};
pub use svg::shadow_svg;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header key {0}")]
    MissingKey(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("JSON: {0}")]
    Json(String),
}
