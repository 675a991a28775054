use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("dataset `{0}` has a chance level of 1, normalization is undefined")]
    DegenerateChance(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("missing cells where complete columns are required: {}", format_cells(.0))]
    Incomplete(Vec<(String, String)>),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn format_cells(cells: &[(String, String)]) -> String {
    const SHOWN: usize = 10;
    let mut out = cells
        .iter()
        .take(SHOWN)
        .map(|(m, d)| format!("({m}, {d})"))
        .collect::<Vec<_>>()
        .join(", ");
    if cells.len() > SHOWN {
        out.push_str(&format!(" and {} more", cells.len() - SHOWN));
    }
    out
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
