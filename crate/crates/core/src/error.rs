use alloc::string::String;
use thiserror::Error;

/// Error raised while parsing an expression, positioned by byte offset.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("function `{name}` takes 1 argument, got {got}")]
    Arity { name: String, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("point is outside the domain box on axis {axis} ({value} not in [{lo}, {hi}])")]
    OutOfDomain {
        axis: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("point has {got} coordinates, chart has dimension {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("axis {axis} out of range for dimension {dimension}")]
    AxisOutOfRange { axis: usize, dimension: usize },
    #[error("finite-difference stencil on axis {axis} leaves the grid (need margin {step})")]
    GridMargin { axis: usize, step: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("forms or fields live on different charts")]
    ChartMismatch,
    #[error("degree {degree} exceeds chart dimension {dimension}")]
    DegreeOverflow { degree: usize, dimension: usize },
    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("exterior derivative of a top-degree form")]
    TopDegree,
    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),
    #[error("directions are linearly dependent (relative singular value {0:e})")]
    DependentDirections(f64),
    #[error("too many directions: {got} > dimension {dimension}")]
    TooManyDirections { got: usize, dimension: usize },
    #[error("sample plan yields {got} points, at least {min} required")]
    SamplePlanTooSmall { got: usize, min: usize },
    #[error("invalid sample plan: {0}")]
    InvalidSamplePlan(String),
    #[error("invalid balance system: {0}")]
    InvalidBalance(String),
    #[error("seed has no null direction")]
    NoNullDirection,
    #[error("invalid trace parameter: {0}")]
    InvalidTraceParameter(String),
    #[error("trace set is disconnected from the base point (components {0:?})")]
    Disconnected(alloc::vec::Vec<usize>),
    #[error("operation requires a degree-1 evolutionary form, got degree {0}")]
    UnsupportedDegree(usize),
    #[error("classification argument out of range: {0}")]
    ClassifyRange(String),
    #[error("classification table: {0}")]
    Table(String),
}
