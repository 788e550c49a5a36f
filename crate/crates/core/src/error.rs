use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("entry ({i}, {j}) is not a finite nonnegative real: {value}")]
    BadEntry { i: usize, j: usize, value: f64 },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("point counts differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{name} must be {expected}, got {value}")]
    InvalidParameter { name: &'static str, expected: &'static str, value: f64 },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} has {size} elements, above the configured cap of {cap}; {hint}")]
    CapExceeded { what: &'static str, size: usize, cap: usize, hint: &'static str },

    #[error("coordinate {value} is outside the torus range [0, 1)")]
    OutOfTorus { value: f64 },

    #[error("point dimension {got} does not match {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate point {value} at positions {first} and {second}")]
    DuplicatePoint { value: f64, first: usize, second: usize },

    #[error("ball around point {center} at radius {radius} has zero mass")]
    ZeroMassBall { center: usize, radius: f64 },

    #[error("total mass must be positive")]
    ZeroTotalMass,

    #[error("face {axis} ({side}) of the cube sample is empty")]
    EmptyFace { axis: usize, side: &'static str },

    #[error("opposite faces touch: face gap is {gap}")]
    DegenerateGap { gap: f64 },

    #[error("boundary condition fails on axis {axis} at the {side} face: f = {value}, target = {target}")]
    BoundaryCondition { axis: usize, side: &'static str, value: f64, target: f64 },

    #[error("no point within tolerance {tol}; best residual {residual}")]
    NoConvergence { tol: f64, residual: f64 },

    #[error("witness search for target {target:?} failed: {source}")]
    WitnessFailed { target: Vec<f64>, source: Box<Error> },

    #[error("need at least {needed} data points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
