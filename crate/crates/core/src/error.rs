use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree {degree} out of range (top degree {max})")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("subspace is not closed under the coboundary")]
    NotDifferentialClosed,
    #[error("boundary set is not a closed collar: cell {cell} is marked but its face {face} is not")]
    NotACollar { cell: usize, face: usize },
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generator {generator}: {reason}")]
    NotSignedPermutation { generator: String, reason: String },
    #[error("generator {generator} does not commute with the coboundary in degree {degree}")]
    NonCommuting { generator: String, degree: usize },
    #[error("group relation `{relation}` fails")]
    RelationFailed { relation: String },
    #[error("unknown group element {0}")]
    UnknownElement(String),
    #[error("the generated group has more than {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("operation requires a finite group; the action is by a free abelian group")]
    InfiniteGroup,
    #[error("the action does not preserve the inner product on cell {cell} (degree {degree})")]
    InnerProductNotPreserved { degree: usize, cell: usize },
    #[error("inner product weight on cell {cell} is not positive")]
    NonPositiveWeight { cell: usize },
    #[error("cochain support touches the boundary collar at cell {cell} (degree {degree})")]
    SupportTouchesCollar { degree: usize, cell: usize },
    #[error("window radius {radius} is too small; radius {required} is required")]
    WindowTooSmall { radius: usize, required: usize },
    #[error("cochain has nonzero deck average")]
    NonzeroAverage,
    #[error("cochain of degree {degree} is not closed")]
    NotClosed { degree: usize },
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("cutoff weights over the orbit of quotient cell {cell} (degree {degree}) sum to {sum}, not 1")]
    CutoffNotNormalized { degree: usize, cell: usize, sum: String },
    #[error("invalid periodic cover: {0}")]
    InvalidCover(String),
}

pub type Result<T> = std::result::Result<T, Error>;
