use alloc::string::String;

use crate::complex::CellId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("degenerate facet {0}")]
    DegenerateFacet(String),
    #[error("duplicate facet {0}")]
    DuplicateFacet(String),
    #[error("not a pseudomanifold at {0}")]
    NonPseudomanifold(CellId),
    #[error("duplicate cell {0}")]
    DuplicateCell(CellId),
    #[error("cell {cell} references missing face {face}")]
    MissingFace { cell: CellId, face: CellId },
    #[error("cell {cell} lists face {face} of the wrong dimension")]
    BadDimensionDrop { cell: CellId, face: CellId },
    #[error("boundary of {0} is not a single cycle")]
    BoundaryNotCycle(CellId),
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("not a closed surface at {0}")]
    NotClosedSurface(CellId),
    #[error("bad dimension {0}")]
    BadDimension(usize),
    #[error("missing value for {0}")]
    MissingValue(CellId),
    #[error("function is not a discrete Morse function at {0}")]
    InvalidFunction(CellId),
    #[error("vector field is invalid at {0}")]
    InvalidField(CellId),
    #[error("vector field has a closed path through {0}")]
    CyclicField(CellId),
    #[error("expected one critical vertex, found {0}")]
    MultipleRoots(usize),
    #[error("gradient paths split at {0}")]
    SplitDetected(CellId),
    #[error("{0} is critical")]
    StartIsCritical(CellId),
    #[error("inconsistent field at {0}")]
    InconsistentField(CellId),
    #[error("path from {start} ends at {found}")]
    PathEscapes { start: CellId, found: CellId },
    #[error("{0} is not an edge")]
    NotAnEdge(CellId),
    #[error("{0} is not a 2-cell")]
    NotA2Cell(CellId),
    #[error("bad chord {u}-{w} in {cell}")]
    BadChord { cell: CellId, u: CellId, w: CellId },
    #[error("{0} is not a top-dimensional cell")]
    NotTopCell(CellId),
    #[error("vertex {vertex} is not on {cell}")]
    VertexNotOnCell { cell: CellId, vertex: CellId },
    #[error("{0} is not a simplex")]
    NotSimplicial(CellId),
    #[error("input field is not perfect")]
    NotPerfectInput,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no non-critical top cell at {0}")]
    NoEligibleBeta(CellId),
    #[error("expected {expected} critical edges, found {found}")]
    WrongCriticalCount { expected: usize, found: usize },
    #[error("nothing to decompose")]
    NothingToDecompose,
    #[error("input surface is not orientable")]
    NonOrientableInput,
    #[error("curve does not separate the surface")]
    NotSeparating,
    #[error("boundary curve has {0} components")]
    DisjointCircles(usize),
    #[error("unbalanced boundary critical cells: {vertices} vertices, {edges} edges")]
    UnbalancedBoundaryCriticals { vertices: usize, edges: usize },
    #[error("boundary critical cell {0} on the circle")]
    BoundaryCriticalPresent(CellId),
    #[error("operation needs a surface")]
    Unsupported,
}

pub type Result<T> = core::result::Result<T, Error>;
