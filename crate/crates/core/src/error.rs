//! Error type shared by all modules.

use crate::cellspace::CellId;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("total mass must be strictly positive, got {0}")]
    NonPositiveMass(String),
    #[error("atom mass must be strictly positive, got {0}")]
    NonPositiveAtomMass(String),
    #[error("unknown cell id {0}")]
    UnknownCell(CellId),
    #[error("split parameter must lie strictly between 0 and 1, got {0}")]
    SplitOutOfRange(String),
    #[error("space version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u64, found: u64 },
    #[error("refinement expects version {expected}, value is tagged {found}")]
    RefinementVersionMismatch { expected: u64, found: u64 },
    #[error("atom masses sum to {got}, exceeding the total mass {total}")]
    MassesExceedTotal { got: String, total: String },
    #[error("total masses differ: {left} vs {right}")]
    TotalMassMismatch { left: String, right: String },
    #[error("element is not a projection on cell {0}")]
    NotAProjection(CellId),
    #[error("element is not a step element (cell {0} carries a coordinate term)")]
    NotStep(CellId),
    #[error("target projection too small: needs dimension {needed}, has {available}")]
    TargetTooSmall { needed: String, available: String },
    #[error("target projection overlaps the element's support at cell {0}")]
    TargetNotOrthogonal(CellId),
    #[error("moment order must be >= 1")]
    ZeroMomentOrder,
    #[error("duplicate cell {0} in scale run")]
    DuplicateScaleCell(CellId),
    #[error("scale run exceeds the total mass: base + run = {got} > {total}")]
    ScaleTooLong { got: String, total: String },
    #[error("scale base overlaps the run at cell {0}")]
    ScaleBaseOverlapsRun(CellId),
    #[error("evaluation point {t} outside the dimension range [{lo}, {hi}]")]
    EvalOutOfRange { t: String, lo: String, hi: String },
    #[error("integrand domain [{flo}, {fhi}] does not match the dimension range [{lo}, {hi}]")]
    DomainMismatch { flo: String, fhi: String, lo: String, hi: String },
    #[error("partition does not cover the dimension range")]
    PartitionOutsideRange,
    #[error("downward translation requires P <= the initial projection")]
    TranslateNotUnderBase,
    #[error("upward translation requires P orthogonal to the terminal projection")]
    TranslateNotOrthogonal,
    #[error("scales have non-orthogonal widths (shared cell {0})")]
    WidthsNotOrthogonal(CellId),
    #[error("rescale factor must be strictly positive, got {0}")]
    NonPositiveRescale(String),
    #[error("step function breakpoints must be strictly increasing")]
    BadStepFunction,
    #[error("step function domains differ")]
    StepDomainMismatch,
    #[error("superprojection members must be pairwise orthogonal (shared cell {0})")]
    SuperprojectionOverlap(CellId),
    #[error("superprojection requires D(P1)=D(P3) and D(P2)=D(P4)")]
    SuperprojectionUnbalanced,
    #[error("type condition violated: alpha*D(P1) = {lhs} but beta*D(P2) = {rhs}")]
    TypeConditionViolated { lhs: String, rhs: String },
    #[error("degenerate superprojection: member {0} is the zero projection")]
    DegenerateProjection(usize),
    #[error("foldings must share the arity k; found {0} and {1}")]
    FoldingArityMismatch(usize, usize),
    #[error("folding supports overlap at cell {0}")]
    FoldingSupportsOverlap(CellId),
    #[error("local folding: element must be positive, cell {0} carries a negative value")]
    NotPositive(CellId),
    #[error("local folding: X is not supported under P (cell {0})")]
    NotUnderP(CellId),
    #[error("local folding: Q is not a subprojection of P (cell {0})")]
    QNotUnderP(CellId),
    #[error("local folding: X is not orthogonal to Q (cell {0})")]
    XNotOrthogonalToQ(CellId),
    #[error("local folding: trace condition violated: q(X) = {qx} but beta*D(Q) = {bq}")]
    TraceConditionViolated { qx: String, bq: String },
    #[error("local folding: room condition violated: D(P) = {dp} < 2*[D(s(X)) + D(Q)] = {needed}")]
    RoomConditionViolated { dp: String, needed: String },
    #[error("local folding: beta must be strictly positive, got {0}")]
    NonPositiveBeta(String),
    #[error("small packing: X must be orthogonal to P (cell {0})")]
    PackingNotOrthogonal(CellId),
    #[error("small packing: Q must be non-zero")]
    PackingZeroQ,
    #[error("quasitrace must vanish, got {0}")]
    TraceNonzero(String),
    #[error("support too large: D(s(X)) = {got}, the construction needs < {bound}")]
    SupportTooLarge { got: String, bound: String },
    #[error("full support: D(s(X)) equals the total mass; use the stabilized pipeline")]
    FullSupport,
    #[error("cell budget exceeded: produced {got} cells, bound was {bound} (this is a bug)")]
    CostBoundExceeded { got: usize, bound: usize },
    #[error("internal verification failed: {0}")]
    InternalVerification(String),
}
