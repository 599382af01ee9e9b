//! Exact spectral calculus over a finite, refinable measure space.
//!
//! The model algebra consists of self-adjoint elements represented as
//! per-cell affine functions `a + b*u` of a uniform cell coordinate `u`,
//! over a versioned partition of a probability space. All arithmetic is
//! arbitrary-precision rational, so every identity the library asserts
//! (trace linearity, moment/quantile equality, folding validity, the
//! three-way symmetric decomposition) holds exactly, not approximately.
//!
//! Module map:
//! - [`cellspace`]: the versioned partition substrate and its refinements
//! - [`element`]: elements, projections, traces, moments, supports
//! - [`spectra`]: spectral distributions, quantile functions, the
//!   equivalence and symmetry predicates
//! - [`scales`]: projection scales, step functions, Darboux sums and the
//!   Riemann integral calculus
//! - [`folding`]: mediators, superprojections, gamma foldings, local
//!   folding and small packing
//! - [`decompose`]: the end-to-end decomposition pipelines and verifier

pub mod cellspace;
pub mod decompose;
pub mod element;
pub mod error;
pub mod folding;
pub mod rational;
pub mod scales;
pub mod spectra;

pub use cellspace::{Cell, CellId, CellSpace, Lineage, Refinement, Refiner};
pub use decompose::{
    fold_as_symmetric, stabilize_decompose, three_symmetric, verify_decomposition, DecompFailure,
    DecompReport, Decomposition, Provenance,
};
pub use element::{
    copy_onto, from_atoms, linear_combine, map_step_values, moment, orthogonal, pos_neg_parts,
    quasitrace, sup_norm, support, Element, Projection,
};
pub use error::CalcError;
pub use folding::{
    folding_sum, gamma_folding, local_folding, mediator, small_packing, validate_folding, Folding,
    FoldingReport, FoldingViolation, SmallPacking, Superprojection,
};
pub use rational::Rat;
pub use scales::{
    concat, darboux_bounds, make_scale, rescale_dims, riemann_integral, riemann_integral_over,
    spectral_scale, translate, Direction, Scale, StepFunction,
};
pub use spectra::{
    dist_moment, distribution, equivalent, is_spectrally_symmetric, quantile, quantile_moment,
    QuantileFunction, QuantilePiece, SpectralDistribution,
};

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, CalcError>;
