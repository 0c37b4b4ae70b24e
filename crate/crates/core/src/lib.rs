//! Discrete centroaffine indefinite surfaces on Z^2 lattices.
//!
//! Invariant extraction, integrability checks, synthesis from coefficient data,
//! Laplacian and convexity analysis, and mesh export. Every algorithm is generic
//! over [`Scalar`], with an exact rational backend and an `f64` backend.

pub mod analysis;
pub mod cli;
pub mod compat;
pub mod error;
pub mod export;
pub mod geometry;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod scalar;
pub mod synthesis;

pub use analysis::{
    analyze, constant_convex_check, convexity_at, convexity_from_coefficients, eigen_scalar,
    harmonic_check, harmonic_constant_check, laplacian, star_volumes, AnalysisReport, Convexity,
    SiteAnalysis,
};
pub use compat::{
    constant_family, is_affine_sphere, matrix_residual, scalar_residuals, tzitzeica_residuals,
    tzitzeica_to_centroaffine, CompatResiduals, TzitzeicaData, TzitzeicaSample,
};
pub use error::{Assumption, Error, Result};
pub use geometry::{det3, Mat3, Point3};
pub use invariants::{
    extract_abc, extract_alpha_beta, extract_field, extract_gamma_delta, triangle_volume,
    CoefficientField, CoefficientSet, CoefficientSource,
};
pub use lattice::{validate_window, LatticeWindow, Rect, Site, ValidationReport};
pub use scalar::{Rational, Scalar, Tolerance};
pub use synthesis::{
    generate_example, propagate_frame, propagate_path, synthesize, transition_matrices, CoefficientInput,
    ExampleName, Frame, Step, TransitionPair,
};
