//! Distance spectral radius toolkit for trees.
//!
//! The crate computes certified dominant eigenpairs of distance matrices,
//! constructs the extremal tree families for a given order and diameter,
//! enumerates non-isomorphic trees, and packages exhaustive verification
//! sweeps whose strict inequalities are decided from Collatz-Wielandt
//! enclosures rather than point estimates.
//!
//! Sweeps are data-parallel over instances; the `parallel` feature (on by
//! default) backs them with rayon, and without it everything runs on the
//! sequential fallback with identical results.

pub mod enumerate;
pub mod exec;
pub mod families;
pub mod graph;
pub mod jacobi;
pub mod spectral;
pub mod verify;

pub use enumerate::{
    all_trees, canonical_code, trees_with_diameter, CanonicalCode, EnumerateError, TreeCache,
    TreeClass,
};
pub use exec::Parallelism;
pub use families::{extremal_tree, Family, FamilyError, FamilySpec};
pub use graph::{DistanceMatrix, Graph, GraphError, GraphJson, VertexPath};
pub use jacobi::oracle_spectrum;
pub use spectral::{
    perron_vector, rayleigh, spectral_radius, SolverConfig, SpectralError, SpectralResult,
};
pub use verify::{theorem_sweep, VerificationReport, VerifyError};
