//! Inner approximations of the positive semidefinite cone built from conic
//! sums of low-dimensional sub-cones `F [S^s_+] F^T` spanned by orthonormal
//! frames.
//!
//! The crate provides:
//!
//! * dense symmetric-matrix primitives ([`symmat`]): spectral decomposition,
//!   Euclidean projection onto `S^n_+`, seeded random PSD sampling;
//! * frames on the Stiefel manifold and subspace metrics ([`frames`]):
//!   principal angles, chordal distance, cone distance;
//! * structured frame families ([`generators`]): diagonally dominant extreme
//!   rays, factor-width-k index frames, chordal-clique frames, and the
//!   constructive PSD decompositions;
//! * Grassmannian packing by alternating projection on the block Gram
//!   matrix ([`packing`]);
//! * the cone-sum approximation itself ([`coneapprox`]): Frobenius projection
//!   onto `sum_k F_k [S^s_+] F_k^T` by exact block coordinate descent, a
//!   Dykstra-based oracle for cross-validation, and export of restricted
//!   semidefinite programs.

pub mod coneapprox;
pub mod error;
pub mod frames;
pub mod generators;
pub mod packing;
pub mod seeding;
pub mod symmat;

pub use coneapprox::{ConeSum, ProjectionResult, RestrictedSdp};
pub use error::{Error, Result};
pub use frames::{Frame, FrameSet, PrincipalAngles, Provenance};
pub use generators::ChordalGraph;
pub use packing::{GramMatrix, PackingConfig, PackingResult, TargetRule};
pub use symmat::{SpectralDecomposition, SymMatrix};
