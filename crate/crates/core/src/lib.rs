//! Constructive factorization of hyperbolic isometries into k-involutions.
//!
//! The crate works in the hyperboloid (Lorentz) model: an isometry of ℍⁿ is
//! an (n+1)x(n+1) matrix preserving the form diag(-1, 1, ..., 1) and the
//! upper sheet, and a k-involution is an order-two isometry whose fixed
//! point set has codimension k. Around that sit:
//!
//! * [`minkowski`] — the form, reflections, bisectors, seeded random
//!   isometries and hyperplanes, numerical rank, indefinite Gram-Schmidt;
//! * [`involutions`] — construction and classification of k-involutions and
//!   the exact sign-vector algebra of the diagonal representatives;
//! * [`factorization`] — reflection decompositions, pairing reflections
//!   into half-turns, expanding reflections and half-turns into
//!   codimension-k factors, the full bounded-length pipeline, and an
//!   independent certification pass;
//! * [`bounds`] — exact integer word-length bounds, dimension counts, and
//!   the length-two proxy table;
//! * [`experiments`] — Jacobian-rank verification of the class dimension
//!   and the rank deficiency behind the lower bound;
//! * [`json`] — stable file formats (matrix JSON, factorization JSON, CSV
//!   tables) with reproducible float formatting.

pub mod bounds;
pub mod experiments;
pub mod factorization;
pub mod involutions;
pub mod json;
mod linalg;
pub mod minkowski;

pub use bounds::{bounds_table, lower_bound, phi_proxy, phi_table, upper_bound, BoundsRow, PhiProxy};
pub use factorization::{
    factor_into_k_involutions, verify_factorization, verify_raw_factorization, Factorization,
    FactorError, RawFactorization, VerificationReport,
};
pub use involutions::{
    canonical_k_involution, classify_involution, random_k_involution, InvolutionError,
    KInvolution, SignVector,
};
pub use minkowski::{
    bisector_reflection, is_isometry, minkowski_inner, numerical_rank, random_isometry,
    reflect_in_hyperplane, Ambient, HPoint, Hyperplane, Isometry, MVector, MinkowskiError,
    Orientation, Tolerances,
};
