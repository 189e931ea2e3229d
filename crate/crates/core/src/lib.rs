//! Exact planar Steiner trees.
//!
//! The engine enumerates combinatorial types of Steiner trees on labeled
//! terminals, realizes each type on a configuration with the Melzak
//! merge/reconstruct construction, evaluates lengths with the Maxwell closed
//! form `|Σ cᵢ pᵢ|`, and returns every minimal tree within a tie tolerance.
//! On top of the solver sit tools for ambiguous configurations: path tracing,
//! wall bisection, perturbation experiments and a codirection checker.

pub mod ambiguity;
pub mod config;
pub mod error;
pub mod format;
pub mod geom;
pub mod length;
pub mod realization;
pub mod solver;
pub mod topology;

pub use config::Configuration;
pub use error::{Error, Result};
pub use geom::{Point, Side};
pub use topology::{CombinatorialType, FullComponent, FullComponentDecomposition};
pub use realization::{is_realizable, realize, realize_full, RealizedTree};
pub use length::{length_gradient, maxwell_coefficients, maxwell_length, LengthFunction, MaxwellCoefficients};
pub use solver::{minimal_types, smith_relax, solve, solve_with, Candidate, SolveOptions, SolveResult};
