//! Numerical laboratory for Hardy-type averaging operators on mixed
//! radial-angular function spaces.
//!
//! The crate evaluates the closed-form sharp operator-norm constants for
//! spherical, fractional, multilinear, product, and weighted-average Hardy
//! operators, and verifies each constant by applying the corresponding
//! extremal function family and extrapolating measured norm ratios.
//!
//! The function model is deliberately narrow: piecewise power-law radial
//! profiles (with optional logarithmic factors produced by the operators
//! themselves) times two-value hemispherical angular patterns. Every
//! extremal function in scope has this shape, and on it all nine norm
//! functionals reduce to one-dimensional radial integrals that the
//! quadrature engine evaluates in closed form or by panel quadrature with
//! certified tails.

pub mod error;
pub mod extremal;
pub mod funcspace;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod sharpconst;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use funcspace::{AngularPattern, MixedFunction, PowerPiece, RadialProfile};
pub use norms::SpaceSpec;
pub use operators::{OperatorKind, WeightFunction};
pub use quadrature::QuadGrid;
pub use sharpconst::{ConstantType, TheoremCase, TheoremId};
pub use verify::{VerificationReport, VerifyConfig};
