//! Bernstein, Kantorovich, Durrmeyer and genuine Durrmeyer operators on `[0, 1]`,
//! their M1/M2 basis modifications, and a harness that checks moment
//! identities, direct estimates and Voronovskaya-type bounds numerically.

pub mod basis;
pub mod corpus;
pub mod error;
pub mod moduli;
pub mod operators;
pub mod quadrature;
pub mod verify;

pub use basis::{CoefficientScheme, M2Coefficients};
pub use corpus::{Smoothness, TestFunction};
pub use error::{Error, Result};
pub use moduli::{ModuliPolicy, ModulusEstimate};
pub use operators::{Family, Image, OperatorId, Operators, QuadratureConfig, Variant};
pub use quadrature::QuadratureRule;
pub use verify::{BoundReport, ConvergenceReport, Status, TheoremId, Verifier};
