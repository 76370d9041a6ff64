//! Alternation structure, the external extremum, and the closed-form
//! derivative of the minimax error.

mod alternation;
mod derivative;
mod external;
mod jacobian;
pub mod vandermonde;

pub use alternation::{
    classify_alternation, classify_extrema, AlternationSet, DEFAULT_TOL_ENDPOINT, DEFAULT_TOL_LEVEL,
};
pub use derivative::{central_difference, error_derivative, DerivativeReport};
pub use external::{external_extremum, ExternalExtremum, Side, EXTERNAL_CAP, EXTERNAL_START};
pub use jacobian::{jacobian_identity_check, JacobianCheck};
pub use vandermonde::{vandermonde_quantities, VandermondeQuantities};
