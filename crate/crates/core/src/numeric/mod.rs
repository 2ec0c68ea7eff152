//! A coordinate realization of the frame on `R^{2n+1}` for independent
//! checks of the symbolic engine, and the slicing ramps.
//!
//! The random identity check never reuses the symbolic derivative rules:
//! symbols are bound to polynomials, turned into Taylor jets at a point and
//! differentiated through the coordinate vector fields.

mod eval;
mod exact;
mod jet;
mod model;
mod poly;
mod random_check;
mod slicing;

use thiserror::Error;

use crate::calculus::CalculusError;
use crate::identities::IdentityError;

pub use eval::{bind_and_eval, finite_diff_check, polynomial_of, resolve, Bindings, Evaluator};
pub use exact::Exact;
pub use jet::{Jet, JetFrame};
pub use model::CoordinateModel;
pub use poly::{PolynomialFunction, MAX_VARS};
pub use random_check::{random_identity_check, trial_seed, RandomCheckOptions, RandomCheckReport};
pub use slicing::{
    gamma_h, gamma_h_closed_form, lipschitz_estimate, smooth_ramp, smooth_ramp_derivative,
    SlicingProfile,
};

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("no polynomial bound to `{0}`")]
    Unbound(String),
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("ramp width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("mollification radius must lie in (0, h/2), got eps = {eps} with h = {h}")]
    EpsOutOfRange { eps: f64, h: f64 },
    #[error("jet order exhausted")]
    JetOrderExhausted,
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}
