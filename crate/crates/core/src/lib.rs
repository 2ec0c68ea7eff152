//! Symbolic and numeric exterior calculus on the Heisenberg group `H^n`.
//!
//! * [`scalar`]: differential polynomials in opaque function symbols,
//!   normalized under the frame bracket.
//! * [`exterior`]: forms over the coframe `dw_1, ..., dw_2n, θ`.
//! * [`calculus`]: `d`, `L`, `L⁻¹`, `𝓛` and the Rumin spaces `I^k`, `J^k`.
//! * [`identities`]: reproducible checks of the slicing identities in middle
//!   degree with sign audits.
//! * [`numeric`]: a coordinate model for exact and finite-difference
//!   cross-validation, and the slicing ramps.
//! * [`dsl`]: parser and renderer for the textual expression language.

pub mod calculus;
pub mod dsl;
pub mod exterior;
pub mod identities;
pub mod linalg;
pub mod numeric;
pub mod scalar;

pub use calculus::{CalculusError, ConventionProfile, Frame, HeisenbergContext, SymbolicFrame};
pub use exterior::{Coefficient, CoframeIndex, Form, Monomial};
pub use scalar::{DerivativeWord, FunctionSymbol, Letter, ScalarAlgebra, ScalarExpr};
