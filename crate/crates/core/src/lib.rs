//! Continuous multiple zeta values.
//!
//! A continuous multiple zeta value is the iterated integral
//!
//! ```text
//! ζ^C(k₁,…,k_r) = ∫…∫_[1,∞)^r  dx₁…dx_r / (x₁^k₁ (x₁+x₂)^k₂ ⋯ (x₁+⋯+x_r)^k_r)
//! ```
//!
//! This crate evaluates these numbers numerically by nested quadrature and
//! manipulates them symbolically: the shuffle algebra on words in `{x, y}`,
//! the η operator behind the weighted sum formulas, an integration-by-parts
//! reduction onto the basis `ζ^C_{m₁…m_s}(1,…,1,2)`, and the candidate pole
//! hyperplanes of the meromorphic continuation.

pub mod compositions;
pub mod error;
pub mod etaspace;
pub mod poles;
pub mod quad;
pub mod rational;
pub mod reduce;
pub mod shuffle;
pub mod verify;

pub use compositions::{Composition, RealTuple, Word};
pub use error::{Error, Result};
pub use rational::Rational;
