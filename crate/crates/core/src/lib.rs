//! Covariance-matrix calculus for Gaussian bosonic channels.
//!
//! Channels are triplets `(K, m, α)` acting as `γ → Kᵀ γ K + α`,
//! `d → Kᵀ d + m` in the `(x₁..xₙ, p₁..pₙ)` ordering. On top of the basic
//! algebra the crate rewrites any loss/station/loss chain as
//! `front ∘ (total loss) ∘ back` with a unitary `back`, decides whether a
//! single-mode sandwich is entanglement breaking (closed form and a
//! two-mode squeezed-vacuum PPT oracle), and evaluates the rate-loss bound.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod eb;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod policy;
pub mod relay;
pub mod report;
pub mod sampling;
pub mod scenario;
pub mod selftest;
pub mod stations;
pub mod symplectic;

pub use error::{Error, ParseError, ParseErrors, Result};
