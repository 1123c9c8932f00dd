//! Numerical differential geometry on coordinate charts.
//!
//! The crate computes Levi-Civita connections through the Koszul formula,
//! builds the symmetric pseudoconnection induced by any symmetric 2-tensor
//! field, integrates metric flows `∂g/∂t = R(g)`, and certifies numerically
//! that the Levi-Civita connection of a flow solution evolves by
//!
//! ```text
//! ∂∇/∂t + P(Q)∘∇ = Q,
//! ```
//!
//! where `Q` is the pseudoconnection built from `R(g_t)` and `P(Q) = g⁻¹R(g_t)`
//! its principal homomorphism.
//!
//! Index conventions used everywhere: `Γ^k_ij` is stored at `(k, i, j)` with
//! `i` the differentiation direction; `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik +
//! Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`; `Ric_jk = R^i_ijk`, so the unit round
//! sphere has `Ric = (n − 1) g`.

pub mod builtin;
pub mod chart;
pub mod cli;
pub mod connections;
pub mod curvature;
pub mod error;
pub mod flows;
pub mod jet;
pub mod verify;

pub use error::{GeometryError, Result};
