//! Numerical laboratory for planar cooperative linear systems x' = A(t)x —
//! matrices with positive off-diagonal entries whose time dependence switches,
//! ramps, or drifts.
//!
//! The crate is organized around one guiding fact: even when every
//! instantaneous matrix A(t) has principal eigenvalue −1/2, the switched
//! system can blow up once the coupling is strong enough. The modules supply
//! the pieces needed to exhibit and audit that mechanism:
//!
//! - [`mat2`]: exact 2×2 algebra — closed-form exponentials and the
//!   Perron–Frobenius spectral split for Metzler matrices.
//! - [`schedules`]: the time-dependent coefficient families (two-phase
//!   switching, its continuous smoothing, scalar-drift perturbations).
//! - [`propagation`]: transition matrices (exact products or RK4), Floquet
//!   multipliers, trajectories, growth-rate estimates.
//! - [`peano_baker`]: exact iterated-integral expansions of the shifted
//!   system and the series-based instability bound.
//! - [`direction_flow`]: induced dynamics of solution directions on the
//!   unit circle, rotation signs, and the cone of growing directions.
//! - [`analysis`]: threshold root-finding and the inequality audits that
//!   tie the other modules together into pass/fail experiments.
//!
//! All computations are pure and deterministic; nothing allocates global
//! state, so any of this can run concurrently from multiple callers.

pub mod analysis;
pub mod direction_flow;
mod error;
pub mod mat2;
pub mod peano_baker;
pub mod propagation;
pub mod schedules;
mod solve;

pub use error::{Error, Result};
pub use mat2::{Mat2, SpectralPair, Vec2};
