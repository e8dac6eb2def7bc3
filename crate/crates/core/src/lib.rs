//! Emergent time in a stationary bipartite universe.
//!
//! A clock and a system share a global state annihilated by
//! `Ĥ_c ⊗ 1 + 1 ⊗ Ĥ_s`. Conditioning the system on a clock reading yields
//! states that follow Schrödinger evolution in the clock time. Clocks with
//! equally spaced levels carry a Hermitian time operator; clocks with rational
//! level ratios carry a POVM of non-orthogonal time states.

pub mod arrow;
pub mod clock;
pub mod continuum;
pub mod error;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod universe;

pub use error::{Error, Result};
