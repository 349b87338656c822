//! Discrete-time coined quantum walks with quenched coin disorder.
//!
//! The engine evolves a single walker on a line, ring or reflective segment
//! under site-dependent coins `G(r_x)`. The analysis modules compute
//! occupation statistics, disorder-averaged observables, coin-position
//! entanglement and the closed-form clean-walk solution used as an oracle.

#![no_std]

extern crate alloc;

pub mod coin;
pub mod disorder;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod observables;
pub mod oracle;
pub mod seed;
pub mod spline;
pub mod state;

pub use coin::{make_gate, CoinMatrix};
pub use disorder::{sample_coin_field, CoinField};
pub use error::{Error, Result};
pub use geometry::{Geometry, GeometryKind};
pub use num_complex::Complex64;
pub use seed::derive_seed;
pub use spline::Smoothing;
pub use state::{evolve, initial_state, WalkState, DOWN, UP};
