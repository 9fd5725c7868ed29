//! Optimistic online optimization in `no_std` + `alloc`.
//!
//! The crate is organised bottom-up:
//!
//! - [`math`]: the `Q_ρ` modulus family, its conjugate, the hint-correction
//!   penalty and dual norm pairs.
//! - [`sets`]: closed convex feasible sets with exact Euclidean projections.
//! - [`mirror`]: regularizers (negative entropy, squared norm) with mirror
//!   steps and generalized Bregman divergences.
//! - [`strategy`]: the two-parameter optimistic rule and its type-I / type-II
//!   relaxations, plus the ONES / OLP / OGP closed forms.
//! - [`game`]: adversaries, hint oracles, comparator generators and the game
//!   driver producing a [`strategy::GameLog`].
//! - [`bounds`]: per-round evaluators of every regret upper bound.
//! - [`monotone`]: path integrals of monotone operators and the generalized
//!   regret over polylines.
//!
//! All floating point work is `f64`; transcendental functions come from
//! `libm` so the crate builds without `std`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod game;
pub mod linalg;
pub mod math;
pub mod mirror;
pub mod monotone;
pub mod sets;
pub mod strategy;

pub use error::{Error, Result};

/// Default absolute tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
