//! Driven qubit-resonator thermalization: full Lindblad dynamics of the
//! driven Jaynes-Cummings model, the three-channel-state rate model, and
//! effective-temperature analysis.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod evolve;
pub mod expcli;
pub mod model;
pub mod qop;
pub mod thermo;

pub use error::{Error, Result};
