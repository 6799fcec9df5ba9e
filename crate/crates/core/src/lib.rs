//! Dipole-coupled nanomagnet reservoir: array geometry, macrospin LLG
//! dynamics, the clocked anisotropy protocol and a linear readout.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod clocking;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod readout;
pub mod task;
pub mod vec3;

pub use error::{Error, Result};
