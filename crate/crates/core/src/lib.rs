//! Distributed consensus on enclosing balls and boxes, and the
//! minimum-time rendezvous laws built on it, for synchronous robotic
//! networks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consensus;
pub mod control;
pub mod error;
pub mod geometry;
pub mod netcore;
pub mod par;
pub mod proxgraph;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::{Ball, Norm, Orthotope, Point};
