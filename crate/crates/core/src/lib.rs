//! Steady-state bipartite and tripartite entanglement of two coupled cavities
//! hosting a magnomechanical YIG sphere and an atomic ensemble.
//!
//! The pipeline is: parameters ([`model`]) → steady state, drift and diffusion
//! ([`dynamics`]) → covariance and entanglement measures ([`gaussian`]) →
//! grids ([`sweep`]) and searches ([`optimize`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod gaussian;
pub mod model;
pub mod optimize;
pub mod sweep;

pub use error::{Error, Result};
