//! Stochastic-process routes to quantum dynamics.
//!
//! The crate couples three families of models with the wave equations they
//! shadow, each checked against the other side of the correspondence:
//!
//! * diffusions whose forward/backward drifts reproduce Schrodinger dynamics
//!   ([`schrodinger`], [`nelson`]);
//! * persistent random walks and checkerboard path sums that continue into
//!   Weyl/Dirac propagation, including the six-component photon form
//!   ([`dirac`]);
//! * su(N)-valued field bilinears with their variational residuals
//!   ([`gauge`]), and helicity flip-flop dynamics on directed graphs with
//!   spin-foam amplitudes ([`network`]).
//!
//! [`harness`] drives reproducible experiment runs for the `stochos` binary.

// Indexed loops are kept where they mirror the tensor notation of the models.
#![allow(clippy::needless_range_loop)]

pub mod dirac;
pub mod error;
pub mod gauge;
pub mod harness;
pub(crate) mod io_util;
pub mod nelson;
pub mod network;
pub mod numerics;
pub mod schrodinger;

pub use error::{Error, Result};
