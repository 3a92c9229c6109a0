//! Mutual-information lower bounds for multi-user MIMO uplinks with more
//! users than coherence symbols, under superimposed pilots (SP) and regular,
//! time-multiplexed pilots (RP).
//!
//! The crate covers the whole chain: DFT-phase pilot codebooks, link-level
//! frame synthesis with linear MMSE channel estimation, closed-form
//! second-order statistics of the estimation error and residual interference,
//! the Wishart-eigenvalue integral for the bound, optimal pilot/data resource
//! splits, and a seeded Monte Carlo harness that checks each closed form.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod linklevel;
pub mod milb;
pub mod pilot;
pub mod simulator;

pub use config::{db_to_power, Scheme, SchemeTag, SystemConfig};
pub use error::{Error, Result};
