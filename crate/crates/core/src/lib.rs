//! Bond and site percolation on sparse random graphs with a given degree
//! sequence.
//!
//! Graphs come from the configuration model ([`configuration`]), are thinned
//! by [`percolation`], and measured by [`components`]. [`analysis`] holds the
//! closed-form thresholds and the Monte Carlo drivers that test them, and
//! [`oracle`] enumerates tiny instances exactly.

pub mod analysis;
pub mod cli;
pub mod components;
pub mod config;
pub mod configuration;
pub mod degrees;
pub mod error;
pub mod oracle;
pub mod percolation;
pub mod seed;
pub mod stats;
pub mod validate;
pub mod zeta;

pub use error::{Error, Result};
