//! File formats, configuration and command orchestration around
//! [`cpn_core`].
//!
//! The `cpn` binary is a thin clap front end over [`commands`]; everything
//! it does is also callable from here.

pub mod annotations;
pub mod commands;
pub mod config;
pub mod error;
pub mod fsutil;
pub mod gradcheck;
pub mod netpbm;
pub mod parallel;
pub mod pipeline;
pub mod regression;
pub mod synth;
pub mod weights;

pub use config::RunConfig;
pub use error::{CpnError, Result};
