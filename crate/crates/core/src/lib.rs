//! Onshore renewable resource assessment on gridded regional data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod econ;
pub mod error;
pub mod exclusion;
pub mod grid;
pub mod kvfile;
pub mod numfmt;
pub mod pipeline;
pub mod plot;
pub mod regions;
pub mod solar;
pub mod stats;
pub mod wind;

pub(crate) mod csvio;

pub use error::{Error, Result};
