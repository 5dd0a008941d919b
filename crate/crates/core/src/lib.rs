#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bath;
pub mod columns;
pub mod dispersion;
pub mod emission;
pub mod error;
pub mod langevin;
pub mod maxwell;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
