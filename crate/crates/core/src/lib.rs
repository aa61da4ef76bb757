//! Construction and analysis of circulant-based spatially-coupled (SC) LDPC
//! codes.
//!
//! The pipeline is: pick a partition of the block code into `m+1` components
//! (cutting vectors, or the optimal-overlap search in [`optimizer`]), couple
//! `L` replicas into the SC protograph, assign circulant powers (array-based,
//! then refined by [`cpo`]) and lift to the full parity-check matrix.
//! [`census`] counts cycles-6 in closed form and by brute force, and
//! [`objects`] enumerates general absorbing and trapping sets.

pub mod census;
pub mod code;
pub mod cpo;
pub mod error;
pub mod io;
pub mod matrix;
pub mod objects;
pub mod optimizer;
pub mod overlaps;

pub use error::{Error, Result};
