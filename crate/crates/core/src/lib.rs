//! Emergency-shelter evaluation: AHP weighting, graded site suitability,
//! walking-distance coverage on a raster, and TOPSIS ranking of district
//! capacity.

pub mod ahp;
pub mod error;
pub mod exec;
pub mod geocoverage;
pub mod io;
pub mod jenks;
pub mod model;
pub mod suitability;
pub mod topsis;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
