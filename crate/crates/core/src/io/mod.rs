//! File formats: judgment matrices, shelter and district tables, ESRI ASCII
//! grids, TOML run configuration, and report rendering.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod chart;
pub mod config;
pub mod grid;
pub mod matrix;
pub mod report;
pub mod tables;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use grid::{parse_ascii_grid, parse_grid, parse_zone_grid, write_ascii_grid, AsciiGrid};
pub use matrix::{parse_matrix, parse_matrix_str};
pub use report::{format_number, read_report, render, Report};
pub use tables::{parse_districts, parse_indicators, parse_points, parse_shelters, DistrictTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// CSV, six decimals.
    #[default]
    Delimited,
    /// JSON at full precision; can be read back.
    Structured,
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
