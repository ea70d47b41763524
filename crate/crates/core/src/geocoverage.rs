//! Walking-radius service buffers rasterized onto a grid, and the overlay
//! with a population-density raster.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::model::{CapacityIndicators, DistrictRecord, Point};

pub const DEFAULT_CELL_SIZE: f64 = 10.0;
pub const DEFAULT_SPEED_KMH: f64 = 4.0;
pub const DEFAULT_MINUTES: f64 = 10.0;
pub const SQUARE_METERS_PER_HECTARE: f64 = 10_000.0;

/// Straight-line distance covered at `speed_kmh` in `minutes`, in meters.
pub fn service_radius(speed_kmh: f64, minutes: f64) -> Result<f64> {
    if !(speed_kmh.is_finite() && speed_kmh > 0.0) {
        return Err(Error::domain(speed_kmh, "walking speed must be positive"));
    }
    if !(minutes.is_finite() && minutes > 0.0) {
        return Err(Error::domain(minutes, "walking time must be positive"));
    }
    Ok(speed_kmh * 1000.0 / 60.0 * minutes)
}

/// Radius rounded to whole meters (10 min at 4 km/h gives 667 m).
pub fn service_radius_rounded(speed_kmh: f64, minutes: f64) -> Result<f64> {
    service_radius(speed_kmh, minutes).map(f64::round)
}

/// Raster geometry. The origin is the lower-left corner; row 0 is the top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub y0: f64,
    pub cell_size: f64,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl GridSpec {
    pub fn new(x0: f64, y0: f64, cell_size: f64, n_rows: usize, n_cols: usize) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::domain(cell_size, "cell size must be positive"));
        }
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::Invalid(format!(
                "grid dimensions {n_rows}×{n_cols} must be positive"
            )));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(Error::Invalid("grid origin must be finite".into()));
        }
        Ok(GridSpec {
            x0,
            y0,
            cell_size,
            n_rows,
            n_cols,
        })
    }

    /// Smallest grid with the given cell size covering every point ± `margin`.
    pub fn covering(points: &[Point], margin: f64, cell_size: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("cannot derive a grid from no points".into()));
        }
        let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
        let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let x0 = ((xmin - margin) / cell_size).floor() * cell_size;
        let y0 = ((ymin - margin) / cell_size).floor() * cell_size;
        let n_cols = ((xmax + margin - x0) / cell_size).ceil() as usize;
        let n_rows = ((ymax + margin - y0) / cell_size).ceil() as usize;
        GridSpec::new(x0, y0, cell_size, n_rows.max(1), n_cols.max(1))
    }

    pub fn cells(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn cell_area_ha(&self) -> f64 {
        self.cell_size * self.cell_size / SQUARE_METERS_PER_HECTARE
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.n_cols as f64 * self.cell_size
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + self.n_rows as f64 * self.cell_size
    }

    pub fn center(&self, row: usize, col: usize) -> Point {
        Point {
            x: self.x0 + (col as f64 + 0.5) * self.cell_size,
            y: self.y0 + ((self.n_rows - row) as f64 - 0.5) * self.cell_size,
        }
    }

    /// Whether the disc around `p` lies entirely inside the grid extent.
    pub fn contains_disc(&self, p: Point, radius: f64) -> bool {
        p.x - radius >= self.x0
            && p.x + radius <= self.x_max()
            && p.y - radius >= self.y0
            && p.y + radius <= self.y_max()
    }

    pub fn check_aligned(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Misaligned(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Persons per hectare, row-major from the top row. `None` is NODATA.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationGrid {
    pub spec: GridSpec,
    pub density: Vec<Option<f64>>,
}

impl PopulationGrid {
    pub fn new(spec: GridSpec, density: Vec<Option<f64>>) -> Result<Self> {
        if density.len() != spec.cells() {
            return Err(Error::Invalid(format!(
                "grid holds {} values, expected {}",
                density.len(),
                spec.cells()
            )));
        }
        if let Some(v) = density.iter().flatten().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(*v, "density must be a nonnegative finite value"));
        }
        Ok(PopulationGrid { spec, density })
    }

    pub fn uniform(spec: GridSpec, density: f64) -> Result<Self> {
        Self::new(spec, vec![Some(density); spec.cells()])
    }

    pub fn nodata_cells(&self) -> usize {
        self.density.iter().filter(|d| d.is_none()).count()
    }
}

/// Integer zone raster (district ids), aligned with the population grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneGrid {
    pub spec: GridSpec,
    pub zones: Vec<Option<i64>>,
}

impl ZoneGrid {
    pub fn new(spec: GridSpec, zones: Vec<Option<i64>>) -> Result<Self> {
        if zones.len() != spec.cells() {
            return Err(Error::Invalid(format!(
                "zone grid holds {} values, expected {}",
                zones.len(),
                spec.cells()
            )));
        }
        Ok(ZoneGrid { spec, zones })
    }
}

/// Covered cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMask {
    spec: GridSpec,
    cells: Vec<bool>,
    clipped_points: usize,
}

impl CoverageMask {
    pub fn empty(spec: GridSpec) -> Self {
        CoverageMask {
            spec,
            cells: vec![false; spec.cells()],
            clipped_points: 0,
        }
    }

    pub fn from_cells(spec: GridSpec, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != spec.cells() {
            return Err(Error::Invalid(format!(
                "mask holds {} cells, expected {}",
                cells.len(),
                spec.cells()
            )));
        }
        Ok(CoverageMask {
            spec,
            cells,
            clipped_points: 0,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.spec.n_cols + col]
    }

    pub fn covered_cells(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Points whose buffer extends past the grid edge.
    pub fn clipped_points(&self) -> usize {
        self.clipped_points
    }

    pub fn union(&self, other: &CoverageMask) -> Result<CoverageMask> {
        self.spec.check_aligned(&other.spec)?;
        Ok(CoverageMask {
            spec: self.spec,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| *a || *b).collect(),
            clipped_points: self.clipped_points + other.clipped_points,
        })
    }
}

fn fill_row(spec: &GridSpec, row: usize, points: &[Point], r2: f64, radius: f64, out: &mut [bool]) {
    let cy = spec.center(row, 0).y;
    let cs = spec.cell_size;
    for p in points {
        let dy = cy - p.y;
        if dy.abs() > radius {
            continue;
        }
        // candidate columns from the chord, re-checked with the exact predicate
        let half = (r2 - dy * dy).max(0.0).sqrt();
        let lo = ((p.x - half - spec.x0) / cs - 0.5).floor() as i64;
        let hi = ((p.x + half - spec.x0) / cs - 0.5).ceil() as i64;
        let lo = lo.max(0) as usize;
        let hi = hi.min(spec.n_cols as i64 - 1);
        if hi < lo as i64 {
            continue;
        }
        for c in lo..=hi as usize {
            if out[c] {
                continue;
            }
            let dx = spec.x0 + (c as f64 + 0.5) * cs - p.x;
            if dx * dx + dy * dy <= r2 {
                out[c] = true;
            }
        }
    }
}

/// Marks cells whose center lies within `radius` of any point.
///
/// Rows are filled independently, so the parallel and sequential passes
/// produce identical masks.
pub fn rasterize_buffers(
    points: &[Point],
    radius: f64,
    spec: GridSpec,
    exec: Execution,
) -> Result<CoverageMask> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(radius, "service radius must be positive"));
    }
    if let Some(p) = points.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::Invalid(format!("point {p:?} is not finite")));
    }
    let clipped = points.iter().filter(|p| !spec.contains_disc(**p, radius)).count();
    if clipped > 0 {
        log::warn!("{clipped} service buffers extend past the grid and are clipped");
    }
    let mut cells = vec![false; spec.cells()];
    if !points.is_empty() {
        let r2 = radius * radius;
        exec::for_each_chunk(exec, &mut cells, spec.n_cols, |row, out| {
            fill_row(&spec, row, points, r2, radius, out)
        });
    }
    Ok(CoverageMask {
        spec,
        cells,
        clipped_points: clipped,
    })
}

/// Covered area in hectares.
pub fn coverage_area(mask: &CoverageMask) -> f64 {
    mask.covered_cells() as f64 * mask.spec.cell_area_ha()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationOverlay {
    pub persons: f64,
    /// Covered cells that held NODATA and were counted as empty.
    pub nodata_cells: usize,
}

/// Population living in covered cells.
pub fn effective_population(mask: &CoverageMask, grid: &PopulationGrid) -> Result<PopulationOverlay> {
    mask.spec.check_aligned(&grid.spec)?;
    let cell_ha = grid.spec.cell_area_ha();
    let (mut persons, mut nodata) = (0.0, 0);
    for (covered, d) in mask.cells.iter().zip(&grid.density) {
        if *covered {
            match d {
                Some(v) => persons += v * cell_ha,
                None => nodata += 1,
            }
        }
    }
    Ok(PopulationOverlay {
        persons,
        nodata_cells: nodata,
    })
}

/// Coverage statistics for one zone, or for the whole grid when `zone` is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneCoverage {
    pub zone: Option<i64>,
    pub cells: usize,
    pub covered_cells: usize,
    pub coverage_ha: f64,
    pub effective_population: f64,
    pub nodata_cells: usize,
    /// Share of the zone's cells outside every buffer.
    pub blind_share: f64,
}

/// Splits coverage by zone. A covered cell belongs to the zone containing
/// its center; cells without a zone are skipped.
pub fn zonal_coverage(
    mask: &CoverageMask,
    grid: &PopulationGrid,
    zones: Option<&ZoneGrid>,
) -> Result<Vec<ZoneCoverage>> {
    mask.spec.check_aligned(&grid.spec)?;
    let cell_ha = grid.spec.cell_area_ha();
    let mut acc: BTreeMap<Option<i64>, (usize, usize, f64, usize)> = BTreeMap::new();
    let zone_of = |i: usize| -> Option<Option<i64>> {
        match zones {
            None => Some(None),
            Some(z) => z.zones[i].map(Some),
        }
    };
    if let Some(z) = zones {
        mask.spec.check_aligned(&z.spec)?;
    }
    for (i, (covered, d)) in mask.cells.iter().zip(&grid.density).enumerate() {
        let Some(key) = zone_of(i) else { continue };
        let e = acc.entry(key).or_insert((0, 0, 0.0, 0));
        e.0 += 1;
        if *covered {
            e.1 += 1;
            match d {
                Some(v) => e.2 += v * cell_ha,
                None => e.3 += 1,
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(zone, (cells, covered, persons, nodata))| ZoneCoverage {
            zone,
            cells,
            covered_cells: covered,
            coverage_ha: covered as f64 * cell_ha,
            effective_population: persons,
            nodata_cells: nodata,
            blind_share: 1.0 - covered as f64 / cells as f64,
        })
        .collect())
}

/// Assembles the six indicators from district statistics and coverage.
pub fn capacity_indicators(
    d: &DistrictRecord,
    coverage_ha: f64,
    effective_population: f64,
) -> Result<CapacityIndicators> {
    if !(d.permanent_population > 0.0) {
        return Err(Error::Invalid(format!(
            "district {}: average refuge area undefined for population {}",
            d.name, d.permanent_population
        )));
    }
    if !(effective_population > 0.0) {
        return Err(Error::Invalid(format!(
            "district {}: average effective refuge area undefined for effective population {}",
            d.name, effective_population
        )));
    }
    let area_m2 = d.total_refuge_area_ha * SQUARE_METERS_PER_HECTARE;
    let ind = CapacityIndicators {
        total_refuge_area: d.total_refuge_area_ha,
        total_refuge_population: d.total_refuge_population,
        effective_refuge_range: coverage_ha,
        effective_refuge_population: effective_population,
        avg_refuge_area_per_person: area_m2 / d.permanent_population,
        avg_effective_refuge_area_per_person: area_m2 / effective_population,
    };
    ind.validate(Some(d.permanent_population))?;
    Ok(ind)
}

/// Mean Earth radius used by [`project_equirectangular`], meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Local equirectangular projection of lon/lat degrees around a reference
/// point. Intended for fixtures spanning a few tens of kilometers, where the
/// distance error stays below roughly 0.1%.
pub fn project_equirectangular(lon: f64, lat: f64, ref_lon: f64, ref_lat: f64) -> Point {
    let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
    Point {
        x: (lon - ref_lon) * k * ref_lat.to_radians().cos(),
        y: (lat - ref_lat) * k,
    }
}
