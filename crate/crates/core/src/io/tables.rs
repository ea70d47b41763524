//! Delimited input tables: shelters, district statistics, and precomputed
//! capacity indicators.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    CapacityIndicators, CriterionHierarchy, DistrictRecord, Level, Point, RawValue, ScoringRule,
    ShelterRecord,
};

use super::read_to_string;

struct Table {
    name: String,
    headers: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(name: &str, text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(name, 1, "", e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Error::parse(name, line, "", e.to_string())
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            rows.push((line, rec.iter().map(str::to_string).collect()));
        }
        Ok(Table {
            name: name.to_string(),
            headers,
            rows,
        })
    }

    fn column(&self, key: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::parse(&self.name, 1, key, "missing column"))
    }

    fn optional(&self, key: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.eq_ignore_ascii_case(key))
    }

    fn number(&self, line: usize, row: &[String], col: usize) -> Result<f64> {
        let raw = &row[col];
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(&self.name, line, &self.headers[col], format!("not a number: {raw:?}")))
    }
}

pub const SHELTER_FIXED_COLUMNS: [&str; 5] = ["id", "name", "district", "x", "y"];

pub fn parse_shelters_str(name: &str, text: &str, h: &CriterionHierarchy) -> Result<Vec<ShelterRecord>> {
    let t = Table::read(name, text)?;
    let fixed: Vec<usize> = SHELTER_FIXED_COLUMNS
        .iter()
        .map(|k| t.column(k))
        .collect::<Result<_>>()?;
    let indexes: Vec<(usize, &str, ScoringRule)> = h
        .indexes()
        .map(|i| Ok((t.column(&i.id)?, i.id.as_str(), i.scoring_rule)))
        .collect::<Result<_>>()?;
    let known: HashSet<usize> = fixed.iter().copied().chain(indexes.iter().map(|i| i.0)).collect();
    if let Some(extra) = (0..t.headers.len()).find(|c| !known.contains(c)) {
        return Err(Error::parse(name, 1, &t.headers[extra], "unknown column"));
    }

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, row) in &t.rows {
        let id = row[fixed[0]].clone();
        if id.is_empty() {
            return Err(Error::parse(name, *line, "id", "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::parse(name, *line, "id", format!("duplicate id {id:?}")));
        }
        let location = Point::new(t.number(*line, row, fixed[3])?, t.number(*line, row, fixed[4])?);
        let mut raw_values = BTreeMap::new();
        for &(col, idx, rule) in &indexes {
            let cell = &row[col];
            let v = match rule {
                ScoringRule::Manual258 => RawValue::Level(cell.parse::<Level>().map_err(|v| {
                    Error::parse(name, *line, idx, format!("unknown category level {v:?} for record {id}"))
                })?),
                ScoringRule::NaturalBreaks10 => RawValue::Measured(t.number(*line, row, col)?),
            };
            raw_values.insert(idx.to_string(), v);
        }
        out.push(ShelterRecord {
            id,
            name: row[fixed[1]].clone(),
            district: row[fixed[2]].clone(),
            location,
            raw_values,
        });
    }
    Ok(out)
}

pub fn parse_shelters(path: &Path, h: &CriterionHierarchy) -> Result<Vec<ShelterRecord>> {
    parse_shelters_str(&path.display().to_string(), &read_to_string(path)?, h)
}

/// Point locations: `id`, `x`, `y`; other columns are ignored, so a
/// shelter table works as input.
pub fn parse_points_str(name: &str, text: &str) -> Result<Vec<(String, Point)>> {
    let t = Table::read(name, text)?;
    let (ic, xc, yc) = (t.column("id")?, t.column("x")?, t.column("y")?);
    t.rows
        .iter()
        .map(|(line, row)| {
            Ok((
                row[ic].clone(),
                Point::new(t.number(*line, row, xc)?, t.number(*line, row, yc)?),
            ))
        })
        .collect()
}

pub fn parse_points(path: &Path) -> Result<Vec<(String, Point)>> {
    parse_points_str(&path.display().to_string(), &read_to_string(path)?)
}

/// Populations in the district table are in units of 10⁴ persons.
pub const POPULATION_UNIT: f64 = 10_000.0;

pub const DISTRICT_COLUMNS: [&str; 8] = [
    "district",
    "area_km2",
    "population_1e4",
    "density_per_ha",
    "shelters",
    "refuge_area_ha",
    "refuge_population_1e4",
    "avg_refuge_area_m2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DistrictTable {
    pub records: Vec<DistrictRecord>,
    /// Printed per-person refuge area of each record, m².
    pub printed_avg_area: Vec<Option<f64>>,
    /// Names of rows flagged as aggregates and left out.
    pub aggregates: Vec<String>,
    pub warnings: Vec<String>,
}

fn truthy(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "y")
}

pub fn parse_districts_str(name: &str, text: &str) -> Result<DistrictTable> {
    let t = Table::read(name, text)?;
    let cols: Vec<usize> = DISTRICT_COLUMNS[..7]
        .iter()
        .map(|k| t.column(k))
        .collect::<Result<_>>()?;
    let avg = t.optional(DISTRICT_COLUMNS[7]);
    let zone = t.optional("zone");
    let aggregate = t.optional("aggregate");

    let mut table = DistrictTable {
        records: Vec::new(),
        printed_avg_area: Vec::new(),
        aggregates: Vec::new(),
        warnings: Vec::new(),
    };
    for (line, row) in &t.rows {
        let district = row[cols[0]].clone();
        if aggregate.is_some_and(|c| truthy(&row[c])) {
            table.aggregates.push(district);
            continue;
        }
        let num = |i: usize| t.number(*line, row, cols[i]);
        let count = num(4)?;
        if count < 0.0 || count.fract() != 0.0 {
            return Err(Error::parse(name, *line, "shelters", "shelter count must be a nonnegative integer"));
        }
        let zone = match zone {
            Some(c) if !row[c].is_empty() => Some(row[c].parse::<i64>().map_err(|_| {
                Error::parse(name, *line, "zone", format!("bad zone id {:?}", row[c]))
            })?),
            _ => None,
        };
        let rec = DistrictRecord {
            name: district,
            area_km2: num(1)?,
            permanent_population: num(2)? * POPULATION_UNIT,
            population_density: Some(num(3)?),
            shelter_count: count as u32,
            total_refuge_area_ha: num(5)?,
            total_refuge_population: num(6)? * POPULATION_UNIT,
            zone,
        };
        let warnings = rec
            .validate()
            .map_err(|e| Error::parse(name, *line, "", e.to_string()))?;
        table.warnings.extend(warnings);
        table.printed_avg_area.push(match avg {
            Some(c) if !row[c].is_empty() => Some(t.number(*line, row, c)?),
            _ => None,
        });
        table.records.push(rec);
    }
    Ok(table)
}

pub fn parse_districts(path: &Path) -> Result<DistrictTable> {
    parse_districts_str(&path.display().to_string(), &read_to_string(path)?)
}

/// Rows of `district` plus the six indicator columns.
pub fn parse_indicators_str(name: &str, text: &str) -> Result<Vec<(String, CapacityIndicators)>> {
    let t = Table::read(name, text)?;
    let dc = t.column("district")?;
    let cols: Vec<usize> = CapacityIndicators::NAMES
        .iter()
        .map(|k| t.column(k))
        .collect::<Result<_>>()?;
    t.rows
        .iter()
        .map(|(line, row)| {
            let mut v = [0.0; 6];
            for (slot, &c) in v.iter_mut().zip(&cols) {
                *slot = t.number(*line, row, c)?;
            }
            let ind = CapacityIndicators::from_array(v);
            ind.validate(None)
                .map_err(|e| Error::parse(name, *line, "", e.to_string()))?;
            Ok((row[dc].clone(), ind))
        })
        .collect()
}

pub fn parse_indicators(path: &Path) -> Result<Vec<(String, CapacityIndicators)>> {
    parse_indicators_str(&path.display().to_string(), &read_to_string(path)?)
}
