//! ESRI ASCII grid rasters (`ncols`, `nrows`, `xllcorner`, `yllcorner`,
//! `cellsize`, optional `NODATA_value`, then rows from the top).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geocoverage::{GridSpec, PopulationGrid, ZoneGrid};

use super::read_to_string;

pub const DEFAULT_NODATA: f64 = -9999.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AsciiGrid {
    pub spec: GridSpec,
    pub nodata: Option<f64>,
    pub values: Vec<Option<f64>>,
}

impl AsciiGrid {
    pub fn nodata_cells(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

pub fn parse_ascii_grid_str(name: &str, text: &str) -> Result<AsciiGrid> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let (mut ncols, mut nrows) = (None, None);
    let (mut x, mut y, mut center) = (None, None, false);
    let (mut cell, mut nodata) = (None, None);
    while let Some((lineno, line)) = lines.peek().copied() {
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or("").to_ascii_lowercase();
        if key.parse::<f64>().is_ok() {
            break;
        }
        let val = parts.next().ok_or_else(|| Error::parse(name, lineno + 1, &key, "missing header value"))?;
        let num: f64 = val
            .parse()
            .map_err(|_| Error::parse(name, lineno + 1, &key, format!("bad number {val:?}")))?;
        let int = || -> Result<usize> {
            if num >= 1.0 && num.fract() == 0.0 {
                Ok(num as usize)
            } else {
                Err(Error::parse(name, lineno + 1, &key, format!("{val} is not a positive integer")))
            }
        };
        match key.as_str() {
            "ncols" => ncols = Some(int()?),
            "nrows" => nrows = Some(int()?),
            "xllcorner" => x = Some(num),
            "yllcorner" => y = Some(num),
            "xllcenter" => {
                x = Some(num);
                center = true
            }
            "yllcenter" => {
                y = Some(num);
                center = true
            }
            "cellsize" => cell = Some(num),
            "nodata_value" => nodata = Some(num),
            other => return Err(Error::parse(name, lineno + 1, other, "unknown header key")),
        }
        lines.next();
    }
    let missing = |k: &str| Error::parse(name, 0, k, "missing header key");
    let ncols = ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = nrows.ok_or_else(|| missing("nrows"))?;
    let cell = cell.ok_or_else(|| missing("cellsize"))?;
    let (mut x, mut y) = (x.ok_or_else(|| missing("xllcorner"))?, y.ok_or_else(|| missing("yllcorner"))?);
    if center {
        x -= cell / 2.0;
        y -= cell / 2.0;
    }
    let spec = GridSpec::new(x, y, cell, nrows, ncols)?;

    let mut values = Vec::with_capacity(spec.cells());
    let mut row = 0;
    for (lineno, line) in lines {
        row += 1;
        if row > nrows {
            return Err(Error::parse(name, lineno + 1, "", format!("more than {nrows} data rows")));
        }
        let before = values.len();
        for (col, tok) in line.split_whitespace().enumerate() {
            let v: f64 = tok.parse().map_err(|_| {
                Error::parse(name, lineno + 1, (col + 1).to_string(), format!("bad cell value {tok:?}"))
            })?;
            values.push(if Some(v) == nodata { None } else { Some(v) });
        }
        let got = values.len() - before;
        if got != ncols {
            return Err(Error::parse(
                name,
                lineno + 1,
                got.to_string(),
                format!("data row {row} has {got} values, expected {ncols}"),
            ));
        }
    }
    if row != nrows {
        return Err(Error::parse(name, 0, "nrows", format!("header says {nrows} rows, found {row}")));
    }
    Ok(AsciiGrid { spec, nodata, values })
}

pub fn parse_ascii_grid(path: &Path) -> Result<AsciiGrid> {
    parse_ascii_grid_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn parse_grid_str(name: &str, text: &str) -> Result<PopulationGrid> {
    let g = parse_ascii_grid_str(name, text)?;
    PopulationGrid::new(g.spec, g.values)
}

pub fn parse_grid(path: &Path) -> Result<PopulationGrid> {
    parse_grid_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn parse_zone_grid(path: &Path) -> Result<ZoneGrid> {
    let name = path.display().to_string();
    let g = parse_ascii_grid_str(&name, &read_to_string(path)?)?;
    let zones = g
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            None => Ok(None),
            Some(z) if z.fract() == 0.0 => Ok(Some(*z as i64)),
            Some(z) => Err(Error::parse(
                &name,
                i / g.spec.n_cols + 1,
                (i % g.spec.n_cols + 1).to_string(),
                format!("zone value {z} is not an integer"),
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    ZoneGrid::new(g.spec, zones)
}

/// Serializes values in the same format, NODATA written as `nodata`.
pub fn write_ascii_grid(spec: &GridSpec, values: &[Option<f64>], nodata: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ncols {}", spec.n_cols);
    let _ = writeln!(s, "nrows {}", spec.n_rows);
    let _ = writeln!(s, "xllcorner {}", spec.x0);
    let _ = writeln!(s, "yllcorner {}", spec.y0);
    let _ = writeln!(s, "cellsize {}", spec.cell_size);
    let _ = writeln!(s, "NODATA_value {nodata}");
    for row in values.chunks(spec.n_cols) {
        let line: Vec<String> = row
            .iter()
            .map(|v| v.unwrap_or(nodata).to_string())
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}
