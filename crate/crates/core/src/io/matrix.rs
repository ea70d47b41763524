//! Plain-text judgment matrices: one row per line, entries separated by
//! whitespace or commas, written as decimals or fractions like `1/3`.
//! `#` starts a comment.

use std::path::Path;

use crate::ahp::PairwiseMatrix;
use crate::error::{Error, Result};

use super::read_to_string;

fn parse_entry(tok: &str) -> Option<f64> {
    match tok.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            Some(a / b)
        }
        None => tok.parse().ok(),
    }
}

pub fn parse_matrix_str(name: &str, text: &str) -> Result<PairwiseMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(col, tok)| {
                parse_entry(tok).ok_or_else(|| {
                    Error::parse(name, lineno + 1, (col + 1).to_string(), format!("bad entry {tok:?}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((lineno + 1, row));
    }
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != rows.len()) {
        return Err(Error::parse(
            name,
            *line,
            r.len().to_string(),
            format!("row has {} entries but the matrix has {} rows", r.len(), rows.len()),
        ));
    }
    PairwiseMatrix::new(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn parse_matrix(path: &Path) -> Result<PairwiseMatrix> {
    let text = read_to_string(path)?;
    parse_matrix_str(&path.display().to_string(), &text)
}
