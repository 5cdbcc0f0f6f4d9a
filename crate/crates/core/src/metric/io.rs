//! CSV ingestion and emission for explicit matrices and point sets.
//!
//! Matrix files hold one row of distances per point, optionally preceded by
//! a weight column; point files hold `w,x1,...,xd`. A header row is optional
//! in both and is recognized by any non-numeric field.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use super::{MatrixOracle, Norm, PointsOracle};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Matrix,
    PointsL2,
    PointsL1,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(InputFormat::Matrix),
            "points-l2" => Ok(InputFormat::PointsL2),
            "points-l1" => Ok(InputFormat::PointsL1),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Matrix => "matrix",
            InputFormat::PointsL2 => "points-l2",
            InputFormat::PointsL1 => "points-l1",
        })
    }
}

struct Table {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut header = None;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if line == 0 => header = Some(rec.iter().map(str::to_owned).collect()),
            Err(e) => return Err(Error::Input(format!("line {}: {e}", line + 1))),
        }
    }
    Ok(Table { header, rows })
}

/// Reads an explicit distance matrix. Returns the oracle and the weights
/// (all 1 when the file has no weight column).
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<(MatrixOracle, Vec<f64>)> {
    let Table { rows, .. } = read_table(reader)?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    let weighted = rows[0].len() == n + 1;
    let mut weights = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.into_iter().enumerate() {
        let expect = if weighted { n + 1 } else { n };
        if row.len() != expect {
            return Err(Error::Input(format!("row {i} has {} fields, expected {expect}", row.len())));
        }
        if weighted {
            weights.push(row[0]);
            data.extend_from_slice(&row[1..]);
        } else {
            weights.push(1.0);
            data.extend_from_slice(&row);
        }
    }
    Ok((MatrixOracle::new(n, data)?, weights))
}

/// Reads `w,x1,...,xd` rows. A header whose first column is not `w` marks a
/// file without weights.
pub fn read_points_csv<R: Read>(reader: R, norm: Norm) -> Result<(PointsOracle, Vec<f64>)> {
    let Table { header, rows } = read_table(reader)?;
    if rows.is_empty() {
        return Err(Error::Input("no points".into()));
    }
    let weighted = header.as_ref().is_none_or(|h| h.first().is_some_and(|c| c.eq_ignore_ascii_case("w")));
    let width = rows[0].len();
    let dim = if weighted { width.saturating_sub(1) } else { width };
    if dim == 0 {
        return Err(Error::Input("points need at least one coordinate".into()));
    }
    let mut weights = Vec::with_capacity(rows.len());
    let mut coords = Vec::with_capacity(rows.len() * dim);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != width {
            return Err(Error::Input(format!("row {i} has {} fields, expected {width}", row.len())));
        }
        if weighted {
            weights.push(row[0]);
            coords.extend_from_slice(&row[1..]);
        } else {
            weights.push(1.0);
            coords.extend_from_slice(&row);
        }
    }
    Ok((PointsOracle::new(dim, coords, norm)?, weights))
}

/// Writes one row per point: optional weight, then distances.
pub fn write_matrix_csv<W: Write>(writer: W, matrix: &MatrixOracle, weights: Option<&[f64]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (i, row) in matrix.rows().enumerate() {
        let mut rec: Vec<String> = Vec::with_capacity(row.len() + 1);
        if let Some(ws) = weights {
            rec.push(ws[i].to_string());
        }
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_points_csv<W: Write>(writer: W, points: &PointsOracle, weights: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["w".to_string()];
    header.extend((1..=points.dim()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for (i, wt) in weights.iter().enumerate() {
        let mut rec = vec![wt.to_string()];
        rec.extend(points.point(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
