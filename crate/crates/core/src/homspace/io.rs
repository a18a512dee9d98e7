use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DiscreteHomSpace, SpaceError};

#[derive(Debug, Error)]
pub enum SpaceIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("declared n = {declared} but {actual} weights given")]
    SizeMismatch { declared: usize, actual: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// On-disk space description.
///
/// `{"n": int, "dist": [[...]], "weight": [...], "ct": float, "cs": float, "labels": optional}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    pub dist: Vec<Vec<f64>>,
    pub weight: Vec<f64>,
    pub ct: f64,
    pub cs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<f64>>>,
}

impl SpaceFile {
    pub fn from_space(space: &DiscreteHomSpace) -> Self {
        Self {
            n: space.len(),
            dist: space.dist_table(),
            weight: space.weights().to_vec(),
            ct: space.ct(),
            cs: space.cs(),
            labels: space.labels().map(<[_]>::to_vec),
        }
    }

    pub fn into_space(self) -> Result<DiscreteHomSpace, SpaceIoError> {
        if self.weight.len() != self.n {
            return Err(SpaceIoError::SizeMismatch {
                declared: self.n,
                actual: self.weight.len(),
            });
        }
        let mut dist = Vec::with_capacity(self.n * self.n);
        for (row, values) in self.dist.iter().enumerate() {
            if values.len() != self.n {
                return Err(SpaceError::NotSquare {
                    row,
                    len: values.len(),
                    expected: self.n,
                }
                .into());
            }
            dist.extend_from_slice(values);
        }
        if self.dist.len() != self.n {
            return Err(SpaceError::NotSquare {
                row: self.dist.len(),
                len: 0,
                expected: self.n,
            }
            .into());
        }
        Ok(DiscreteHomSpace::from_parts(
            dist,
            self.weight,
            self.ct,
            self.cs,
            self.labels,
        )?)
    }
}

pub fn read_space_json(path: impl AsRef<Path>) -> Result<DiscreteHomSpace, SpaceIoError> {
    let text = std::fs::read_to_string(path)?;
    let file: SpaceFile = serde_json::from_str(&text)?;
    file.into_space()
}

/// Point cloud with columns `x₁ … x_dim, weight` and the Euclidean metric.
/// A leading non-numeric row is treated as a header.
pub fn read_point_csv<R: Read>(reader: R) -> Result<DiscreteHomSpace, SpaceIoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut width = None;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(SpaceIoError::Parse {
                    line,
                    message: e.to_string(),
                })
            }
        };
        if values.len() < 2 {
            return Err(SpaceIoError::Parse {
                line,
                message: "need at least one coordinate and a weight".into(),
            });
        }
        if *width.get_or_insert(values.len()) != values.len() {
            return Err(SpaceIoError::Parse {
                line,
                message: format!("expected {} columns, found {}", width.unwrap(), values.len()),
            });
        }
        let (coords, w) = values.split_at(values.len() - 1);
        points.push(coords.to_vec());
        weights.push(w[0]);
    }
    Ok(DiscreteHomSpace::euclidean(&points, &weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::Geometry;

    #[test]
    fn json_round_trip_is_exact() {
        let s = DiscreteHomSpace::uniform_grid(5, 1, Geometry::Circle).unwrap();
        let text = serde_json::to_string(&SpaceFile::from_space(&s)).unwrap();
        let back: SpaceFile = serde_json::from_str(&text).unwrap();
        let t = back.into_space().unwrap();
        assert_eq!(t.dist_table(), s.dist_table());
        assert_eq!(t.labels(), s.labels());
    }

    #[test]
    fn csv_with_header() {
        let data = "x,y,w\n0,0,0.25\n1,0,0.25\n0,1,0.25\n1,1,0.25\n";
        let s = read_point_csv(data.as_bytes()).unwrap();
        assert_eq!(s.len(), 4);
        assert!((s.dist(0, 3) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_bad_row_reports_line() {
        let data = "0,0.5\n1,oops\n";
        match read_point_csv(data.as_bytes()) {
            Err(SpaceIoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
