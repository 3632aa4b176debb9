//! Point layers (e.g. rated photo locations) given as `x,y,value[,votes]` CSV.

use std::path::Path;

use super::{GridSpec, NumericGrid, DEFAULT_NODATA};
use crate::csvio::{column, parse_f64, read_to_string, reader_from_str};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub votes: Option<u32>,
}

pub fn parse_points_csv(text: &str, source: &Path) -> Result<Vec<PointRecord>> {
    let mut rdr = reader_from_str(text);
    let headers = rdr.headers()?.clone();
    let cx = column(&headers, "x", source)?;
    let cy = column(&headers, "y", source)?;
    let cv = column(&headers, "value", source)?;
    let cvotes = column(&headers, "votes", source).ok();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let votes =
            match cvotes {
                Some(c) => {
                    let raw = rec.get(c).unwrap_or("");
                    Some(raw.parse::<u32>().map_err(|_| {
                        Error::parse(source, row, format!("bad vote count `{raw}`"))
                    })?)
                }
                None => None,
            };
        out.push(PointRecord {
            x: parse_f64(&rec, cx, source, row)?,
            y: parse_f64(&rec, cy, source, row)?,
            value: parse_f64(&rec, cv, source, row)?,
            votes,
        });
    }
    Ok(out)
}

pub fn read_points_csv(path: impl AsRef<Path>) -> Result<Vec<PointRecord>> {
    let path = path.as_ref();
    parse_points_csv(&read_to_string(path)?, path)
}

/// Per-cell mean value and vote total of the qualifying points in each cell.
#[derive(Debug, Clone)]
pub struct PointRaster {
    pub value: NumericGrid,
    pub votes: NumericGrid,
}

/// Burns points into `spec`. Only points with at least `min_votes` votes
/// contribute; a point without a vote count is taken to have exactly
/// `min_votes`. Cells without a qualifying point are nodata with 0 votes.
pub fn rasterize_points(
    points: &[PointRecord],
    spec: &GridSpec,
    min_votes: u32,
) -> Result<PointRaster> {
    let n = spec.len();
    let mut sum = vec![0.0; n];
    let mut count = vec![0u32; n];
    let mut votes = vec![0.0; n];
    for p in points {
        let v = p.votes.unwrap_or(min_votes);
        if v < min_votes {
            continue;
        }
        if let Some(i) = spec.locate(p.x, p.y) {
            sum[i] += p.value;
            count[i] += 1;
            votes[i] += v as f64;
        }
    }
    let value = sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { DEFAULT_NODATA })
        .collect();
    Ok(PointRaster {
        value: NumericGrid::new(spec.clone(), value, DEFAULT_NODATA)?,
        votes: NumericGrid::new(spec.clone(), votes, DEFAULT_NODATA)?,
    })
}
