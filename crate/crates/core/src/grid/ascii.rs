//! ESRI ASCII grid reading and writing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{CategoricalGrid, GridSpec, Mask, NumericGrid, DEFAULT_NODATA};
use crate::csvio::open_csv;
use crate::error::{Error, Result};
use crate::numfmt::sig6;

struct Header {
    ncols: usize,
    nrows: usize,
    x: f64,
    y: f64,
    corner: bool,
    cellsize: f64,
    nodata: f64,
}

/// Parses ESRI ASCII text. `source` only labels error messages.
pub fn parse_ascii(text: &str, source: &Path, crs_label: &str) -> Result<NumericGrid> {
    let mut ncols = None;
    let mut nrows = None;
    let mut x = None;
    let mut y = None;
    let mut corner = true;
    let mut cellsize = None;
    let mut nodata = DEFAULT_NODATA;

    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(lineno, line)) = lines.peek() {
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        if key.parse::<f64>().is_ok() {
            break;
        }
        let value = parts.next().ok_or_else(|| {
            Error::parse(source, lineno + 1, format!("missing value for `{key}`"))
        })?;
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::parse(source, lineno + 1, format!("bad number `{v}`")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => ncols = Some(num(value)? as usize),
            "nrows" => nrows = Some(num(value)? as usize),
            "xllcorner" => x = Some(num(value)?),
            "yllcorner" => y = Some(num(value)?),
            "xllcenter" => {
                x = Some(num(value)?);
                corner = false;
            }
            "yllcenter" => {
                y = Some(num(value)?);
                corner = false;
            }
            "cellsize" => cellsize = Some(num(value)?),
            "nodata_value" => nodata = num(value)?,
            other => {
                return Err(Error::parse(
                    source,
                    lineno + 1,
                    format!("unknown header key `{other}`"),
                ))
            }
        }
        lines.next();
    }
    let missing = |k: &str| Error::parse(source, 1, format!("header is missing `{k}`"));
    let h = Header {
        ncols: ncols.ok_or_else(|| missing("ncols"))?,
        nrows: nrows.ok_or_else(|| missing("nrows"))?,
        x: x.ok_or_else(|| missing("xllcorner"))?,
        y: y.ok_or_else(|| missing("yllcorner"))?,
        corner,
        cellsize: cellsize.ok_or_else(|| missing("cellsize"))?,
        nodata,
    };
    let half = if h.corner { h.cellsize / 2.0 } else { 0.0 };
    let spec = GridSpec::new(
        h.nrows,
        h.ncols,
        h.cellsize,
        h.x + half,
        h.y + half,
        crs_label,
    )?;

    let mut values = Vec::with_capacity(spec.len());
    for (lineno, line) in lines {
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<f64>()
                .map_err(|_| Error::parse(source, lineno + 1, format!("bad cell value `{tok}`")))?;
            values.push(v);
        }
    }
    if values.len() != spec.len() {
        return Err(Error::parse(
            source,
            0,
            format!(
                "expected {} cell values, found {}",
                spec.len(),
                values.len()
            ),
        ));
    }
    NumericGrid::new(spec, values, h.nodata)
}

pub fn read_ascii(path: impl AsRef<Path>, crs_label: &str) -> Result<NumericGrid> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ascii(&text, path, crs_label)
}

fn header(spec: &GridSpec, nodata: &str) -> String {
    let half = spec.cell_size / 2.0;
    format!(
        "ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\nNODATA_value {}\n",
        spec.n_cols,
        spec.n_rows,
        spec.origin_x - half,
        spec.origin_y - half,
        spec.cell_size,
        nodata
    )
}

fn body<T>(spec: &GridSpec, values: &[T], fmt: impl Fn(&T) -> String) -> String {
    let mut out = String::with_capacity(values.len() * 8);
    for row in values.chunks(spec.n_cols) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    out
}

/// Serialises a numeric grid; cell values use six significant digits.
pub fn format_ascii(grid: &NumericGrid) -> String {
    let mut s = header(grid.spec(), &sig6(grid.nodata()));
    s.push_str(&body(grid.spec(), grid.values(), |v| sig6(*v)));
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_ascii(path: impl AsRef<Path>, grid: &NumericGrid) -> Result<()> {
    write_text(path.as_ref(), &format_ascii(grid))
}

/// Reads a 0/1 grid as a mask; nodata cells are `false`.
pub fn read_mask_ascii(path: impl AsRef<Path>, crs_label: &str) -> Result<Mask> {
    let g = read_ascii(path.as_ref(), crs_label)?;
    Ok(g.mask_where(|v| v != 0.0))
}

pub fn write_mask_ascii(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    let mut s = header(mask.spec(), "-9999");
    s.push_str(&body(mask.spec(), mask.values(), |v| {
        if *v { "1" } else { "0" }.to_string()
    }));
    write_text(path.as_ref(), &s)
}

/// Reads an integer-coded grid. Without a legend every code labels itself.
pub fn read_categorical_ascii(
    path: impl AsRef<Path>,
    legend: Option<BTreeMap<i32, String>>,
    crs_label: &str,
) -> Result<CategoricalGrid> {
    let path = path.as_ref();
    let g = read_ascii(path, crs_label)?;
    let nodata = g.nodata() as i32;
    let mut codes = Vec::with_capacity(g.values().len());
    for (i, &v) in g.values().iter().enumerate() {
        if g.is_nodata_value(v) {
            codes.push(nodata);
        } else if v.fract() != 0.0 {
            return Err(Error::Data(format!(
                "{}: non-integer category {v} at cell {i}",
                path.display()
            )));
        } else {
            codes.push(v as i32);
        }
    }
    let spec = g.spec().clone();
    match legend {
        Some(l) => CategoricalGrid::new(spec, codes, nodata, l),
        None => CategoricalGrid::with_numeric_legend(spec, codes, nodata),
    }
}

pub fn write_categorical_ascii(path: impl AsRef<Path>, grid: &CategoricalGrid) -> Result<()> {
    let mut s = header(grid.spec(), &grid.nodata().to_string());
    s.push_str(&body(grid.spec(), grid.values(), |v| v.to_string()));
    write_text(path.as_ref(), &s)
}

/// Legend CSV with header `code,label`.
pub fn read_legend_csv(path: impl AsRef<Path>) -> Result<BTreeMap<i32, String>> {
    let path = path.as_ref();
    let mut rdr = open_csv(path)?;
    let mut legend = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let code = rec
            .get(0)
            .and_then(|c| c.trim().parse::<i32>().ok())
            .ok_or_else(|| Error::parse(path, i + 2, "bad legend code"))?;
        let label = rec.get(1).unwrap_or("").trim().to_string();
        if legend.insert(code, label).is_some() {
            return Err(Error::parse(path, i + 2, format!("duplicate code {code}")));
        }
    }
    Ok(legend)
}

pub fn write_legend_csv(path: impl AsRef<Path>, legend: &BTreeMap<i32, String>) -> Result<()> {
    let mut s = String::from("code,label\n");
    for (code, label) in legend {
        let _ = writeln!(s, "{code},{label}");
    }
    write_text(path.as_ref(), &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "ncols 3\nnrows 2\nxllcorner 100\nyllcorner 200\ncellsize 50\nNODATA_value -9999\n1 2.5 -9999\n4 5 6.123456789\n";

    #[test]
    fn parses_header_and_rows() {
        let g = parse_ascii(SAMPLE, Path::new("mem"), "x").unwrap();
        let s = g.spec();
        assert_eq!((s.n_rows, s.n_cols, s.cell_size), (2, 3, 50.0));
        assert_eq!((s.origin_x, s.origin_y), (125.0, 225.0));
        assert_eq!(g.get(2), None);
        assert_eq!(g.get(3), Some(4.0));
        // north row first
        assert_eq!(s.cell_center(0), (125.0, 275.0));
    }

    #[test]
    fn centre_keys_are_accepted() {
        let text = "ncols 1\nnrows 1\nxllcenter 5\nyllcenter 5\ncellsize 10\n3\n";
        let g = parse_ascii(text, Path::new("mem"), "").unwrap();
        assert_eq!(g.spec().origin_x, 5.0);
        assert_eq!(g.nodata(), DEFAULT_NODATA);
    }

    #[test]
    fn wrong_value_count_is_reported() {
        let text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n";
        assert!(matches!(
            parse_ascii(text, Path::new("mem"), ""),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn round_trip_is_byte_exact_after_first_write() {
        let g = parse_ascii(SAMPLE, Path::new("mem"), "").unwrap();
        let once = format_ascii(&g);
        let again = format_ascii(&parse_ascii(&once, Path::new("mem"), "").unwrap());
        assert_eq!(once, again);
        assert!(once.contains("6.12346"));
    }
}
