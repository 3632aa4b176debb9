//! Raster primitives: grid geometry, numeric/boolean/categorical layers and
//! the operations every exclusion mask is built from.

mod ascii;
mod distance;
mod points;
mod resample;
mod slope;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub use ascii::{
    format_ascii, parse_ascii, read_ascii, read_categorical_ascii, read_legend_csv,
    read_mask_ascii, write_ascii, write_categorical_ascii, write_legend_csv, write_mask_ascii,
};
pub use distance::{buffer_mask, nearest_valid_cells, squared_distance_transform};
pub use points::{parse_points_csv, rasterize_points, read_points_csv, PointRaster, PointRecord};
pub use resample::{resample_nearest, Resample};
pub use slope::compute_slope;

/// Default sentinel for missing numeric cells.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// Geometry of a north-up regular raster in projected metres.
///
/// `origin_x`/`origin_y` locate the centre of the lower-left cell. Cell
/// indices are row-major with row 0 at the northern edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    pub cell_size: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub crs_label: String,
}

impl GridSpec {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        cell_size: f64,
        origin_x: f64,
        origin_y: f64,
        crs_label: impl Into<String>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidInput(format!(
                "grid must be at least 1x1, got {n_rows}x{n_cols}"
            )));
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::InvalidInput("grid origin must be finite".into()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            cell_size,
            origin_x,
            origin_y,
            crs_label: crs_label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }

    #[inline]
    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.n_cols, index % self.n_cols)
    }

    /// Projected coordinates of a cell centre.
    pub fn cell_center(&self, index: usize) -> (f64, f64) {
        let (row, col) = self.row_col(index);
        (
            self.origin_x + col as f64 * self.cell_size,
            self.origin_y + (self.n_rows - 1 - row) as f64 * self.cell_size,
        )
    }

    /// Outer bounds `(x_min, y_min, x_max, y_max)` of the raster.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        let half = self.cell_size / 2.0;
        (
            self.origin_x - half,
            self.origin_y - half,
            self.origin_x - half + self.n_cols as f64 * self.cell_size,
            self.origin_y - half + self.n_rows as f64 * self.cell_size,
        )
    }

    /// Cell containing the point, if any. Points on the east/south edge of a
    /// cell belong to the neighbouring cell.
    pub fn locate(&self, x: f64, y: f64) -> Option<usize> {
        let (x_min, y_min, x_max, y_max) = self.extent();
        if !(x >= x_min && x < x_max && y > y_min && y <= y_max) {
            return None;
        }
        let col = ((x - x_min) / self.cell_size).floor() as usize;
        let row = ((y_max - y) / self.cell_size).floor() as usize;
        (row < self.n_rows && col < self.n_cols).then(|| self.index(row, col))
    }

    pub fn is_aligned(&self, other: &GridSpec) -> bool {
        self == other
    }

    pub fn ensure_aligned(&self, other: &GridSpec) -> Result<()> {
        if self.is_aligned(other) {
            Ok(())
        } else {
            Err(Error::Alignment(format!(
                "{}x{} @ {} ({}, {}) [{}] vs {}x{} @ {} ({}, {}) [{}]",
                self.n_rows,
                self.n_cols,
                self.cell_size,
                self.origin_x,
                self.origin_y,
                self.crs_label,
                other.n_rows,
                other.n_cols,
                other.cell_size,
                other.origin_x,
                other.origin_y,
                other.crs_label
            )))
        }
    }

    pub fn with_crs(mut self, crs_label: impl Into<String>) -> Self {
        self.crs_label = crs_label.into();
        self
    }
}

/// Real-valued layer (elevation, wind speed, irradiance, scenicness, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct NumericGrid {
    spec: GridSpec,
    values: Vec<f64>,
    nodata: f64,
}

impl NumericGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>, nodata: f64) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidInput(format!(
                "grid expects {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self {
            spec,
            values,
            nodata,
        })
    }

    pub fn filled(spec: GridSpec, value: f64) -> Self {
        let n = spec.len();
        Self {
            spec,
            values: vec![value; n],
            nodata: DEFAULT_NODATA,
        }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize) -> f64) -> Self {
        let values = (0..spec.len()).map(&mut f).collect();
        Self {
            spec,
            values,
            nodata: DEFAULT_NODATA,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    #[inline]
    pub fn is_nodata_value(&self, v: f64) -> bool {
        v.is_nan() || v == self.nodata
    }

    /// Cell value, or `None` for nodata.
    #[inline]
    pub fn get(&self, index: usize) -> Option<f64> {
        let v = self.values[index];
        (!self.is_nodata_value(v)).then_some(v)
    }

    pub fn with_spec(mut self, spec: GridSpec) -> Result<Self> {
        if spec.len() != self.values.len() {
            return Err(Error::InvalidInput(
                "replacement spec changes grid size".into(),
            ));
        }
        self.spec = spec;
        Ok(self)
    }

    /// Mean over valid cells, `None` when every cell is nodata.
    pub fn mean(&self) -> Option<f64> {
        let (sum, n) = self
            .values
            .iter()
            .filter(|v| !self.is_nodata_value(**v))
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .copied()
            .filter(|v| !self.is_nodata_value(*v))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Cells whose value satisfies the predicate (nodata never does).
    pub fn mask_where(&self, pred: impl Fn(f64) -> bool) -> Mask {
        let values = self
            .values
            .iter()
            .map(|&v| !self.is_nodata_value(v) && pred(v))
            .collect();
        Mask {
            spec: self.spec.clone(),
            values,
        }
    }
}

/// Boolean layer; `true` marks a cell as belonging to the set.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    spec: GridSpec,
    values: Vec<bool>,
}

impl Mask {
    pub fn new(spec: GridSpec, values: Vec<bool>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidInput(format!(
                "mask expects {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn empty(spec: GridSpec) -> Self {
        let n = spec.len();
        Self {
            spec,
            values: vec![false; n],
        }
    }

    pub fn full(spec: GridSpec) -> Self {
        let n = spec.len();
        Self {
            spec,
            values: vec![true; n],
        }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize) -> bool) -> Self {
        let values = (0..spec.len()).map(&mut f).collect();
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        self.values[index]
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|v| **v).count()
    }

    pub fn area_m2(&self) -> f64 {
        self.count() as f64 * self.spec.cell_area()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.then_some(i))
    }

    fn zip_with(&self, other: &Mask, f: impl Fn(bool, bool) -> bool) -> Result<Mask> {
        self.spec.ensure_aligned(&other.spec)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Mask {
            spec: self.spec.clone(),
            values,
        })
    }

    pub fn union(&self, other: &Mask) -> Result<Mask> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Mask) -> Result<Mask> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Mask) -> Result<Mask> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Mask {
        Mask {
            spec: self.spec.clone(),
            values: self.values.iter().map(|v| !v).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.spec == other.spec
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(&a, &b)| !a || b)
    }
}

/// Integer-coded layer (land cover, grades, region ids) with its legend.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalGrid {
    spec: GridSpec,
    values: Vec<i32>,
    nodata: i32,
    legend: BTreeMap<i32, String>,
}

impl CategoricalGrid {
    pub fn new(
        spec: GridSpec,
        values: Vec<i32>,
        nodata: i32,
        legend: BTreeMap<i32, String>,
    ) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidInput(format!(
                "categorical grid expects {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some((i, code)) = values
            .iter()
            .enumerate()
            .find(|(_, c)| **c != nodata && !legend.contains_key(c))
        {
            return Err(Error::Data(format!(
                "category code {code} at cell {i} is missing from the legend"
            )));
        }
        Ok(Self {
            spec,
            values,
            nodata,
            legend,
        })
    }

    /// Builds a grid whose legend labels every distinct code with its decimal text.
    pub fn with_numeric_legend(spec: GridSpec, values: Vec<i32>, nodata: i32) -> Result<Self> {
        let legend = values
            .iter()
            .filter(|c| **c != nodata)
            .map(|c| (*c, c.to_string()))
            .collect();
        Self::new(spec, values, nodata, legend)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn nodata(&self) -> i32 {
        self.nodata
    }

    pub fn legend(&self) -> &BTreeMap<i32, String> {
        &self.legend
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<i32> {
        let v = self.values[index];
        (v != self.nodata).then_some(v)
    }

    pub fn label(&self, code: i32) -> Option<&str> {
        self.legend.get(&code).map(String::as_str)
    }

    pub fn mask_where(&self, pred: impl Fn(i32) -> bool) -> Mask {
        let values = self
            .values
            .iter()
            .map(|&c| c != self.nodata && pred(c))
            .collect();
        Mask {
            spec: self.spec.clone(),
            values,
        }
    }

    pub fn with_spec(mut self, spec: GridSpec) -> Result<Self> {
        if spec.len() != self.values.len() {
            return Err(Error::InvalidInput(
                "replacement spec changes grid size".into(),
            ));
        }
        self.spec = spec;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(r: usize, c: usize) -> GridSpec {
        GridSpec::new(r, c, 100.0, 50.0, 50.0, "test").unwrap()
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(GridSpec::new(0, 3, 1.0, 0.0, 0.0, "").is_err());
        assert!(GridSpec::new(3, 3, 0.0, 0.0, 0.0, "").is_err());
        assert!(GridSpec::new(3, 3, -5.0, 0.0, 0.0, "").is_err());
    }

    #[test]
    fn cell_centres_are_north_up() {
        let s = spec(2, 3);
        assert_eq!(s.cell_center(0), (50.0, 150.0));
        assert_eq!(s.cell_center(5), (250.0, 50.0));
        assert_eq!(s.locate(50.0, 150.0), Some(0));
        assert_eq!(s.locate(299.0, 1.0), Some(5));
        assert_eq!(s.locate(301.0, 1.0), None);
    }

    #[test]
    fn alignment_compares_every_field() {
        let a = spec(2, 2);
        assert!(a.is_aligned(&a.clone()));
        assert!(!a.is_aligned(&a.clone().with_crs("other")));
        let mut b = a.clone();
        b.origin_x += 1.0;
        assert!(matches!(a.ensure_aligned(&b), Err(Error::Alignment(_))));
    }

    #[test]
    fn mask_algebra_requires_alignment() {
        let a = Mask::full(spec(2, 2));
        let b = Mask::empty(spec(2, 3));
        assert!(a.union(&b).is_err());
        let c = Mask::new(spec(2, 2), vec![true, false, true, false]).unwrap();
        assert_eq!(
            a.difference(&c).unwrap().values(),
            &[false, true, false, true]
        );
        assert_eq!(a.intersection(&c).unwrap(), c);
        assert!(c.is_subset_of(&a));
    }

    #[test]
    fn categorical_legend_is_enforced() {
        let legend = BTreeMap::from([(1, "a".to_string())]);
        assert!(CategoricalGrid::new(spec(1, 2), vec![1, -1], -1, legend.clone()).is_ok());
        assert!(matches!(
            CategoricalGrid::new(spec(1, 2), vec![1, 2], -1, legend),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn nodata_is_excluded_from_statistics() {
        let g =
            NumericGrid::new(spec(1, 3), vec![1.0, DEFAULT_NODATA, 3.0], DEFAULT_NODATA).unwrap();
        assert_eq!(g.mean(), Some(2.0));
        assert_eq!(g.min_max(), Some((1.0, 3.0)));
        assert_eq!(g.get(1), None);
    }
}
