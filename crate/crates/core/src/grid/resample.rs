use super::{CategoricalGrid, GridSpec, Mask, NumericGrid};
use crate::error::{Error, Result};

/// Grid kinds that can be re-gridded onto another [`GridSpec`].
pub trait Resample: Sized {
    fn resample_to(&self, target: &GridSpec) -> Result<Self>;
}

/// Nearest-centre resampling onto `target`. Target cells whose centre falls
/// outside the source extent become nodata (`false` for masks).
pub fn resample_nearest<G: Resample>(grid: &G, target: &GridSpec) -> Result<G> {
    grid.resample_to(target)
}

fn source_indices(src: &GridSpec, target: &GridSpec) -> Result<Vec<Option<usize>>> {
    let (ax0, ay0, ax1, ay1) = src.extent();
    let (bx0, by0, bx1, by1) = target.extent();
    if ax0.max(bx0) >= ax1.min(bx1) || ay0.max(by0) >= ay1.min(by1) {
        return Err(Error::InvalidInput(
            "resampling target does not overlap the source grid".into(),
        ));
    }
    if src == target {
        return Ok((0..src.len()).map(Some).collect());
    }
    Ok((0..target.len())
        .map(|i| {
            let (x, y) = target.cell_center(i);
            src.locate(x, y)
        })
        .collect())
}

impl Resample for NumericGrid {
    fn resample_to(&self, target: &GridSpec) -> Result<Self> {
        let idx = source_indices(self.spec(), target)?;
        let values = idx
            .iter()
            .map(|s| s.map_or(self.nodata(), |j| self.values()[j]))
            .collect();
        NumericGrid::new(target.clone(), values, self.nodata())
    }
}

impl Resample for Mask {
    fn resample_to(&self, target: &GridSpec) -> Result<Self> {
        let idx = source_indices(self.spec(), target)?;
        let values = idx.iter().map(|s| s.is_some_and(|j| self.get(j))).collect();
        Mask::new(target.clone(), values)
    }
}

impl Resample for CategoricalGrid {
    fn resample_to(&self, target: &GridSpec) -> Result<Self> {
        let idx = source_indices(self.spec(), target)?;
        let values = idx
            .iter()
            .map(|s| s.map_or(self.nodata(), |j| self.values()[j]))
            .collect();
        CategoricalGrid::new(target.clone(), values, self.nodata(), self.legend().clone())
    }
}
