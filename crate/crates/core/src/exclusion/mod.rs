//! Geographic potential: which cells remain available after land-use,
//! terrain, protection and buffer exclusions, and per-scenario filtering.

mod agland;
mod scenario;

use std::collections::BTreeMap;

pub use agland::{harmonize_ag_grade, AgGradeGrid, Country};
pub use scenario::{
    apply_scenario, apply_scenario_effective, EffectiveScenicness, ScenarioConfig, Technologies,
    MIN_SCENIC_VOTES, SCENIC_THRESHOLDS,
};

use crate::error::{Error, Result};
use crate::grid::{buffer_mask, CategoricalGrid, Mask, NumericGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSource {
    LandUse,
    LandCover,
    Protected,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// How an input layer takes part in the exclusion analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerRole {
    pub source: LayerSource,
    pub polarity: Polarity,
    pub buffer_distance: f64,
}

impl LayerRole {
    pub fn positive(source: LayerSource) -> Self {
        Self {
            source,
            polarity: Polarity::Positive,
            buffer_distance: 0.0,
        }
    }

    pub fn negative(source: LayerSource, buffer_distance: f64) -> Result<Self> {
        if !(buffer_distance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "buffer distance must be non-negative, got {buffer_distance}"
            )));
        }
        Ok(Self {
            source,
            polarity: Polarity::Negative,
            buffer_distance,
        })
    }
}

/// Suitable land from the land-use and land-cover layers, with land use taking precedence:
/// `(lu_pos \ lc_pos) ∪ (lc_pos \ lu_neg)`.
pub fn compose_precedence(lu_pos: &Mask, lu_neg: &Mask, lc_pos: &Mask) -> Result<Mask> {
    lu_pos.spec().ensure_aligned(lu_neg.spec())?;
    lu_pos.spec().ensure_aligned(lc_pos.spec())?;
    let conflicts: Vec<usize> = lu_pos.intersection(lu_neg)?.iter_set().collect();
    if !conflicts.is_empty() {
        return Err(Error::LayerOverlap { cells: conflicts });
    }
    let only_lu = lu_pos.difference(lc_pos)?;
    let lc_kept = lc_pos.difference(lu_neg)?;
    only_lu.union(&lc_kept)
}

/// Land-use category per surviving cell: the land-use code where there is one,
/// otherwise the land-cover code. Cells outside `mask` become nodata.
pub fn attach_categories(
    mask: &Mask,
    landuse: &CategoricalGrid,
    lc: &CategoricalGrid,
) -> Result<CategoricalGrid> {
    mask.spec().ensure_aligned(landuse.spec())?;
    mask.spec().ensure_aligned(lc.spec())?;
    let mut legend: BTreeMap<i32, String> = lc.legend().clone();
    for (code, label) in landuse.legend() {
        if let Some(existing) = legend.get(code) {
            if existing != label {
                return Err(Error::Data(format!(
                    "category code {code} means `{label}` in the land-use layer but `{existing}` in land cover"
                )));
            }
        }
        legend.insert(*code, label.clone());
    }
    let nodata = lc.nodata();
    let values = (0..mask.spec().len())
        .map(|i| {
            if !mask.get(i) {
                nodata
            } else {
                landuse.get(i).or_else(|| lc.get(i)).unwrap_or(nodata)
            }
        })
        .collect();
    CategoricalGrid::new(mask.spec().clone(), values, nodata, legend)
}

/// Removes buffered negative layers and terrain steeper than `slope_limit`
/// degrees from `base`. Cells exactly at the limit are kept; cells without a
/// slope value are removed.
pub fn geographic_potential(
    base: &Mask,
    negatives: &[(Mask, f64)],
    slope: &NumericGrid,
    slope_limit: f64,
) -> Result<Mask> {
    if !(slope_limit > 0.0) {
        return Err(Error::InvalidInput(format!(
            "slope limit must be positive, got {slope_limit}"
        )));
    }
    base.spec().ensure_aligned(slope.spec())?;
    let mut out = base.clone();
    for (neg, distance) in negatives {
        base.spec().ensure_aligned(neg.spec())?;
        let buffered = buffer_mask(neg, *distance)?;
        out = out.difference(&buffered)?;
    }
    let steep_or_unknown = Mask::from_fn(base.spec().clone(), |i| {
        slope.get(i).is_none_or(|s| s > slope_limit)
    });
    out.difference(&steep_or_unknown)
}
