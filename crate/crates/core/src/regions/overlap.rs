use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{CategoricalGrid, Mask};
use crate::numfmt::sig6;

/// Denominator of the overlap fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMode {
    /// Intersection over the region's gridded area.
    #[default]
    RegionArea,
    /// Intersection over the region's wind-eligible area at that threshold.
    WindArea,
}

impl OverlapMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "region" | "region_area" => Ok(Self::RegionArea),
            "wind" | "wind_area" => Ok(Self::WindArea),
            other => Err(Error::Config(format!("unknown overlap mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandCoverTag {
    Urban,
    Rural,
}

impl LandCoverTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LandCoverTag::Urban => "urban",
            LandCoverTag::Rural => "rural",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapRow {
    pub region: String,
    pub threshold: f64,
    pub region_area_km2: f64,
    pub wind_area_km2: f64,
    pub pv_area_km2: f64,
    pub intersection_km2: f64,
    pub fraction: f64,
    pub tag: Option<LandCoverTag>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OverlapReport {
    pub rows: Vec<OverlapRow>,
    /// Regions whose overlap shrinks to at most 80% when moving from the
    /// unrestricted to the 5.80 threshold while exceeding 35% unrestricted.
    pub selected: Vec<String>,
}

pub const UNRESTRICTED: f64 = 10.0;
pub const SELECTION_THRESHOLD: f64 = 5.80;
pub const MAX_SHRINK_RATIO: f64 = 0.8;
pub const MIN_UNRESTRICTED_FRACTION: f64 = 0.35;

/// Overlap of wind- and PV-eligible land per region and scenicness
/// threshold. `wind` pairs each threshold with its wind mask. When
/// `landcover` is given, a region is tagged urban if artificial surfaces
/// (codes 1xx) are its most common land-cover family.
pub fn overlap_analysis(
    wind: &[(f64, Mask)],
    pv: &Mask,
    regions: &CategoricalGrid,
    landcover: Option<&CategoricalGrid>,
    mode: OverlapMode,
) -> Result<OverlapReport> {
    let spec = regions.spec();
    spec.ensure_aligned(pv.spec())?;
    for (_, m) in wind {
        spec.ensure_aligned(m.spec())?;
    }
    if let Some(lc) = landcover {
        spec.ensure_aligned(lc.spec())?;
    }
    let cell_km2 = spec.cell_area() / 1e6;

    let labels: BTreeMap<i32, &str> = regions
        .legend()
        .iter()
        .map(|(k, v)| (*k, v.as_str()))
        .collect();
    let mut region_cells: BTreeMap<&str, usize> = BTreeMap::new();
    let mut pv_cells: BTreeMap<&str, usize> = BTreeMap::new();
    let mut wind_cells: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); wind.len()];
    let mut both_cells: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); wind.len()];
    let mut families: BTreeMap<&str, [usize; 10]> = BTreeMap::new();
    for i in 0..spec.len() {
        let Some(code) = regions.get(i) else { continue };
        let r = labels[&code];
        *region_cells.entry(r).or_default() += 1;
        let p = pv.get(i);
        if p {
            *pv_cells.entry(r).or_default() += 1;
        }
        for (t, (_, m)) in wind.iter().enumerate() {
            if m.get(i) {
                *wind_cells[t].entry(r).or_default() += 1;
                if p {
                    *both_cells[t].entry(r).or_default() += 1;
                }
            }
        }
        if let Some(c) = landcover.and_then(|lc| lc.get(i)) {
            let fam = (c / 100).clamp(0, 9) as usize;
            families.entry(r).or_insert([0; 10])[fam] += 1;
        }
    }

    let mut report = OverlapReport::default();
    for (&r, &n) in &region_cells {
        let tag = landcover.map(|_| {
            let f = families.get(r).copied().unwrap_or([0; 10]);
            let urban = f[1];
            if urban > 0 && f.iter().enumerate().all(|(k, &c)| k == 1 || c < urban) {
                LandCoverTag::Urban
            } else {
                LandCoverTag::Rural
            }
        });
        let mut by_threshold = BTreeMap::new();
        for (t, (threshold, _)) in wind.iter().enumerate() {
            let w = wind_cells[t].get(r).copied().unwrap_or(0);
            let b = both_cells[t].get(r).copied().unwrap_or(0);
            let denom = match mode {
                OverlapMode::RegionArea => n,
                OverlapMode::WindArea => w,
            };
            let fraction = if denom == 0 {
                0.0
            } else {
                b as f64 / denom as f64
            };
            by_threshold.insert(threshold.to_bits(), fraction);
            report.rows.push(OverlapRow {
                region: r.to_string(),
                threshold: *threshold,
                region_area_km2: n as f64 * cell_km2,
                wind_area_km2: w as f64 * cell_km2,
                pv_area_km2: pv_cells.get(r).copied().unwrap_or(0) as f64 * cell_km2,
                intersection_km2: b as f64 * cell_km2,
                fraction,
                tag,
            });
        }
        if let (Some(&full), Some(&restricted)) = (
            by_threshold.get(&UNRESTRICTED.to_bits()),
            by_threshold.get(&SELECTION_THRESHOLD.to_bits()),
        ) {
            if full > MIN_UNRESTRICTED_FRACTION && restricted <= MAX_SHRINK_RATIO * full {
                report.selected.push(r.to_string());
            }
        }
    }
    Ok(report)
}

/// `region,threshold,region_km2,wind_km2,pv_km2,intersection_km2,fraction,tag,selected`
pub fn write_overlap_csv(report: &OverlapReport) -> String {
    let mut s = String::from(
        "region,threshold,region_km2,wind_km2,pv_km2,intersection_km2,fraction,tag,selected\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.region,
            sig6(r.threshold),
            sig6(r.region_area_km2),
            sig6(r.wind_area_km2),
            sig6(r.pv_area_km2),
            sig6(r.intersection_km2),
            sig6(r.fraction),
            r.tag.map_or("", LandCoverTag::as_str),
            u8::from(report.selected.contains(&r.region))
        );
    }
    s
}
