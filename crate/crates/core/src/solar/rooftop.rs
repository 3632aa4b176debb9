use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::PvParams;
use crate::csvio;
use crate::error::{Error, Result};
use crate::grid::{CategoricalGrid, NumericGrid};
use crate::numfmt::sig6;

/// Land-cover classes that carry rooftop potential: continuous urban fabric,
/// discontinuous urban fabric, industrial or commercial units.
pub const ROOF_CATEGORIES: [i32; 3] = [111, 112, 121];

pub const TILT_BANDS: [u8; 9] = [0, 10, 20, 30, 40, 50, 60, 70, 80];

const PROPORTION_TOLERANCE: f64 = 1e-9;

/// Roof orientation. Sloped roofs fall into one of eight 45° sectors; roofs
/// in the lowest tilt band are treated as flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Azimuth {
    Flat,
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Azimuth {
    pub const SECTORS: [Azimuth; 8] = [
        Azimuth::N,
        Azimuth::NE,
        Azimuth::E,
        Azimuth::SE,
        Azimuth::S,
        Azimuth::SW,
        Azimuth::W,
        Azimuth::NW,
    ];

    /// Sector centre, degrees clockwise from north. `None` for flat roofs.
    pub fn degrees(self) -> Option<f64> {
        let idx = Self::SECTORS.iter().position(|&s| s == self)?;
        Some(idx as f64 * 45.0)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Azimuth::Flat => "flat",
            Azimuth::N => "N",
            Azimuth::NE => "NE",
            Azimuth::E => "E",
            Azimuth::SE => "SE",
            Azimuth::S => "S",
            Azimuth::SW => "SW",
            Azimuth::W => "W",
            Azimuth::NW => "NW",
        }
    }
}

impl fmt::Display for Azimuth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Azimuth {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        if up == "FLAT" {
            return Ok(Azimuth::Flat);
        }
        Self::SECTORS
            .iter()
            .copied()
            .find(|a| a.as_str() == up)
            .ok_or_else(|| Error::InvalidInput(format!("unknown azimuth sector `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofClass {
    pub azimuth: Azimuth,
    /// Lower edge of the tilt band, degrees.
    pub tilt_band_deg: u8,
    pub proportion: f64,
    pub relative_irradiance: f64,
}

impl RoofClass {
    /// Tilt used for area correction: 0° for the flat band, otherwise the
    /// band midpoint.
    pub fn representative_tilt_deg(&self) -> f64 {
        representative_tilt(self.tilt_band_deg)
    }
}

fn representative_tilt(band: u8) -> f64 {
    if band == 0 {
        0.0
    } else {
        f64::from(band) + 5.0
    }
}

/// Distribution of roof area over 72 azimuth/tilt classes: eight sloped
/// sectors for each of the bands 10°..80°, plus eight flat sub-classes for the
/// 0° band.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofClassModel {
    classes: Vec<RoofClass>,
}

impl RoofClassModel {
    pub fn new(mut classes: Vec<RoofClass>) -> Result<Self> {
        if classes.len() != 72 {
            return Err(Error::InvalidInput(format!(
                "roof class model needs 72 classes, got {}",
                classes.len()
            )));
        }
        let mut seen = BTreeSet::new();
        let mut flat = 0usize;
        for c in classes.iter_mut() {
            if !TILT_BANDS.contains(&c.tilt_band_deg) {
                return Err(Error::InvalidInput(format!(
                    "tilt band {} is not one of 0, 10, .., 80",
                    c.tilt_band_deg
                )));
            }
            if c.tilt_band_deg == 0 {
                c.azimuth = Azimuth::Flat;
                flat += 1;
            } else if c.azimuth == Azimuth::Flat {
                return Err(Error::InvalidInput(format!(
                    "class in tilt band {} cannot be flat",
                    c.tilt_band_deg
                )));
            } else if !seen.insert((c.azimuth, c.tilt_band_deg)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate roof class {} {}",
                    c.azimuth, c.tilt_band_deg
                )));
            }
            if !(c.proportion >= 0.0 && c.proportion.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "negative roof class proportion {}",
                    c.proportion
                )));
            }
            if !(c.relative_irradiance > 0.0 && c.relative_irradiance <= 1.2) {
                return Err(Error::InvalidInput(format!(
                    "relative irradiance {} outside (0, 1.2]",
                    c.relative_irradiance
                )));
            }
        }
        if flat != 8 {
            return Err(Error::InvalidInput(format!(
                "expected 8 flat classes, got {flat}"
            )));
        }
        let total: f64 = classes.iter().map(|c| c.proportion).sum();
        if (total - 1.0).abs() > PROPORTION_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "roof class proportions sum to {total}, expected 1"
            )));
        }
        classes.sort_by(|a, b| {
            (a.tilt_band_deg, a.azimuth)
                .cmp(&(b.tilt_band_deg, b.azimuth))
                .then(a.proportion.total_cmp(&b.proportion))
        });
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[RoofClass] {
        &self.classes
    }

    /// Proportion-weighted mean relative irradiance.
    pub fn mean_relative_irradiance(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.proportion * c.relative_irradiance)
            .sum()
    }

    /// Default model for the given latitude. Proportions follow a typical
    /// residential tilt mix spread evenly over orientations; relative
    /// irradiance comes from [`default_relative_irradiance`].
    pub fn default_for_latitude(latitude: f64) -> Self {
        const BAND_SHARE: [f64; 9] = [0.30, 0.03, 0.08, 0.15, 0.20, 0.14, 0.06, 0.03, 0.01];
        let irr = default_relative_irradiance(latitude);
        let mut classes = Vec::with_capacity(72);
        for (b, &band) in TILT_BANDS.iter().enumerate() {
            for sector in Azimuth::SECTORS {
                let az = if band == 0 { Azimuth::Flat } else { sector };
                classes.push(RoofClass {
                    azimuth: az,
                    tilt_band_deg: band,
                    proportion: BAND_SHARE[b] / 8.0,
                    relative_irradiance: irr[&(sector, band)],
                });
            }
        }
        Self::new(classes).expect("default roof model is valid")
    }

    pub fn parse_csv(text: &str, source: &Path) -> Result<Self> {
        let mut rdr = csvio::reader_from_str(text);
        let headers = rdr.headers()?.clone();
        let az = csvio::column(&headers, "azimuth_sector", source)?;
        let tilt = csvio::column(&headers, "tilt_band_deg", source)?;
        let p = csvio::column(&headers, "p", source)?;
        let irr = csvio::column(&headers, "irr", source)?;
        let mut classes = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let azimuth: Azimuth = csvio::field(&rec, az)
                .parse()
                .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
            let band = csvio::parse_f64(&rec, tilt, source, line)?;
            if band.fract() != 0.0 || !(0.0..=80.0).contains(&band) {
                return Err(Error::parse(source, line, format!("bad tilt band {band}")));
            }
            classes.push(RoofClass {
                azimuth,
                tilt_band_deg: band as u8,
                proportion: csvio::parse_f64(&rec, p, source, line)?,
                relative_irradiance: csvio::parse_f64(&rec, irr, source, line)?,
            });
        }
        Self::new(classes)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&csvio::read_to_string(path)?, path)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("azimuth_sector,tilt_band_deg,p,irr\n");
        for c in &self.classes {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                c.azimuth, c.tilt_band_deg, c.proportion, c.relative_irradiance
            );
        }
        s
    }
}

/// Relative annual irradiation on each (sector, band) surface compared with a
/// horizontal one.
///
/// Uses an isotropic-sky transposition over a year of clear-ish sun positions
/// (constant clearness 0.5, Erbs diffuse split, albedo 0.2), then rescales
/// affinely so horizontal stays at 1.0 and the best south-facing band reaches
/// the optimal-tilt gain of 1.17.
pub fn default_relative_irradiance(latitude: f64) -> BTreeMap<(Azimuth, u8), f64> {
    let phi = latitude.to_radians();
    let kt: f64 = 0.5;
    let diffuse_fraction =
        0.9511 - 0.1604 * kt + 4.388 * kt.powi(2) - 16.638 * kt.powi(3) + 12.336 * kt.powi(4);
    let albedo = 0.2;

    let surfaces: Vec<(Azimuth, u8, [f64; 3], f64)> = TILT_BANDS
        .iter()
        .flat_map(|&band| {
            Azimuth::SECTORS.iter().map(move |&sector| {
                let beta = representative_tilt(band).to_radians();
                let gamma = sector.degrees().unwrap_or(0.0).to_radians();
                let normal = [
                    beta.sin() * gamma.sin(),
                    beta.sin() * gamma.cos(),
                    beta.cos(),
                ];
                (sector, band, normal, beta.cos())
            })
        })
        .collect();
    let mut totals = vec![0.0; surfaces.len()];
    let mut horizontal = 0.0;

    let steps_per_hour = 4;
    for day in 1..=365 {
        let n = f64::from(day);
        let decl =
            (23.45f64).to_radians() * (2.0 * std::f64::consts::PI * (284.0 + n) / 365.0).sin();
        let ecc = 1.0 + 0.033 * (2.0 * std::f64::consts::PI * n / 365.0).cos();
        for k in 0..(24 * steps_per_hour) {
            let hour = (f64::from(k) + 0.5) / f64::from(steps_per_hour);
            let omega = (15.0 * (hour - 12.0)).to_radians();
            let sun = [
                -decl.cos() * omega.sin(),
                phi.cos() * decl.sin() - phi.sin() * decl.cos() * omega.cos(),
                phi.sin() * decl.sin() + phi.cos() * decl.cos() * omega.cos(),
            ];
            let cos_z = sun[2];
            if cos_z <= 0.0 {
                continue;
            }
            let ghi = kt * 1367.0 * ecc * cos_z;
            let dhi = diffuse_fraction * ghi;
            let dni = (ghi - dhi) / cos_z;
            horizontal += ghi;
            for (t, (_, _, nrm, cos_beta)) in totals.iter_mut().zip(&surfaces) {
                let cos_inc = nrm[0] * sun[0] + nrm[1] * sun[1] + nrm[2] * sun[2];
                *t += dni * cos_inc.max(0.0)
                    + dhi * (1.0 + cos_beta) / 2.0
                    + ghi * albedo * (1.0 - cos_beta) / 2.0;
            }
        }
    }

    let raw: Vec<f64> = totals.iter().map(|t| t / horizontal).collect();
    let best_south = surfaces
        .iter()
        .zip(&raw)
        .filter(|((a, _, _, _), _)| *a == Azimuth::S)
        .map(|(_, &r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = (super::MAX_TILT_GAIN - 1.0) / (best_south - 1.0);
    surfaces
        .iter()
        .zip(&raw)
        .map(|(&(a, b, _, _), &r)| {
            let v = if b == 0 { 1.0 } else { 1.0 + (r - 1.0) * scale };
            ((a, b), v)
        })
        .collect()
}

/// Building footprint ratio `s / A`.
pub fn footprint_ratio(footprint_m2: f64, land_m2: f64) -> Result<f64> {
    if !(land_m2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "land area must be positive, got {land_m2}"
        )));
    }
    if !(footprint_m2 >= 0.0) || footprint_m2 > land_m2 {
        return Err(Error::InvalidInput(format!(
            "footprint area {footprint_m2} outside [0, {land_m2}]"
        )));
    }
    Ok(footprint_m2 / land_m2)
}

/// Footprint ratio per land-use category.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintRatioTable {
    ratios: BTreeMap<i32, f64>,
}

impl Default for FootprintRatioTable {
    fn default() -> Self {
        Self {
            ratios: BTreeMap::from([(111, 0.35), (112, 0.20), (121, 0.30)]),
        }
    }
}

impl FootprintRatioTable {
    pub fn new(ratios: BTreeMap<i32, f64>) -> Result<Self> {
        for (&code, &r) in &ratios {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidInput(format!(
                    "footprint ratio {r} for category {code} outside [0, 1]"
                )));
            }
        }
        Ok(Self { ratios })
    }

    pub fn get(&self, category: i32) -> Option<f64> {
        self.ratios.get(&category).copied()
    }

    pub fn ratios(&self) -> &BTreeMap<i32, f64> {
        &self.ratios
    }

    pub fn parse_csv(text: &str, source: &Path) -> Result<Self> {
        let mut rdr = csvio::reader_from_str(text);
        let headers = rdr.headers()?.clone();
        let cat = csvio::column(&headers, "category", source)?;
        let ratio = csvio::column(&headers, "ratio", source)?;
        let mut ratios = BTreeMap::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let code: i32 = csvio::field(&rec, cat)
                .parse()
                .map_err(|_| Error::parse(source, line, "category must be an integer"))?;
            let r = csvio::parse_f64(&rec, ratio, source, line)?;
            if ratios.insert(code, r).is_some() {
                return Err(Error::parse(
                    source,
                    line,
                    format!("duplicate category {code}"),
                ));
            }
        }
        Self::new(ratios)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&csvio::read_to_string(path)?, path)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("category,ratio\n");
        for (c, r) in &self.ratios {
            let _ = writeln!(s, "{c},{r}");
        }
        s
    }
}

/// Per-category ratios from surveyed land parcels and building footprints:
/// total footprint area over total land area within each category.
pub fn ratios_from_footprints(
    land: &[(i32, f64)],
    footprints: &[(i32, f64)],
) -> Result<FootprintRatioTable> {
    let mut land_sum: BTreeMap<i32, f64> = BTreeMap::new();
    for &(c, a) in land {
        *land_sum.entry(c).or_default() += a;
    }
    let mut fp_sum: BTreeMap<i32, f64> = BTreeMap::new();
    for &(c, s) in footprints {
        if !land_sum.contains_key(&c) {
            return Err(Error::InvalidInput(format!(
                "footprints in category {c} with no surveyed land"
            )));
        }
        *fp_sum.entry(c).or_default() += s;
    }
    let mut ratios = BTreeMap::new();
    for (&c, &a) in &land_sum {
        ratios.insert(
            c,
            footprint_ratio(fp_sum.get(&c).copied().unwrap_or(0.0), a)?,
        );
    }
    FootprintRatioTable::new(ratios)
}

/// Usable roof area per class, `A · r · p_i / cos(v_i)`, in model order.
pub fn usable_roof_area(land_m2: f64, ratio: f64, model: &RoofClassModel) -> Vec<f64> {
    let footprint = land_m2 * ratio;
    model
        .classes()
        .iter()
        .map(|c| footprint * c.proportion / c.representative_tilt_deg().to_radians().cos())
        .collect()
}

/// Annual rooftop yield `h · η · H · PR · Σ U_i · irr_i`, kWh. No packing
/// factor applies: class areas are already net of obstructions.
pub fn pv_roof_potential(
    usable: &[f64],
    irradiance_w_m2: f64,
    params: &PvParams,
    model: &RoofClassModel,
) -> Result<f64> {
    if irradiance_w_m2 < 0.0 {
        return Err(Error::Data(format!(
            "negative irradiance {irradiance_w_m2} W/m²"
        )));
    }
    if usable.len() != model.classes().len() {
        return Err(Error::InvalidInput(format!(
            "{} class areas for a {}-class model",
            usable.len(),
            model.classes().len()
        )));
    }
    let weighted: f64 = usable
        .iter()
        .zip(model.classes())
        .map(|(u, c)| u * c.relative_irradiance)
        .sum();
    Ok(
        params.hours_per_year * params.efficiency * irradiance_w_m2 / 1000.0
            * params.performance_ratio
            * weighted,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofCell {
    pub cell: usize,
    pub category: i32,
    pub roof_area_m2: f64,
    pub irradiance_w_m2: f64,
    pub energy_kwh: f64,
}

impl RoofCell {
    /// Module capacity in kW, taking the whole usable roof as module area.
    pub fn capacity_kw(&self, params: &PvParams) -> f64 {
        self.roof_area_m2 * params.efficiency
    }
}

#[derive(Debug, Clone, Default)]
pub struct RoofYield {
    pub cells: Vec<RoofCell>,
    pub total_kwh: f64,
    pub total_roof_area_m2: f64,
}

/// Rooftop potential of every cell whose land-cover category has a footprint
/// ratio. Cells with missing irradiance are skipped.
pub fn rooftop_potential(
    landcover: &CategoricalGrid,
    irradiance: &NumericGrid,
    ratios: &FootprintRatioTable,
    model: &RoofClassModel,
    params: &PvParams,
) -> Result<RoofYield> {
    params.validate()?;
    let spec = landcover.spec();
    spec.ensure_aligned(irradiance.spec())?;
    let area = spec.cell_area();
    let mut out = RoofYield::default();
    for i in 0..spec.len() {
        let Some(cat) = landcover.get(i) else {
            continue;
        };
        let Some(r) = ratios.get(cat) else { continue };
        let Some(h) = irradiance.get(i) else { continue };
        let usable = usable_roof_area(area, r, model);
        let energy_kwh = pv_roof_potential(&usable, h, params, model)
            .map_err(|e| Error::Data(format!("cell {i}: {e}")))?;
        let roof_area_m2: f64 = usable.iter().sum();
        out.total_kwh += energy_kwh;
        out.total_roof_area_m2 += roof_area_m2;
        out.cells.push(RoofCell {
            cell: i,
            category: cat,
            roof_area_m2,
            irradiance_w_m2: h,
            energy_kwh,
        });
    }
    Ok(out)
}

/// `cell_id,category,roof_area_m2,H_Wm2,energy_kWh`
pub fn write_roof_csv(cells: &[RoofCell]) -> String {
    let mut s = String::from("cell_id,category,roof_area_m2,H_Wm2,energy_kWh\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            c.cell,
            c.category,
            sig6(c.roof_area_m2),
            sig6(c.irradiance_w_m2),
            sig6(c.energy_kwh)
        );
    }
    s
}
