//! End-to-end assessment run.
//!
//! Layers are aligned to the master grid, geographic potentials for wind and
//! ground PV are built once, site tables are computed once over them, and
//! each scenario only filters those tables.

mod config;
pub mod fixture;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{LayerPaths, RunConfig};

use crate::csvio;
use crate::econ::{cost_curve, lcoe, write_curve_csv, CurveSite, EconParams};
use crate::error::{Error, Result};
use crate::exclusion::{
    apply_scenario_effective, attach_categories, compose_precedence, geographic_potential,
    AgGradeGrid, Country, EffectiveScenicness, ScenarioConfig, Technologies, SCENIC_THRESHOLDS,
};
use crate::grid::{
    buffer_mask, compute_slope, read_ascii, read_categorical_ascii, read_legend_csv,
    read_mask_ascii, resample_nearest, CategoricalGrid, GridSpec, Mask, NumericGrid,
};
use crate::numfmt::sig6;
use crate::plot::render_cost_curve;
use crate::regions::{
    aggregate_to_la, overlap_analysis, scenic_lcoe_curve, write_la_csv, write_overlap_csv, LaTable,
    LcoeWeighting, OverlapMode, OverlapReport,
};
use crate::solar::{
    gain_at_tilt, latitude_grid, rooftop_potential, tilt_gain_grid, write_roof_csv,
    write_yield_csv, FootprintRatioTable, GroundPvYield, PvParams, RoofClassModel, RoofYield,
};
use crate::wind::{
    default_turbine_db, read_turbine_db, wind_potential, write_sites_csv, RoughnessTable,
    TurbineSpacing, TurbineSpec, WindPotential,
};

/// Settlement buffer distance per country, metres.
pub const SETTLEMENT_BUFFERS: [(Country, f64); 3] = [
    (Country::England, 350.0),
    (Country::Scotland, 2000.0),
    (Country::Wales, 500.0),
];
/// Wind is excluded on slopes above this many degrees.
pub const WIND_SLOPE_LIMIT: f64 = 20.0;
/// Ground PV is excluded on slopes above this many degrees.
pub const PV_SLOPE_LIMIT: f64 = 15.0;

/// Which land-use codes (three-digit land-cover codes, shared by the land-use layer) count as
/// suitable for each technology, and which are settlements for buffering.
#[derive(Debug, Clone, PartialEq)]
pub struct LandUseRules {
    pub wind_positive: BTreeSet<i32>,
    pub pv_positive: BTreeSet<i32>,
    pub settlement: BTreeSet<i32>,
}

impl Default for LandUseRules {
    fn default() -> Self {
        let agriculture = [211, 212, 213, 221, 222, 223, 231, 241, 242, 243, 244];
        Self {
            wind_positive: agriculture
                .into_iter()
                .chain([321, 322, 323, 324, 333])
                .collect(),
            pv_positive: agriculture.into_iter().chain([321, 324, 333]).collect(),
            settlement: [111, 112].into_iter().collect(),
        }
    }
}

/// Input layers before alignment. Irradiance is in W/m².
#[derive(Debug, Clone)]
pub struct RawLayers {
    pub dem: NumericGrid,
    pub wind_speed: NumericGrid,
    pub irradiance: NumericGrid,
    pub scenicness: NumericGrid,
    pub votes: NumericGrid,
    pub landcover: CategoricalGrid,
    pub country: CategoricalGrid,
    pub landuse: Option<CategoricalGrid>,
    /// National grade labels carried in the legend.
    pub ag_grade: Option<CategoricalGrid>,
    pub protected: Option<Mask>,
    /// Region grid whose legend labels are LA codes, with the LA table.
    pub regions: Option<(CategoricalGrid, LaTable)>,
}

/// Technology and cost assumptions for a run.
#[derive(Debug, Clone)]
pub struct ModelSettings {
    pub pv: PvParams,
    pub origin_latitude: f64,
    pub install_tilt: Option<f64>,
    pub turbines: Vec<TurbineSpec>,
    pub roughness: RoughnessTable,
    /// Defaults to the built-in model at the grid's central latitude.
    pub roof_model: Option<RoofClassModel>,
    pub footprint_ratios: FootprintRatioTable,
    pub spacing: TurbineSpacing,
    pub rules: LandUseRules,
    pub econ_wind: EconParams,
    pub econ_pv_ground: EconParams,
    pub econ_pv_roof: EconParams,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            pv: PvParams::default(),
            origin_latitude: 50.0,
            install_tilt: None,
            turbines: default_turbine_db(),
            roughness: RoughnessTable::landcover_default(),
            roof_model: None,
            footprint_ratios: FootprintRatioTable::default(),
            spacing: TurbineSpacing::default(),
            rules: LandUseRules::default(),
            econ_wind: EconParams::wind(),
            econ_pv_ground: EconParams::ground_pv(),
            econ_pv_roof: EconParams::rooftop_pv(),
        }
    }
}

/// Aligned layers and derived grids, ready for the potential calculations.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub spec: GridSpec,
    pub slope: NumericGrid,
    pub wind_speed: NumericGrid,
    pub irradiance: NumericGrid,
    pub scenic: EffectiveScenicness,
    pub landcover: CategoricalGrid,
    pub landuse: CategoricalGrid,
    pub country: CategoricalGrid,
    pub ag: AgGradeGrid,
    pub protected: Mask,
    pub regions: Option<(CategoricalGrid, LaTable)>,
    pub pv_gain: NumericGrid,
    pub roof_model: RoofClassModel,
    pub settings: ModelSettings,
}

impl Inputs {
    /// Resamples every layer onto `spec` and derives slope, effective
    /// scenicness, unified grades and the PV tilt gain.
    pub fn assemble(raw: RawLayers, spec: &GridSpec, settings: ModelSettings) -> Result<Self> {
        let dem = resample_nearest(&raw.dem, spec)?;
        let slope = compute_slope(&dem)?;
        let country = resample_nearest(&raw.country, spec)?;
        let landcover = resample_nearest(&raw.landcover, spec)?;
        let landuse = match &raw.landuse {
            Some(g) => resample_nearest(g, spec)?,
            None => {
                CategoricalGrid::with_numeric_legend(spec.clone(), vec![-9999; spec.len()], -9999)?
            }
        };
        let ag = match &raw.ag_grade {
            Some(g) => AgGradeGrid::from_raw(&resample_nearest(g, spec)?, &country)?,
            None => AgGradeGrid::ungraded(spec.clone()),
        };
        let protected = match &raw.protected {
            Some(m) => resample_nearest(m, spec)?,
            None => Mask::empty(spec.clone()),
        };
        let regions = match &raw.regions {
            Some((g, t)) => Some((resample_nearest(g, spec)?, t.clone())),
            None => None,
        };
        let scenic = EffectiveScenicness::new(
            &resample_nearest(&raw.scenicness, spec)?,
            &resample_nearest(&raw.votes, spec)?,
        )?;
        let pv_gain = match settings.install_tilt {
            None => tilt_gain_grid(spec, settings.origin_latitude),
            Some(t) => {
                let lat = latitude_grid(spec, settings.origin_latitude);
                NumericGrid::from_fn(spec.clone(), |i| gain_at_tilt(lat.values()[i], t))
            }
        };
        let roof_model = match &settings.roof_model {
            Some(m) => m.clone(),
            None => {
                let lat = latitude_grid(spec, settings.origin_latitude);
                let (lo, hi) = lat
                    .min_max()
                    .unwrap_or((settings.origin_latitude, settings.origin_latitude));
                RoofClassModel::default_for_latitude(0.5 * (lo + hi))
            }
        };
        Ok(Self {
            spec: spec.clone(),
            slope,
            wind_speed: resample_nearest(&raw.wind_speed, spec)?,
            irradiance: resample_nearest(&raw.irradiance, spec)?,
            scenic,
            landcover,
            landuse,
            country,
            ag,
            protected,
            regions,
            pv_gain,
            roof_model,
            settings,
        })
    }

    /// Reads every layer named in `cfg` and assembles it.
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        cfg.check_files()?;
        let l = &cfg.layers;
        let crs = cfg.grid.crs_label.as_str();
        let irradiance = cfg.irradiance_unit.to_watts(
            read_ascii(&l.irradiance, crs)?,
            PvParams::default().hours_per_year,
        )?;
        let ag_grade = match (&l.ag_grade, &l.ag_legend) {
            (Some(g), Some(legend)) => Some(read_categorical_ascii(
                g,
                Some(read_legend_csv(legend)?),
                crs,
            )?),
            _ => None,
        };
        let regions = match (&l.regions, &l.region_legend, &l.la_table) {
            (Some(g), Some(legend), Some(t)) => Some((
                read_categorical_ascii(g, Some(read_legend_csv(legend)?), crs)?,
                LaTable::read_csv(t)?,
            )),
            _ => None,
        };
        let raw = RawLayers {
            dem: read_ascii(&l.dem, crs)?,
            wind_speed: read_ascii(&l.wind_speed, crs)?,
            irradiance,
            scenicness: read_ascii(&l.scenicness, crs)?,
            votes: read_ascii(&l.votes, crs)?,
            landcover: read_categorical_ascii(&l.landcover, None, crs)?,
            country: read_categorical_ascii(&l.country, None, crs)?,
            landuse: l
                .landuse
                .as_ref()
                .map(|p| read_categorical_ascii(p, None, crs))
                .transpose()?,
            ag_grade,
            protected: l
                .protected
                .as_ref()
                .map(|p| read_mask_ascii(p, crs))
                .transpose()?,
            regions,
        };
        let mut settings = ModelSettings {
            origin_latitude: cfg.origin_latitude,
            install_tilt: cfg.install_tilt,
            ..ModelSettings::default()
        };
        if let (Some(db), Some(curves)) = (&l.turbines, &l.turbine_curves) {
            settings.turbines = read_turbine_db(db, curves)?;
        }
        if let Some(p) = &l.roughness {
            settings.roughness = RoughnessTable::read_csv(p)?;
        }
        if let Some(p) = &l.roof_classes {
            settings.roof_model = Some(RoofClassModel::read_csv(p)?);
        }
        if let Some(p) = &l.footprint_ratios {
            settings.footprint_ratios = FootprintRatioTable::read_csv(p)?;
        }
        Self::assemble(raw, &cfg.grid, settings)
    }
}

/// Geographic potentials before any scenario filter.
#[derive(Debug, Clone)]
pub struct GeoMasks {
    pub wind: Mask,
    pub pv_ground: Mask,
    /// Land-use category of each wind-eligible cell, land-use layer before land cover.
    pub wind_categories: CategoricalGrid,
}

/// Wind: suitable land minus protected areas, country-specific settlement
/// buffers and slopes above 20°. Ground PV: suitable land minus protected
/// areas and slopes above 15°. Both are limited to cells with a country.
pub fn geographic_masks(inputs: &Inputs) -> Result<GeoMasks> {
    let rules = &inputs.settings.rules;
    let in_country = inputs
        .country
        .mask_where(|c| Country::from_code(c).is_some());
    let suitable = |positive: &BTreeSet<i32>| -> Result<Mask> {
        let lu_pos = inputs.landuse.mask_where(|c| positive.contains(&c));
        let lu_neg = inputs.landuse.mask_where(|c| !positive.contains(&c));
        let lc_pos = inputs.landcover.mask_where(|c| positive.contains(&c));
        compose_precedence(&lu_pos, &lu_neg, &lc_pos)?.intersection(&in_country)
    };

    let settlement = inputs
        .landcover
        .mask_where(|c| rules.settlement.contains(&c))
        .union(&inputs.landuse.mask_where(|c| rules.settlement.contains(&c)))?;
    let buffered: Vec<Mask> = SETTLEMENT_BUFFERS
        .par_iter()
        .map(|&(country, d)| {
            let near = buffer_mask(&settlement, d)?;
            near.intersection(&inputs.country.mask_where(|c| c == country.code()))
        })
        .collect::<Result<_>>()?;
    let mut settlement_zone = Mask::empty(inputs.spec.clone());
    for b in &buffered {
        settlement_zone = settlement_zone.union(b)?;
    }

    let wind = geographic_potential(
        &suitable(&rules.wind_positive)?,
        &[(inputs.protected.clone(), 0.0), (settlement_zone, 0.0)],
        &inputs.slope,
        WIND_SLOPE_LIMIT,
    )?;
    let pv_ground = geographic_potential(
        &suitable(&rules.pv_positive)?,
        &[(inputs.protected.clone(), 0.0)],
        &inputs.slope,
        PV_SLOPE_LIMIT,
    )?;
    let wind_categories = attach_categories(&wind, &inputs.landuse, &inputs.landcover)?;
    Ok(GeoMasks {
        wind,
        pv_ground,
        wind_categories,
    })
}

/// Per-site results over the geographic potentials. LCOE vectors run
/// parallel to the cell vectors; `None` marks cells without energy.
#[derive(Debug, Clone, Default)]
pub struct SiteTables {
    pub wind: WindPotential,
    pub pv_ground: GroundPvYield,
    pub pv_ground_lcoe: Vec<Option<f64>>,
    pub pv_roof: RoofYield,
    pub pv_roof_lcoe: Vec<Option<f64>>,
}

pub fn site_tables(inputs: &Inputs, geo: &GeoMasks, tech: Technologies) -> Result<SiteTables> {
    let s = &inputs.settings;
    let mut out = SiteTables::default();
    if tech.wind {
        out.wind = wind_potential(
            &geo.wind,
            &inputs.wind_speed,
            &geo.wind_categories,
            &s.roughness,
            &s.turbines,
            &s.econ_wind,
            &s.spacing,
        )?;
    }
    if tech.pv_ground {
        out.pv_ground = crate::solar::pv_ground_potential(
            &geo.pv_ground,
            &inputs.irradiance,
            &s.pv,
            &inputs.pv_gain,
        )?;
        out.pv_ground_lcoe = out
            .pv_ground
            .cells
            .iter()
            .map(|c| specific_lcoe(&s.econ_pv_ground, c.energy_kwh, c.capacity_kw(&s.pv)))
            .collect::<Result<_>>()?;
    }
    if tech.pv_roof {
        out.pv_roof = rooftop_potential(
            &inputs.landcover,
            &inputs.irradiance,
            &s.footprint_ratios,
            &inputs.roof_model,
            &s.pv,
        )?;
        out.pv_roof_lcoe = out
            .pv_roof
            .cells
            .iter()
            .map(|c| specific_lcoe(&s.econ_pv_roof, c.energy_kwh, c.capacity_kw(&s.pv)))
            .collect::<Result<_>>()?;
    }
    Ok(out)
}

fn specific_lcoe(params: &EconParams, energy_kwh: f64, capacity_kw: f64) -> Result<Option<f64>> {
    if energy_kwh > 0.0 && capacity_kw > 0.0 {
        lcoe(params, energy_kwh / capacity_kw).map(Some)
    } else {
        Ok(None)
    }
}

/// One row of the scenario summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTotals {
    pub id: u8,
    pub label: String,
    pub wind_area_km2: f64,
    pub wind_twh: f64,
    pub wind_capacity_gw: f64,
    pub pv_ground_area_km2: f64,
    pub pv_ground_twh: f64,
    pub pv_roof_area_km2: f64,
    pub pv_roof_twh: f64,
}

/// Scenario masks and totals.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub wind_mask: Mask,
    pub pv_ground_mask: Mask,
    pub totals: ScenarioTotals,
}

/// Filters the site tables through one scenario.
pub fn evaluate_scenario(
    inputs: &Inputs,
    geo: &GeoMasks,
    sites: &SiteTables,
    cfg: &ScenarioConfig,
    tech: Technologies,
) -> Result<ScenarioResult> {
    let wind_mask =
        apply_scenario_effective(&geo.wind, &inputs.scenic, &inputs.ag, &cfg.wind_filter())?;
    let pv_ground_mask = apply_scenario_effective(
        &geo.pv_ground,
        &inputs.scenic,
        &inputs.ag,
        &cfg.pv_ground_filter(),
    )?;
    let cell_km2 = inputs.spec.cell_area() / 1e6;
    let on = |a: bool, b: bool| a && b;
    let mut t = ScenarioTotals {
        id: cfg.id,
        label: cfg.label.clone(),
        wind_area_km2: 0.0,
        wind_twh: 0.0,
        wind_capacity_gw: 0.0,
        pv_ground_area_km2: 0.0,
        pv_ground_twh: 0.0,
        pv_roof_area_km2: 0.0,
        pv_roof_twh: 0.0,
    };
    if on(tech.wind, cfg.technologies.wind) {
        let (mut kwh, mut kw) = (0.0, 0.0);
        for s in sites.wind.sites.iter().filter(|s| wind_mask.get(s.cell)) {
            kwh += s.energy_kwh;
            kw += s.capacity_kw;
        }
        t.wind_area_km2 = wind_mask.count() as f64 * cell_km2;
        t.wind_twh = kwh / 1e9;
        t.wind_capacity_gw = kw / 1e6;
    }
    if on(tech.pv_ground, cfg.technologies.pv_ground) {
        let kwh: f64 = sites
            .pv_ground
            .cells
            .iter()
            .filter(|c| pv_ground_mask.get(c.cell))
            .map(|c| c.energy_kwh)
            .sum();
        t.pv_ground_area_km2 = pv_ground_mask.count() as f64 * cell_km2;
        t.pv_ground_twh = kwh / 1e9;
    }
    if on(tech.pv_roof, cfg.technologies.pv_roof) {
        t.pv_roof_area_km2 = sites.pv_roof.total_roof_area_m2 / 1e6;
        t.pv_roof_twh = sites.pv_roof.total_kwh / 1e9;
    }
    Ok(ScenarioResult {
        config: cfg.clone(),
        wind_mask,
        pv_ground_mask,
        totals: t,
    })
}

const TOTALS_HEADER: &str = "scenario_id,label,wind_area_km2,wind_TWh,wind_capacity_GW,pv_ground_area_km2,pv_ground_TWh,pv_roof_area_km2,pv_roof_TWh";

pub fn write_scenario_totals_csv(rows: &[ScenarioTotals]) -> String {
    let mut s = format!("{TOTALS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.id,
            r.label.replace(',', ";"),
            sig6(r.wind_area_km2),
            sig6(r.wind_twh),
            sig6(r.wind_capacity_gw),
            sig6(r.pv_ground_area_km2),
            sig6(r.pv_ground_twh),
            sig6(r.pv_roof_area_km2),
            sig6(r.pv_roof_twh)
        );
    }
    s
}

pub fn parse_scenario_totals_csv(text: &str, source: &Path) -> Result<Vec<ScenarioTotals>> {
    let mut rdr = csvio::reader_from_str(text);
    let headers = rdr.headers()?.clone();
    let cols: Vec<usize> = TOTALS_HEADER
        .split(',')
        .map(|name| csvio::column(&headers, name, source))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let num = |k: usize| csvio::parse_f64(&rec, cols[k], source, line);
        let raw_id = csvio::field(&rec, cols[0]);
        out.push(ScenarioTotals {
            id: raw_id
                .parse()
                .map_err(|_| Error::parse(source, line, format!("bad scenario id `{raw_id}`")))?,
            label: csvio::field(&rec, cols[1]).to_string(),
            wind_area_km2: num(2)?,
            wind_twh: num(3)?,
            wind_capacity_gw: num(4)?,
            pv_ground_area_km2: num(5)?,
            pv_ground_twh: num(6)?,
            pv_roof_area_km2: num(7)?,
            pv_roof_twh: num(8)?,
        });
    }
    Ok(out)
}

/// Switches for [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub scenarios: Vec<ScenarioConfig>,
    pub technologies: Technologies,
    pub overlap_mode: OverlapMode,
    pub lcoe_weighting: LcoeWeighting,
    pub write_sites: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            scenarios: ScenarioConfig::builtins(),
            technologies: Technologies::default(),
            overlap_mode: OverlapMode::default(),
            lcoe_weighting: LcoeWeighting::default(),
            write_sites: true,
        }
    }
}

impl RunOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            scenarios: cfg.scenarios.clone(),
            technologies: cfg.technologies,
            overlap_mode: cfg.overlap_mode,
            lcoe_weighting: cfg.lcoe_weighting,
            write_sites: cfg.write_sites,
        }
    }
}

/// Everything a run produces. `files` maps output paths relative to the
/// output directory to their contents; `warnings` lists empty plots and
/// similar non-fatal findings.
#[derive(Debug, Clone)]
pub struct RunResults {
    pub totals: Vec<ScenarioTotals>,
    pub files: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

/// Runs every stage on aligned inputs and renders all outputs in memory.
pub fn run_pipeline(inputs: &Inputs, opts: &RunOptions) -> Result<RunResults> {
    let tech = opts.technologies;
    let geo = geographic_masks(inputs)?;
    let sites = site_tables(inputs, &geo, tech)?;
    let scenarios: Vec<ScenarioResult> = opts
        .scenarios
        .par_iter()
        .map(|cfg| evaluate_scenario(inputs, &geo, &sites, cfg, tech))
        .collect::<Result<_>>()?;

    let mut files = BTreeMap::new();
    let mut warnings = Vec::new();
    let totals: Vec<ScenarioTotals> = scenarios.iter().map(|s| s.totals.clone()).collect();
    files.insert(
        "scenario_totals.csv".to_string(),
        write_scenario_totals_csv(&totals),
    );

    // Cost curves: wind and ground PV per scenario, rooftop once.
    let mut curve_jobs: Vec<(String, Vec<CurveSite>)> = Vec::new();
    for sc in &scenarios {
        let id = sc.config.id;
        if tech.wind && sc.config.technologies.wind {
            let v = sites
                .wind
                .sites
                .iter()
                .filter(|s| sc.wind_mask.get(s.cell))
                .filter_map(|s| s.lcoe().map(|l| curve_site(s.cell, s.energy_kwh, l)))
                .collect();
            curve_jobs.push((format!("curves/wind_s{id}"), v));
        }
        if tech.pv_ground && sc.config.technologies.pv_ground {
            let v = sites
                .pv_ground
                .cells
                .iter()
                .zip(&sites.pv_ground_lcoe)
                .filter(|(c, _)| sc.pv_ground_mask.get(c.cell))
                .filter_map(|(c, l)| l.map(|l| curve_site(c.cell, c.energy_kwh, l)))
                .collect();
            curve_jobs.push((format!("curves/pv_ground_s{id}"), v));
        }
    }
    if tech.pv_roof {
        let v = sites
            .pv_roof
            .cells
            .iter()
            .zip(&sites.pv_roof_lcoe)
            .filter_map(|(c, l)| l.map(|l| curve_site(c.cell, c.energy_kwh, l)))
            .collect();
        curve_jobs.push(("curves/pv_roof".to_string(), v));
    }
    let rendered: Vec<(String, String, String, bool)> = curve_jobs
        .par_iter()
        .map(|(name, v)| {
            let curve = cost_curve(v)?;
            let plot = render_cost_curve(&curve, name.trim_start_matches("curves/"));
            Ok((name.clone(), write_curve_csv(&curve), plot.svg, plot.empty))
        })
        .collect::<Result<_>>()?;
    for (name, csv, svg, empty) in rendered {
        if empty {
            warnings.push(format!("{name}: empty cost curve"));
        }
        files.insert(format!("{name}.csv"), csv);
        files.insert(format!("{name}.svg"), svg);
    }

    if let Some((region_grid, table)) = &inputs.regions {
        let mut la = String::new();
        let mut first = true;
        for sc in &scenarios {
            let id = sc.config.id;
            let mut emit = |tech_name: &str, cells: Vec<(usize, f64)>| -> Result<()> {
                let agg = aggregate_to_la(&cells, region_grid, table)?;
                write_la_csv(&mut la, &agg, tech_name, id, first);
                first = false;
                Ok(())
            };
            if tech.wind && sc.config.technologies.wind {
                emit(
                    "wind",
                    sites
                        .wind
                        .sites
                        .iter()
                        .filter(|s| sc.wind_mask.get(s.cell))
                        .map(|s| (s.cell, s.energy_kwh))
                        .collect(),
                )?;
            }
            if tech.pv_ground && sc.config.technologies.pv_ground {
                emit(
                    "pv_ground",
                    sites
                        .pv_ground
                        .cells
                        .iter()
                        .filter(|c| sc.pv_ground_mask.get(c.cell))
                        .map(|c| (c.cell, c.energy_kwh))
                        .collect(),
                )?;
            }
            if tech.pv_roof && sc.config.technologies.pv_roof {
                emit(
                    "pv_roof",
                    sites
                        .pv_roof
                        .cells
                        .iter()
                        .map(|c| (c.cell, c.energy_kwh))
                        .collect(),
                )?;
            }
        }
        files.insert("la_results.csv".to_string(), la);
    }
    if let Some(report) = overlap_report(inputs, &geo, opts.overlap_mode)? {
        files.insert("overlap.csv".to_string(), write_overlap_csv(&report));
    }

    let mut scenic = String::from("tech,level,n_sites,mean_lcoe_GBP_per_kWh\n");
    let mut scenic_rows = |name: &str, v: Vec<(f64, f64, f64)>| {
        for p in scenic_lcoe_curve(&v, opts.lcoe_weighting) {
            let _ = writeln!(
                scenic,
                "{name},{},{},{}",
                p.level,
                p.n_sites,
                p.mean_lcoe.map(sig6).unwrap_or_default()
            );
        }
    };
    if tech.wind {
        scenic_rows(
            "wind",
            sites
                .wind
                .sites
                .iter()
                .filter_map(|s| {
                    s.lcoe()
                        .map(|l| (inputs.scenic.value(s.cell), l, s.energy_kwh))
                })
                .collect(),
        );
    }
    if tech.pv_ground {
        scenic_rows(
            "pv_ground",
            sites
                .pv_ground
                .cells
                .iter()
                .zip(&sites.pv_ground_lcoe)
                .filter_map(|(c, l)| l.map(|l| (inputs.scenic.value(c.cell), l, c.energy_kwh)))
                .collect(),
        );
    }
    files.insert("scenic_lcoe.csv".to_string(), scenic);

    if opts.write_sites {
        if tech.wind {
            files.insert(
                "sites/wind.csv".to_string(),
                write_sites_csv(&sites.wind.sites),
            );
        }
        if tech.pv_ground {
            files.insert(
                "sites/pv_ground.csv".to_string(),
                write_yield_csv(&sites.pv_ground.cells),
            );
        }
        if tech.pv_roof {
            files.insert(
                "sites/pv_roof.csv".to_string(),
                write_roof_csv(&sites.pv_roof.cells),
            );
        }
    }
    Ok(RunResults {
        totals,
        files,
        warnings,
    })
}

/// Overlap of wind-eligible land at each scenicness threshold with ground
/// PV under the low-restriction grade exclusion. `None` without regions.
pub fn overlap_report(
    inputs: &Inputs,
    geo: &GeoMasks,
    mode: OverlapMode,
) -> Result<Option<OverlapReport>> {
    let Some((region_grid, _)) = &inputs.regions else {
        return Ok(None);
    };
    let low = ScenarioConfig::builtin(5)?;
    let pv = apply_scenario_effective(
        &geo.pv_ground,
        &inputs.scenic,
        &inputs.ag,
        &low.pv_ground_filter(),
    )?;
    let wind_masks: Vec<(f64, Mask)> = SCENIC_THRESHOLDS
        .par_iter()
        .map(|&t| {
            let cfg = ScenarioConfig::new(0, t, [], "")?;
            Ok((
                t,
                apply_scenario_effective(&geo.wind, &inputs.scenic, &inputs.ag, &cfg)?,
            ))
        })
        .collect::<Result<_>>()?;
    overlap_analysis(&wind_masks, &pv, region_grid, Some(&inputs.landcover), mode).map(Some)
}

fn curve_site(cell: usize, energy_kwh: f64, lcoe: f64) -> CurveSite {
    CurveSite {
        site_id: format!("c{cell}"),
        energy_twh: energy_kwh / 1e9,
        lcoe,
    }
}

/// Writes every rendered file below `dir`, returning the paths written.
pub fn write_outputs(results: &RunResults, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(results.files.len());
    for (name, text) in &results.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        csvio::write_string(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

/// Loads, runs and writes a configured assessment.
pub fn run(cfg: &RunConfig) -> Result<RunResults> {
    let inputs = Inputs::load(cfg)?;
    let results = run_pipeline(&inputs, &RunOptions::from_config(cfg))?;
    write_outputs(&results, &cfg.output_dir)?;
    Ok(results)
}

/// Machine-readable description of a failed run.
pub fn error_report_json(err: &Error) -> String {
    let report = serde_json::json!({
        "status": "error",
        "kind": err.kind(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
        "path": err.path().map(|p| p.display().to_string()),
    });
    serde_json::to_string_pretty(&report).expect("plain JSON value") + "\n"
}
