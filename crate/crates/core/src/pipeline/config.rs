//! Run configuration: a `key = value` file naming the master grid, the input
//! layers and the run switches. Relative paths resolve against the file's
//! directory.

use std::path::{Path, PathBuf};

use crate::csvio::read_to_string;
use crate::error::{Error, Result};
use crate::exclusion::{ScenarioConfig, Technologies};
use crate::grid::GridSpec;
use crate::kvfile::KvFile;
use crate::regions::{LcoeWeighting, OverlapMode};
use crate::solar::IrradianceUnit;

/// Input files. The first seven are required.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPaths {
    pub dem: PathBuf,
    pub wind_speed: PathBuf,
    pub irradiance: PathBuf,
    pub scenicness: PathBuf,
    pub votes: PathBuf,
    pub landcover: PathBuf,
    pub country: PathBuf,
    pub landuse: Option<PathBuf>,
    pub ag_grade: Option<PathBuf>,
    pub ag_legend: Option<PathBuf>,
    pub protected: Option<PathBuf>,
    pub regions: Option<PathBuf>,
    pub region_legend: Option<PathBuf>,
    pub la_table: Option<PathBuf>,
    pub turbines: Option<PathBuf>,
    pub turbine_curves: Option<PathBuf>,
    pub roughness: Option<PathBuf>,
    pub roof_classes: Option<PathBuf>,
    pub footprint_ratios: Option<PathBuf>,
}

impl LayerPaths {
    /// Every configured path, in a fixed order.
    pub fn all(&self) -> Vec<&Path> {
        let mut v: Vec<&Path> = vec![
            &self.dem,
            &self.wind_speed,
            &self.irradiance,
            &self.scenicness,
            &self.votes,
            &self.landcover,
            &self.country,
        ];
        for p in [
            &self.landuse,
            &self.ag_grade,
            &self.ag_legend,
            &self.protected,
            &self.regions,
            &self.region_legend,
            &self.la_table,
            &self.turbines,
            &self.turbine_curves,
            &self.roughness,
            &self.roof_classes,
            &self.footprint_ratios,
        ]
        .into_iter()
        .flatten()
        {
            v.push(p);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub layers: LayerPaths,
    pub irradiance_unit: IrradianceUnit,
    pub scenarios: Vec<ScenarioConfig>,
    pub technologies: Technologies,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub overlap_mode: OverlapMode,
    pub lcoe_weighting: LcoeWeighting,
    /// Latitude of the lower-left cell centre, degrees north.
    pub origin_latitude: f64,
    /// Fixed module tilt for ground PV; the optimal tilt when absent.
    pub install_tilt: Option<f64>,
    pub write_sites: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "grid.rows",
    "grid.cols",
    "grid.cell_size",
    "grid.origin_x",
    "grid.origin_y",
    "grid.crs",
    "dem",
    "wind_speed",
    "irradiance",
    "irradiance_unit",
    "scenicness",
    "votes",
    "landcover",
    "country",
    "landuse",
    "ag_grade",
    "ag_legend",
    "protected",
    "regions",
    "region_legend",
    "la_table",
    "turbines",
    "turbine_curves",
    "roughness",
    "roof_classes",
    "footprint_ratios",
    "scenarios",
    "wind",
    "pv_ground",
    "pv_roof",
    "output_dir",
    "seed",
    "overlap_mode",
    "lcoe_weighting",
    "origin_latitude",
    "install_tilt",
    "write_sites",
];

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let kv = KvFile::parse(text)?;
        if let Some(k) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        let grid = GridSpec::new(
            kv.require_usize("grid.rows")?,
            kv.require_usize("grid.cols")?,
            kv.require_f64("grid.cell_size")?,
            kv.require_f64("grid.origin_x")?,
            kv.require_f64("grid.origin_y")?,
            kv.get("grid.crs").unwrap_or(""),
        )
        .map_err(|e| Error::Config(format!("master grid: {e}")))?;
        let path = |k: &str| -> Result<PathBuf> { Ok(base_dir.join(kv.require(k)?)) };
        let opt = |k: &str| kv.get(k).map(|v| base_dir.join(v));
        let layers = LayerPaths {
            dem: path("dem")?,
            wind_speed: path("wind_speed")?,
            irradiance: path("irradiance")?,
            scenicness: path("scenicness")?,
            votes: path("votes")?,
            landcover: path("landcover")?,
            country: path("country")?,
            landuse: opt("landuse"),
            ag_grade: opt("ag_grade"),
            ag_legend: opt("ag_legend"),
            protected: opt("protected"),
            regions: opt("regions"),
            region_legend: opt("region_legend"),
            la_table: opt("la_table"),
            turbines: opt("turbines"),
            turbine_curves: opt("turbine_curves"),
            roughness: opt("roughness"),
            roof_classes: opt("roof_classes"),
            footprint_ratios: opt("footprint_ratios"),
        };
        let region_keys = [&layers.regions, &layers.region_legend, &layers.la_table];
        if region_keys.iter().any(|p| p.is_some()) && !region_keys.iter().all(|p| p.is_some()) {
            return Err(Error::Config(
                "`regions`, `region_legend` and `la_table` must be given together".into(),
            ));
        }
        if layers.ag_grade.is_some() != layers.ag_legend.is_some() {
            return Err(Error::Config(
                "`ag_grade` needs `ag_legend` and vice versa".into(),
            ));
        }
        if layers.turbines.is_some() != layers.turbine_curves.is_some() {
            return Err(Error::Config(
                "`turbines` needs `turbine_curves` and vice versa".into(),
            ));
        }
        let scenarios = match kv.int_list("scenarios")? {
            None => ScenarioConfig::builtins(),
            Some(ids) => ids
                .into_iter()
                .map(|id| {
                    u8::try_from(id)
                        .map_err(|_| Error::Config(format!("no built-in scenario {id}")))
                        .and_then(ScenarioConfig::builtin)
                })
                .collect::<Result<_>>()?,
        };
        let seed = match kv.get("seed") {
            None => 42,
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("`seed`: `{v}` is not an unsigned integer")))?,
        };
        let install_tilt = match kv.get("install_tilt") {
            None => None,
            Some(_) => {
                let t = kv.require_f64("install_tilt")?;
                if !(0.0..=90.0).contains(&t) {
                    return Err(Error::Config(format!("`install_tilt` {t} outside [0, 90]")));
                }
                Some(t)
            }
        };
        Ok(Self {
            grid,
            layers,
            irradiance_unit: IrradianceUnit::parse(kv.get("irradiance_unit").unwrap_or("w_m2"))?,
            scenarios,
            technologies: Technologies {
                wind: kv.bool_or("wind", true)?,
                pv_ground: kv.bool_or("pv_ground", true)?,
                pv_roof: kv.bool_or("pv_roof", true)?,
            },
            output_dir: base_dir.join(kv.get("output_dir").unwrap_or("out")),
            seed,
            overlap_mode: OverlapMode::parse(kv.get("overlap_mode").unwrap_or("region"))?,
            lcoe_weighting: LcoeWeighting::parse(kv.get("lcoe_weighting").unwrap_or("site"))?,
            origin_latitude: kv.f64_or("origin_latitude", 50.0)?,
            install_tilt,
            write_sites: kv.bool_or("write_sites", true)?,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Fails with an I/O error naming the first configured file that does not exist.
    pub fn check_files(&self) -> Result<()> {
        for p in self.layers.all() {
            std::fs::metadata(p).map_err(|e| Error::io(p, e))?;
        }
        Ok(())
    }
}
