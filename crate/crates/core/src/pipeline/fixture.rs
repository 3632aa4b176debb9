//! Seeded synthetic study area: terrain, wind, irradiance, scenicness,
//! land cover, countries, agricultural grades, protected areas and regions.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Inputs, ModelSettings, RawLayers};
use crate::csvio::write_string;
use crate::error::{Error, Result};
use crate::exclusion::Country;
use crate::grid::{
    write_ascii, write_categorical_ascii, write_legend_csv, write_mask_ascii, CategoricalGrid,
    GridSpec, Mask, NumericGrid, DEFAULT_NODATA,
};
use crate::regions::{LaRegion, LaTable};

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOptions {
    pub rows: usize,
    pub cols: usize,
    /// Metres.
    pub cell_size: f64,
    pub seed: u64,
    pub origin_latitude: f64,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        Self {
            rows: 200,
            cols: 160,
            cell_size: 1000.0,
            seed: 42,
            origin_latitude: 50.0,
        }
    }
}

/// A generated study area.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: GridSpec,
    pub options: FixtureOptions,
    pub layers: RawLayers,
}

const NODATA_I: i32 = -9999;
const SEA: i32 = 523;
const WIND_BLOCK: usize = 5;

/// Sum of random plane waves rescaled to roughly [0, 1].
struct SmoothField {
    waves: Vec<(f64, f64, f64, f64)>,
    norm: f64,
}

impl SmoothField {
    fn new(rng: &mut ChaCha8Rng, n: usize, min_wavelength_km: f64, max_wavelength_km: f64) -> Self {
        let waves: Vec<_> = (0..n)
            .map(|_| {
                let lambda = rng.gen_range(min_wavelength_km..max_wavelength_km);
                let theta = rng.gen_range(0.0..TAU);
                let amp = rng.gen_range(0.5..1.0);
                (
                    theta.cos() * TAU / lambda,
                    theta.sin() * TAU / lambda,
                    rng.gen_range(0.0..TAU),
                    amp,
                )
            })
            .collect();
        let norm = waves.iter().map(|w| w.3).sum();
        Self { waves, norm }
    }

    fn at(&self, x_km: f64, y_km: f64) -> f64 {
        let s: f64 = self
            .waves
            .iter()
            .map(|&(kx, ky, ph, a)| a * (kx * x_km + ky * y_km + ph).sin())
            .sum();
        0.5 + 0.5 * s / self.norm
    }
}

fn round_to(v: f64, step: f64) -> f64 {
    (v / step).round() * step
}

/// Generates a fixture. The same options always give the same layers.
pub fn generate(opts: &FixtureOptions) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (rows, cols, cs) = (opts.rows, opts.cols, opts.cell_size);
    let spec =
        GridSpec::new(rows, cols, cs, cs / 2.0, cs / 2.0, "synthetic").expect("valid fixture grid");
    let n = spec.len();
    let km = cs / 1000.0;

    let relief = SmoothField::new(&mut rng, 5, 80.0, 300.0);
    let hills = SmoothField::new(&mut rng, 8, 6.0, 25.0);
    let windy = SmoothField::new(&mut rng, 5, 40.0, 200.0);
    let sunny = SmoothField::new(&mut rng, 4, 60.0, 250.0);
    let scenic_f = SmoothField::new(&mut rng, 6, 10.0, 80.0);
    let urban = SmoothField::new(&mut rng, 8, 5.0, 30.0);
    let water = SmoothField::new(&mut rng, 6, 8.0, 40.0);
    let forest = SmoothField::new(&mut rng, 6, 8.0, 50.0);
    let farm = SmoothField::new(&mut rng, 6, 5.0, 30.0);
    let lu_cover = SmoothField::new(&mut rng, 6, 10.0, 60.0);
    let soil = SmoothField::new(&mut rng, 6, 10.0, 60.0);
    let coast_phase = rng.gen_range(0.0..TAU);

    let frac = |i: usize| {
        let (r, c) = spec.row_col(i);
        // Row 0 is the northern edge.
        let y = (rows - 1 - r) as f64 / (rows.max(2) - 1) as f64;
        let x = c as f64 / (cols.max(2) - 1) as f64;
        (x, y)
    };
    let pos_km = |i: usize| {
        let (x, y) = spec.cell_center(i);
        (x / 1000.0, y / 1000.0)
    };

    let mut country = vec![NODATA_I; n];
    let mut dem = vec![0.0; n];
    let mut landcover = vec![SEA; n];
    for i in 0..n {
        let (x, y) = frac(i);
        let (xk, yk) = pos_km(i);
        let coast = 0.9 + 0.06 * (TAU * 3.0 * y + coast_phase).sin();
        if x > coast {
            continue;
        }
        let c = if y > 0.62 {
            Country::Scotland
        } else if y > 0.3 && x < 0.28 + 0.04 * (TAU * 2.0 * y).sin() {
            Country::Wales
        } else {
            Country::England
        };
        country[i] = c.code();
        let rugged =
            1.0 + 3.0 * ((y - 0.55).max(0.0) / 0.45) + if c == Country::Wales { 1.0 } else { 0.0 };
        dem[i] = round_to(
            30.0 + 500.0 * relief.at(xk, yk) + 260.0 * rugged * (hills.at(xk, yk) - 0.3).max(0.0),
            0.1,
        );
    }
    for i in 0..n {
        if country[i] == NODATA_I {
            continue;
        }
        let (xk, yk) = pos_km(i);
        let jitter = rng.gen_range(-0.03..0.03);
        let u = urban.at(xk, yk) + jitter;
        landcover[i] = if u > 0.85 {
            111
        } else if u > 0.76 {
            112
        } else if u > 0.73 {
            121
        } else if water.at(xk, yk) > 0.86 {
            512
        } else if forest.at(xk, yk) + jitter > 0.68 {
            if dem[i] > 400.0 {
                312
            } else {
                311
            }
        } else if dem[i] > 520.0 {
            if farm.at(xk, yk) > 0.5 {
                322
            } else {
                321
            }
        } else {
            let a = farm.at(xk, yk) + jitter;
            if a < 0.42 {
                211
            } else if a < 0.58 {
                231
            } else if a < 0.66 {
                243
            } else {
                242
            }
        };
    }

    // Wind: smooth field evaluated once per block so neighbouring cells
    // share speeds, rounded to 0.05 m/s.
    let mut wind = vec![DEFAULT_NODATA; n];
    for i in 0..n {
        let (r, c) = spec.row_col(i);
        let bi = spec.index(
            (r / WIND_BLOCK * WIND_BLOCK).min(rows - 1),
            (c / WIND_BLOCK * WIND_BLOCK).min(cols - 1),
        );
        let (_, y) = frac(bi);
        let (xk, yk) = pos_km(bi);
        let v = 4.2 + 2.8 * y + 3.0 * (windy.at(xk, yk) - 0.5) + 0.002 * dem[bi];
        wind[i] = round_to(v.max(2.0), 0.05);
    }

    let mut irradiance = vec![0.0; n];
    let mut scenic = vec![DEFAULT_NODATA; n];
    let mut votes = vec![0.0; n];
    for i in 0..n {
        let (_, y) = frac(i);
        let (xk, yk) = pos_km(i);
        irradiance[i] = round_to(120.0 - 24.0 * y + 8.0 * (sunny.at(xk, yk) - 0.5), 0.01);
        votes[i] = f64::from(rng.gen_range(0u8..=10));
        if rng.gen_bool(0.03) {
            continue;
        }
        let s =
            0.2 + 7.0 * scenic_f.at(xk, yk) + 2.0 * y + 0.0015 * dem[i] + rng.gen_range(-0.5..0.5);
        scenic[i] = round_to(s.clamp(1.0, 10.0), 0.01);
    }

    let mut landuse = vec![NODATA_I; n];
    for i in 0..n {
        if country[i] == NODATA_I {
            continue;
        }
        let (xk, yk) = pos_km(i);
        if lu_cover.at(xk, yk) > 0.62 {
            let p: f64 = rng.gen();
            landuse[i] = if p < 0.15 {
                112
            } else if p < 0.25 {
                231
            } else {
                landcover[i]
            };
        }
    }

    // Agricultural grades on farmland, in each nation's own labels.
    let ew_labels = ["1", "2", "3a", "3b", "4", "5"];
    let mut ag = vec![NODATA_I; n];
    for i in 0..n {
        if !(200..300).contains(&landcover[i]) {
            continue;
        }
        let (xk, yk) = pos_km(i);
        let q = (soil.at(xk, yk) + 0.0004 * dem[i] + rng.gen_range(-0.05..0.05)).clamp(0.0, 0.999);
        ag[i] = if country[i] == Country::Scotland.code() {
            11 + (q * 7.0) as i32
        } else {
            1 + (q * 6.0) as i32
        };
    }
    let mut ag_legend: BTreeMap<i32, String> = ew_labels
        .iter()
        .enumerate()
        .map(|(k, l)| (k as i32 + 1, l.to_string()))
        .collect();
    for k in 1..=7 {
        ag_legend.insert(10 + k, k.to_string());
    }

    let mut protected = vec![false; n];
    let n_areas = (n / 40_000).max(2);
    for _ in 0..n_areas {
        let (r0, c0) = (rng.gen_range(0..rows) as f64, rng.gen_range(0..cols) as f64);
        let rad = rng.gen_range(2.0..(rows.min(cols) as f64 / 15.0 + 3.0));
        for i in 0..n {
            let (r, c) = spec.row_col(i);
            if (r as f64 - r0).powi(2) + (c as f64 - c0).powi(2) <= rad * rad {
                protected[i] = true;
            }
        }
    }

    // Regions: square blocks labelled with an LA-style code by the country
    // of their first land cell.
    let block = rows.max(cols).div_ceil(8).max(4);
    let blocks_per_row = cols.div_ceil(block);
    let mut region = vec![NODATA_I; n];
    let mut block_cells: BTreeMap<i32, (usize, i32)> = BTreeMap::new();
    for i in 0..n {
        if country[i] == NODATA_I {
            continue;
        }
        let (r, c) = spec.row_col(i);
        let id = (r / block * blocks_per_row + c / block) as i32 + 1;
        region[i] = id;
        let e = block_cells.entry(id).or_insert((0, country[i]));
        e.0 += 1;
    }
    let mut region_legend = BTreeMap::new();
    let mut las = Vec::new();
    for (&id, &(cells, ctry)) in &block_cells {
        let prefix = match Country::from_code(ctry) {
            Some(Country::Scotland) => "S12",
            Some(Country::Wales) => "W06",
            _ => "E06",
        };
        let code = format!("{prefix}{id:06}");
        region_legend.insert(id, code.clone());
        las.push(LaRegion {
            code,
            name: format!("Area {id}"),
            area_km2: cells as f64 * km * km,
        });
    }

    let num =
        |v: Vec<f64>| NumericGrid::new(spec.clone(), v, DEFAULT_NODATA).expect("fixture grid");
    let cat = |v: Vec<i32>| {
        CategoricalGrid::with_numeric_legend(spec.clone(), v, NODATA_I).expect("fixture grid")
    };
    let layers = RawLayers {
        dem: num(dem
            .iter()
            .zip(&country)
            .map(|(&d, &c)| if c == NODATA_I { 0.0 } else { d })
            .collect()),
        wind_speed: num(wind),
        irradiance: num(irradiance),
        scenicness: num(scenic),
        votes: num(votes),
        landcover: cat(landcover),
        country: cat(country),
        landuse: Some(cat(landuse)),
        ag_grade: Some(
            CategoricalGrid::new(spec.clone(), ag, NODATA_I, ag_legend).expect("fixture grid"),
        ),
        protected: Some(Mask::new(spec.clone(), protected).expect("fixture grid")),
        regions: Some((
            CategoricalGrid::new(spec.clone(), region, NODATA_I, region_legend)
                .expect("fixture grid"),
            LaTable::new(las).expect("fixture regions"),
        )),
    };
    Fixture {
        spec,
        options: opts.clone(),
        layers,
    }
}

impl Fixture {
    /// Settings matching the fixture's latitude.
    pub fn settings(&self) -> ModelSettings {
        ModelSettings {
            origin_latitude: self.options.origin_latitude,
            ..ModelSettings::default()
        }
    }

    /// Assembles the fixture on its own grid with default settings.
    pub fn inputs(&self) -> Result<Inputs> {
        Inputs::assemble(self.layers.clone(), &self.spec, self.settings())
    }

    /// Writes every layer plus a `run.cfg` into `dir` and returns the config path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let l = &self.layers;
        write_ascii(dir.join("dem.asc"), &l.dem)?;
        write_ascii(dir.join("wind10.asc"), &l.wind_speed)?;
        write_ascii(dir.join("irradiance.asc"), &l.irradiance)?;
        write_ascii(dir.join("scenicness.asc"), &l.scenicness)?;
        write_ascii(dir.join("votes.asc"), &l.votes)?;
        write_categorical_ascii(dir.join("landcover.asc"), &l.landcover)?;
        write_categorical_ascii(dir.join("country.asc"), &l.country)?;
        if let Some(landuse) = &l.landuse {
            write_categorical_ascii(dir.join("landuse.asc"), landuse)?;
        }
        if let Some(ag) = &l.ag_grade {
            write_categorical_ascii(dir.join("agland.asc"), ag)?;
            write_legend_csv(dir.join("agland_legend.csv"), ag.legend())?;
        }
        if let Some(p) = &l.protected {
            write_mask_ascii(dir.join("protected.asc"), p)?;
        }
        if let Some((g, t)) = &l.regions {
            write_categorical_ascii(dir.join("regions.asc"), g)?;
            write_legend_csv(dir.join("regions_legend.csv"), g.legend())?;
            write_string(&dir.join("la_table.csv"), &t.to_csv())?;
        }
        let s = &self.spec;
        let mut cfg = String::new();
        let _ = writeln!(cfg, "# synthetic fixture, seed {}", self.options.seed);
        let _ = writeln!(
            cfg,
            "grid.rows = {}\ngrid.cols = {}\ngrid.cell_size = {}",
            s.n_rows, s.n_cols, s.cell_size
        );
        let _ = writeln!(
            cfg,
            "grid.origin_x = {}\ngrid.origin_y = {}\ngrid.crs = {}",
            s.origin_x, s.origin_y, s.crs_label
        );
        let _ = writeln!(cfg, "origin_latitude = {}", self.options.origin_latitude);
        cfg.push_str(
            "dem = dem.asc\nwind_speed = wind10.asc\nirradiance = irradiance.asc\nirradiance_unit = w_m2\n\
             scenicness = scenicness.asc\nvotes = votes.asc\nlandcover = landcover.asc\ncountry = country.asc\n",
        );
        if l.landuse.is_some() {
            cfg.push_str("landuse = landuse.asc\n");
        }
        if l.ag_grade.is_some() {
            cfg.push_str("ag_grade = agland.asc\nag_legend = agland_legend.csv\n");
        }
        if l.protected.is_some() {
            cfg.push_str("protected = protected.asc\n");
        }
        if l.regions.is_some() {
            cfg.push_str("regions = regions.asc\nregion_legend = regions_legend.csv\nla_table = la_table.csv\n");
        }
        let _ = writeln!(
            cfg,
            "scenarios = 1,2,3,4,5,6,7,8\noutput_dir = out\nseed = {}",
            self.options.seed
        );
        let path = dir.join("run.cfg");
        write_string(&path, &cfg)?;
        Ok(path)
    }
}
