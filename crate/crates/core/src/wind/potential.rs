use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::profile::{extrapolate_wind, WeibullDistribution};
use super::turbine::{annual_energy, TurbineSpacing, TurbineSpec};
use crate::csvio;
use crate::econ::{lcoe, EconParams};
use crate::error::{Error, Result};
use crate::grid::{CategoricalGrid, Mask, NumericGrid};
use crate::numfmt::sig6;

/// Land-cover code to roughness length z0 in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessTable {
    z0: BTreeMap<i32, f64>,
}

impl RoughnessTable {
    pub fn new(z0: BTreeMap<i32, f64>) -> Result<Self> {
        for (&code, &v) in &z0 {
            if !(v > 0.0 && v < 10.0) {
                return Err(Error::InvalidInput(format!(
                    "roughness {v} m for category {code} outside (0, 10)"
                )));
            }
        }
        Ok(Self { z0 })
    }

    /// Approximate roughness lengths for three-digit land-cover classes.
    pub fn landcover_default() -> Self {
        let pairs: [(i32, f64); 44] = [
            (111, 1.2),
            (112, 0.5),
            (121, 0.5),
            (122, 0.075),
            (123, 0.5),
            (124, 0.0065),
            (131, 0.005),
            (132, 0.005),
            (133, 0.5),
            (141, 0.5),
            (142, 0.5),
            (211, 0.05),
            (212, 0.05),
            (213, 0.05),
            (221, 0.1),
            (222, 0.3),
            (223, 0.3),
            (231, 0.03),
            (241, 0.1),
            (242, 0.1),
            (243, 0.3),
            (244, 0.1),
            (311, 0.75),
            (312, 0.75),
            (313, 0.75),
            (321, 0.03),
            (322, 0.05),
            (323, 0.45),
            (324, 0.6),
            (331, 0.0005),
            (332, 0.005),
            (333, 0.03),
            (334, 0.1),
            (335, 0.001),
            (411, 0.0005),
            (412, 0.0005),
            (421, 0.0005),
            (422, 0.0005),
            (423, 0.0005),
            (511, 0.0005),
            (512, 0.0005),
            (521, 0.0005),
            (522, 0.0005),
            (523, 0.0005),
        ];
        Self {
            z0: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, code: i32) -> Option<f64> {
        self.z0.get(&code).copied()
    }

    pub fn parse_csv(text: &str, source: &Path) -> Result<Self> {
        let mut rdr = csvio::reader_from_str(text);
        let h = rdr.headers()?.clone();
        let c = csvio::column(&h, "category_code", source)?;
        let z = csvio::column(&h, "z0_m", source)?;
        let mut z0 = BTreeMap::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let code: i32 = csvio::field(&rec, c)
                .parse()
                .map_err(|_| Error::parse(source, line, "category_code must be an integer"))?;
            if z0
                .insert(code, csvio::parse_f64(&rec, z, source, line)?)
                .is_some()
            {
                return Err(Error::parse(
                    source,
                    line,
                    format!("duplicate category {code}"),
                ));
            }
        }
        Self::new(z0)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&csvio::read_to_string(path)?, path)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("category_code,z0_m\n");
        for (c, z) in &self.z0 {
            let _ = writeln!(s, "{c},{z}");
        }
        s
    }
}

/// The LCOE-minimising (turbine, hub height) pair at a site.
#[derive(Debug, Clone, PartialEq)]
pub struct TurbineChoice {
    /// Index into the turbine database.
    pub turbine: usize,
    pub name: String,
    pub hub_height_m: f64,
    pub hub_speed: f64,
    /// kWh per turbine per year.
    pub energy_kwh: f64,
    pub full_load_hours: f64,
    pub lcoe: f64,
}

/// Chooses the turbine and hub height with the lowest LCOE for a site with
/// 10 m mean speed `v10` and roughness `z0`, using Rayleigh distributions.
/// Ties go to the higher yield, then to the earlier name, then the lower hub.
/// `Ok(None)` marks a site where no pair produces energy.
pub fn select_turbine(
    v10: f64,
    z0: f64,
    db: &[TurbineSpec],
    econ: &EconParams,
) -> Result<Option<TurbineChoice>> {
    select_turbine_at(v10, z0, db, econ, 2.0)
}

/// [`select_turbine`] with an explicit Weibull shape.
pub fn select_turbine_at(
    v10: f64,
    z0: f64,
    db: &[TurbineSpec],
    econ: &EconParams,
    weibull_shape: f64,
) -> Result<Option<TurbineChoice>> {
    if db.is_empty() {
        return Err(Error::Config("turbine database is empty".into()));
    }
    let mut best: Option<TurbineChoice> = None;
    for (ti, t) in db.iter().enumerate() {
        let params = t.econ(econ);
        for &hub in &t.hub_heights_m {
            let hub_speed = extrapolate_wind(v10, z0, hub)?;
            if hub_speed <= 0.0 {
                continue;
            }
            let dist = WeibullDistribution::from_mean(hub_speed, weibull_shape)?;
            let energy_kwh = annual_energy(t, &dist);
            let flh = energy_kwh / t.rated_power_kw;
            if !(flh > 0.0) {
                continue;
            }
            let cand = TurbineChoice {
                turbine: ti,
                name: t.name.clone(),
                hub_height_m: hub,
                hub_speed,
                energy_kwh,
                full_load_hours: flh,
                lcoe: lcoe(&params, flh)?,
            };
            let better = match &best {
                None => true,
                Some(b) => cand
                    .lcoe
                    .total_cmp(&b.lcoe)
                    .then_with(|| b.energy_kwh.total_cmp(&cand.energy_kwh))
                    .then_with(|| cand.name.cmp(&b.name))
                    .then_with(|| cand.hub_height_m.total_cmp(&b.hub_height_m))
                    .is_lt(),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

/// One eligible wind cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSite {
    pub cell: usize,
    pub v10: f64,
    pub z0: f64,
    /// `None` when no turbine produces energy here.
    pub choice: Option<TurbineChoice>,
    pub n_turbines: u32,
    pub capacity_kw: f64,
    /// kWh/yr for the whole cell.
    pub energy_kwh: f64,
}

impl WindSite {
    pub fn lcoe(&self) -> Option<f64> {
        self.choice.as_ref().map(|c| c.lcoe)
    }
}

#[derive(Debug, Clone, Default)]
pub struct WindPotential {
    pub sites: Vec<WindSite>,
    pub total_kwh: f64,
}

impl WindPotential {
    pub fn total_capacity_kw(&self) -> f64 {
        self.sites.iter().map(|s| s.capacity_kw).sum()
    }
}

/// Wind potential over the eligible cells of `mask`. Each cell is packed with
/// as many turbines of its selected type as fit at `spacing`.
pub fn wind_potential(
    mask: &Mask,
    v10: &NumericGrid,
    landcover: &CategoricalGrid,
    roughness: &RoughnessTable,
    db: &[TurbineSpec],
    econ: &EconParams,
    spacing: &TurbineSpacing,
) -> Result<WindPotential> {
    if db.is_empty() {
        return Err(Error::Config("turbine database is empty".into()));
    }
    let spec = mask.spec();
    spec.ensure_aligned(v10.spec())?;
    spec.ensure_aligned(landcover.spec())?;
    let cell_area = spec.cell_area();

    let mut inputs = Vec::with_capacity(mask.count());
    for i in mask.iter_set() {
        let v = v10
            .get(i)
            .ok_or_else(|| Error::Data(format!("eligible cell {i} has no wind speed")))?;
        if v < 0.0 {
            return Err(Error::Data(format!("negative wind speed {v} at cell {i}")));
        }
        let code = landcover
            .get(i)
            .ok_or_else(|| Error::Data(format!("eligible cell {i} has no land-cover category")))?;
        let z0 = roughness.get(code).ok_or_else(|| {
            Error::Data(format!(
                "land-cover category {code} has no roughness length"
            ))
        })?;
        inputs.push((i, v, z0));
    }

    // Many cells share the same (speed, roughness); evaluate each pair once.
    let keys: BTreeSet<(u64, u64)> = inputs
        .iter()
        .map(|&(_, v, z)| (v.to_bits(), z.to_bits()))
        .collect();
    let keys: Vec<(u64, u64)> = keys.into_iter().collect();
    let choices: Vec<Option<TurbineChoice>> = keys
        .par_iter()
        .map(|&(v, z)| select_turbine(f64::from_bits(v), f64::from_bits(z), db, econ))
        .collect::<Result<_>>()?;
    let memo: HashMap<(u64, u64), Option<TurbineChoice>> = keys.into_iter().zip(choices).collect();

    let mut out = WindPotential::default();
    for (i, v, z0) in inputs {
        let choice = memo[&(v.to_bits(), z0.to_bits())].clone();
        let (n, cap, energy) = match &choice {
            Some(c) => {
                let t = &db[c.turbine];
                let n = (cell_area / t.footprint_m2(spacing)).floor() as u32;
                (
                    n,
                    f64::from(n) * t.rated_power_kw,
                    f64::from(n) * c.energy_kwh,
                )
            }
            None => (0, 0.0, 0.0),
        };
        out.total_kwh += energy;
        out.sites.push(WindSite {
            cell: i,
            v10: v,
            z0,
            choice,
            n_turbines: n,
            capacity_kw: cap,
            energy_kwh: energy,
        });
    }
    Ok(out)
}

/// `cell_id,v10,z0,turbine,hub_m,n_turbines,capacity_kW,energy_kWh,lcoe_GBP_per_kWh`
/// Infeasible cells carry an empty turbine and LCOE.
pub fn write_sites_csv(sites: &[WindSite]) -> String {
    let mut s = String::from(
        "cell_id,v10,z0,turbine,hub_m,n_turbines,capacity_kW,energy_kWh,lcoe_GBP_per_kWh\n",
    );
    for w in sites {
        let (name, hub, lc) = match &w.choice {
            Some(c) => (c.name.as_str(), sig6(c.hub_height_m), sig6(c.lcoe)),
            None => ("", String::new(), String::new()),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            w.cell,
            sig6(w.v10),
            sig6(w.z0),
            name,
            hub,
            w.n_turbines,
            sig6(w.capacity_kw),
            sig6(w.energy_kwh),
            lc
        );
    }
    s
}
