use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::profile::WeibullDistribution;
use crate::csvio;
use crate::econ::{EconParams, OmCost};
use crate::error::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Default integration step over wind speed, m/s.
pub const DEFAULT_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct TurbineSpec {
    pub name: String,
    pub rated_power_kw: f64,
    pub rotor_diameter_m: f64,
    pub hub_heights_m: Vec<f64>,
    /// (speed m/s, power kW), speeds strictly increasing.
    pub power_curve: Vec<(f64, f64)>,
    pub cut_in: f64,
    /// May be infinite for idealised curves.
    pub cut_out: f64,
    /// £/kW
    pub investment: f64,
    /// £/kWh
    pub om_per_kwh: f64,
}

impl TurbineSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(format!("turbine {}: {msg}", self.name)));
        if self.name.is_empty() {
            return Err(Error::InvalidInput("turbine name is empty".into()));
        }
        if !(self.rated_power_kw > 0.0) || !(self.rotor_diameter_m > 0.0) {
            return bad("rated power and rotor diameter must be positive".into());
        }
        if self.hub_heights_m.is_empty() || self.hub_heights_m.iter().any(|h| !(*h >= 10.0)) {
            return bad("needs at least one hub height of 10 m or more".into());
        }
        if self.power_curve.is_empty() {
            return bad("empty power curve".into());
        }
        for w in self.power_curve.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("power curve speeds must be strictly increasing".into());
            }
        }
        for &(v, p) in &self.power_curve {
            if !(v >= 0.0) || !(p >= 0.0) || p > self.rated_power_kw * (1.0 + 1e-12) {
                return bad(format!("power curve point ({v}, {p}) out of range"));
            }
        }
        if !(self.cut_in >= 0.0) || !(self.cut_out > self.cut_in) {
            return bad("cut-in must be non-negative and below cut-out".into());
        }
        if !(self.investment >= 0.0) || !(self.om_per_kwh >= 0.0) {
            return bad("costs must be non-negative".into());
        }
        Ok(())
    }

    /// Electrical output at wind speed `v`: linear between curve points,
    /// held at the end values beyond them, zero outside cut-in..cut-out.
    pub fn power_at(&self, v: f64) -> f64 {
        if v < self.cut_in || v > self.cut_out {
            return 0.0;
        }
        let c = &self.power_curve;
        if v <= c[0].0 {
            return c[0].1;
        }
        let last = c[c.len() - 1];
        if v >= last.0 {
            return last.1;
        }
        let j = c.partition_point(|p| p.0 <= v);
        let (v0, p0) = c[j - 1];
        let (v1, p1) = c[j];
        p0 + (p1 - p0) * (v - v0) / (v1 - v0)
    }

    /// Economics of this turbine on top of a base lifetime and interest rate.
    pub fn econ(&self, base: &EconParams) -> EconParams {
        EconParams {
            investment: self.investment,
            om: OmCost::PerKwh(self.om_per_kwh),
            ..*base
        }
    }

    /// Land occupied by one turbine at the given spacing, m².
    pub fn footprint_m2(&self, spacing: &TurbineSpacing) -> f64 {
        spacing.footprint_m2(self.rotor_diameter_m)
    }

    /// Piecewise description of the power curve used for integration.
    fn pieces(&self) -> Vec<Piece> {
        let mut breaks = vec![self.cut_in];
        for &(v, _) in &self.power_curve {
            if v > self.cut_in && v < self.cut_out {
                breaks.push(v);
            }
        }
        breaks.push(self.cut_out);
        let mut pieces: Vec<Piece> = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pa = self.power_at(a);
            let pb = if b.is_finite() { self.power_at(b) } else { pa };
            let piece = Piece {
                a,
                b,
                pa,
                pb,
                constant: pa == pb,
            };
            match pieces.last_mut() {
                Some(prev)
                    if prev.constant && piece.constant && prev.pa == piece.pa && prev.b == a =>
                {
                    prev.b = b;
                }
                _ => pieces.push(piece),
            }
        }
        pieces
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    pa: f64,
    pb: f64,
    constant: bool,
}

/// Annual energy in kWh of one turbine facing wind-speed distribution `dist`,
/// with the default 0.01 m/s step.
pub fn annual_energy(turbine: &TurbineSpec, dist: &WeibullDistribution) -> f64 {
    annual_energy_with_step(turbine, dist, DEFAULT_STEP)
}

/// `8760 · ∫ P(v) dF(v)`. Linear curve segments are split into sub-intervals
/// no wider than `step` and integrated as midpoint power times probability
/// mass; constant segments, including an unbounded tail, are integrated
/// exactly.
pub fn annual_energy_with_step(
    turbine: &TurbineSpec,
    dist: &WeibullDistribution,
    step: f64,
) -> f64 {
    assert!(step > 0.0, "integration step must be positive");
    let mut mean_power = 0.0;
    for p in turbine.pieces() {
        if p.constant {
            if p.pa != 0.0 {
                mean_power += p.pa * (dist.survival(p.a) - dist.survival(p.b));
            }
            continue;
        }
        let n = ((p.b - p.a) / step).ceil().max(1.0) as usize;
        let h = (p.b - p.a) / n as f64;
        let mut s_lo = dist.survival(p.a);
        for j in 0..n {
            let hi = if j + 1 == n {
                p.b
            } else {
                p.a + (j + 1) as f64 * h
            };
            let s_hi = dist.survival(hi);
            let mid = p.a + (j as f64 + 0.5) * h;
            let power = p.pa + (p.pb - p.pa) * (mid - p.a) / (p.b - p.a);
            mean_power += power * (s_lo - s_hi);
            s_lo = s_hi;
        }
    }
    HOURS_PER_YEAR * mean_power
}

/// Turbine footprint as an ellipse with the given axes in rotor diameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbineSpacing {
    /// Along the prevailing wind.
    pub along_diameters: f64,
    pub across_diameters: f64,
}

impl Default for TurbineSpacing {
    fn default() -> Self {
        Self {
            along_diameters: 8.0,
            across_diameters: 4.0,
        }
    }
}

impl TurbineSpacing {
    pub fn footprint_m2(&self, rotor_diameter: f64) -> f64 {
        std::f64::consts::PI
            * (self.along_diameters * rotor_diameter / 2.0)
            * (self.across_diameters * rotor_diameter / 2.0)
    }
}

/// A power curve rising with the cube of wind speed from `cut_in` to
/// `rated_speed`, sampled every 0.5 m/s, then flat to `cut_out`.
pub fn cubic_power_curve(
    rated_kw: f64,
    cut_in: f64,
    rated_speed: f64,
    cut_out: f64,
) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    let mut v = cut_in;
    let denom = rated_speed.powi(3) - cut_in.powi(3);
    while v < rated_speed - 1e-9 {
        pts.push((v, rated_kw * (v.powi(3) - cut_in.powi(3)) / denom));
        v += 0.5;
    }
    pts.push((rated_speed, rated_kw));
    pts.push((cut_out, rated_kw));
    pts
}

/// Three synthetic turbine classes, small to large.
pub fn default_turbine_db() -> Vec<TurbineSpec> {
    let make =
        |name: &str, kw: f64, d: f64, hubs: &[f64], rated_speed: f64, invest: f64| TurbineSpec {
            name: name.to_string(),
            rated_power_kw: kw,
            rotor_diameter_m: d,
            hub_heights_m: hubs.to_vec(),
            power_curve: cubic_power_curve(kw, 3.0, rated_speed, 25.0),
            cut_in: 3.0,
            cut_out: 25.0,
            investment: invest,
            om_per_kwh: 0.02,
        };
    vec![
        make("small", 2000.0, 82.0, &[60.0, 80.0], 12.0, 1150.0),
        make("medium", 3450.0, 112.0, &[84.0, 94.0, 117.0], 12.0, 1050.0),
        make("large", 4200.0, 136.0, &[112.0, 132.0], 11.5, 1000.0),
    ]
}

/// Parses a turbine table
/// (`name,rated_kW,rotor_m,hub_heights_semicolon_list,cut_in,cut_out,invest_GBP_per_kW,om_GBP_per_kWh`)
/// and its power-curve companion (`name,speed,power`).
pub fn parse_turbine_db(
    db_text: &str,
    db_source: &Path,
    curve_text: &str,
    curve_source: &Path,
) -> Result<Vec<TurbineSpec>> {
    let mut curves: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    {
        let mut rdr = csvio::reader_from_str(curve_text);
        let h = rdr.headers()?.clone();
        let name = csvio::column(&h, "name", curve_source)?;
        let speed = csvio::column(&h, "speed", curve_source)?;
        let power = csvio::column(&h, "power", curve_source)?;
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            curves
                .entry(csvio::field(&rec, name).to_string())
                .or_default()
                .push((
                    csvio::parse_f64(&rec, speed, curve_source, line)?,
                    csvio::parse_f64(&rec, power, curve_source, line)?,
                ));
        }
    }
    let mut rdr = csvio::reader_from_str(db_text);
    let h = rdr.headers()?.clone();
    let col = |n: &str| csvio::column(&h, n, db_source);
    let (name, rated, rotor, hubs, ci, co, inv, om) = (
        col("name")?,
        col("rated_kW")?,
        col("rotor_m")?,
        col("hub_heights_semicolon_list")?,
        col("cut_in")?,
        col("cut_out")?,
        col("invest_GBP_per_kW")?,
        col("om_GBP_per_kWh")?,
    );
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let n = csvio::field(&rec, name).to_string();
        let hub_heights_m = csvio::field(&rec, hubs)
            .split(';')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(db_source, line, format!("bad hub height `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let power_curve = curves.remove(&n).ok_or_else(|| {
            Error::parse(curve_source, 0, format!("no power curve for turbine `{n}`"))
        })?;
        let t = TurbineSpec {
            name: n,
            rated_power_kw: csvio::parse_f64(&rec, rated, db_source, line)?,
            rotor_diameter_m: csvio::parse_f64(&rec, rotor, db_source, line)?,
            hub_heights_m,
            power_curve,
            cut_in: csvio::parse_f64(&rec, ci, db_source, line)?,
            cut_out: csvio::parse_f64(&rec, co, db_source, line)?,
            investment: csvio::parse_f64(&rec, inv, db_source, line)?,
            om_per_kwh: csvio::parse_f64(&rec, om, db_source, line)?,
        };
        t.validate()
            .map_err(|e| Error::parse(db_source, line, e.to_string()))?;
        if out.iter().any(|o: &TurbineSpec| o.name == t.name) {
            return Err(Error::parse(
                db_source,
                line,
                format!("duplicate turbine `{}`", t.name),
            ));
        }
        out.push(t);
    }
    if let Some(orphan) = curves.keys().next() {
        return Err(Error::parse(
            curve_source,
            0,
            format!("power curve for unknown turbine `{orphan}`"),
        ));
    }
    Ok(out)
}

pub fn read_turbine_db(db: &Path, curves: &Path) -> Result<Vec<TurbineSpec>> {
    parse_turbine_db(
        &csvio::read_to_string(db)?,
        db,
        &csvio::read_to_string(curves)?,
        curves,
    )
}

/// Serialises a database back to its two CSV tables.
pub fn write_turbine_db(db: &[TurbineSpec]) -> (String, String) {
    let mut t = String::from("name,rated_kW,rotor_m,hub_heights_semicolon_list,cut_in,cut_out,invest_GBP_per_kW,om_GBP_per_kWh\n");
    let mut c = String::from("name,speed,power\n");
    for s in db {
        let hubs: Vec<String> = s.hub_heights_m.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(
            t,
            "{},{},{},{},{},{},{},{}",
            s.name,
            s.rated_power_kw,
            s.rotor_diameter_m,
            hubs.join(";"),
            s.cut_in,
            s.cut_out,
            s.investment,
            s.om_per_kwh
        );
        for (v, p) in &s.power_curve {
            let _ = writeln!(c, "{},{},{}", s.name, v, p);
        }
    }
    (t, c)
}
