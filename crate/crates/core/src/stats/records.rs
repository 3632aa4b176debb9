use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::binary::{fit_binary, FitResult, Link};
use super::linalg::Design;
use crate::csvio;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technology {
    Wind,
    PvGround,
}

impl Technology {
    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Wind => "wind",
            Technology::PvGround => "pv_ground",
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wind" => Ok(Technology::Wind),
            "pv_ground" | "pv" | "solar" => Ok(Technology::PvGround),
            other => Err(Error::InvalidInput(format!("unknown technology `{other}`"))),
        }
    }
}

/// Distances to the nearest protected or sensitive site, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteDistances {
    pub national_park: f64,
    pub airport: f64,
    pub spa: f64,
    pub sac: f64,
    pub ramsar: f64,
}

impl SiteDistances {
    const NAMES: [&'static str; 5] = [
        "log_dist_national_park",
        "log_dist_airport",
        "log_dist_spa",
        "log_dist_sac",
        "log_dist_ramsar",
    ];

    fn as_array(&self) -> [f64; 5] {
        [
            self.national_park,
            self.airport,
            self.spa,
            self.sac,
            self.ramsar,
        ]
    }
}

/// One planning application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningRecord {
    pub technology: Technology,
    pub year: i32,
    /// 1 if granted, 0 if refused.
    pub outcome: u8,
    pub scenicness: f64,
    pub votes: u32,
    /// Wind only; zero for PV.
    pub n_turbines: u32,
    pub capacity_mw: f64,
    pub distances: SiteDistances,
}

impl PlanningRecord {
    pub fn validate(&self) -> Result<()> {
        if self.outcome > 1 {
            return Err(Error::InvalidInput(format!(
                "outcome {} is not 0 or 1",
                self.outcome
            )));
        }
        if !(self.capacity_mw > 0.0) {
            return Err(Error::InvalidInput(format!(
                "capacity {} must be positive",
                self.capacity_mw
            )));
        }
        if !(1.0..=10.0).contains(&self.scenicness) {
            return Err(Error::InvalidInput(format!(
                "scenicness {} outside [1, 10]",
                self.scenicness
            )));
        }
        if self.distances.as_array().iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidInput("distances must be positive".into()));
        }
        Ok(())
    }
}

const HEADER: &str = "tech,year,outcome,scenicness,votes,n_turbines,capacity_MW,dist_np_m,dist_airport_m,dist_spa_m,dist_sac_m,dist_ramsar_m";

pub fn parse_planning_csv(text: &str, source: &Path) -> Result<Vec<PlanningRecord>> {
    let mut rdr = csvio::reader_from_str(text);
    let h = rdr.headers()?.clone();
    let cols: Vec<usize> = HEADER
        .split(',')
        .map(|n| csvio::column(&h, n, source))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let num = |j: usize| csvio::parse_f64(&rec, cols[j], source, line);
        let int = |j: usize| -> Result<i64> {
            let raw = csvio::field(&rec, cols[j]);
            if raw.is_empty() {
                return Ok(0);
            }
            raw.parse::<i64>()
                .map_err(|_| Error::parse(source, line, format!("`{raw}` is not an integer")))
        };
        let technology: Technology = csvio::field(&rec, cols[0])
            .parse()
            .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
        let r = PlanningRecord {
            technology,
            year: int(1)? as i32,
            outcome: u8::try_from(int(2)?).unwrap_or(u8::MAX),
            scenicness: num(3)?,
            votes: u32::try_from(int(4)?)
                .map_err(|_| Error::parse(source, line, "negative votes"))?,
            n_turbines: u32::try_from(int(5)?)
                .map_err(|_| Error::parse(source, line, "negative turbine count"))?,
            capacity_mw: num(6)?,
            distances: SiteDistances {
                national_park: num(7)?,
                airport: num(8)?,
                spa: num(9)?,
                sac: num(10)?,
                ramsar: num(11)?,
            },
        };
        r.validate()
            .map_err(|e| Error::parse(source, line, e.to_string()))?;
        out.push(r);
    }
    Ok(out)
}

pub fn read_planning_csv(path: &Path) -> Result<Vec<PlanningRecord>> {
    parse_planning_csv(&csvio::read_to_string(path)?, path)
}

pub fn write_planning_csv(records: &[PlanningRecord]) -> String {
    let mut s = format!("{HEADER}\n");
    for r in records {
        let d = r.distances;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.technology,
            r.year,
            r.outcome,
            r.scenicness,
            r.votes,
            r.n_turbines,
            r.capacity_mw,
            d.national_park,
            d.airport,
            d.spa,
            d.sac,
            d.ramsar
        );
    }
    s
}

/// Covariate blocks of a planning-outcome model. Scenicness and a constant
/// are always present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelSpec {
    pub year_effects: bool,
    pub size: bool,
    pub environment: bool,
}

impl ModelSpec {
    /// Models 1 to 4: scenicness only, then adding year effects, project
    /// size and environmental distances in turn.
    pub fn model(n: u8) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::Config(format!("model {n} is not one of 1..4")));
        }
        Ok(Self {
            year_effects: n >= 2,
            size: n >= 3,
            environment: n >= 4,
        })
    }
}

/// Builds the design matrix. Year dummies use the earliest year present as
/// the base; distances enter as natural logs of metres.
pub fn planning_design(
    records: &[PlanningRecord],
    tech: Technology,
    spec: &ModelSpec,
) -> Result<Design> {
    let n = records.len();
    let mut names = vec!["constant".to_string(), "scenicness".to_string()];
    let mut cols = vec![vec![1.0; n], records.iter().map(|r| r.scenicness).collect()];
    if spec.year_effects {
        let years: BTreeSet<i32> = records.iter().map(|r| r.year).collect();
        for &y in years.iter().skip(1) {
            names.push(format!("year_{y}"));
            cols.push(
                records
                    .iter()
                    .map(|r| f64::from(u8::from(r.year == y)))
                    .collect(),
            );
        }
    }
    if spec.size {
        if tech == Technology::Wind {
            names.push("n_turbines".into());
            cols.push(records.iter().map(|r| f64::from(r.n_turbines)).collect());
        }
        names.push("capacity_MW".into());
        cols.push(records.iter().map(|r| r.capacity_mw).collect());
    }
    if spec.environment {
        for (j, name) in SiteDistances::NAMES.iter().enumerate() {
            names.push((*name).to_string());
            cols.push(
                records
                    .iter()
                    .map(|r| r.distances.as_array()[j].ln())
                    .collect(),
            );
        }
    }
    Design::new(names, cols)
}

/// Fits a planning-outcome model to the records of one technology, keeping
/// only records with at least `min_votes` scenicness votes.
pub fn fit_planning(
    records: &[PlanningRecord],
    tech: Technology,
    spec: &ModelSpec,
    link: Link,
    min_votes: u32,
) -> Result<FitResult> {
    let subset: Vec<PlanningRecord> = records
        .iter()
        .filter(|r| r.technology == tech && r.votes >= min_votes)
        .copied()
        .collect();
    if subset.is_empty() {
        return Err(Error::Data(format!("no {tech} records to fit")));
    }
    let design = planning_design(&subset, tech, spec)?;
    let y: Vec<f64> = subset.iter().map(|r| f64::from(r.outcome)).collect();
    fit_binary(&design, &y, link)
}

pub fn fit_logit(
    records: &[PlanningRecord],
    tech: Technology,
    spec: &ModelSpec,
) -> Result<FitResult> {
    fit_planning(records, tech, spec, Link::Logit, 0)
}

pub fn fit_probit(
    records: &[PlanningRecord],
    tech: Technology,
    spec: &ModelSpec,
) -> Result<FitResult> {
    fit_planning(records, tech, spec, Link::Probit, 0)
}

/// Draws `n` synthetic applications whose outcomes follow `link` with the
/// given coefficients on the design columns of `spec`. Columns absent from
/// `truth` get a zero coefficient.
pub fn synthetic_planning_records(
    n: usize,
    tech: Technology,
    spec: &ModelSpec,
    truth: &[(&str, f64)],
    link: Link,
    seed: u64,
) -> Result<Vec<PlanningRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = |rng: &mut ChaCha8Rng| rng.gen_range(500f64.ln()..50_000f64.ln()).exp();
    let mut records: Vec<PlanningRecord> = (0..n)
        .map(|_| {
            let n_turbines = if tech == Technology::Wind {
                rng.gen_range(1..=30)
            } else {
                0
            };
            let capacity_mw = match tech {
                Technology::Wind => f64::from(n_turbines) * rng.gen_range(1.5..3.5),
                Technology::PvGround => rng.gen_range(0.2..50.0),
            };
            PlanningRecord {
                technology: tech,
                year: rng.gen_range(2005..=2019),
                outcome: 0,
                scenicness: rng.gen_range(1.0..10.0),
                votes: rng.gen_range(3..=60),
                n_turbines,
                capacity_mw,
                distances: SiteDistances {
                    national_park: dist(&mut rng),
                    airport: dist(&mut rng),
                    spa: dist(&mut rng),
                    sac: dist(&mut rng),
                    ramsar: dist(&mut rng),
                },
            }
        })
        .collect();
    let design = planning_design(&records, tech, spec)?;
    for (name, _) in truth {
        if !design.names.iter().any(|n| n == name) {
            return Err(Error::InvalidInput(format!("no design column `{name}`")));
        }
    }
    let beta: Vec<f64> = design
        .names
        .iter()
        .map(|n| truth.iter().find(|(t, _)| t == n).map_or(0.0, |(_, b)| *b))
        .collect();
    for (i, r) in records.iter_mut().enumerate() {
        let eta: f64 = design.x.row(i).iter().zip(&beta).map(|(x, b)| x * b).sum();
        let p = match link {
            Link::Logit => 1.0 / (1.0 + (-eta).exp()),
            Link::Probit => 0.5 * statrs::function::erf::erfc(-eta / std::f64::consts::SQRT_2),
        };
        r.outcome = u8::from(rng.gen::<f64>() < p);
    }
    Ok(records)
}
