//! The eight assessment scenarios and the scenicness / agricultural-grade filter.

use std::collections::BTreeSet;
use std::path::Path;

use super::agland::AgGradeGrid;
use crate::csvio::read_to_string;
use crate::error::{Error, Result};
use crate::grid::{nearest_valid_cells, GridSpec, Mask, NumericGrid};
use crate::kvfile::KvFile;

/// Photos rated fewer times than this are not trusted.
pub const MIN_SCENIC_VOTES: f64 = 3.0;

/// Upper scenicness limits of the four wind scenarios (all land, then the
/// 75%, 50% and 25% quartiles of the scenicness distribution).
pub const SCENIC_THRESHOLDS: [f64; 4] = [10.0, 5.80, 4.67, 3.67];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Technologies {
    pub wind: bool,
    pub pv_ground: bool,
    pub pv_roof: bool,
}

impl Default for Technologies {
    fn default() -> Self {
        Self {
            wind: true,
            pv_ground: true,
            pv_roof: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: u8,
    pub scenic_threshold: f64,
    pub ag_excluded_grades: BTreeSet<u8>,
    pub label: String,
    pub technologies: Technologies,
}

impl ScenarioConfig {
    pub fn new(
        id: u8,
        scenic_threshold: f64,
        ag_excluded_grades: impl IntoIterator<Item = u8>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let cfg = Self {
            id,
            scenic_threshold,
            ag_excluded_grades: ag_excluded_grades.into_iter().collect(),
            label: label.into(),
            technologies: Technologies::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scenic_threshold > 0.0 && self.scenic_threshold <= 10.0) {
            return Err(Error::Config(format!(
                "scenario {}: scenicness threshold {} outside (0, 10]",
                self.id, self.scenic_threshold
            )));
        }
        if let Some(g) = self
            .ag_excluded_grades
            .iter()
            .find(|g| !(1..=5).contains(*g))
        {
            return Err(Error::Config(format!(
                "scenario {}: excluded grade {g} outside 1..5",
                self.id
            )));
        }
        Ok(())
    }

    /// Scenarios 1-4 exclude grades 1-3 (high restriction), 5-8 only 1-2;
    /// within each block the scenicness limit steps down by quartile.
    pub fn builtin(id: u8) -> Result<Self> {
        if !(1..=8).contains(&id) {
            return Err(Error::Config(format!(
                "no built-in scenario {id} (expected 1..8)"
            )));
        }
        let quartile = ((id - 1) % 4) as usize;
        let high = id <= 4;
        let grades: &[u8] = if high { &[1, 2, 3] } else { &[1, 2] };
        let wind = [
            "technical potential",
            "75% scenicness",
            "50% scenicness",
            "25% scenicness",
        ][quartile];
        let pv = if high {
            "high restriction"
        } else {
            "low restriction"
        };
        Self::new(
            id,
            SCENIC_THRESHOLDS[quartile],
            grades.iter().copied(),
            format!("wind {wind}; ground PV {pv}"),
        )
    }

    pub fn builtins() -> Vec<Self> {
        (1..=8)
            .map(|id| Self::builtin(id).expect("built-in ids"))
            .collect()
    }

    /// Reads a `key = value` scenario file. `builtin = N` starts from a
    /// built-in scenario; other keys override it.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut cfg = match kv.get("builtin") {
            Some(v) => Self::builtin(
                v.parse()
                    .map_err(|_| Error::Config(format!("`builtin`: `{v}` is not an id")))?,
            )?,
            None => Self {
                id: kv
                    .require("id")?
                    .parse()
                    .map_err(|_| Error::Config("`id` must be an integer 1..255".into()))?,
                scenic_threshold: kv.require_f64("scenic_threshold")?,
                ag_excluded_grades: BTreeSet::new(),
                label: String::new(),
                technologies: Technologies::default(),
            },
        };
        if let Some(v) = kv.get("id") {
            cfg.id = v
                .parse()
                .map_err(|_| Error::Config("`id` must be an integer 1..255".into()))?;
        }
        cfg.scenic_threshold = kv.f64_or("scenic_threshold", cfg.scenic_threshold)?;
        if let Some(list) = kv.int_list("ag_excluded_grades")? {
            cfg.ag_excluded_grades = list
                .into_iter()
                .map(|g| u8::try_from(g).map_err(|_| Error::Config(format!("bad grade {g}"))))
                .collect::<Result<_>>()?;
        }
        if let Some(l) = kv.get("label") {
            cfg.label = l.to_string();
        }
        cfg.technologies = Technologies {
            wind: kv.bool_or("wind", cfg.technologies.wind)?,
            pv_ground: kv.bool_or("pv_ground", cfg.technologies.pv_ground)?,
            pv_roof: kv.bool_or("pv_roof", cfg.technologies.pv_roof)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = read_to_string(path.as_ref())?;
        Self::from_kv(&KvFile::parse(&text)?)
    }

    /// Filter applied to wind sites: scenicness only.
    pub fn wind_filter(&self) -> Self {
        Self {
            ag_excluded_grades: BTreeSet::new(),
            ..self.clone()
        }
    }

    /// Filter applied to ground PV: agricultural grade only.
    pub fn pv_ground_filter(&self) -> Self {
        Self {
            scenic_threshold: 10.0,
            ..self.clone()
        }
    }
}

/// Scenicness per cell after replacing untrusted cells (nodata, or fewer than
/// three votes) with the value of the nearest trusted cell.
#[derive(Debug, Clone)]
pub struct EffectiveScenicness {
    grid: NumericGrid,
}

impl EffectiveScenicness {
    pub fn new(scenic: &NumericGrid, votes: &NumericGrid) -> Result<Self> {
        scenic.spec().ensure_aligned(votes.spec())?;
        let spec = scenic.spec().clone();
        let valid = Mask::from_fn(spec.clone(), |i| {
            scenic.get(i).is_some() && votes.get(i).is_some_and(|v| v >= MIN_SCENIC_VOTES)
        });
        let nearest = nearest_valid_cells(&valid).map_err(|_| {
            Error::Data("no cell has a scenicness rating with at least 3 votes".into())
        })?;
        let values = nearest.iter().map(|&j| scenic.values()[j]).collect();
        Ok(Self {
            grid: NumericGrid::new(spec, values, scenic.nodata())?,
        })
    }

    pub fn grid(&self) -> &NumericGrid {
        &self.grid
    }

    pub fn spec(&self) -> &GridSpec {
        self.grid.spec()
    }

    #[inline]
    pub fn value(&self, index: usize) -> f64 {
        self.grid.values()[index]
    }
}

/// Restricts a geographic potential to one scenario.
///
/// A cell survives iff it is in `geo`, its effective scenicness is at most the
/// threshold, and its unified grade is not excluded. Ungraded cells are never
/// removed by the grade rule.
pub fn apply_scenario(
    geo: &Mask,
    scenic: &NumericGrid,
    votes: &NumericGrid,
    ag: &AgGradeGrid,
    cfg: &ScenarioConfig,
) -> Result<Mask> {
    cfg.validate()?;
    let eff = EffectiveScenicness::new(scenic, votes)?;
    apply_scenario_effective(geo, &eff, ag, cfg)
}

/// [`apply_scenario`] with the scenicness fill precomputed.
pub fn apply_scenario_effective(
    geo: &Mask,
    scenic: &EffectiveScenicness,
    ag: &AgGradeGrid,
    cfg: &ScenarioConfig,
) -> Result<Mask> {
    cfg.validate()?;
    geo.spec().ensure_aligned(scenic.spec())?;
    geo.spec().ensure_aligned(ag.spec())?;
    Ok(Mask::from_fn(geo.spec().clone(), |i| {
        geo.get(i)
            && scenic.value(i) <= cfg.scenic_threshold
            && !ag
                .get(i)
                .is_some_and(|g| cfg.ag_excluded_grades.contains(&g))
    }))
}
