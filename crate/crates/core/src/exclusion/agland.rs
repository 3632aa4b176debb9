//! Agricultural land classification harmonised across the three nations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{CategoricalGrid, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Country {
    England,
    Scotland,
    Wales,
}

impl Country {
    /// Integer code used in country rasters.
    pub fn code(self) -> i32 {
        match self {
            Country::England => 1,
            Country::Scotland => 2,
            Country::Wales => 3,
        }
    }

    pub fn from_code(code: i32) -> Option<Self> {
        match code {
            1 => Some(Country::England),
            2 => Some(Country::Scotland),
            3 => Some(Country::Wales),
            _ => None,
        }
    }

    pub const ALL: [Country; 3] = [Country::England, Country::Scotland, Country::Wales];
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Country::England => "England",
            Country::Scotland => "Scotland",
            Country::Wales => "Wales",
        })
    }
}

impl FromStr for Country {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "england" => Ok(Country::England),
            "scotland" => Ok(Country::Scotland),
            "wales" => Ok(Country::Wales),
            other => Err(Error::InvalidInput(format!("unknown country `{other}`"))),
        }
    }
}

/// Maps a national grade label onto the unified 1..5 scale.
///
/// England and Wales use 1, 2, 3a, 3b, 4, 5 (3a and 3b merge into 3).
/// Scotland uses classes 1..7: 3 and 4 correspond to 3a/3b, 5 to 4, and
/// 6 and 7 to 5.
pub fn harmonize_ag_grade(country: Country, raw_grade: &str) -> Result<u8> {
    let label = raw_grade.trim().to_ascii_lowercase();
    let grade = match country {
        Country::England | Country::Wales => match label.as_str() {
            "1" => Some(1),
            "2" => Some(2),
            "3a" | "3b" => Some(3),
            "4" => Some(4),
            "5" => Some(5),
            _ => None,
        },
        Country::Scotland => match label.as_str() {
            "1" => Some(1),
            "2" => Some(2),
            "3" | "4" => Some(3),
            "5" => Some(4),
            "6" | "7" => Some(5),
            _ => None,
        },
    };
    grade.ok_or_else(|| {
        Error::InvalidInput(format!(
            "`{raw_grade}` is not an agricultural grade label for {country}"
        ))
    })
}

/// Unified agricultural grade per cell; `None` for non-agricultural land.
#[derive(Debug, Clone, PartialEq)]
pub struct AgGradeGrid {
    spec: GridSpec,
    grades: Vec<Option<u8>>,
}

impl AgGradeGrid {
    pub fn new(spec: GridSpec, grades: Vec<Option<u8>>) -> Result<Self> {
        if grades.len() != spec.len() {
            return Err(Error::InvalidInput("grade vector length mismatch".into()));
        }
        if let Some(g) = grades.iter().flatten().find(|g| !(1..=5).contains(*g)) {
            return Err(Error::InvalidInput(format!(
                "unified grade {g} outside 1..5"
            )));
        }
        Ok(Self { spec, grades })
    }

    pub fn ungraded(spec: GridSpec) -> Self {
        let n = spec.len();
        Self {
            spec,
            grades: vec![None; n],
        }
    }

    /// Harmonises a raw grade raster whose legend holds national labels,
    /// using the country raster to pick the right scale.
    pub fn from_raw(raw: &CategoricalGrid, country: &CategoricalGrid) -> Result<Self> {
        raw.spec().ensure_aligned(country.spec())?;
        let mut grades = Vec::with_capacity(raw.spec().len());
        for i in 0..raw.spec().len() {
            let Some(code) = raw.get(i) else {
                grades.push(None);
                continue;
            };
            let c = country
                .get(i)
                .and_then(Country::from_code)
                .ok_or_else(|| Error::Data(format!("graded cell {i} has no country")))?;
            let label = raw.label(code).unwrap_or_default();
            grades.push(Some(harmonize_ag_grade(c, label)?));
        }
        Self::new(raw.spec().clone(), grades)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<u8> {
        self.grades[index]
    }

    pub fn grades(&self) -> &[Option<u8>] {
        &self.grades
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn national_scales_map_onto_unified_grades() {
        assert_eq!(harmonize_ag_grade(Country::England, "3a").unwrap(), 3);
        assert_eq!(harmonize_ag_grade(Country::Wales, "3B").unwrap(), 3);
        assert_eq!(harmonize_ag_grade(Country::Scotland, "6").unwrap(), 5);
        assert_eq!(harmonize_ag_grade(Country::Scotland, "1").unwrap(), 1);
        let scot: Vec<u8> = (1..=7)
            .map(|g| harmonize_ag_grade(Country::Scotland, &g.to_string()).unwrap())
            .collect();
        assert_eq!(scot, vec![1, 2, 3, 3, 4, 5, 5]);
        let ew: Vec<u8> = ["1", "2", "3a", "3b", "4", "5"]
            .iter()
            .map(|g| harmonize_ag_grade(Country::England, g).unwrap())
            .collect();
        assert_eq!(ew, vec![1, 2, 3, 3, 4, 5]);
    }

    #[test]
    fn unknown_labels_are_named_in_the_error() {
        let err = harmonize_ag_grade(Country::England, "7").unwrap_err();
        assert!(err.to_string().contains("`7`"));
        assert!(harmonize_ag_grade(Country::Scotland, "3a").is_err());
        assert!(harmonize_ag_grade(Country::Wales, "3").is_err());
    }

    #[test]
    fn raw_raster_uses_country_per_cell() {
        let spec = GridSpec::new(1, 3, 1.0, 0.0, 0.0, "").unwrap();
        let legend = BTreeMap::from([
            (3, "3".to_string()),
            (31, "3a".to_string()),
            (6, "6".to_string()),
        ]);
        let raw = CategoricalGrid::new(spec.clone(), vec![31, 6, -1], -1, legend).unwrap();
        let country = CategoricalGrid::with_numeric_legend(spec, vec![1, 2, 3], -1).unwrap();
        let ag = AgGradeGrid::from_raw(&raw, &country).unwrap();
        assert_eq!(ag.grades(), &[Some(3), Some(5), None]);
    }

    #[test]
    fn out_of_range_grades_are_never_stored() {
        let spec = GridSpec::new(1, 1, 1.0, 0.0, 0.0, "").unwrap();
        assert!(AgGradeGrid::new(spec.clone(), vec![Some(6)]).is_err());
        assert!(AgGradeGrid::new(spec, vec![Some(0)]).is_err());
    }
}
