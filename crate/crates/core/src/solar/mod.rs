//! Photovoltaic yield: module parameters, tilt gain, ground-mounted and
//! rooftop potentials.

mod ground;
mod rooftop;

pub use ground::{
    energy_density_kwh_m2, pv_ground_potential, write_yield_csv, GroundPvYield, YieldCell,
};
pub use rooftop::{
    footprint_ratio, pv_roof_potential, ratios_from_footprints, rooftop_potential,
    usable_roof_area, write_roof_csv, Azimuth, FootprintRatioTable, RoofCell, RoofClass,
    RoofClassModel, RoofYield, ROOF_CATEGORIES, TILT_BANDS,
};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, NumericGrid};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Irradiation gain of a south-facing module at its optimal tilt relative to
/// a horizontal one.
pub const MAX_TILT_GAIN: f64 = 1.17;

/// Metres of northing per degree of latitude, used to give planar grids an
/// approximate latitude.
const METRES_PER_DEGREE: f64 = 111_320.0;

/// System parameters shared by ground and rooftop PV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvParams {
    pub efficiency: f64,
    pub performance_ratio: f64,
    pub packing_factor: f64,
    pub hours_per_year: f64,
}

impl Default for PvParams {
    fn default() -> Self {
        Self {
            efficiency: 0.15,
            performance_ratio: 0.85,
            packing_factor: 0.51,
            hours_per_year: HOURS_PER_YEAR,
        }
    }
}

impl PvParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("efficiency", self.efficiency),
            ("performance ratio", self.performance_ratio),
            ("packing factor", self.packing_factor),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidInput(format!("{name} {v} outside (0, 1]")));
            }
        }
        if !(self.hours_per_year > 0.0) {
            return Err(Error::InvalidInput(
                "hours per year must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How irradiance rasters are expressed on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IrradianceUnit {
    /// Mean power density, W/m².
    #[default]
    WattsPerSquareMetre,
    /// Annual irradiation, kWh/m²·yr.
    KilowattHoursPerSquareMetreYear,
}

impl IrradianceUnit {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "w_m2" | "w/m2" | "wm2" => Ok(Self::WattsPerSquareMetre),
            "kwh_m2_yr" | "kwh/m2/yr" | "kwh_m2" => Ok(Self::KilowattHoursPerSquareMetreYear),
            other => Err(Error::Config(format!("unknown irradiance unit `{other}`"))),
        }
    }

    /// Converts a grid in this unit to mean W/m².
    pub fn to_watts(self, grid: NumericGrid, hours_per_year: f64) -> Result<NumericGrid> {
        match self {
            Self::WattsPerSquareMetre => Ok(grid),
            Self::KilowattHoursPerSquareMetreYear => {
                let nodata = grid.nodata();
                let values = grid
                    .values()
                    .iter()
                    .map(|&v| {
                        if grid.is_nodata_value(v) {
                            v
                        } else {
                            v * 1000.0 / hours_per_year
                        }
                    })
                    .collect();
                NumericGrid::new(grid.spec().clone(), values, nodata)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltGain {
    pub optimal_tilt_deg: f64,
    pub gain: f64,
}

/// Optimal module tilt: 30° at 50°N rising linearly to 40° at 58°N, clamped
/// outside that band.
pub fn optimal_tilt(latitude: f64) -> f64 {
    (30.0 + (latitude - 50.0) * 10.0 / 8.0).clamp(30.0, 40.0)
}

/// Gain of a south-facing module tilted at `tilt_deg`: 1 when horizontal,
/// [`MAX_TILT_GAIN`] at the optimal tilt, parabolic in between and beyond.
pub fn gain_at_tilt(latitude: f64, tilt_deg: f64) -> f64 {
    let opt = optimal_tilt(latitude);
    let rel = (tilt_deg - opt) / opt;
    1.0 + (MAX_TILT_GAIN - 1.0) * (1.0 - rel * rel)
}

pub fn tilt_gain(latitude: f64) -> TiltGain {
    let optimal_tilt_deg = optimal_tilt(latitude);
    TiltGain {
        optimal_tilt_deg,
        gain: gain_at_tilt(latitude, optimal_tilt_deg),
    }
}

/// Approximate latitude of each cell centre, given the latitude of the
/// lower-left cell centre.
pub fn latitude_grid(spec: &GridSpec, origin_latitude: f64) -> NumericGrid {
    let s = spec.clone();
    NumericGrid::from_fn(spec.clone(), move |i| {
        let (_, y) = s.cell_center(i);
        origin_latitude + (y - s.origin_y) / METRES_PER_DEGREE
    })
}

/// Optimal-tilt gain per cell.
pub fn tilt_gain_grid(spec: &GridSpec, origin_latitude: f64) -> NumericGrid {
    let lat = latitude_grid(spec, origin_latitude);
    NumericGrid::from_fn(spec.clone(), |i| tilt_gain(lat.values()[i]).gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PvParams::default().validate().unwrap();
        let bad = PvParams {
            packing_factor: 0.0,
            ..PvParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn optimal_tilt_interpolates_and_clamps() {
        assert_eq!(optimal_tilt(50.0), 30.0);
        assert_eq!(optimal_tilt(54.0), 35.0);
        assert_eq!(optimal_tilt(58.0), 40.0);
        assert_eq!(optimal_tilt(46.0), 30.0);
        assert_eq!(optimal_tilt(64.0), 40.0);
    }

    #[test]
    fn gain_is_max_at_optimum_and_one_when_flat() {
        for lat in [45.0, 50.0, 53.3, 58.0, 65.0] {
            assert!((tilt_gain(lat).gain - 1.17).abs() < 1e-15);
            assert_eq!(gain_at_tilt(lat, 0.0), 1.0);
            assert!(gain_at_tilt(lat, optimal_tilt(lat) + 5.0) < 1.17);
        }
    }

    #[test]
    fn unit_conversion() {
        let spec = GridSpec::new(1, 1, 1.0, 0.0, 0.0, "").unwrap();
        let g = NumericGrid::filled(spec, 876.0);
        let w = IrradianceUnit::KilowattHoursPerSquareMetreYear
            .to_watts(g, HOURS_PER_YEAR)
            .unwrap();
        assert!((w.values()[0] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn latitude_increases_northward() {
        let spec = GridSpec::new(3, 1, 111_320.0, 0.0, 0.0, "").unwrap();
        let lat = latitude_grid(&spec, 50.0);
        assert_eq!(lat.values(), &[52.0, 51.0, 50.0]);
    }
}
