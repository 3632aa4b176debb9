use std::fmt::Write as _;

use super::PvParams;
use crate::error::{Error, Result};
use crate::grid::{Mask, NumericGrid};
use crate::numfmt::sig6;

/// Annual ground-PV yield of one eligible cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldCell {
    pub cell: usize,
    pub x: f64,
    pub y: f64,
    pub area_m2: f64,
    pub irradiance_w_m2: f64,
    pub gain: f64,
    pub energy_kwh: f64,
}

impl YieldCell {
    /// Installed module capacity in kW (STC irradiance of 1 kW/m²).
    pub fn capacity_kw(&self, params: &PvParams) -> f64 {
        self.area_m2 * params.packing_factor * params.efficiency
    }
}

#[derive(Debug, Clone, Default)]
pub struct GroundPvYield {
    pub cells: Vec<YieldCell>,
    pub total_kwh: f64,
}

/// Yield per square metre of land, kWh/m²·yr:
/// `gain · h · η · H · PR · PF` with `H` in W/m².
pub fn energy_density_kwh_m2(params: &PvParams, gain: f64, irradiance_w_m2: f64) -> f64 {
    gain * params.hours_per_year * params.efficiency * irradiance_w_m2 / 1000.0
        * params.performance_ratio
        * params.packing_factor
}

/// Ground-mounted PV potential over the eligible cells of `mask`.
pub fn pv_ground_potential(
    mask: &Mask,
    irradiance: &NumericGrid,
    params: &PvParams,
    gain: &NumericGrid,
) -> Result<GroundPvYield> {
    params.validate()?;
    let spec = mask.spec();
    spec.ensure_aligned(irradiance.spec())?;
    spec.ensure_aligned(gain.spec())?;
    let area = spec.cell_area();
    let mut out = GroundPvYield::default();
    for i in mask.iter_set() {
        let h = irradiance
            .get(i)
            .ok_or_else(|| Error::Data(format!("eligible cell {i} has no irradiance value")))?;
        if h < 0.0 {
            return Err(Error::Data(format!(
                "negative irradiance {h} W/m² at cell {i}"
            )));
        }
        let g = gain
            .get(i)
            .ok_or_else(|| Error::Data(format!("eligible cell {i} has no tilt gain")))?;
        let (x, y) = spec.cell_center(i);
        let energy_kwh = energy_density_kwh_m2(params, g, h) * area;
        out.total_kwh += energy_kwh;
        out.cells.push(YieldCell {
            cell: i,
            x,
            y,
            area_m2: area,
            irradiance_w_m2: h,
            gain: g,
            energy_kwh,
        });
    }
    Ok(out)
}

/// `cell_id,x,y,area_m2,H_Wm2,energy_kWh`
pub fn write_yield_csv(cells: &[YieldCell]) -> String {
    let mut s = String::from("cell_id,x,y,area_m2,H_Wm2,energy_kWh\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            c.cell,
            sig6(c.x),
            sig6(c.y),
            sig6(c.area_m2),
            sig6(c.irradiance_w_m2),
            sig6(c.energy_kwh)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, DEFAULT_NODATA};
    use crate::solar::HOURS_PER_YEAR;
    use proptest::prelude::*;

    fn unit_spec(n: usize) -> GridSpec {
        GridSpec::new(1, n, 1.0, 0.0, 0.0, "").unwrap()
    }

    #[test]
    fn no_resource_no_energy() {
        let s = unit_spec(3);
        let y = pv_ground_potential(
            &Mask::full(s.clone()),
            &NumericGrid::filled(s.clone(), 0.0),
            &PvParams::default(),
            &NumericGrid::filled(s, 1.17),
        )
        .unwrap();
        assert_eq!(y.total_kwh, 0.0);
        assert_eq!(y.cells.len(), 3);
    }

    #[test]
    fn one_square_metre_at_1000_kwh() {
        let s = unit_spec(1);
        let h = 1_000_000.0 / HOURS_PER_YEAR;
        let y = pv_ground_potential(
            &Mask::full(s.clone()),
            &NumericGrid::filled(s.clone(), h),
            &PvParams::default(),
            &NumericGrid::filled(s, 1.17),
        )
        .unwrap();
        let hand = 1.17 * 1000.0 * 0.15 * 0.85 * 0.51;
        assert!((y.total_kwh - 76.07925).abs() < 1e-9);
        assert!((y.total_kwh - hand).abs() < 1e-10);
    }

    #[test]
    fn negative_irradiance_names_cell() {
        let s = unit_spec(2);
        let irr = NumericGrid::new(s.clone(), vec![100.0, -1.0], DEFAULT_NODATA).unwrap();
        let err = pv_ground_potential(
            &Mask::full(s.clone()),
            &irr,
            &PvParams::default(),
            &NumericGrid::filled(s, 1.0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("cell 1"));
    }

    #[test]
    fn ineligible_cells_are_absent() {
        let s = unit_spec(4);
        let mask = Mask::new(s.clone(), vec![false, true, false, true]).unwrap();
        let y = pv_ground_potential(
            &mask,
            &NumericGrid::filled(s.clone(), 100.0),
            &PvParams::default(),
            &NumericGrid::filled(s, 1.0),
        )
        .unwrap();
        assert_eq!(
            y.cells.iter().map(|c| c.cell).collect::<Vec<_>>(),
            vec![1, 3]
        );
        let csv = write_yield_csv(&y.cells);
        assert!(csv.starts_with("cell_id,x,y,area_m2,H_Wm2,energy_kWh\n1,1,0,1,100,"));
    }

    proptest! {
        #[test]
        fn linear_in_area_and_irradiance(h in 0.0f64..300.0, g in 1.0f64..1.17, cs in 1.0f64..1000.0) {
            let p = PvParams::default();
            let s1 = GridSpec::new(1, 1, cs, 0.0, 0.0, "").unwrap();
            let s2 = GridSpec::new(1, 1, cs * 2f64.sqrt(), 0.0, 0.0, "").unwrap();
            let run = |s: &GridSpec, h: f64| pv_ground_potential(&Mask::full(s.clone()), &NumericGrid::filled(s.clone(), h), &p, &NumericGrid::filled(s.clone(), g)).unwrap().total_kwh;
            let base = run(&s1, h);
            prop_assert!((run(&s1, 2.0 * h) - 2.0 * base).abs() <= 1e-12 * base.max(1e-300));
            prop_assert!((run(&s2, h) - 2.0 * base).abs() <= 1e-12 * base.max(1e-300) * 4.0);
        }

        #[test]
        fn total_is_cellwise_sum(vals in proptest::collection::vec(0.0f64..250.0, 36), m in proptest::collection::vec(any::<bool>(), 36)) {
            let s = GridSpec::new(6, 6, 100.0, 0.0, 0.0, "").unwrap();
            let p = PvParams::default();
            let mask = Mask::new(s.clone(), m.clone()).unwrap();
            let gain = NumericGrid::filled(s.clone(), 1.1);
            let y = pv_ground_potential(&mask, &NumericGrid::new(s.clone(), vals.clone(), DEFAULT_NODATA).unwrap(), &p, &gain).unwrap();
            let brute: f64 = (0..36).filter(|i| m[*i]).map(|i| 1.1 * 8760.0 * 0.15 * vals[i] / 1000.0 * 0.85 * 0.51 * 10_000.0).sum();
            prop_assert!((y.total_kwh - brute).abs() <= 1e-9 * brute.max(1.0));
            // equal resource means equal density regardless of mask shape
            for c in &y.cells {
                prop_assert!((c.energy_kwh / c.area_m2 - energy_density_kwh_m2(&p, 1.1, c.irradiance_w_m2)).abs() < 1e-9);
            }
        }
    }
}
