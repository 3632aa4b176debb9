use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::LaTable;
use crate::error::{Error, Result};
use crate::grid::CategoricalGrid;
use crate::numfmt::sig6;

#[derive(Debug, Clone, PartialEq)]
pub struct LaRow {
    pub code: String,
    pub name: String,
    pub energy_gwh: f64,
    /// Energy over the LA's total area, GWh/km².
    pub energy_gwh_per_km2: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaAggregate {
    /// Every LA in the table, in code order.
    pub rows: Vec<LaRow>,
    /// Energy in cells outside every region.
    pub unassigned_gwh: f64,
}

/// Sums per-cell energy (kWh) by region. `regions` holds integer ids whose
/// legend labels are LA codes; nodata cells are unassigned.
pub fn aggregate_to_la(
    cells: &[(usize, f64)],
    regions: &CategoricalGrid,
    table: &LaTable,
) -> Result<LaAggregate> {
    let mut sums: BTreeMap<&str, f64> = table.iter().map(|r| (r.code.as_str(), 0.0)).collect();
    let mut unassigned_gwh = 0.0;
    for &(cell, kwh) in cells {
        if cell >= regions.spec().len() {
            return Err(Error::InvalidInput(format!(
                "cell {cell} outside the region grid"
            )));
        }
        let gwh = kwh / 1e6;
        match regions.get(cell).and_then(|c| regions.label(c)) {
            None => unassigned_gwh += gwh,
            Some(code) => {
                let slot = sums.get_mut(code).ok_or_else(|| {
                    Error::Data(format!("cell {cell} is assigned to unknown region {code}"))
                })?;
                *slot += gwh;
            }
        }
    }
    let rows = table
        .iter()
        .map(|r| {
            let e = sums[r.code.as_str()];
            LaRow {
                code: r.code.clone(),
                name: r.name.clone(),
                energy_gwh: e,
                energy_gwh_per_km2: e / r.area_km2,
            }
        })
        .collect();
    Ok(LaAggregate {
        rows,
        unassigned_gwh,
    })
}

/// Appends rows in the `code,name,tech,scenario_id,energy_GWh,energy_GWh_per_km2`
/// layout; pass `with_header` for the first block.
pub fn write_la_csv(
    out: &mut String,
    agg: &LaAggregate,
    tech: &str,
    scenario_id: u8,
    with_header: bool,
) {
    if with_header {
        out.push_str("code,name,tech,scenario_id,energy_GWh,energy_GWh_per_km2\n");
    }
    for r in &agg.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.code,
            r.name,
            tech,
            scenario_id,
            sig6(r.energy_gwh),
            sig6(r.energy_gwh_per_km2)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::regions::LaRegion;
    use proptest::prelude::*;

    fn setup() -> (CategoricalGrid, LaTable) {
        let spec = GridSpec::new(2, 2, 1000.0, 0.0, 0.0, "").unwrap();
        let legend = [(1, "E06000001".to_string()), (2, "E06000002".to_string())].into();
        let grid = CategoricalGrid::new(spec, vec![1, 1, 2, 2], -9999, legend).unwrap();
        let table = LaTable::new(vec![
            LaRegion {
                code: "E06000001".into(),
                name: "A".into(),
                area_km2: 2.0,
            },
            LaRegion {
                code: "E06000002".into(),
                name: "B".into(),
                area_km2: 2.0,
            },
        ])
        .unwrap();
        (grid, table)
    }

    #[test]
    fn equal_regions_all_energy_in_one() {
        let (g, t) = setup();
        let agg = aggregate_to_la(&[(0, 3e6), (1, 1e6)], &g, &t).unwrap();
        assert_eq!(agg.rows[0].energy_gwh, 4.0);
        assert_eq!(agg.rows[0].energy_gwh_per_km2, 2.0);
        assert_eq!(agg.rows[1].energy_gwh, 0.0);
        // twice the all-region mean density, and zero
        let mean = 4.0 / 4.0;
        assert_eq!(agg.rows[0].energy_gwh_per_km2, 2.0 * mean);
    }

    #[test]
    fn unknown_region_is_error() {
        let (g, _) = setup();
        let t = LaTable::new(vec![LaRegion {
            code: "E06000001".into(),
            name: "A".into(),
            area_km2: 2.0,
        }])
        .unwrap();
        assert!(matches!(
            aggregate_to_la(&[(2, 1.0)], &g, &t),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let (g, t) = setup();
        let agg = aggregate_to_la(&[(0, 1e6)], &g, &t).unwrap();
        let mut s = String::new();
        write_la_csv(&mut s, &agg, "wind", 3, true);
        assert_eq!(s, "code,name,tech,scenario_id,energy_GWh,energy_GWh_per_km2\nE06000001,A,wind,3,1,0.5\nE06000002,B,wind,3,0,0\n");
    }

    proptest! {
        #[test]
        fn additive_and_conserving(a in proptest::collection::vec((0usize..4, 0.0f64..1e7), 0..20), b in proptest::collection::vec((0usize..4, 0.0f64..1e7), 0..20)) {
            let (g, t) = setup();
            let ra = aggregate_to_la(&a, &g, &t).unwrap();
            let rb = aggregate_to_la(&b, &g, &t).unwrap();
            let both: Vec<_> = a.iter().chain(&b).copied().collect();
            let rab = aggregate_to_la(&both, &g, &t).unwrap();
            for i in 0..2 {
                let s = ra.rows[i].energy_gwh + rb.rows[i].energy_gwh;
                prop_assert!((rab.rows[i].energy_gwh - s).abs() <= 1e-9 * s.max(1.0));
            }
            let total: f64 = both.iter().map(|x| x.1 / 1e6).sum();
            let agg_total: f64 = rab.rows.iter().map(|r| r.energy_gwh).sum::<f64>() + rab.unassigned_gwh;
            prop_assert!((agg_total - total).abs() <= 1e-9 * total.max(1.0));
        }
    }
}
