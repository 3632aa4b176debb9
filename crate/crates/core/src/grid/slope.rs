use super::NumericGrid;
use crate::error::Result;

/// Slope in degrees using Horn's 3x3 weighted finite differences.
///
/// ```text
/// a b c
/// d e f
/// g h i
/// dz/dx = ((c + 2f + i) - (a + 2d + g)) / (8 * cellsize)
/// dz/dy = ((g + 2h + i) - (a + 2b + c)) / (8 * cellsize)
/// ```
///
/// Border rows and columns are replicated outward. A nodata value anywhere
/// in the 3x3 window makes the output cell nodata.
pub fn compute_slope(dem: &NumericGrid) -> Result<NumericGrid> {
    let spec = dem.spec().clone();
    let (rows, cols) = (spec.n_rows, spec.n_cols);
    let nodata = dem.nodata();
    let z = dem.values();
    let eight_cs = 8.0 * spec.cell_size;

    let at = |r: isize, c: isize| -> f64 {
        let r = r.clamp(0, rows as isize - 1) as usize;
        let c = c.clamp(0, cols as isize - 1) as usize;
        z[r * cols + c]
    };

    let mut out = Vec::with_capacity(spec.len());
    for row in 0..rows as isize {
        for col in 0..cols as isize {
            let mut w = [0.0; 9];
            let mut missing = false;
            for (k, (dr, dc)) in [
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 0),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ]
            .into_iter()
            .enumerate()
            {
                let v = at(row + dr, col + dc);
                missing |= dem.is_nodata_value(v);
                w[k] = v;
            }
            if missing {
                out.push(nodata);
                continue;
            }
            let [a, b, c, d, _, f, g, h, i] = w;
            let dzdx = ((c + 2.0 * f + i) - (a + 2.0 * d + g)) / eight_cs;
            let dzdy = ((g + 2.0 * h + i) - (a + 2.0 * b + c)) / eight_cs;
            out.push(dzdx.hypot(dzdy).atan().to_degrees());
        }
    }
    NumericGrid::new(spec, out, nodata)
}
