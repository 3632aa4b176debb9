use super::Mask;
use crate::error::{Error, Result};

/// Exact squared Euclidean distance (in cell units) from every cell centre to
/// the nearest `true` cell, via the two-pass lower-envelope transform.
/// Cells with no feature anywhere in the grid get `f64::INFINITY`.
pub fn squared_distance_transform(mask: &Mask) -> Vec<f64> {
    let spec = mask.spec();
    let (rows, cols) = (spec.n_rows, spec.n_cols);
    let mut d: Vec<f64> = mask
        .values()
        .iter()
        .map(|&v| if v { 0.0 } else { f64::INFINITY })
        .collect();

    let mut line = vec![0.0; rows.max(cols)];
    let mut out = vec![0.0; rows.max(cols)];
    let mut scratch = Envelope::with_capacity(rows.max(cols));

    for c in 0..cols {
        for r in 0..rows {
            line[r] = d[r * cols + c];
        }
        scratch.transform(&line[..rows], &mut out[..rows]);
        for r in 0..rows {
            d[r * cols + c] = out[r];
        }
    }
    for r in 0..rows {
        let row = &mut d[r * cols..(r + 1) * cols];
        line[..cols].copy_from_slice(row);
        scratch.transform(&line[..cols], &mut out[..cols]);
        row.copy_from_slice(&out[..cols]);
    }
    d
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    /// 1-D squared distance transform of a sampled function `f`.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.sites.clear();
        self.bounds.clear();
        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            let qf = q as f64;
            loop {
                let Some(&v) = self.sites.last() else {
                    self.sites.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let vf = v as f64;
                let s = ((fq + qf * qf) - (f[v] + vf * vf)) / (2.0 * qf - 2.0 * vf);
                if s <= *self.bounds.last().unwrap() {
                    self.sites.pop();
                    self.bounds.pop();
                } else {
                    self.sites.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        if self.sites.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            let qf = q as f64;
            while k + 1 < self.sites.len() && self.bounds[k + 1] < qf {
                k += 1;
            }
            let v = self.sites[k];
            let dv = qf - v as f64;
            *o = dv * dv + f[v];
        }
    }
}

/// Cells whose centre lies within `distance` metres of any `true` cell centre.
pub fn buffer_mask(mask: &Mask, distance: f64) -> Result<Mask> {
    if !(distance >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "buffer distance must be non-negative, got {distance}"
        )));
    }
    if distance == 0.0 {
        return Ok(mask.clone());
    }
    let spec = mask.spec().clone();
    let cs2 = spec.cell_size * spec.cell_size;
    let limit = distance * distance;
    let d2 = squared_distance_transform(mask);
    Ok(Mask::from_fn(spec, |i| d2[i] * cs2 <= limit))
}

/// For every cell, the index of the nearest `valid` cell (itself when valid).
/// Equidistant candidates resolve to the lowest cell index.
pub fn nearest_valid_cells(valid: &Mask) -> Result<Vec<usize>> {
    let spec = valid.spec();
    if valid.count() == 0 {
        return Err(Error::Data("no valid cells to fill from".into()));
    }
    let (rows, cols) = (spec.n_rows as i64, spec.n_cols as i64);
    let d2 = squared_distance_transform(valid);
    let out = (0..spec.len())
        .map(|i| {
            if valid.get(i) {
                return i;
            }
            let target = d2[i] as i64;
            let (r, c) = spec.row_col(i);
            let (r, c) = (r as i64, c as i64);
            let reach = isqrt(target);
            let mut best = usize::MAX;
            for dy in -reach..=reach {
                let rem = target - dy * dy;
                let dx = isqrt(rem);
                if dx * dx != rem {
                    continue;
                }
                for dx in [-dx, dx] {
                    let (rr, cc) = (r + dy, c + dx);
                    if rr < 0 || cc < 0 || rr >= rows || cc >= cols {
                        continue;
                    }
                    let j = (rr * cols + cc) as usize;
                    if valid.get(j) {
                        best = best.min(j);
                    }
                }
            }
            debug_assert!(best != usize::MAX);
            best
        })
        .collect();
    Ok(out)
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use proptest::prelude::*;

    fn spec(r: usize, c: usize, cs: f64) -> GridSpec {
        GridSpec::new(r, c, cs, 0.0, 0.0, "").unwrap()
    }

    /// All-pairs reference: O(N^2) distance check between cell centres.
    fn brute_buffer(m: &Mask, distance: f64) -> Mask {
        let s = m.spec().clone();
        let set: Vec<(f64, f64)> = m.iter_set().map(|i| s.cell_center(i)).collect();
        let s2 = s.clone();
        Mask::from_fn(s, |i| {
            let (x, y) = s2.cell_center(i);
            set.iter()
                .any(|(a, b)| (x - a) * (x - a) + (y - b) * (y - b) <= distance * distance)
        })
    }

    #[test]
    fn zero_distance_is_identity() {
        let m = Mask::from_fn(spec(4, 4, 10.0), |i| i % 3 == 0);
        assert_eq!(buffer_mask(&m, 0.0).unwrap(), m);
    }

    #[test]
    fn negative_distance_is_rejected() {
        let m = Mask::empty(spec(2, 2, 1.0));
        assert!(matches!(buffer_mask(&m, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn single_cell_350m_disk_has_37_cells() {
        let s = spec(21, 21, 100.0);
        let m = Mask::from_fn(s, |i| i == 10 * 21 + 10);
        let b = buffer_mask(&m, 350.0).unwrap();
        // lattice points with dx^2 + dy^2 <= 3.5^2
        let lattice = (-3i32..=3)
            .flat_map(|dy| (-3i32..=3).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| (dx * dx + dy * dy) as f64 <= 12.25)
            .count();
        assert_eq!(lattice, 37);
        assert_eq!(b.count(), 37);
        assert_eq!(b, brute_buffer(&m, 350.0));
    }

    #[test]
    fn empty_mask_stays_empty() {
        let m = Mask::empty(spec(5, 5, 1.0));
        assert_eq!(buffer_mask(&m, 1e6).unwrap().count(), 0);
    }

    #[test]
    fn nearest_fill_breaks_ties_by_lowest_index() {
        // valid cells at (0,1) and (2,1); cell (1,1) is equidistant
        let s = spec(3, 3, 1.0);
        let valid = Mask::from_fn(s, |i| i == 1 || i == 7);
        let nn = nearest_valid_cells(&valid).unwrap();
        assert_eq!(nn[4], 1);
        assert_eq!(nn[7], 7);
        assert_eq!(nn[6], 7);
    }

    #[test]
    fn nearest_fill_needs_a_valid_cell() {
        assert!(nearest_valid_cells(&Mask::empty(spec(2, 2, 1.0))).is_err());
    }

    fn random_mask(n: usize) -> impl Strategy<Value = Mask> {
        proptest::collection::vec(proptest::bool::weighted(0.05), n * n)
            .prop_map(move |v| Mask::new(spec(n, n, 100.0), v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_all_pairs_oracle(m in random_mask(32), d in 0.0f64..800.0) {
            prop_assert_eq!(buffer_mask(&m, d).unwrap(), brute_buffer(&m, d));
        }

        #[test]
        fn monotone_and_extensive(m in random_mask(16), d1 in 0.0f64..500.0, extra in 0.0f64..500.0) {
            let a = buffer_mask(&m, d1).unwrap();
            let b = buffer_mask(&m, d1 + extra).unwrap();
            prop_assert!(m.is_subset_of(&a));
            prop_assert!(a.is_subset_of(&b));
        }

        #[test]
        fn nearest_fill_matches_brute_force(m in random_mask(12)) {
            prop_assume!(m.count() > 0);
            let s = m.spec().clone();
            let nn = nearest_valid_cells(&m).unwrap();
            for i in 0..s.len() {
                let (r, c) = s.row_col(i);
                let best = m.iter_set()
                    .min_by_key(|&j| {
                        let (rj, cj) = s.row_col(j);
                        let dr = r as i64 - rj as i64;
                        let dc = c as i64 - cj as i64;
                        (dr * dr + dc * dc, j)
                    })
                    .unwrap();
                prop_assert_eq!(nn[i], best);
            }
        }
    }
}
