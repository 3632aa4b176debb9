use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative residual norm below which a column counts as dependent on the
/// columns before it.
const RANK_TOLERANCE: f64 = 1e-9;

/// Row-major design matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
}

impl Design {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidInput("one name per column required".into()));
        }
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput(
                "design columns differ in length".into(),
            ));
        }
        let x = DMatrix::from_fn(n, columns.len(), |r, c| columns[c][r]);
        Ok(Self { names, x })
    }

    pub fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.x.ncols()
    }

    /// Fails with the name of the first column that is (numerically) a linear
    /// combination of earlier ones, via modified Gram-Schmidt.
    pub fn ensure_full_rank(&self) -> Result<()> {
        if self.n_obs() < self.n_params() {
            return Err(Error::InvalidInput(format!(
                "{} observations for {} parameters",
                self.n_obs(),
                self.n_params()
            )));
        }
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for (j, name) in self.names.iter().enumerate() {
            let col = self.x.column(j).into_owned();
            let norm0 = col.norm();
            let mut v = col;
            for q in &basis {
                let d = q.dot(&v);
                v -= q * d;
            }
            let norm = v.norm();
            if norm0 == 0.0 || norm <= RANK_TOLERANCE * norm0 {
                return Err(Error::Collinearity(name.clone()));
            }
            basis.push(v / norm);
        }
        Ok(())
    }
}

/// Inverse of a symmetric positive-definite matrix.
pub(crate) fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    nalgebra::linalg::Cholesky::new(m.clone()).map(|c| c.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_dependent_column() {
        let d = Design::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![1.0, 1.0, 1.0, 1.0],
                vec![1.0, 2.0, 3.0, 4.0],
                vec![2.0, 3.0, 4.0, 5.0],
            ],
        )
        .unwrap();
        match d.ensure_full_rank() {
            Err(Error::Collinearity(c)) => assert_eq!(c, "c"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn accepts_independent_columns() {
        let d = Design::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 5.0]],
        )
        .unwrap();
        d.ensure_full_rank().unwrap();
    }
}
