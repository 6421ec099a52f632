use serde::{Deserialize, Serialize};

use super::{CMatrix, MatError, MatTuple, C64};

/// Wire form of a matrix: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim_rows: usize,
    pub dim_cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            dim_rows: m.nrows(),
            dim_cols: m.ncols(),
            re,
            im,
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = MatError;

    fn try_from(j: MatrixJson) -> Result<Self, MatError> {
        let n = j.dim_rows * j.dim_cols;
        if j.re.len() != n || j.im.len() != n {
            return Err(MatError::Dimension(format!(
                "expected {n} entries for a {}x{} matrix, got re={} im={}",
                j.dim_rows,
                j.dim_cols,
                j.re.len(),
                j.im.len()
            )));
        }
        let m = CMatrix::from_row_iterator(
            j.dim_rows,
            j.dim_cols,
            j.re.iter().zip(&j.im).map(|(&r, &i)| C64::new(r, i)),
        );
        if !super::is_finite(&m) {
            return Err(MatError::NonFinite);
        }
        Ok(m)
    }
}

/// Wire form of a [`MatTuple`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub dim: usize,
    pub mats: Vec<MatrixJson>,
}

impl From<&MatTuple> for TupleJson {
    fn from(t: &MatTuple) -> Self {
        Self {
            dim: t.dim(),
            mats: t.iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<TupleJson> for MatTuple {
    type Error = MatError;

    fn try_from(j: TupleJson) -> Result<Self, MatError> {
        let mats = j
            .mats
            .into_iter()
            .map(CMatrix::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        MatTuple::new(j.dim, mats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout_is_row_major() {
        let m = CMatrix::from_row_iterator(2, 3, (0..6).map(|k| C64::new(k as f64, -(k as f64))));
        let j = MatrixJson::from(&m);
        assert_eq!(j.re, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(CMatrix::try_from(j).unwrap(), m);
    }

    #[test]
    fn rejects_short_payload() {
        let j = MatrixJson {
            dim_rows: 2,
            dim_cols: 2,
            re: vec![1.0; 3],
            im: vec![0.0; 4],
        };
        assert!(CMatrix::try_from(j).is_err());
    }
}
