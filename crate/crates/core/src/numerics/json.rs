//! On-disk forms: a complex scalar is `[re, im]`; a matrix is
//! `{"rows", "cols", "data": [[[re, im], ...], ...]}` (row-major nested arrays).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CMatrix, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = String;

    fn try_from(j: MatrixJson) -> Result<Self, Self::Error> {
        if j.data.len() != j.rows {
            return Err(format!("data has {} rows, header says {}", j.data.len(), j.rows));
        }
        let mut m = CMatrix::zeros(j.rows, j.cols);
        for (i, row) in j.data.iter().enumerate() {
            if row.len() != j.cols {
                return Err(format!("data row {i} has {} entries, header says {}", row.len(), j.cols));
            }
            for (k, z) in row.iter().enumerate() {
                if !z[0].is_finite() || !z[1].is_finite() {
                    return Err(format!("entry ({i}, {k}) is not finite"));
                }
                m[(i, k)] = C64::new(z[0], z[1]);
            }
        }
        Ok(m)
    }
}

/// `#[serde(with = "complex")]` for a single scalar.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// `#[serde(with = "complex_vec")]` for a list of scalars.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// `#[serde(with = "points")]` for a list of points in `C^d`.
pub mod points {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<C64>>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|p| p.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect())
    }
}

/// `#[serde(with = "cmatrix")]` for a matrix field.
pub mod cmatrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        CMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "cmatrix_vec")]` for a list of matrices.
pub mod cmatrix_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<MatrixJson> = v.iter().map(MatrixJson::from).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let raw = Vec::<MatrixJson>::deserialize(d)?;
        raw.into_iter()
            .map(|j| CMatrix::try_from(j).map_err(serde::de::Error::custom))
            .collect()
    }
}
