use num_traits::Zero;

use super::{GeometryError, Rational, RationalVector};

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = num_traits::One::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RationalVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, RationalVector::dim);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.dim(), r, "ragged matrix");
            for i in 0..r {
                m.data[i * c + j] = col[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &RationalVector) -> RationalVector {
        assert_eq!(self.cols, x.dim(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &x[j]))
            .collect()
    }
}

/// Solves `a x = b` exactly by Gauss-Jordan elimination.
///
/// Returns [`GeometryError::Singular`] when `a` has deficient rank.
pub fn solve_linear_system(
    a: &RationalMatrix,
    b: &RationalVector,
) -> Result<RationalVector, GeometryError> {
    let n = a.rows;
    if a.cols != n || b.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    let w = n + 1;
    let mut m: Vec<Rational> = Vec::with_capacity(n * w);
    for i in 0..n {
        m.extend_from_slice(&a.data[i * n..(i + 1) * n]);
        m.push(b[i].clone());
    }

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r * w + col].is_zero())
            .ok_or(GeometryError::Singular)?;
        if pivot != col {
            for k in 0..w {
                m.swap(pivot * w + k, col * w + k);
            }
        }
        let inv = m[col * w + col].recip();
        for k in col..w {
            m[col * w + k] = &m[col * w + k] * &inv;
        }
        for r in 0..n {
            if r == col || m[r * w + col].is_zero() {
                continue;
            }
            let factor = m[r * w + col].clone();
            for k in col..w {
                let delta = &factor * &m[col * w + k];
                m[r * w + k] -= delta;
            }
        }
    }
    Ok((0..n).map(|i| m[i * w + n].clone()).collect())
}
