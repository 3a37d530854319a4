//! Dense row-major matrices and unit vectors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc = acc + x * y;
    }
    acc
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc = acc + d * d;
    }
    acc
}

/// Dense row-major matrix. Rows are samples, columns are coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. An empty input gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        // chunks_exact panics on a zero chunk size
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.iter_rows().map(<[T]>::to_vec).collect()
    }

    /// `self · selfᵀ`, the matrix of pairwise row dot products.
    pub fn gram(&self) -> Matrix<T> {
        let n = self.rows;
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    /// Indices of rows whose Euclidean norm differs from 1 by more than `tol`.
    pub fn non_unit_rows(&self, tol: T) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| {
                let dev = (norm(self.row(i)) - T::one()).abs();
                dev.is_nan() || dev > tol
            })
            .collect()
    }

    /// Largest `|‖row‖ − 1|` over all rows.
    pub fn max_norm_deviation(&self) -> T {
        self.iter_rows().map(|r| (norm(r) - T::one()).abs()).fold(T::zero(), T::max)
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::of(x.as_f64())).collect(),
        }
    }
}

/// A direction in `R^d` (`d ≥ 2`) with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitVector<T>(Vec<T>);

impl<T: Scalar> UnitVector<T> {
    /// Wraps components that are already unit norm (within `T::UNIT_TOLERANCE`).
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::domain(format!("unit vector needs d >= 2, got d = {}", components.len())));
        }
        let dev = (norm(&components) - T::one()).abs();
        if !(dev <= T::of(T::UNIT_TOLERANCE)) {
            return Err(Error::NotUnitNorm { rows: vec![0] });
        }
        Ok(Self(components))
    }

    /// Scales an arbitrary nonzero vector to unit length.
    pub fn normalize(mut components: Vec<T>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::domain(format!("unit vector needs d >= 2, got d = {}", components.len())));
        }
        let n = norm(&components);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        for c in &mut components {
            *c = *c / n;
        }
        Ok(Self(components))
    }

    /// The `i`-th standard basis vector of `R^d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::domain(format!("basis index {i} out of range for d = {d}")));
        }
        let mut v = vec![T::zero(); d];
        v[i] = T::one();
        Self::new(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        dot(&self.0, &other.0)
    }
}

impl<T> AsRef<[T]> for UnitVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_validation() {
        assert!(UnitVector::new(vec![1.0f64, 0.0]).is_ok());
        assert!(UnitVector::new(vec![1.0f64]).is_err());
        assert!(UnitVector::new(vec![1.0f64, 1.0]).is_err());
        let v = UnitVector::normalize(vec![3.0f64, 4.0]).unwrap();
        assert!((v.as_slice()[0] - 0.6).abs() < 1e-15);
        assert!(UnitVector::<f64>::normalize(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn gram_is_symmetric() {
        let m = Matrix::from_rows(&[vec![1.0f64, 2.0], vec![3.0, -1.0], vec![0.5, 0.5]]).unwrap();
        let g = m.gram();
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(1, 0), 1.0);
        assert_eq!(g.get(2, 2), 0.5);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(&[vec![1.0f64, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn non_unit_rows_reported() {
        let m = Matrix::from_rows(&[vec![1.0f64, 0.0], vec![1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(m.non_unit_rows(1e-9), vec![1]);
    }
}
