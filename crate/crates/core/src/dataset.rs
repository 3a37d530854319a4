use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::simgen::SimSpec;

/// Points to embed (one per row), with optional cluster labels and, for
/// simulated data, the generating centres and spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    points: Matrix<T>,
    labels: Option<Vec<usize>>,
    centers: Option<Matrix<T>>,
    spec: Option<SimSpec<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(points: Matrix<T>, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != points.rows() {
                return Err(Error::DimensionMismatch { expected: points.rows(), got: l.len() });
            }
        }
        Ok(Self { points, labels, centers: None, spec: None })
    }

    pub(crate) fn simulated(points: Matrix<T>, labels: Vec<usize>, centers: Matrix<T>, spec: SimSpec<T>) -> Self {
        Self { points, labels: Some(labels), centers: Some(centers), spec: Some(spec) }
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Matrix<T> {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn centers(&self) -> Option<&Matrix<T>> {
        self.centers.as_ref()
    }

    pub fn spec(&self) -> Option<&SimSpec<T>> {
        self.spec.as_ref()
    }

    /// Number of clusters: the generating spec's `k` if known, else `max label + 1`.
    pub fn num_clusters(&self) -> Option<usize> {
        if let Some(s) = &self.spec {
            return Some(s.k);
        }
        self.labels.as_ref().and_then(|l| l.iter().max().map(|m| m + 1))
    }

    /// Fails with the offending row indices if any point is off the unit sphere.
    pub fn check_unit_norm(&self) -> Result<()> {
        let bad = self.points.non_unit_rows(T::of(T::UNIT_TOLERANCE));
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::NotUnitNorm { rows: bad })
        }
    }
}
