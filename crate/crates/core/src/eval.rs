//! Cluster-recovery metrics for an embedding.
//!
//! Each cluster's image is the mean of its embedded points (renormalised on
//! the sphere). Points are assigned to the nearest image, and the report
//! gives the accuracy of that assignment together with the entropy of every
//! assigned cluster's true-label mix, `H(i) = −Σ_j c(i,j) ln c(i,j)`.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, squared_distance, Matrix};
use crate::optimizer::EmbeddingRun;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Rows live on the unit sphere; compare by cosine.
    Spherical,
    /// Rows live in the plane; compare by Euclidean distance.
    Planar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport<T> {
    pub geometry: Geometry,
    pub n: usize,
    pub k: usize,
    /// `c(i,j)`: share of points assigned to cluster `i` whose true label is `j`.
    pub confusion: Vec<Vec<T>>,
    /// Raw counts behind `confusion` (rows assigned, columns true).
    pub counts: Vec<Vec<usize>>,
    /// `H(i)` in nats; `None` for clusters that received no points.
    pub per_cluster_entropy: Vec<Option<T>>,
    /// Mean of the defined `H(i)`.
    pub mean_entropy: T,
    pub accuracy: T,
    /// Clusters with no assigned points, excluded from `mean_entropy`.
    pub empty_clusters: Vec<usize>,
    pub center_images: Vec<Vec<T>>,
}

fn check_labels(n: usize, labels: &[usize], k: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::domain(format!("label {bad} out of range for {k} clusters")));
    }
    Ok(())
}

/// Mean embedded point of each true cluster; unit-normalised when spherical.
pub fn center_images<T: Scalar>(y: &Matrix<T>, labels: &[usize], k: usize, geometry: Geometry) -> Result<Matrix<T>> {
    check_labels(y.rows(), labels, k)?;
    let dim = y.cols();
    let mut sums = Matrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        let s = sums.row_mut(l);
        for (a, &b) in s.iter_mut().zip(y.row(i)) {
            *a = *a + b;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            return Err(Error::EmptyCluster(c));
        }
        let cnt = T::of_usize(counts[c]);
        let row = sums.row_mut(c);
        for v in row.iter_mut() {
            *v = *v / cnt;
        }
        if geometry == Geometry::Spherical {
            let len = norm(row);
            if !(len > T::of(1e-12)) {
                return Err(Error::DegenerateCenter(c));
            }
            for v in row.iter_mut() {
                *v = *v / len;
            }
        }
    }
    Ok(sums)
}

/// Nearest image for every row; ties go to the lowest cluster index.
pub fn classify<T: Scalar>(y: &Matrix<T>, images: &Matrix<T>, geometry: Geometry) -> Vec<usize> {
    y.iter_rows()
        .map(|row| {
            let mut best = 0usize;
            let mut best_score = T::neg_infinity();
            for c in 0..images.rows() {
                let img = images.row(c);
                let score = match geometry {
                    Geometry::Spherical => dot(row, img) / (norm(row) * norm(img)),
                    Geometry::Planar => -squared_distance(row, img),
                };
                if score > best_score {
                    best = c;
                    best_score = score;
                }
            }
            best
        })
        .collect()
}

/// Confusion, entropies and accuracy of an assignment against true labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentScore<T> {
    pub counts: Vec<Vec<usize>>,
    pub confusion: Vec<Vec<T>>,
    pub per_cluster_entropy: Vec<Option<T>>,
    pub mean_entropy: T,
    pub accuracy: T,
    pub empty_clusters: Vec<usize>,
}

pub fn score_assignment<T: Scalar>(assigned: &[usize], labels: &[usize], k: usize) -> Result<AssignmentScore<T>> {
    check_labels(assigned.len(), labels, k)?;
    check_labels(assigned.len(), assigned, k)?;
    let n = labels.len();
    let mut counts = vec![vec![0usize; k]; k];
    for (&a, &l) in assigned.iter().zip(labels) {
        counts[a][l] += 1;
    }
    let mut confusion = vec![vec![T::zero(); k]; k];
    let mut entropies = Vec::with_capacity(k);
    let mut empty = Vec::new();
    for i in 0..k {
        let total: usize = counts[i].iter().sum();
        if total == 0 {
            entropies.push(None);
            empty.push(i);
            continue;
        }
        let mut h = T::zero();
        for j in 0..k {
            let c = T::of_usize(counts[i][j]) / T::of_usize(total);
            confusion[i][j] = c;
            if c > T::zero() {
                h = h - c * c.ln();
            }
        }
        entropies.push(Some(h.max(T::zero())));
    }
    let defined: Vec<T> = entropies.iter().flatten().copied().collect();
    let mean_entropy = defined.iter().copied().sum::<T>() / T::of_usize(defined.len().max(1));
    let correct = (0..k).map(|i| counts[i][i]).sum::<usize>();
    let accuracy = if n == 0 { T::zero() } else { T::of_usize(correct) / T::of_usize(n) };
    Ok(AssignmentScore {
        counts,
        confusion,
        per_cluster_entropy: entropies,
        mean_entropy,
        accuracy,
        empty_clusters: empty,
    })
}

pub fn evaluate_embedding<T: Scalar>(y: &Matrix<T>, geometry: Geometry, labels: &[usize], k: usize) -> Result<EvalReport<T>> {
    if y.rows() == 0 {
        return Err(Error::domain("cannot evaluate an empty embedding"));
    }
    let images = center_images(y, labels, k, geometry)?;
    let assigned = classify(y, &images, geometry);
    let s = score_assignment(&assigned, labels, k)?;
    Ok(EvalReport {
        geometry,
        n: y.rows(),
        k,
        confusion: s.confusion,
        counts: s.counts,
        per_cluster_entropy: s.per_cluster_entropy,
        mean_entropy: s.mean_entropy,
        accuracy: s.accuracy,
        empty_clusters: s.empty_clusters,
        center_images: images.to_rows(),
    })
}

/// Scores `run` against the true labels of `dataset`.
pub fn evaluate<T: Scalar>(run: &EmbeddingRun<T>, dataset: &Dataset<T>) -> Result<EvalReport<T>> {
    let labels = dataset.labels().ok_or_else(|| Error::domain("dataset has no labels to evaluate against"))?;
    let k = dataset.num_clusters().unwrap_or(0);
    if run.y.rows() != dataset.len() {
        return Err(Error::DimensionMismatch { expected: dataset.len(), got: run.y.rows() });
    }
    evaluate_embedding(&run.y, run.geometry(), labels, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_planar() -> (Matrix<f64>, Vec<usize>) {
        let centers = [(5.0, 5.0), (-5.0, 5.0), (-5.0, -5.0), (5.0, -5.0)];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, &(x, y)) in centers.iter().enumerate() {
            for &(dx, dy) in &[(0.5, 0.0), (-0.5, 0.0), (0.0, 1.0)] {
                rows.push(vec![x + dx, y + dy]);
                labels.push(c);
            }
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn hand_computed_means() {
        let (y, labels) = toy_planar();
        let img = center_images(&y, &labels, 4, Geometry::Planar).unwrap();
        assert!((img.get(0, 0) - 5.0).abs() < 1e-12);
        assert!((img.get(0, 1) - (5.0 + 1.0 / 3.0)).abs() < 1e-12);
        assert!((img.get(2, 0) + 5.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_layout_scores_one() {
        let (y, labels) = toy_planar();
        let r = evaluate_embedding(&y, Geometry::Planar, &labels, 4).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(r.per_cluster_entropy.iter().all(|h| *h == Some(0.0)));
        assert_eq!(r.mean_entropy, 0.0);
    }

    #[test]
    fn identical_points_image() {
        let y = Matrix::<f64>::from_rows(&[vec![0.6, 0.8], vec![0.6, 0.8], vec![-1.0, 0.0]]).unwrap();
        let img = center_images(&y, &[0, 0, 1], 2, Geometry::Spherical).unwrap();
        assert!((img.get(0, 0) - 0.6).abs() < 1e-15 && (img.get(0, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn antipodal_cluster_is_degenerate() {
        let y = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(center_images(&y, &[0, 0, 1], 2, Geometry::Spherical), Err(Error::DegenerateCenter(0)));
        assert_eq!(center_images(&y, &[0, 0, 0], 2, Geometry::Spherical), Err(Error::EmptyCluster(1)));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let images = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let y = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(classify(&y, &images, Geometry::Spherical), vec![0, 0]);
        assert_eq!(classify(&y, &images, Geometry::Planar), vec![0, 0]);
        let y = Matrix::from_rows(&[vec![-1.0, 0.0]]).unwrap();
        assert_eq!(classify(&y, &images, Geometry::Spherical), vec![1]);
    }

    #[test]
    fn two_way_split_has_ln2_entropy() {
        let s = score_assignment::<f64>(&[0, 0, 0, 0], &[0, 1, 0, 1], 2).unwrap();
        assert_eq!(s.counts, vec![vec![2, 2], vec![0, 0]]);
        assert_eq!(s.confusion[0], vec![0.5, 0.5]);
        assert!((s.per_cluster_entropy[0].unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(s.per_cluster_entropy[1], None);
        assert_eq!(s.empty_clusters, vec![1]);
        assert!((s.mean_entropy - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(s.accuracy, 0.5);
    }

    proptest! {
        #[test]
        fn invariants(assign in prop::collection::vec(0usize..5, 1..80), seed in 0usize..1000) {
            let k = 5;
            let labels: Vec<usize> = assign.iter().enumerate().map(|(i, &a)| (a + i * seed) % k).collect();
            let s = score_assignment::<f64>(&assign, &labels, k).unwrap();
            let (counts, acc, mean) = (&s.counts, s.accuracy, s.mean_entropy);
            prop_assert!((0.0..=1.0).contains(&acc));
            for e in s.per_cluster_entropy.iter().flatten() {
                prop_assert!(*e >= 0.0 && *e <= (k as f64).ln() + 1e-12);
            }
            for j in 0..k {
                let col: usize = (0..k).map(|i| counts[i][j]).sum();
                prop_assert_eq!(col, labels.iter().filter(|&&l| l == j).count());
            }
            // simultaneous permutation of points
            let mut idx: Vec<usize> = (0..assign.len()).collect();
            idx.reverse();
            let a2: Vec<usize> = idx.iter().map(|&i| assign[i]).collect();
            let l2: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let s2 = score_assignment::<f64>(&a2, &l2, k).unwrap();
            prop_assert_eq!(acc, s2.accuracy);
            prop_assert!((mean - s2.mean_entropy).abs() < 1e-12);
            // relabel clusters c → (c + 1) mod k
            let a3: Vec<usize> = assign.iter().map(|&c| (c + 1) % k).collect();
            let l3: Vec<usize> = labels.iter().map(|&c| (c + 1) % k).collect();
            let s3 = score_assignment::<f64>(&a3, &l3, k).unwrap();
            prop_assert_eq!(acc, s3.accuracy);
            prop_assert!((mean - s3.mean_entropy).abs() < 1e-12);
        }
    }
}
