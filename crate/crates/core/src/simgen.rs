//! Simulated spherical clusters.
//!
//! The first centre is uniform on the sphere; every further centre copies it
//! and flips the sign of each coordinate with probability ½. Sign flips keep
//! the norm, and a random half-flip of `d` coordinates has expected dot
//! product 0 with the original, so the centres end up well separated.
//! Cluster points are vMF draws around their centre.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, UnitVector};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scalar::Scalar;
use crate::vmf::{sample_uniform_sphere_with, sample_vmf, VmfParams};

pub const MAX_CENTER_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSpec<T> {
    /// Ambient dimension.
    pub d: usize,
    /// Number of clusters.
    pub k: usize,
    pub n_total: usize,
    /// vMF concentration used for sampling every cluster.
    pub gen_kappa: T,
    /// Largest dot product allowed between two centres.
    pub min_separation: T,
    pub seed: u64,
}

impl<T: Scalar> SimSpec<T> {
    pub fn new(d: usize, k: usize, n_total: usize, gen_kappa: T, seed: u64) -> Self {
        Self { d, k, n_total, gen_kappa, min_separation: T::of(0.5), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::domain("cluster count k must be at least 1"));
        }
        if self.d < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {}", self.d)));
        }
        if self.n_total < self.k {
            return Err(Error::domain(format!(
                "n_total ({}) must be at least the cluster count ({})",
                self.n_total, self.k
            )));
        }
        if !(self.gen_kappa > T::zero()) || !self.gen_kappa.is_finite() {
            return Err(Error::domain(format!("gen_kappa must be positive, got {}", self.gen_kappa)));
        }
        if !(self.min_separation >= -T::one() && self.min_separation <= T::one()) {
            return Err(Error::domain(format!("min_separation must lie in [-1, 1], got {}", self.min_separation)));
        }
        Ok(())
    }

    /// Points per cluster: the first `n_total mod k` clusters get one extra.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let base = self.n_total / self.k;
        let extra = self.n_total % self.k;
        (0..self.k).map(|c| base + usize::from(c < extra)).collect()
    }
}

pub fn generate_centers<T: Scalar>(spec: &SimSpec<T>) -> Result<Vec<UnitVector<T>>> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, Stream::Centers);
    let first = sample_uniform_sphere_with::<T, _>(spec.d, 1, &mut rng)?.remove(0);
    let mut centers = vec![first.clone()];
    let mut patterns: HashSet<Vec<bool>> = HashSet::new();
    patterns.insert(vec![false; spec.d]);

    for c in 1..spec.k {
        let mut accepted = None;
        for _ in 0..MAX_CENTER_REDRAWS {
            let flips: Vec<bool> = (0..spec.d).map(|_| rng.random::<bool>()).collect();
            if patterns.contains(&flips) {
                continue;
            }
            let candidate: Vec<T> = first
                .as_slice()
                .iter()
                .zip(&flips)
                .map(|(&v, &f)| if f { -v } else { v })
                .collect();
            let candidate = UnitVector::new(candidate)?;
            if centers.iter().all(|m| m.dot(&candidate) <= spec.min_separation) {
                accepted = Some((flips, candidate));
                break;
            }
        }
        match accepted {
            Some((flips, v)) => {
                patterns.insert(flips);
                centers.push(v);
            }
            None => {
                return Err(Error::Generation(format!(
                    "could not place centre {c} with pairwise dot <= {} after {MAX_CENTER_REDRAWS} redraws \
                     (d = {}, k = {}, seed = {})",
                    spec.min_separation, spec.d, spec.k, spec.seed
                )))
            }
        }
    }
    Ok(centers)
}

/// Centres plus `n_total` vMF points, cluster by cluster in label order.
/// Cluster `c` samples with seed `derive_seed(spec.seed, c)`.
pub fn generate_dataset<T: Scalar>(spec: &SimSpec<T>) -> Result<Dataset<T>> {
    let centers = generate_centers(spec)?;
    let mut rows: Vec<UnitVector<T>> = Vec::with_capacity(spec.n_total);
    let mut labels = Vec::with_capacity(spec.n_total);
    for (c, (mu, size)) in centers.iter().zip(spec.cluster_sizes()).enumerate() {
        if size == 0 {
            continue;
        }
        let params = VmfParams::new(mu.clone(), spec.gen_kappa)?;
        rows.extend(sample_vmf(&params, size, derive_seed(spec.seed, c as u64))?);
        labels.extend(std::iter::repeat_n(c, size));
    }
    let points = Matrix::from_rows(&rows)?;
    let centers = Matrix::from_rows(&centers)?;
    Ok(Dataset::simulated(points, labels, centers, spec.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm};
    use crate::vmf::mean_resultant_length;

    #[test]
    fn centers_unit_norm_and_separated() {
        let spec = SimSpec::new(50, 16, 800, 15.0f64, 3);
        let c = generate_centers(&spec).unwrap();
        assert_eq!(c.len(), 16);
        for (i, a) in c.iter().enumerate() {
            assert!((norm(a.as_slice()) - 1.0).abs() < 1e-12);
            for b in &c[i + 1..] {
                assert!(a.dot(b) <= 0.5);
            }
        }
    }

    #[test]
    fn single_cluster() {
        let spec = SimSpec::new(5, 1, 10, 3.0f64, 1);
        assert_eq!(generate_centers(&spec).unwrap().len(), 1);
    }

    #[test]
    fn unreachable_separation_is_an_error() {
        let mut spec = SimSpec::new(2, 3, 10, 3.0f64, 1);
        spec.min_separation = -0.9;
        assert!(matches!(generate_centers(&spec), Err(Error::Generation(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(SimSpec::new(50, 0, 10, 1.0f64, 0).validate().is_err());
        assert!(SimSpec::new(1, 2, 10, 1.0f64, 0).validate().is_err());
        assert!(SimSpec::new(5, 20, 10, 1.0f64, 0).validate().is_err());
        assert!(SimSpec::new(5, 2, 10, 0.0f64, 0).validate().is_err());
    }

    #[test]
    fn balanced_clusters_and_labels() {
        let spec = SimSpec::new(50, 4, 800, 15.0f64, 1);
        let ds = generate_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 800);
        let labels = ds.labels().unwrap();
        for c in 0..4 {
            assert_eq!(labels.iter().filter(|&&l| l == c).count(), 200);
        }
        ds.check_unit_norm().unwrap();
        let uneven = SimSpec::new(10, 3, 10, 5.0f64, 1);
        assert_eq!(uneven.cluster_sizes(), vec![4, 3, 3]);
        assert_eq!(generate_dataset(&uneven).unwrap().len(), 10);
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = SimSpec::new(10, 3, 30, 5.0f64, 77);
        assert_eq!(generate_dataset(&spec).unwrap(), generate_dataset(&spec).unwrap());
        let other = SimSpec { seed: 78, ..spec.clone() };
        assert_ne!(generate_dataset(&spec).unwrap(), generate_dataset(&other).unwrap());
    }

    fn mean_dot_to_center(ds: &Dataset<f64>, c: usize) -> (f64, Vec<f64>) {
        let labels = ds.labels().unwrap();
        let center = ds.centers().unwrap().row(c);
        let dots: Vec<f64> = (0..ds.len())
            .filter(|&i| labels[i] == c)
            .map(|i| dot(ds.points().row(i), center))
            .collect();
        (dots.iter().sum::<f64>() / dots.len() as f64, dots)
    }

    #[test]
    fn cluster_concentration_matches_oracle() {
        let spec = SimSpec::new(50, 4, 800, 40.0f64, 5);
        let ds = generate_dataset(&spec).unwrap();
        let want = mean_resultant_length(50, 40.0).unwrap();
        for c in 0..4 {
            let (m, dots) = mean_dot_to_center(&ds, c);
            let var = dots.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (dots.len() - 1) as f64;
            let se = (var / dots.len() as f64).sqrt();
            assert!((m - want).abs() < 3.0 * se, "cluster {c}: {m} vs {want}");
            // normalised mean direction
            let labels = ds.labels().unwrap();
            let mut s = vec![0.0; 50];
            for i in (0..ds.len()).filter(|&i| labels[i] == c) {
                for (a, b) in s.iter_mut().zip(ds.points().row(i)) {
                    *a += b;
                }
            }
            let dir = UnitVector::normalize(s).unwrap();
            assert!(dot(dir.as_slice(), ds.centers().unwrap().row(c)) > 0.8);
        }
    }

    #[test]
    fn concentration_increases_with_gen_kappa() {
        let lo = generate_dataset(&SimSpec::new(50, 4, 400, 10.0f64, 9)).unwrap();
        let hi = generate_dataset(&SimSpec::new(50, 4, 400, 40.0f64, 9)).unwrap();
        assert_eq!(lo.centers(), hi.centers());
        let avg = |ds: &Dataset<f64>| (0..4).map(|c| mean_dot_to_center(ds, c).0).sum::<f64>() / 4.0;
        assert!(avg(&hi) > avg(&lo));
    }
}
