//! Exact symmetric t-SNE, the baseline vMF-SNE is compared against.
//!
//! Gaussian conditionals calibrated per point to a target perplexity,
//! a Student-t (one degree of freedom) kernel in the plane, and gradient
//! descent on `KL(P‖Q)` with momentum, adaptive gains and early
//! exaggeration. The optimiser constants are the usual reference-tool
//! defaults.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::affinity::{calibrate_rows, check_target_perplexity, symmetrized_joint, AffinityMatrix};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{squared_distance, Matrix};
use crate::optimizer::{neg_entropy, EmbeddingRun, RunConfig};
use crate::rng::{stream_rng, Stream};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsneConfig<T> {
    pub perplexity: T,
    pub iterations: usize,
    pub learning_rate: T,
    pub initial_momentum: T,
    pub final_momentum: T,
    /// Iteration at which momentum switches to `final_momentum`.
    pub momentum_switch: usize,
    /// Factor applied to `P` during the first `exaggeration_iters` iterations.
    pub exaggeration: T,
    pub exaggeration_iters: usize,
    /// Standard deviation of the Gaussian initial layout.
    pub init_std: T,
    pub min_gain: T,
    pub seed: u64,
}

impl<T: Scalar> Default for TsneConfig<T> {
    fn default() -> Self {
        Self {
            perplexity: T::of(40.0),
            iterations: 1000,
            learning_rate: T::of(200.0),
            initial_momentum: T::of(0.5),
            final_momentum: T::of(0.8),
            momentum_switch: 250,
            exaggeration: T::of(4.0),
            exaggeration_iters: 50,
            init_std: T::of(1e-4),
            min_gain: T::of(0.01),
            seed: 0,
        }
    }
}

impl<T: Scalar> TsneConfig<T> {
    /// The embedding is always planar.
    pub const TARGET_DIM: usize = 2;

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.learning_rate >= T::zero()) {
            return Err(Error::domain(format!("learning rate must be nonnegative, got {}", self.learning_rate)));
        }
        if !(self.exaggeration > T::zero()) {
            return Err(Error::domain(format!("exaggeration must be positive, got {}", self.exaggeration)));
        }
        if !(self.init_std > T::zero()) {
            return Err(Error::domain(format!("init_std must be positive, got {}", self.init_std)));
        }
        check_target_perplexity(self.perplexity, n)
    }
}

/// Per-point Gaussian bandwidths and the perplexities they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCalibration<T> {
    pub sigmas: Vec<T>,
    pub achieved_perplexity: Vec<T>,
    pub converged: Vec<bool>,
}

/// `s_ij = −‖x_i − x_j‖²`, so that `p_{j|i} ∝ exp(β_i s_ij)` with `β = 1/2σ²`.
fn negative_sq_distances<T: Scalar>(points: &Matrix<T>) -> Matrix<T> {
    let n = points.rows();
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = -squared_distance(points.row(i), points.row(j));
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

fn sigma_of<T: Scalar>(beta: T) -> T {
    (T::one() / (beta + beta)).sqrt()
}

fn beta_of<T: Scalar>(sigma: T) -> T {
    T::one() / (T::of(2.0) * sigma * sigma)
}

pub fn calibrate_sigmas<T: Scalar>(points: &Matrix<T>, perplexity: T) -> Result<GaussianCalibration<T>> {
    Ok(tsne_joint_p_with_calibration(points, perplexity)?.1)
}

/// Gaussian joint `P` with bandwidths calibrated to `perplexity`.
pub fn tsne_joint_p<T: Scalar>(points: &Matrix<T>, perplexity: T) -> Result<AffinityMatrix<T>> {
    Ok(tsne_joint_p_with_calibration(points, perplexity)?.0)
}

pub fn tsne_joint_p_with_calibration<T: Scalar>(
    points: &Matrix<T>,
    perplexity: T,
) -> Result<(AffinityMatrix<T>, GaussianCalibration<T>)> {
    check_target_perplexity(perplexity, points.rows())?;
    let sims = negative_sq_distances(points);
    let calib = calibrate_rows(&sims, perplexity);
    let p = symmetrized_joint(&sims, &calib.kappas);
    let calib = GaussianCalibration {
        sigmas: calib.kappas.iter().map(|&b| sigma_of(b)).collect(),
        achieved_perplexity: calib.achieved_perplexity,
        converged: calib.converged,
    };
    Ok((p, calib))
}

/// Gaussian joint `P` at fixed bandwidths.
pub fn tsne_joint_p_fixed<T: Scalar>(points: &Matrix<T>, sigmas: &[T]) -> Result<AffinityMatrix<T>> {
    let n = points.rows();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    if sigmas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sigmas.len() });
    }
    if sigmas.iter().any(|&s| !(s > T::zero())) {
        return Err(Error::domain("bandwidths must be positive"));
    }
    let betas: Vec<T> = sigmas.iter().map(|&s| beta_of(s)).collect();
    Ok(symmetrized_joint(&negative_sq_distances(points), &betas))
}

/// Student-t kernel weights `w_ij = (1 + ‖y_i − y_j‖²)⁻¹` (zero diagonal) and their sum.
fn student_weights<T: Scalar>(y: &Matrix<T>) -> (Matrix<T>, T) {
    let n = y.rows();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = T::one() / (T::one() + squared_distance(y.row(i), y.row(j)));
            w.set(i, j, v);
            w.set(j, i, v);
        }
    }
    let mut total = T::zero();
    for i in 0..n {
        total = total + w.row(i).iter().copied().sum::<T>();
    }
    (w, total)
}

/// `q_ij = (1 + ‖y_i − y_j‖²)⁻¹ / Σ_{m≠n} (1 + ‖y_m − y_n‖²)⁻¹`.
pub fn tsne_joint_q<T: Scalar>(y: &Matrix<T>) -> Result<AffinityMatrix<T>> {
    let n = y.rows();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    let (mut w, total) = student_weights(y);
    let inv = T::one() / total;
    for i in 0..n {
        for v in w.row_mut(i) {
            *v = *v * inv;
        }
    }
    Ok(AffinityMatrix::from_values_unchecked(w))
}

/// `∂KL/∂y_i = 4 Σ_j (p_ij − q_ij)(y_i − y_j)(1 + ‖y_i − y_j‖²)⁻¹`.
pub fn tsne_gradient<T: Scalar>(p: &AffinityMatrix<T>, q: &AffinityMatrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    if p.n() != q.n() || y.rows() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: y.rows().min(q.n()) });
    }
    let (w, _) = student_weights(y);
    Ok(kl_gradient(p, T::one(), q, &w, y))
}

/// Gradient of `KL(αP‖Q)` given precomputed kernel weights.
fn kl_gradient<T: Scalar>(
    p: &AffinityMatrix<T>,
    alpha: T,
    q: &AffinityMatrix<T>,
    w: &Matrix<T>,
    y: &Matrix<T>,
) -> Matrix<T> {
    let (n, dim) = (y.rows(), y.cols());
    let four = T::of(4.0);
    let mut grad = Matrix::zeros(n, dim);
    for i in 0..n {
        let (p_row, q_row, w_row) = (p.row(i), q.row(i), w.row(i));
        let yi = y.row(i).to_vec();
        let g = grad.row_mut(i);
        for j in 0..n {
            if j == i {
                continue;
            }
            let coef = (alpha * p_row[j] - q_row[j]) * w_row[j];
            let yj = y.row(j);
            for c in 0..dim {
                g[c] = g[c] + coef * (yi[c] - yj[c]);
            }
        }
        for v in g.iter_mut() {
            *v = *v * four;
        }
    }
    grad
}

/// `KL(P‖Q)` from the kernel weights: `Σ p ln p − Σ p ln w + ln Σw`.
fn kl_from_weights<T: Scalar>(p: &AffinityMatrix<T>, p_log_p: T, w: &Matrix<T>, total: T) -> T {
    let n = p.n();
    let mut cross = T::zero();
    for i in 0..n {
        let (p_row, w_row) = (p.row(i), w.row(i));
        for j in 0..n {
            if p_row[j] > T::zero() {
                cross = cross + p_row[j] * w_row[j].ln();
            }
        }
    }
    (p_log_p - cross + total.ln()).max(T::zero())
}

/// The seeded Gaussian layout a t-SNE run starts from.
pub fn tsne_initial_embedding<T: Scalar>(n: usize, init_std: T, seed: u64) -> Matrix<T> {
    let mut rng = stream_rng(seed, Stream::TsneInit);
    let dim = TsneConfig::<T>::TARGET_DIM;
    let data: Vec<T> = (0..n * dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            init_std * T::of(z)
        })
        .collect();
    Matrix::from_vec(n, dim, data).expect("shape matches")
}

pub fn tsne_run<T: Scalar>(data: &Dataset<T>, config: &TsneConfig<T>) -> Result<EmbeddingRun<T>> {
    tsne_run_observed(data, config, |_, _, _| {})
}

/// [`tsne_run`] with an `observer(iteration, y_after_step, kl_before_step)`.
pub fn tsne_run_observed<T: Scalar, F>(data: &Dataset<T>, config: &TsneConfig<T>, mut observer: F) -> Result<EmbeddingRun<T>>
where
    F: FnMut(usize, &Matrix<T>, T),
{
    let n = data.len();
    config.validate(n)?;
    let (p, calib) = tsne_joint_p_with_calibration(data.points(), config.perplexity)?;
    let p_log_p = neg_entropy(&p);

    let dim = TsneConfig::<T>::TARGET_DIM;
    let mut y = tsne_initial_embedding(n, config.init_std, config.seed);
    let mut velocity = Matrix::zeros(n, dim);
    let mut gains = vec![T::one(); n * dim];
    let mut trace = Vec::with_capacity(config.iterations);

    for t in 0..config.iterations {
        let (w, total) = student_weights(&y);
        let kl = kl_from_weights(&p, p_log_p, &w, total);
        if !kl.is_finite() {
            return Err(Error::Numeric(format!("KL divergence is not finite at iteration {t}")));
        }
        let q = {
            let inv = T::one() / total;
            let mut qv = w.clone();
            for i in 0..n {
                for v in qv.row_mut(i) {
                    *v = *v * inv;
                }
            }
            AffinityMatrix::from_values_unchecked(qv)
        };
        let alpha = if t < config.exaggeration_iters { config.exaggeration } else { T::one() };
        let grad = kl_gradient(&p, alpha, &q, &w, &y);
        let momentum = if t < config.momentum_switch { config.initial_momentum } else { config.final_momentum };

        for i in 0..n {
            for c in 0..dim {
                let k = i * dim + c;
                let g = grad.get(i, c);
                let u = velocity.get(i, c);
                gains[k] = if (g > T::zero()) != (u > T::zero()) {
                    gains[k] + T::of(0.2)
                } else {
                    gains[k] * T::of(0.8)
                }
                .max(config.min_gain);
                let u = momentum * u - config.learning_rate * gains[k] * g;
                velocity.set(i, c, u);
                y.set(i, c, y.get(i, c) + u);
            }
        }
        // recentre
        for c in 0..dim {
            let mean = (0..n).map(|i| y.get(i, c)).sum::<T>() / T::of_usize(n);
            for i in 0..n {
                y.set(i, c, y.get(i, c) - mean);
            }
        }
        if y.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("t-SNE layout diverged at iteration {t}")));
        }
        observer(t, &y, kl);
        trace.push(kl);
    }

    let (w, total) = student_weights(&y);
    let final_kl = kl_from_weights(&p, p_log_p, &w, total);
    let flagged = calib.converged.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| i).collect();
    Ok(EmbeddingRun { config: RunConfig::Tsne(config.clone()), y, loss_trace: trace, final_kl, calibration_flagged: flagged })
}
