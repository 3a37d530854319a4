//! vMF-SNE training loop.
//!
//! Maximises `L̃ = κ Σ_ij p_ij y_iᵀy_j − ln Z`, `Z = Σ_{m≠n} exp(κ y_mᵀy_n)`,
//! which is `−KL(P‖Q)` up to a constant. Its gradient is
//! `∂L̃/∂y_k = 2κ Σ_i (p_ik − q_ik) y_i`. Each iteration takes a plain ascent
//! step and retracts every row back onto the unit sphere.

use rand::Rng;
use serde::Serialize;

use crate::affinity::{check_target_perplexity, joint_q_parts, vmf_joint_p, AffinityMatrix};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval::Geometry;
use crate::linalg::{dot, norm, Matrix};
use crate::rng::{stream_rng, Stream};
use crate::scalar::Scalar;
use crate::tsne::TsneConfig;
use crate::vmf::sample_uniform_sphere_with;

/// Consecutive iterations with `|ΔKL| < EARLY_STOP_DELTA` that end a run
/// early when [`EmbedConfig::early_stop`] is set.
pub const EARLY_STOP_PATIENCE: usize = 50;
pub const EARLY_STOP_DELTA: f64 = 1e-9;
/// Size of the random nudge applied when an update lands on the origin.
pub const ZERO_UPDATE_NUDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vmf,
    Tsne,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vmf => "vmf",
            Method::Tsne => "tsne",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedConfig<T> {
    pub target_dim: usize,
    pub perplexity: T,
    /// Shared concentration `κ` in the embedding space.
    pub embed_kappa: T,
    pub iterations: usize,
    pub learning_rate: T,
    pub seed: u64,
    pub early_stop: bool,
}

impl<T: Scalar> Default for EmbedConfig<T> {
    fn default() -> Self {
        Self {
            target_dim: 3,
            perplexity: T::of(40.0),
            embed_kappa: T::of(2.0),
            iterations: 1000,
            learning_rate: T::of(0.5),
            seed: 0,
            early_stop: false,
        }
    }
}

impl<T: Scalar> EmbedConfig<T> {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.target_dim < 2 {
            return Err(Error::domain(format!("target dimension must be at least 2, got {}", self.target_dim)));
        }
        if !(self.embed_kappa > T::zero()) || !self.embed_kappa.is_finite() {
            return Err(Error::domain(format!("embedding concentration must be positive, got {}", self.embed_kappa)));
        }
        if !(self.learning_rate >= T::zero()) || !self.learning_rate.is_finite() {
            return Err(Error::domain(format!("learning rate must be nonnegative, got {}", self.learning_rate)));
        }
        check_target_perplexity(self.perplexity, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum RunConfig<T> {
    Vmf(EmbedConfig<T>),
    Tsne(TsneConfig<T>),
}

/// Outcome of one embedding run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRun<T> {
    pub config: RunConfig<T>,
    /// Embedded points, aligned with the input rows.
    pub y: Matrix<T>,
    /// `KL(P‖Q)` at the start of each iteration; entry 0 is the KL of the
    /// initial layout.
    pub loss_trace: Vec<T>,
    /// `KL(P‖Q)` of the returned layout.
    pub final_kl: T,
    /// Points whose bandwidth calibration missed the target perplexity.
    pub calibration_flagged: Vec<usize>,
}

impl<T: Scalar> EmbeddingRun<T> {
    pub fn method(&self) -> Method {
        match self.config {
            RunConfig::Vmf(_) => Method::Vmf,
            RunConfig::Tsne(_) => Method::Tsne,
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self.config {
            RunConfig::Vmf(_) => Geometry::Spherical,
            RunConfig::Tsne(_) => Geometry::Planar,
        }
    }

    pub fn initial_kl(&self) -> T {
        self.loss_trace.first().copied().unwrap_or(self.final_kl)
    }

    pub fn iterations_run(&self) -> usize {
        self.loss_trace.len()
    }
}

/// `Σ_{i≠j} p_ij ln(p_ij / q_ij)`, with `0 ln(0/q) = 0` and `+∞` where
/// `p > 0` meets `q = 0`.
pub fn kl_cost<T: Scalar>(p: &AffinityMatrix<T>, q: &AffinityMatrix<T>) -> Result<T> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: q.n() });
    }
    let n = p.n();
    let mut kl = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p.get(i, j);
            if pij > T::zero() {
                let qij = q.get(i, j);
                if qij <= T::zero() {
                    return Ok(T::infinity());
                }
                kl = kl + pij * (pij / qij).ln();
            }
        }
    }
    Ok(kl)
}

/// `Σ p ln p` over positive entries.
pub(crate) fn neg_entropy<T: Scalar>(p: &AffinityMatrix<T>) -> T {
    p.values().as_slice().iter().filter(|&&v| v > T::zero()).map(|&v| v * v.ln()).sum()
}

fn check_shapes<T: Scalar>(p: &AffinityMatrix<T>, q: &AffinityMatrix<T>, y: &Matrix<T>) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: q.n() });
    }
    if y.rows() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: y.rows() });
    }
    Ok(())
}

/// `∂L̃/∂y_k = 2κ Σ_i (p_ik − q_ik) y_i`, the ascent direction for `L̃`.
pub fn gradient<T: Scalar>(
    p: &AffinityMatrix<T>,
    q: &AffinityMatrix<T>,
    y: &Matrix<T>,
    kappa: T,
) -> Result<Matrix<T>> {
    check_shapes(p, q, y)?;
    Ok(gradient_and_alignment(p, q, y, kappa).0)
}

/// Gradient plus `Σ_ij p_ij y_iᵀy_j`, which the loss needs.
fn gradient_and_alignment<T: Scalar>(
    p: &AffinityMatrix<T>,
    q: &AffinityMatrix<T>,
    y: &Matrix<T>,
    kappa: T,
) -> (Matrix<T>, T) {
    let (n, dim) = (y.rows(), y.cols());
    let two_kappa = kappa + kappa;
    let mut grad = Matrix::zeros(n, dim);
    let mut attract = vec![T::zero(); dim];
    let mut alignment = T::zero();
    for k in 0..n {
        let (p_row, q_row) = (p.row(k), q.row(k));
        attract.iter_mut().for_each(|a| *a = T::zero());
        let g = grad.row_mut(k);
        for i in 0..n {
            let yi = y.row(i);
            let (pik, qik) = (p_row[i], q_row[i]);
            let diff = pik - qik;
            for c in 0..dim {
                attract[c] = attract[c] + pik * yi[c];
                g[c] = g[c] + diff * yi[c];
            }
        }
        for v in g.iter_mut() {
            *v = *v * two_kappa;
        }
        alignment = alignment + dot(y.row(k), &attract);
    }
    (grad, alignment)
}

/// `y_i ← (y_i + η δ_i) / ‖y_i + η δ_i‖`. Rows whose update is exactly zero
/// are copied unchanged; an update landing on the origin is nudged by
/// [`ZERO_UPDATE_NUDGE`] in a random direction before normalising.
pub fn step<T: Scalar, R: Rng + ?Sized>(y: &Matrix<T>, grad: &Matrix<T>, eta: T, rng: &mut R) -> Result<Matrix<T>> {
    if y.rows() != grad.rows() || y.cols() != grad.cols() {
        return Err(Error::DimensionMismatch { expected: y.rows() * y.cols(), got: grad.rows() * grad.cols() });
    }
    let mut out = y.clone();
    for i in 0..y.rows() {
        let delta = grad.row(i);
        if delta.iter().all(|&g| eta * g == T::zero()) {
            continue;
        }
        let row = out.row_mut(i);
        for (v, &g) in row.iter_mut().zip(delta) {
            *v = *v + eta * g;
        }
        let mut len = norm(row);
        if !(len > T::zero()) {
            let nudge = sample_uniform_sphere_with::<T, _>(row.len(), 1, rng)?.remove(0);
            for (v, &u) in row.iter_mut().zip(nudge.as_slice()) {
                *v = *v + T::of(ZERO_UPDATE_NUDGE) * u;
            }
            len = norm(row);
        }
        if !len.is_finite() {
            return Err(Error::Numeric(format!("embedding row {i} diverged")));
        }
        for v in row.iter_mut() {
            *v = *v / len;
        }
    }
    Ok(out)
}

/// The seeded uniform layout a vMF-SNE run starts from.
pub fn initial_embedding<T: Scalar>(n: usize, dim: usize, seed: u64) -> Result<Matrix<T>> {
    let mut rng = stream_rng(seed, Stream::EmbedInit);
    let rows = sample_uniform_sphere_with::<T, _>(dim, n, &mut rng)?;
    Matrix::from_rows(&rows)
}

/// Runs vMF-SNE on `data` (rows must be unit norm).
pub fn run<T: Scalar>(data: &Dataset<T>, config: &EmbedConfig<T>) -> Result<EmbeddingRun<T>> {
    run_observed(data, config, |_, _, _| {})
}

/// [`run`], calling `observer(iteration, y_after_step, kl_before_step)`
/// after every iteration.
pub fn run_observed<T: Scalar, F>(data: &Dataset<T>, config: &EmbedConfig<T>, mut observer: F) -> Result<EmbeddingRun<T>>
where
    F: FnMut(usize, &Matrix<T>, T),
{
    let n = data.len();
    config.validate(n)?;
    data.check_unit_norm()?;

    let (p, calib) = vmf_joint_p(data.points(), config.perplexity)?;
    let p_log_p = neg_entropy(&p);
    let kappa = config.embed_kappa;
    let kl_of = |parts_shift: T, parts_log_sum: T, alignment: T| {
        (p_log_p - kappa * alignment + parts_shift + parts_log_sum).max(T::zero())
    };

    let mut y = initial_embedding(n, config.target_dim, config.seed)?;
    let mut nudge_rng = stream_rng(config.seed, Stream::StepPerturb);
    let mut trace = Vec::with_capacity(config.iterations);
    let mut quiet = 0usize;

    for t in 0..config.iterations {
        let parts = joint_q_parts(&y, kappa)?;
        let (grad, alignment) = gradient_and_alignment(&p, &parts.q, &y, kappa);
        let kl = kl_of(parts.shift, parts.log_sum, alignment);
        if !kl.is_finite() {
            return Err(Error::Numeric(format!("KL divergence is not finite at iteration {t}")));
        }
        y = step(&y, &grad, config.learning_rate, &mut nudge_rng)?;
        observer(t, &y, kl);
        if let Some(&prev) = trace.last() {
            let delta: T = kl - prev;
            quiet = if delta.abs() < T::of(EARLY_STOP_DELTA) { quiet + 1 } else { 0 };
        }
        trace.push(kl);
        if config.early_stop && quiet >= EARLY_STOP_PATIENCE {
            break;
        }
    }

    let parts = joint_q_parts(&y, kappa)?;
    let (_, alignment) = gradient_and_alignment(&p, &parts.q, &y, kappa);
    let final_kl = kl_of(parts.shift, parts.log_sum, alignment);

    Ok(EmbeddingRun {
        config: RunConfig::Vmf(config.clone()),
        y,
        loss_trace: trace,
        final_kl,
        calibration_flagged: calib.flagged(),
    })
}
