//! High- and low-dimensional neighbour distributions.
//!
//! In the data space each point `i` gets its own concentration `κ_i`, chosen
//! so that its conditional neighbour distribution
//! `p_{j|i} ∝ exp(κ_i x_iᵀx_j)` has a prescribed perplexity. The joint
//! `P` symmetrises these conditionals. In the embedding space a single shared
//! `κ` defines `q_{ij} ∝ exp(κ y_iᵀy_j)` over all ordered pairs.
//!
//! The vMF normaliser `C_d(κ_i)` cancels inside every softmax here and is
//! never evaluated.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

/// Initial bracket for the per-point precision search.
pub const PRECISION_BRACKET: (f64, f64) = (1e-4, 1e6);
/// Relative tolerance on the achieved perplexity.
pub const PERPLEXITY_TOLERANCE: f64 = 1e-4;
/// Maximum bisection steps per point.
pub const MAX_BISECTION_STEPS: usize = 100;
const MAX_BRACKET_EXPANSIONS: usize = 30;

/// A symmetric, zero-diagonal, nonnegative `n × n` matrix summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix<T> {
    values: Matrix<T>,
}

impl<T: Scalar> AffinityMatrix<T> {
    /// Validates all invariants at tolerance `T::SUM_TOLERANCE`.
    pub fn new(values: Matrix<T>) -> Result<Self> {
        let m = Self { values };
        m.check(T::of(T::SUM_TOLERANCE))?;
        Ok(m)
    }

    pub(crate) fn from_values_unchecked(values: Matrix<T>) -> Self {
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values.get(i, j)
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.values.row(i)
    }

    /// Checks symmetry, zero diagonal and nonnegativity exactly, and the total
    /// mass against `tol`.
    pub fn check(&self, tol: T) -> Result<()> {
        let n = self.values.rows();
        if self.values.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.values.cols() });
        }
        let mut total = T::zero();
        for i in 0..n {
            if self.get(i, i) != T::zero() {
                return Err(Error::domain(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let v = self.get(i, j);
                if !(v >= T::zero()) {
                    return Err(Error::domain(format!("negative or NaN entry at ({i}, {j})")));
                }
                if v != self.get(j, i) {
                    return Err(Error::domain(format!("asymmetric entries at ({i}, {j})")));
                }
                total = total + v;
            }
        }
        if !((total - T::one()).abs() <= tol) {
            return Err(Error::domain(format!("entries sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// Per-point concentrations and the perplexities they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult<T> {
    pub kappas: Vec<T>,
    pub achieved_perplexity: Vec<T>,
    pub iterations: Vec<usize>,
    /// `false` where the target perplexity could not be met (flat rows,
    /// exhausted bracket); the concentration is then a best effort.
    pub converged: Vec<bool>,
}

impl<T: Scalar> CalibrationResult<T> {
    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn flagged(&self) -> Vec<usize> {
        self.converged.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| i).collect()
    }
}

/// Writes `softmax(scale · sims)` with entry `i` excluded into `out` and
/// returns the Shannon entropy of the result in nats.
pub(crate) fn softmax_row<T: Scalar>(sims: &[T], i: usize, scale: T, out: &mut [T]) -> T {
    let mut shift = T::neg_infinity();
    for (m, &s) in sims.iter().enumerate() {
        if m != i {
            shift = shift.max(scale * s);
        }
    }
    let mut sum = T::zero();
    for (m, (&s, o)) in sims.iter().zip(out.iter_mut()).enumerate() {
        *o = if m == i { T::zero() } else { (scale * s - shift).exp() };
        sum = sum + *o;
    }
    let mut entropy = T::zero();
    for o in out.iter_mut() {
        *o = *o / sum;
        if *o > T::zero() {
            entropy = entropy - *o * o.ln();
        }
    }
    entropy
}

/// Result of calibrating one row.
struct RowFit<T> {
    precision: T,
    perplexity: T,
    steps: usize,
    converged: bool,
}

fn relative_gap<T: Scalar>(perplexity: T, target: T) -> T {
    ((perplexity - target) / target).abs()
}

/// Geometric bisection on the precision `β` of `p_{j|i} ∝ exp(β s_ij)`.
/// Perplexity is nonincreasing in `β`.
fn calibrate_row<T: Scalar>(sims: &[T], i: usize, target: T, buf: &mut [T]) -> RowFit<T> {
    let n = sims.len();
    let tol = T::of(PERPLEXITY_TOLERANCE);
    let mut lo = T::of(PRECISION_BRACKET.0);
    let mut hi = T::of(PRECISION_BRACKET.1);
    let perplexity_at = |beta: T, buf: &mut [T]| softmax_row(sims, i, beta, buf).exp();

    let (mut min, mut max) = (T::infinity(), T::neg_infinity());
    for (m, &s) in sims.iter().enumerate() {
        if m != i {
            min = min.min(s);
            max = max.max(s);
        }
    }
    if !(max - min > T::of(1e-12) * T::one().max(max.abs())) {
        // flat row: perplexity is n − 1 whatever the precision
        return RowFit {
            precision: (lo * hi).sqrt(),
            perplexity: T::of_usize(n - 1),
            steps: 0,
            converged: relative_gap(T::of_usize(n - 1), target) < tol,
        };
    }

    let mut p_lo = perplexity_at(lo, buf);
    let mut expansions = 0;
    while p_lo < target && expansions < MAX_BRACKET_EXPANSIONS {
        hi = lo;
        lo = lo / T::of(10.0);
        p_lo = perplexity_at(lo, buf);
        expansions += 1;
    }
    let mut p_hi = perplexity_at(hi, buf);
    expansions = 0;
    while p_hi > target && expansions < MAX_BRACKET_EXPANSIONS {
        lo = hi;
        p_lo = p_hi;
        hi = hi * T::of(10.0);
        p_hi = perplexity_at(hi, buf);
        expansions += 1;
    }
    if p_lo < target || p_hi > target {
        let (precision, perplexity) = if relative_gap(p_lo, target) < relative_gap(p_hi, target) {
            (lo, p_lo)
        } else {
            (hi, p_hi)
        };
        return RowFit { precision, perplexity, steps: 0, converged: false };
    }
    if relative_gap(p_lo, target) < tol {
        return RowFit { precision: lo, perplexity: p_lo, steps: 0, converged: true };
    }
    if relative_gap(p_hi, target) < tol {
        return RowFit { precision: hi, perplexity: p_hi, steps: 0, converged: true };
    }

    let mut best = RowFit { precision: lo, perplexity: p_lo, steps: 0, converged: false };
    for step in 1..=MAX_BISECTION_STEPS {
        let mid = (lo * hi).sqrt();
        let p = perplexity_at(mid, buf);
        if relative_gap(p, target) < relative_gap(best.perplexity, target) {
            best = RowFit { precision: mid, perplexity: p, steps: step, converged: false };
        }
        best.steps = step;
        if relative_gap(p, target) < tol {
            best.converged = true;
            break;
        }
        if p > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// Calibrates every row of a similarity matrix (`s_ij`, diagonal ignored).
pub(crate) fn calibrate_rows<T: Scalar>(sims: &Matrix<T>, target: T) -> CalibrationResult<T> {
    let n = sims.rows();
    let mut buf = vec![T::zero(); n];
    let mut out = CalibrationResult {
        kappas: Vec::with_capacity(n),
        achieved_perplexity: Vec::with_capacity(n),
        iterations: Vec::with_capacity(n),
        converged: Vec::with_capacity(n),
    };
    for i in 0..n {
        let fit = calibrate_row(sims.row(i), i, target, &mut buf);
        out.kappas.push(fit.precision);
        out.achieved_perplexity.push(fit.perplexity);
        out.iterations.push(fit.steps);
        out.converged.push(fit.converged);
    }
    out
}

/// `P = (C + Cᵀ) / 2N` where row `i` of `C` is `softmax(β_i s_i·)`.
pub(crate) fn symmetrized_joint<T: Scalar>(sims: &Matrix<T>, precisions: &[T]) -> AffinityMatrix<T> {
    let n = sims.rows();
    let mut cond = Matrix::zeros(n, n);
    for i in 0..n {
        softmax_row(sims.row(i), i, precisions[i], cond.row_mut(i));
    }
    let denom = T::of_usize(2 * n);
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (cond.get(i, j) + cond.get(j, i)) / denom;
            p.set(i, j, v);
            p.set(j, i, v);
        }
    }
    AffinityMatrix::from_values_unchecked(p)
}

pub(crate) fn check_target_perplexity<T: Scalar>(target: T, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    if !(target > T::one() && target < T::of_usize(n)) {
        return Err(Error::domain(format!("perplexity must lie in (1, {n}), got {target}")));
    }
    Ok(())
}

fn check_unit_rows<T: Scalar>(points: &Matrix<T>) -> Result<()> {
    let bad = points.non_unit_rows(T::of(T::UNIT_TOLERANCE));
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NotUnitNorm { rows: bad })
    }
}

/// `p_{·|i}` for concentration `kappa_i`; entry `i` is zero.
pub fn conditional_row<T: Scalar>(i: usize, points: &Matrix<T>, kappa_i: T) -> Result<Vec<T>> {
    let n = points.rows();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    if i >= n {
        return Err(Error::domain(format!("row index {i} out of range for {n} points")));
    }
    if !(kappa_i > T::zero()) {
        return Err(Error::domain(format!("concentration must be positive, got {kappa_i}")));
    }
    check_unit_rows(points)?;
    let xi = points.row(i);
    let sims: Vec<T> = points.iter_rows().map(|xj| dot(xi, xj)).collect();
    let mut out = vec![T::zero(); n];
    softmax_row(&sims, i, kappa_i, &mut out);
    Ok(out)
}

/// `2^H` with `H = −Σ r_j log₂ r_j`; zero entries contribute nothing.
pub fn row_perplexity<T: Scalar>(row: &[T]) -> Result<T> {
    let mut sum = T::zero();
    let mut entropy_bits = T::zero();
    for &r in row {
        if !(r >= T::zero()) {
            return Err(Error::domain("probability row has a negative or NaN entry"));
        }
        sum = sum + r;
        if r > T::zero() {
            entropy_bits = entropy_bits - r * r.log2();
        }
    }
    let tol = T::of(T::SUM_TOLERANCE) * T::one().max(T::of_usize(row.len()).sqrt());
    if !((sum - T::one()).abs() <= tol) {
        return Err(Error::domain(format!("probability row sums to {sum}, not 1")));
    }
    Ok(T::of(2.0).powf(entropy_bits))
}

/// Finds `κ_i` for every point so that its conditional row has perplexity
/// `target` (within [`PERPLEXITY_TOLERANCE`] relative).
pub fn calibrate_kappas<T: Scalar>(points: &Matrix<T>, target: T) -> Result<CalibrationResult<T>> {
    check_target_perplexity(target, points.rows())?;
    check_unit_rows(points)?;
    Ok(calibrate_rows(&points.gram(), target))
}

/// Symmetrised joint `p_ij = (p_{i|j} + p_{j|i}) / 2N` with zero diagonal.
pub fn joint_p<T: Scalar>(points: &Matrix<T>, calib: &CalibrationResult<T>) -> Result<AffinityMatrix<T>> {
    let n = points.rows();
    if calib.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: calib.len() });
    }
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    check_unit_rows(points)?;
    Ok(symmetrized_joint(&points.gram(), &calib.kappas))
}

/// Calibrates and builds `P` in one pass over the Gram matrix.
pub fn vmf_joint_p<T: Scalar>(points: &Matrix<T>, target: T) -> Result<(AffinityMatrix<T>, CalibrationResult<T>)> {
    check_target_perplexity(target, points.rows())?;
    check_unit_rows(points)?;
    let gram = points.gram();
    let calib = calibrate_rows(&gram, target);
    Ok((symmetrized_joint(&gram, &calib.kappas), calib))
}

/// `Q` together with the constants needed to evaluate `ln q_ij` cheaply:
/// `ln q_ij = κ y_iᵀy_j − shift − log_sum`.
pub(crate) struct QParts<T> {
    pub q: AffinityMatrix<T>,
    pub shift: T,
    pub log_sum: T,
}

pub(crate) fn joint_q_parts<T: Scalar>(y: &Matrix<T>, kappa: T) -> Result<QParts<T>> {
    let n = y.rows();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 points, got {n}")));
    }
    if !(kappa > T::zero()) {
        return Err(Error::domain(format!("concentration must be positive, got {kappa}")));
    }
    check_unit_rows(y)?;
    let mut q = Matrix::zeros(n, n);
    let mut shift = T::neg_infinity();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = kappa * dot(y.row(i), y.row(j));
            q.set(i, j, v);
            q.set(j, i, v);
            shift = shift.max(v);
        }
    }
    let mut total = T::zero();
    for i in 0..n {
        let row = q.row_mut(i);
        let mut row_sum = T::zero();
        for (j, v) in row.iter_mut().enumerate() {
            *v = if j == i { T::zero() } else { (*v - shift).exp() };
            row_sum = row_sum + *v;
        }
        total = total + row_sum;
    }
    let inv = T::one() / total;
    for i in 0..n {
        for v in q.row_mut(i) {
            *v = *v * inv;
        }
    }
    Ok(QParts { q: AffinityMatrix::from_values_unchecked(q), shift, log_sum: total.ln() })
}

/// `q_ij = exp(κ y_iᵀy_j) / Σ_{m≠n} exp(κ y_mᵀy_n)`, zero diagonal.
pub fn joint_q<T: Scalar>(y: &Matrix<T>, kappa: T) -> Result<AffinityMatrix<T>> {
    Ok(joint_q_parts(y, kappa)?.q)
}
