//! von Mises-Fisher distribution on the unit sphere `S^{d−1} ⊂ R^d`.
//!
//! `f_d(x; μ, κ) = C_d(κ) · exp(κ μᵀx)` with
//! `C_d(κ) = κ^{d/2−1} / ((2π)^{d/2} I_{d/2−1}(κ))`.

pub mod bessel;
mod sample;

pub use sample::{sample_uniform_sphere, sample_uniform_sphere_with, sample_vmf, sample_vmf_with};

use crate::error::{Error, Result};
use crate::linalg::UnitVector;
use crate::scalar::Scalar;

/// Mean direction and concentration of a vMF distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfParams<T> {
    mu: UnitVector<T>,
    kappa: T,
}

impl<T: Scalar> VmfParams<T> {
    pub fn new(mu: UnitVector<T>, kappa: T) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { mu, kappa })
    }

    pub fn mu(&self) -> &UnitVector<T> {
        &self.mu
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    /// `ln C_d(κ)` for these parameters.
    pub fn log_norm_const(&self) -> Result<T> {
        log_norm_const(self.dim(), self.kappa)
    }
}

fn check_kappa<T: Scalar>(kappa: T) -> Result<()> {
    if !(kappa > T::zero()) || !kappa.is_finite() {
        return Err(Error::domain(format!("concentration must be positive and finite, got {kappa}")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!("sphere dimension needs d >= 2, got {d}")));
    }
    Ok(())
}

/// `ln C_d(κ) = (d/2 − 1) ln κ − (d/2) ln 2π − ln I_{d/2−1}(κ)`.
pub fn log_norm_const<T: Scalar>(d: usize, kappa: T) -> Result<T> {
    check_dim(d)?;
    check_kappa(kappa)?;
    let half_d = T::of_usize(d) * T::of(0.5);
    let nu = half_d - T::one();
    let log_i = bessel::log_bessel_i(nu, kappa);
    if !log_i.is_finite() {
        return Err(Error::Numeric(format!("ln I_{nu}({kappa}) is not finite")));
    }
    Ok(nu * kappa.ln() - half_d * (T::PI() + T::PI()).ln() - log_i)
}

/// `ln f_d(x; μ, κ)`.
pub fn log_density<T: Scalar>(x: &UnitVector<T>, params: &VmfParams<T>) -> Result<T> {
    if x.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), got: x.dim() });
    }
    Ok(params.log_norm_const()? + params.kappa * params.mu.dot(x))
}

/// `A_d(κ) = I_{d/2}(κ) / I_{d/2−1}(κ)`, the expected value of `μᵀx`.
pub fn mean_resultant_length<T: Scalar>(d: usize, kappa: T) -> Result<T> {
    check_dim(d)?;
    check_kappa(kappa)?;
    let nu = T::of_usize(d) * T::of(0.5) - T::one();
    let a = bessel::bessel_ratio(nu, kappa);
    if !a.is_finite() {
        return Err(Error::Numeric(format!("Bessel ratio at d = {d}, kappa = {kappa} is not finite")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form_c3(kappa: f64) -> f64 {
        (kappa / (4.0 * std::f64::consts::PI * kappa.sinh())).ln()
    }

    #[test]
    fn log_norm_const_d3_examples() {
        let got = log_norm_const(3, 1.0f64).unwrap();
        assert!((got - closed_form_c3(1.0)).abs() < 1e-12);
        assert!((got.exp() - 0.06772).abs() < 1e-5);
        let got = log_norm_const(3, 2.0f64).unwrap();
        assert!((got - (2.0 / (4.0 * std::f64::consts::PI * 2.0f64.sinh())).ln()).abs() < 1e-12);
    }

    #[test]
    fn log_norm_const_d3_matches_closed_form_across_kappa() {
        for &k in &[0.1f64, 1.0, 10.0, 100.0] {
            let got = log_norm_const(3, k).unwrap();
            let want = closed_form_c3(k);
            assert!(((got - want) / want).abs() < 1e-10, "kappa = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn log_norm_const_d2_series_oracle() {
        let mut i0 = 0.0f64;
        let mut t = 1.0f64;
        for k in 0..40 {
            if k > 0 {
                t *= 0.25 / (k * k) as f64;
            }
            i0 += t;
        }
        let want = -(2.0 * std::f64::consts::PI * i0).ln();
        assert!((log_norm_const(2, 1.0f64).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn log_norm_const_domain_errors() {
        assert!(matches!(log_norm_const(3, 0.0f64), Err(Error::Domain(_))));
        assert!(matches!(log_norm_const(3, -1.0f64), Err(Error::Domain(_))));
        assert!(matches!(log_norm_const(1, 1.0f64), Err(Error::Domain(_))));
        assert!(VmfParams::new(UnitVector::basis(3, 0).unwrap(), 0.0f64).is_err());
    }

    #[test]
    fn density_integrates_to_one_on_circle() {
        for &k in &[0.5f64, 2.0, 15.0, 40.0] {
            let lc = log_norm_const(2, k).unwrap();
            let m = 20_000;
            let h = 2.0 * std::f64::consts::PI / m as f64;
            let total: f64 = (0..m).map(|i| (lc + k * (i as f64 * h).cos()).exp()).sum::<f64>() * h;
            assert!((total - 1.0).abs() < 1e-6, "kappa = {k}: {total}");
        }
    }

    #[test]
    fn log_density_pole_and_antipode() {
        let mu = UnitVector::normalize(vec![1.0f64, 2.0, -2.0]).unwrap();
        let p = VmfParams::new(mu.clone(), 3.0).unwrap();
        let lc = log_norm_const(3, 3.0).unwrap();
        assert!((log_density(&mu, &p).unwrap() - (lc + 3.0)).abs() < 1e-12);
        let anti = UnitVector::new(mu.as_slice().iter().map(|v| -v).collect()).unwrap();
        assert!((log_density(&anti, &p).unwrap() - (lc - 3.0)).abs() < 1e-12);
        let wrong = UnitVector::basis(2, 0).unwrap();
        assert!(matches!(log_density(&wrong, &p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn log_density_rotation_invariant() {
        // rotation by θ in the (0, 2) plane
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = |v: &[f64]| vec![c * v[0] - s * v[2], v[1], s * v[0] + c * v[2]];
        let mu = UnitVector::normalize(vec![0.2f64, 0.5, 0.7]).unwrap();
        let x = UnitVector::normalize(vec![-0.4f64, 0.1, 0.9]).unwrap();
        let p = VmfParams::new(mu.clone(), 4.0).unwrap();
        let pr = VmfParams::new(UnitVector::normalize(rot(mu.as_slice())).unwrap(), 4.0).unwrap();
        let xr = UnitVector::normalize(rot(x.as_slice())).unwrap();
        let a = log_density(&x, &p).unwrap();
        let b = log_density(&xr, &pr).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mean_resultant_length_examples() {
        let a = mean_resultant_length(3, 1.0f64).unwrap();
        assert!((a - (1.0 / 1.0f64.tanh() - 1.0)).abs() < 1e-12);
        assert!((a - 0.3130).abs() < 1e-4);
        let a40 = mean_resultant_length(3, 40.0f64).unwrap();
        assert!((a40 - (1.0 / 40.0f64.tanh() - 1.0 / 40.0)).abs() < 1e-12);
        assert!((a40 - 0.975).abs() < 1e-9);
        for d in [2usize, 3, 10, 50] {
            let a1 = mean_resultant_length(d, 1.0f64).unwrap();
            let a10 = mean_resultant_length(d, 10.0f64).unwrap();
            let a100 = mean_resultant_length(d, 100.0f64).unwrap();
            assert!(a100 > a10 && a10 > a1, "d = {d}");
            assert!(a100 < 1.0);
        }
    }

    #[test]
    fn mean_resultant_length_strictly_increasing_below_one() {
        for d in [2usize, 3, 5, 50, 200] {
            let mut last = 0.0f64;
            let mut k = 0.01f64;
            while k < 1e4 {
                let a = mean_resultant_length(d, k).unwrap();
                assert!(a > last && a < 1.0, "d = {d}, kappa = {k}: {a}");
                last = a;
                k *= 1.25;
            }
        }
    }
}
