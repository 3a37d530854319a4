//! Samplers on the unit sphere.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::VmfParams;
use crate::error::{Error, Result};
use crate::linalg::UnitVector;
use crate::rng::{stream_rng, Stream};
use crate::scalar::Scalar;

fn gaussian_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-150 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `n` isotropic directions in `R^d`, seeded on [`Stream::UniformSphere`].
pub fn sample_uniform_sphere<T: Scalar>(d: usize, n: usize, seed: u64) -> Result<Vec<UnitVector<T>>> {
    let mut rng = stream_rng(seed, Stream::UniformSphere);
    sample_uniform_sphere_with(d, n, &mut rng)
}

pub fn sample_uniform_sphere_with<T: Scalar, R: Rng + ?Sized>(
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<UnitVector<T>>> {
    if d < 2 {
        return Err(Error::domain(format!("sphere dimension needs d >= 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    (0..n)
        .map(|_| UnitVector::normalize(gaussian_direction(d, rng).into_iter().map(T::of).collect()))
        .collect()
}

/// `n` i.i.d. vMF draws, seeded on [`Stream::VmfSample`].
pub fn sample_vmf<T: Scalar>(params: &VmfParams<T>, n: usize, seed: u64) -> Result<Vec<UnitVector<T>>> {
    let mut rng = stream_rng(seed, Stream::VmfSample);
    sample_vmf_with(params, n, &mut rng)
}

/// Wood's rejection sampler.
///
/// Draws the cosine `w = μᵀx` from its marginal with a Beta envelope, pairs
/// it with a uniform tangent direction around the pole `e₁`, and reflects
/// `e₁` onto `μ` with a Householder map.
pub fn sample_vmf_with<T: Scalar, R: Rng + ?Sized>(
    params: &VmfParams<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<UnitVector<T>>> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let d = params.dim();
    let kappa = params.kappa().as_f64();
    let mu: Vec<f64> = params.mu().as_slice().iter().map(|v| v.as_f64()).collect();

    let dm1 = (d - 1) as f64;
    // b = (−2κ + √(4κ² + (d−1)²)) / (d−1), rewritten without cancellation
    let b = dm1 / (2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let one_minus_x0_sq = 4.0 * b / ((1.0 + b) * (1.0 + b));
    let c = kappa * x0 + dm1 * one_minus_x0_sq.ln();
    let beta = Beta::new(dm1 / 2.0, dm1 / 2.0).map_err(|e| Error::Numeric(e.to_string()))?;

    // Householder vector u = e₁ − μ
    let mut u = mu.clone();
    for v in &mut u {
        *v = -*v;
    }
    u[0] += 1.0;
    let uu: f64 = u.iter().map(|v| v * v).sum();

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let w = loop {
            let z: f64 = beta.sample(rng);
            let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
            let uniform: f64 = 1.0 - rng.random::<f64>();
            if kappa * w + dm1 * (1.0 - x0 * w).ln() - c >= uniform.ln() {
                break w.clamp(-1.0, 1.0);
            }
        };
        let tangent = gaussian_direction(d - 1, rng);
        let radial = (1.0 - w * w).max(0.0).sqrt();
        let mut x = Vec::with_capacity(d);
        x.push(w);
        x.extend(tangent.iter().map(|t| radial * t));

        if uu > 1e-30 {
            let ux: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            let f = 2.0 * ux / uu;
            for (xi, ui) in x.iter_mut().zip(&u) {
                *xi -= f * ui;
            }
        }
        out.push(UnitVector::normalize(x.into_iter().map(T::of).collect())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vmf::mean_resultant_length;

    fn params(mu: Vec<f64>, kappa: f64) -> VmfParams<f64> {
        VmfParams::new(UnitVector::normalize(mu).unwrap(), kappa).unwrap()
    }

    #[test]
    fn samples_are_unit_norm() {
        let p = params((0..50).map(|i| (i as f64).sin()).collect(), 15.0);
        for x in sample_vmf(&p, 500, 3).unwrap() {
            let n: f64 = x.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let p = params(vec![1.0, 0.0, 0.0], 1.0);
        assert!(sample_vmf(&p, 0, 1).is_err());
        assert!(sample_uniform_sphere::<f64>(3, 0, 1).is_err());
        assert!(sample_uniform_sphere::<f64>(1, 3, 1).is_err());
    }

    fn mean_cos_and_se(xs: &[UnitVector<f64>], mu: &UnitVector<f64>) -> (f64, f64) {
        let c: Vec<f64> = xs.iter().map(|x| x.dot(mu)).collect();
        let n = c.len() as f64;
        let m = c.iter().sum::<f64>() / n;
        let var = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn d50_kappa15_mean_matches_bessel_ratio() {
        let p = params((0..50).map(|i| ((i * 7 % 11) as f64) - 5.0).collect(), 15.0);
        let xs = sample_vmf(&p, 10_000, 11).unwrap();
        let (m, se) = mean_cos_and_se(&xs, p.mu());
        let want = mean_resultant_length(50, 15.0).unwrap();
        assert!((m - want).abs() < 3.0 * se, "{m} vs {want} (se {se})");
    }

    #[test]
    fn high_concentration_stays_near_pole() {
        let p = params(vec![0.3, -0.4, 0.5], 1000.0);
        let xs = sample_vmf(&p, 100, 5).unwrap();
        let min = xs.iter().map(|x| x.dot(p.mu())).fold(f64::INFINITY, f64::min);
        assert!(min > 0.99, "min cosine {min}");
    }

    #[test]
    fn mean_direction_aligns_with_mu() {
        let p = params(vec![1.0, 2.0, 3.0, 4.0, 5.0], 20.0);
        let n = 2000;
        let xs = sample_vmf(&p, n, 9).unwrap();
        let mut m = vec![0.0; 5];
        for x in &xs {
            for (a, b) in m.iter_mut().zip(x.as_slice()) {
                *a += b;
            }
        }
        let m = UnitVector::normalize(m).unwrap();
        // tangential spread of the sample mean: 1 − cos ≈ (d−1) / (2κ n A_d(κ))
        let a = mean_resultant_length(5, 20.0f64).unwrap();
        let expected = 4.0 / (2.0 * 20.0 * n as f64 * a);
        assert!(1.0 - m.dot(p.mu()) < 5.0 * expected);
    }

    #[test]
    fn pole_at_e1_and_minus_e1() {
        for sign in [1.0, -1.0] {
            let p = params(vec![sign, 0.0, 0.0], 50.0);
            let xs = sample_vmf(&p, 200, 2).unwrap();
            let (m, _) = mean_cos_and_se(&xs, p.mu());
            assert!(m > 0.95);
        }
    }

    #[test]
    fn circle_sampler_works() {
        let p = params(vec![0.0, 1.0], 3.0);
        let xs = sample_vmf(&p, 5000, 4).unwrap();
        let (m, se) = mean_cos_and_se(&xs, p.mu());
        let want = mean_resultant_length(2, 3.0).unwrap();
        assert!((m - want).abs() < 4.0 * se);
    }

    #[test]
    fn uniform_sphere_is_centered_and_deterministic() {
        let xs = sample_uniform_sphere::<f64>(2, 100_000, 21).unwrap();
        let m = xs.iter().map(|x| x.as_slice()[0]).sum::<f64>() / xs.len() as f64;
        assert!(m.abs() < 0.01);
        let a = sample_uniform_sphere::<f64>(7, 20, 3).unwrap();
        let b = sample_uniform_sphere::<f64>(7, 20, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_uniform_sphere::<f64>(7, 20, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn vmf_sampler_deterministic() {
        let p = params(vec![0.0, 0.0, 1.0], 5.0);
        assert_eq!(sample_vmf(&p, 10, 8).unwrap(), sample_vmf(&p, 10, 8).unwrap());
    }

    #[test]
    fn f32_sampler() {
        let mu = UnitVector::<f32>::basis(4, 1).unwrap();
        let p = VmfParams::new(mu, 10.0f32).unwrap();
        let xs = sample_vmf(&p, 50, 1).unwrap();
        assert_eq!(xs.len(), 50);
    }
}
