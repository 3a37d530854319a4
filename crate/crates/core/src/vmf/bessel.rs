//! Log-space modified Bessel functions of the first kind.
//!
//! `I_ν(x)` overflows or underflows long before the vMF normaliser does
//! (e.g. `I_24(1)` is around 1e-31 and `I_24(1000)` around 1e430), so
//! everything here returns `ln I_ν(x)`.
//!
//! Regimes, for `ν ≥ 0`, `x > 0`:
//! * `x < ν + 10`: ascending power series with running rescaling.
//! * otherwise, `ν ≥ DEBYE_MIN_ORDER`: Debye uniform asymptotic expansion in `1/ν`.
//! * otherwise, `x ≥ HANKEL_MIN_ARG`: Hankel large-argument expansion.
//! * otherwise: power series (all terms are positive, so it stays accurate).

use std::sync::OnceLock;

use crate::scalar::Scalar;

const DEBYE_MIN_ORDER: f64 = 8.0;
const HANKEL_MIN_ARG: f64 = 35.0;
const DEBYE_TERMS: usize = 14;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = T::of(LANCZOS_COEFFS[0]);
    let t = x + T::of(LANCZOS_G) + half;
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a = a + T::of(c) / (x + T::of_usize(k));
    }
    half * (T::PI() + T::PI()).ln() + (x + half) * t.ln() - t + a.ln()
}

/// `ln I_ν(x)` for `ν ≥ 0`, `x > 0`. Returns NaN outside that domain.
pub fn log_bessel_i<T: Scalar>(nu: T, x: T) -> T {
    if !(nu >= T::zero()) || !(x > T::zero()) || !x.is_finite() || !nu.is_finite() {
        return T::nan();
    }
    let (nu64, x64) = (nu.as_f64(), x.as_f64());
    if x64 < nu64 + 10.0 {
        log_bessel_i_series(nu, x)
    } else if nu64 >= DEBYE_MIN_ORDER {
        log_bessel_i_debye(nu, x)
    } else if x64 >= HANKEL_MIN_ARG {
        log_bessel_i_hankel(nu, x)
    } else {
        log_bessel_i_series(nu, x)
    }
}

/// `I_{ν+1}(x) / I_ν(x)`.
pub fn bessel_ratio<T: Scalar>(nu: T, x: T) -> T {
    (log_bessel_i(nu + T::one(), x) - log_bessel_i(nu, x)).exp()
}

/// Ascending series `I_ν(x) = (x/2)^ν Σ_k (x²/4)^k / (k! Γ(ν+k+1))`.
///
/// The partial sum is renormalised whenever it grows large, so the series is
/// usable for any `x`, only slower (about `x` terms).
pub fn log_bessel_i_series<T: Scalar>(nu: T, x: T) -> T {
    let quarter_sq = x * x * T::of(0.25);
    let rescale_at = T::max_value().sqrt();
    let eps = T::epsilon();
    let mut term = T::one();
    let mut sum = T::one();
    let mut log_scale = T::zero();
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = T::of_usize(k);
        term = term * quarter_sq / (kf * (nu + kf));
        sum = sum + term;
        if sum > rescale_at {
            log_scale = log_scale + sum.ln();
            term = term / sum;
            sum = T::one();
        }
        // terms shrink once k(ν+k) exceeds x²/4
        if term <= eps * sum && kf * (nu + kf) > quarter_sq {
            break;
        }
        if k > 10_000_000 {
            break;
        }
    }
    nu * (x * T::of(0.5)).ln() - ln_gamma(nu + T::one()) + sum.ln() + log_scale
}

/// Coefficients (ascending powers of p) of the Debye polynomials `U_k(p)`,
/// generated by `U_{k+1} = ½p²(1−p²)U_k' + ⅛∫₀ᵖ(1−5t²)U_k(t)dt`.
pub fn debye_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![1.0]];
        for k in 0..DEBYE_TERMS {
            let u = &polys[k];
            let mut next = vec![0.0; u.len() + 3];
            // ½ p² (1 − p²) U'
            for (j, &c) in u.iter().enumerate().skip(1) {
                let dc = c * j as f64;
                next[j + 1] += 0.5 * dc;
                next[j + 3] -= 0.5 * dc;
            }
            // ⅛ ∫ (1 − 5t²) U
            for (j, &c) in u.iter().enumerate() {
                next[j + 1] += c / (8.0 * (j + 1) as f64);
                next[j + 3] -= 5.0 * c / (8.0 * (j + 3) as f64);
            }
            while next.last() == Some(&0.0) {
                next.pop();
            }
            polys.push(next);
        }
        polys
    })
}

fn horner(coeffs: &[f64], p: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// Debye expansion `I_ν(νz) ~ e^{νη} / (√(2πν) (1+z²)^{1/4}) Σ U_k(p)/ν^k`,
/// with `p = 1/√(1+z²)` and `η = √(1+z²) + ln(z / (1 + √(1+z²)))`.
pub fn log_bessel_i_debye<T: Scalar>(nu: T, x: T) -> T {
    let z = x / nu;
    let s = (T::one() + z * z).sqrt();
    let eta = s + (z / (T::one() + s)).ln();
    let p = (T::one() / s).as_f64();
    let inv_nu = 1.0 / nu.as_f64();

    // U_k(p) can vanish near a root, so a single small term says nothing
    // about convergence; stop only after two consecutive negligible terms.
    let mut sum = 0.0f64;
    let mut scale = 1.0f64;
    let mut small = 0;
    for poly in debye_polynomials() {
        let term = horner(poly, p) * scale;
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
        scale *= inv_nu;
    }
    let two_pi = T::PI() + T::PI();
    nu * eta - T::of(0.5) * (two_pi * nu).ln() - T::of(0.25) * (T::one() + z * z).ln() + T::of(sum).ln()
}

/// Hankel expansion `I_ν(x) ~ e^x / √(2πx) Σ_k (−1)^k a_k(ν) / x^k`.
pub fn log_bessel_i_hankel<T: Scalar>(nu: T, x: T) -> T {
    let mu = T::of(4.0) * nu * nu;
    let eight_x = T::of(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    let mut prev = T::infinity();
    for k in 1..200usize {
        let odd = T::of_usize(2 * k - 1);
        term = -term * (mu - odd * odd) / (T::of_usize(k) * eight_x);
        let mag = term.abs();
        if mag > prev {
            break;
        }
        sum = sum + term;
        if mag <= T::epsilon() * sum.abs() {
            break;
        }
        prev = mag;
    }
    x - T::of(0.5) * ((T::PI() + T::PI()) * x).ln() + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0f64)).abs() < 1e-14);
        assert!((ln_gamma(2.0f64)).abs() < 1e-14);
        assert!(rel(ln_gamma(10.0f64), 362880.0f64.ln()) < 1e-14);
        // Γ(1/2) = √π
        assert!((ln_gamma(0.5f64) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(rel(ln_gamma(25.5f64), 56.389_167_643_719_944) < 1e-13);
    }

    #[test]
    fn debye_polynomials_match_tabulated() {
        let u = debye_polynomials();
        let p: f64 = 0.37;
        let u1 = (3.0 * p - 5.0 * p.powi(3)) / 24.0;
        let u2 = (81.0 * p.powi(2) - 462.0 * p.powi(4) + 385.0 * p.powi(6)) / 1152.0;
        let u3 = (30375.0 * p.powi(3) - 369603.0 * p.powi(5) + 765765.0 * p.powi(7)
            - 425425.0 * p.powi(9))
            / 414720.0;
        let u4 = (4465125.0 * p.powi(4) - 94121676.0 * p.powi(6) + 349922430.0 * p.powi(8)
            - 446185740.0 * p.powi(10)
            + 185910725.0 * p.powi(12))
            / 39813120.0;
        assert!((horner(&u[1], p) - u1).abs() < 1e-15);
        assert!((horner(&u[2], p) - u2).abs() < 1e-15);
        assert!((horner(&u[3], p) - u3).abs() < 1e-14);
        assert!((horner(&u[4], p) - u4).abs() < 1e-13);
    }

    #[test]
    fn half_integer_order_closed_forms() {
        // I_{1/2}(x) = √(2/(πx)) sinh x
        for &x in &[0.1f64, 1.0, 5.0, 10.0, 10.6, 30.0, 50.0, 200.0] {
            let exact = (2.0 / (std::f64::consts::PI * x)).sqrt().ln() + x.sinh().ln();
            assert!(rel(log_bessel_i(0.5, x), exact) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn i0_series_matches_oracle() {
        // I_0(1) = Σ (1/4)^k / (k!)²
        let mut s = 0.0f64;
        let mut t = 1.0f64;
        for k in 0..40 {
            if k > 0 {
                t *= 0.25 / (k * k) as f64;
            }
            s += t;
        }
        assert!((log_bessel_i(0.0f64, 1.0) - s.ln()).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_regimes_agree_with_series() {
        for &nu in &[0.0f64, 0.5, 1.0, 2.5, 7.0, 8.0, 12.0, 24.0, 24.5, 100.0, 499.0] {
            for &x in &[nu + 10.0, nu + 15.0, 40.0, 60.0, 150.0, 600.0, 3000.0] {
                if x < nu + 10.0 {
                    continue;
                }
                let fast = log_bessel_i(nu, x);
                let slow = log_bessel_i_series(nu, x);
                assert!(rel(fast, slow) < 1e-12, "nu = {nu}, x = {x}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn ratio_is_increasing_and_below_one() {
        let mut last = 0.0;
        for &k in &[0.01f64, 0.1, 1.0, 5.0, 15.0, 33.9, 34.1, 100.0, 1000.0, 1e5] {
            let a = bessel_ratio(24.0, k);
            assert!(a > last && a < 1.0, "kappa = {k}: {a}");
            last = a;
        }
    }

    #[test]
    fn f32_tracks_f64() {
        for &(nu, x) in &[(0.5f64, 1.0f64), (24.0, 15.0), (24.0, 80.0), (0.0, 50.0)] {
            let a = log_bessel_i(nu as f32, x as f32) as f64;
            let b = log_bessel_i(nu, x);
            assert!(rel(a, b) < 1e-4, "nu = {nu}, x = {x}: {a} vs {b}");
        }
    }
}
