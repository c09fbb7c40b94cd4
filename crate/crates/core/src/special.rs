//! Modified Bessel functions of the first kind and harmonic-oscillator
//! eigenfunctions.

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, Real};

/// Above this argument `I_k(x)` overflows double precision.
pub const BESSEL_MAX_ARG: f64 = 700.0;

/// Default upper order accepted by [`hermite_gauss`].
pub const HERMITE_MAX_ORDER: usize = 200;

/// `ln I_k(x)` from the power series, with the leading term factored out in
/// log form. Returns `-inf` for `I_k(0)`, `k >= 1`.
pub fn ln_bessel_i<T: Real>(k: usize, x: T) -> Result<T> {
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::OutOfRange { what: "Bessel argument", value: x.as_f64(), limit: 0.0 });
    }
    if x > T::of(BESSEL_MAX_ARG) {
        return Err(Error::OutOfRange { what: "Bessel argument", value: x.as_f64(), limit: BESSEL_MAX_ARG });
    }
    if x == T::zero() {
        return Ok(if k == 0 { T::zero() } else { T::neg_infinity() });
    }
    let half = x / T::of(2.0);
    let q = half * half;
    let ln_lead = T::of_usize(k) * half.ln() - ln_factorial::<T>(k);
    let kk = T::of_usize(k);
    let mut sum = T::one();
    let mut term = T::one();
    let mut n = 0usize;
    loop {
        let nn = T::of_usize(n);
        let ratio = q / ((nn + T::one()) * (kk + nn + T::one()));
        term *= ratio;
        sum += term;
        n += 1;
        if ratio < T::one() && term <= sum * T::of(1e-16).max(T::epsilon() / T::of(4.0)) {
            break;
        }
        if n > 100_000 {
            return Err(Error::SeriesTruncation { what: "bessel_i", terms: n });
        }
    }
    Ok(ln_lead + sum.ln())
}

/// `I_k(x) = sum_n (x/2)^{k+2n} / (n! (k+n)!)` for `x` in `[0, 700]`.
pub fn bessel_i<T: Real>(k: usize, x: T) -> Result<T> {
    Ok(ln_bessel_i(k, x)?.exp())
}

/// Normalized oscillator eigenfunction
/// `phi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} e^{-x^2/2} H_n(x)`.
pub fn hermite_gauss<T: Real>(n: usize, x: T) -> Result<T> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::OutOfRange {
            what: "Hermite-Gauss order",
            value: n as f64,
            limit: HERMITE_MAX_ORDER as f64,
        });
    }
    Ok(hermite_gauss_upto(n, x)[n])
}

/// `phi_0(x), ..., phi_n(x)` from the normalized three-term recurrence
/// `phi_{k+1} = sqrt(2/(k+1)) x phi_k - sqrt(k/(k+1)) phi_{k-1}`.
pub fn hermite_gauss_upto<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let phi0 = T::PI().powf(T::of(-0.25)) * (-x * x / T::of(2.0)).exp();
    out.push(phi0);
    if n == 0 {
        return out;
    }
    out.push(T::of(2.0).sqrt() * x * phi0);
    for k in 1..n {
        let kk = T::of_usize(k);
        let next = (T::of(2.0) / (kk + T::one())).sqrt() * x * out[k] - (kk / (kk + T::one())).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_i::<f64>(0, 0.0).unwrap(), 1.0);
        for k in 1..5 {
            assert_eq!(bessel_i::<f64>(k, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn bessel_reference_values() {
        // Independent high-precision series (mpmath, 40 digits).
        let cases = [
            (0, 1.0, 1.266_065_877_752_008_4),
            (1, 2.0, 1.590_636_854_637_329),
            (0, 10.0, 2_815.716_628_466_254_4),
            (5, 3.5, 0.223_984_954_701_907_8),
            (20, 30.0, 1.126_985_104_448_377_1e9),
        ];
        for (k, x, expected) in cases {
            let got = bessel_i::<f64>(k, x).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-14, "I_{k}({x}) = {got}, expected {expected}");
        }
    }

    #[test]
    fn bessel_range_guard() {
        assert!(matches!(bessel_i::<f64>(0, 700.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(bessel_i::<f64>(0, -1.0), Err(Error::OutOfRange { .. })));
        assert!(bessel_i::<f64>(0, 700.0).unwrap().is_finite());
    }

    #[test]
    fn hermite_gauss_values() {
        assert!((hermite_gauss::<f64>(0, 0.0).unwrap() - 0.7511255).abs() < 1e-7);
        assert_eq!(hermite_gauss::<f64>(1, 0.0).unwrap(), 0.0);
        // phi_2(x) = pi^{-1/4} (2x^2 - 1) e^{-x^2/2} / sqrt(2)
        let x = 0.8f64;
        let exact = std::f64::consts::PI.powf(-0.25) * (2.0 * x * x - 1.0) * (-x * x / 2.0).exp() / 2f64.sqrt();
        assert!((hermite_gauss::<f64>(2, x).unwrap() - exact).abs() < 1e-15);
        assert!(matches!(hermite_gauss::<f64>(201, 0.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hermite_gauss_parity() {
        for n in 0..12 {
            let a = hermite_gauss::<f64>(n, 1.3).unwrap();
            let b = hermite_gauss::<f64>(n, -1.3).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * b).abs() < 1e-15);
        }
    }
}
