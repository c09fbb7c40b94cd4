//! Matrix exponential by scaling and squaring around a degree-13 Padé
//! approximant (Higham 2005).

use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::{cr, Real};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate to unit
/// roundoff in double precision.
const THETA13: f64 = 5.371_920_351_148_152;

/// `exp(m)`.
pub fn expm<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.dim();
    if n == 1 {
        return Ok(Matrix::from_fn(1, |_, _| m[(0, 0)].exp()));
    }
    let norm = m.norm_one().as_f64();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = m.scale_real(T::of(2f64.powi(-squarings)));

    let b = |k: usize| cr(T::of(PADE13[k]));
    let eye = Matrix::<T>::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let mut w1 = a6.scale(b(13));
    w1.axpy(b(11), &a4);
    w1.axpy(b(9), &a2);
    let mut w = w1.matmul(&a6);
    w.axpy(b(7), &a6);
    w.axpy(b(5), &a4);
    w.axpy(b(3), &a2);
    w.axpy(b(1), &eye);
    let u = scaled.matmul(&w);

    let mut z1 = a6.scale(b(12));
    z1.axpy(b(10), &a4);
    z1.axpy(b(8), &a2);
    let mut v = z1.matmul(&a6);
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &eye);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut result = denom.solve(&numer)?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::parity_op;
    use crate::scalar::C;
    use num_complex::Complex64;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = expm(&Matrix::<f64>::zeros(5)).unwrap();
        assert_eq!(e.max_abs_diff(&Matrix::identity(5)), 0.0);
    }

    #[test]
    fn exp_of_diagonal() {
        let e = expm(&Matrix::<f64>::from_real_diagonal(&[1.0, 2.0])).unwrap();
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - 2f64.exp()).abs() < 1e-13 * 2f64.exp());
        assert_eq!(e[(0, 1)], C::new(0.0, 0.0));
    }

    #[test]
    fn exp_of_minus_i_pi_parity_is_minus_identity() {
        let p = parity_op::<f64>(4).unwrap();
        let e = expm(&p.scale(Complex64::new(0.0, -std::f64::consts::PI))).unwrap();
        assert!(e.max_abs_diff(&Matrix::identity(4).scale_real(-1.0)) < 1e-13);
    }

    #[test]
    fn nilpotent_block_is_exact_polynomial() {
        // exp([[0, x], [0, 0]]) = [[1, x], [0, 1]], far outside the unscaled range.
        let mut m = Matrix::<f64>::zeros(2);
        m[(0, 1)] = Complex64::new(40.0, 0.0);
        let e = expm(&m).unwrap();
        assert!((e[(0, 1)].re - 40.0).abs() < 1e-11);
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn large_norm_rotation() {
        // exp(-i t sigma_x) = cos t I - i sin t sigma_x
        let t = 37.3;
        let mut m = Matrix::<f64>::zeros(2);
        m[(0, 1)] = Complex64::new(0.0, -t);
        m[(1, 0)] = Complex64::new(0.0, -t);
        let e = expm(&m).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-12);
        assert!((e[(0, 1)].im + t.sin()).abs() < 1e-12);
    }

    #[test]
    fn single_precision_instantiation() {
        let e = expm(&Matrix::<f32>::from_real_diagonal(&[0.5, -1.0])).unwrap();
        assert!((e[(0, 0)].re - 0.5f32.exp()).abs() < 1e-6);
    }
}
