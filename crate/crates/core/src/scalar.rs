//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Clamps a requested tolerance to what the precision can resolve.
    ///
    /// `f64` leaves every tolerance used in this crate untouched; `f32`
    /// widens them to a few hundred ulps.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::of(256.0);
        Self::of(requested).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `-i`
#[inline]
pub(crate) fn neg_i<T: Real>() -> C<T> {
    Complex::new(T::zero(), -T::one())
}

/// Natural log of `n!`, by direct summation (exact enough for the
/// few-hundred-term series used here and free of gamma-function tables).
pub fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).map(|k| T::of_usize(k).ln()).sum()
}

/// Table of `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorial_table<T: Real>(n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    out.push(acc);
    for k in 1..=n {
        acc += T::of_usize(k).ln();
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        assert!(<f32 as Real>::tol(1e-12) > 1e-6);
    }

    #[test]
    fn ln_factorial_small_values() {
        assert_eq!(ln_factorial::<f64>(0), 0.0);
        assert_eq!(ln_factorial::<f64>(1), 0.0);
        assert!((ln_factorial::<f64>(5) - 120f64.ln()).abs() < 1e-14);
        let table = ln_factorial_table::<f64>(20);
        assert!((table[20] - ln_factorial::<f64>(20)).abs() < 1e-12);
    }
}
