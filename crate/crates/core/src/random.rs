//! Seeded random matrices for property checks.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fock::DensityMatrix;
use crate::linalg::Matrix;
use crate::scalar::{Real, C};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian<T: Real>(rng: &mut impl Rng) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::of(re), T::of(im))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<T: Real>(dim: usize, rng: &mut impl Rng) -> Matrix<T> {
    Matrix::from_fn(dim, |_, _| gaussian(rng))
}

/// `(G + G†)/2` for Gaussian `G`.
pub fn random_hermitian<T: Real>(dim: usize, seed: u64) -> Matrix<T> {
    let g = gaussian_matrix::<T>(dim, &mut rng(seed));
    (&g + &g.adjoint()).scale_real(T::of(0.5))
}

/// `G G† / Tr[G G†]`: full-rank density matrix.
pub fn random_density<T: Real>(dim: usize, seed: u64) -> DensityMatrix<T> {
    let g = gaussian_matrix::<T>(dim, &mut rng(seed));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = m.scale_real(T::one() / tr);
    // Enforce exact Hermiticity against rounding in the product.
    let m = (&m + &m.adjoint()).scale_real(T::of(0.5));
    DensityMatrix::from_matrix_unchecked(m)
}

/// Random density matrix supported on the first `support` Fock levels of a
/// `dim`-level space.
pub fn random_density_supported<T: Real>(dim: usize, support: usize, seed: u64) -> DensityMatrix<T> {
    let small = random_density::<T>(support.min(dim), seed).into_matrix();
    let m = Matrix::from_fn(dim, |i, j| {
        if i < small.dim() && j < small.dim() {
            small[(i, j)]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    DensityMatrix::from_matrix_unchecked(m)
}
