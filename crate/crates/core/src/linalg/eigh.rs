//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (column `k` of `vectors` belongs to `values[k]`).
#[derive(Debug, Clone)]
pub struct Eigh<T: Real> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> Eigh<T> {
    /// `U f(Λ) U†`
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let u = &self.vectors;
        Matrix::from_fn(n, |i, j| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc += u[(i, k)] * u[(j, k)].conj() * fv[k];
            }
            acc
        })
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }
}

/// Diagonalizes a Hermitian matrix; fails if `h` is not Hermitian within
/// `tol_herm`.
pub fn eigh<T: Real>(h: &Matrix<T>, tol_herm: T) -> Result<Eigh<T>> {
    let deviation = h.hermiticity_defect();
    if deviation > tol_herm {
        return Err(Error::NotHermitian { deviation: deviation.as_f64() });
    }
    let n = h.dim();
    // Symmetrize so rotations act on an exactly Hermitian matrix.
    let mut a =
        Matrix::from_fn(n, |i, j| if i == j { cr(h[(i, i)].re) } else { (h[(i, j)] + h[(j, i)].conj()) * T::of(0.5) });
    let mut v = Matrix::<T>::identity(n);

    let scale = a.max_abs().max(T::min_positive_value());
    let eps = T::epsilon();
    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: T = off_diagonal_norm(&a);
        if off <= eps * eps * scale * T::of_usize(n) {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * eps * scale {
                    a[(p, q)] = cr(T::zero());
                    a[(q, p)] = cr(T::zero());
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > eps * scale * T::of_usize(n) {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with `U = Φ R`, where `Φ` removes the phase of `a_pq`
/// and `R` is the real Jacobi rotation of the resulting symmetric block.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, apq: C<T>, mag: T) {
    let n = a.dim();
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::of(2.0) * mag);
    let t = {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    // A <- A U on columns p, q
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * conj_phase * s;
        a[(k, q)] = akp * s + akq * conj_phase * c;
    }
    // A <- U† A on rows p, q
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = cr(T::zero());
    a[(q, p)] = cr(T::zero());
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * conj_phase * s;
        v[(k, q)] = vkp * s + vkq * conj_phase * c;
    }
}
