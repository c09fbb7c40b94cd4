//! Truncated Fock-space operators and canonical states.
//!
//! Every operator lives in the span of `|0>, ..., |dim-1>`. Identities that
//! only hold in infinite dimension acquire a corner defect at index
//! `dim - 1`; see [`sg_lowering_op`] and [`annihilation_op`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eigh, Matrix};
use crate::scalar::{cone, cr, czero, ln_factorial, Real, C};

/// Default tolerance on the probability mass discarded by truncation.
pub const TOL_TRUNC: f64 = 1e-10;
pub const TOL_NORM: f64 = 1e-10;
pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-8;
pub const TOL_POS: f64 = 1e-8;

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

/// `a`, with `a|n> = sqrt(n)|n-1>`.
pub fn annihilation_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    let mut m = Matrix::zeros(dim);
    for n in 1..dim {
        m[(n - 1, n)] = cr(T::of_usize(n).sqrt());
    }
    Ok(m)
}

pub fn creation_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    Ok(annihilation_op::<T>(dim)?.adjoint())
}

pub fn number_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    Ok(Matrix::from_real_diagonal(&(0..dim).map(T::of_usize).collect::<Vec<_>>()))
}

/// Photon-number parity `(-1)^n`.
pub fn parity_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    Ok(Matrix::from_real_diagonal(&(0..dim).map(|n| if n % 2 == 0 { T::one() } else { -T::one() }).collect::<Vec<_>>()))
}

/// `x = (a + a†)/sqrt(2)`.
pub fn position_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    let mut m = Matrix::zeros(dim);
    for k in 0..dim - 1 {
        let v = cr((T::of_usize(k + 1) / T::of(2.0)).sqrt());
        m[(k, k + 1)] = v;
        m[(k + 1, k)] = v;
    }
    Ok(m)
}

/// Susskind-Glogower lowering operator `V = (1 + n)^{-1/2} a`, i.e.
/// `V|n> = |n-1>` and `V|0> = 0`.
///
/// `V†V = I - |0><0|` holds exactly; `VV† = I - |dim-1><dim-1|` is the
/// truncated form of `VV† = I`.
pub fn sg_lowering_op<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    let mut m = Matrix::zeros(dim);
    for n in 1..dim {
        m[(n - 1, n)] = cone();
    }
    Ok(m)
}

/// `|0><0|`
pub fn vacuum_projector<T: Real>(dim: usize) -> Result<Matrix<T>> {
    check_dim(dim)?;
    let mut m = Matrix::zeros(dim);
    m[(0, 0)] = cone();
    Ok(m)
}

/// Pure state in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: Vec<C<T>>,
    normalized: bool,
}

impl<T: Real> StateVector<T> {
    /// Validates that the norm is within `TOL_NORM` of 1.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        Self::with_tolerance(amplitudes, T::tol(TOL_NORM))
    }

    pub fn with_tolerance(amplitudes: Vec<C<T>>, tol_norm: T) -> Result<Self> {
        let s = Self::unnormalized(amplitudes)?;
        let norm = s.norm();
        if (norm - T::one()).abs() > tol_norm {
            return Err(Error::param("amplitudes", format!("norm {norm} deviates from 1")));
        }
        Ok(Self { normalized: true, ..s })
    }

    /// Wraps amplitudes without a norm check; the state is flagged as such.
    pub fn unnormalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { amplitudes, normalized: false })
    }

    /// Rescales to unit norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == T::zero() {
            return Err(Error::param("amplitudes", "zero vector cannot be normalized"));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Photon-number distribution `|<n|psi>|^2`.
    pub fn populations(&self) -> Vec<T> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn projector(&self) -> Matrix<T> {
        Matrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `<psi|op|psi>`
    pub fn expectation(&self, op: &Matrix<T>) -> Result<C<T>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: op.dim(), found: self.dim() });
        }
        let v = op.mul_vec(&self.amplitudes);
        Ok(self.amplitudes.iter().zip(&v).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }
}

/// `|n>` in a `dim`-level truncation.
pub fn fock_state<T: Real>(n: usize, dim: usize) -> Result<StateVector<T>> {
    if n >= dim {
        return Err(Error::OutOfRange { what: "Fock index", value: n as f64, limit: dim as f64 - 1.0 });
    }
    let mut amps = vec![czero(); dim];
    amps[n] = cone();
    Ok(StateVector { amplitudes: amps, normalized: true })
}

/// Poisson mass `sum_{n >= dim} e^{-|alpha|^2} |alpha|^{2n}/n!` lost to truncation.
pub fn coherent_tail<T: Real>(alpha: C<T>, dim: usize) -> T {
    let mean = alpha.norm_sqr();
    if mean == T::zero() {
        return T::zero();
    }
    let ln_mean = mean.ln();
    let mut ln_term = T::of_usize(dim) * ln_mean - mean - ln_factorial::<T>(dim);
    let mut tail = T::zero();
    let mut n = dim;
    loop {
        let term = ln_term.exp();
        tail += term;
        n += 1;
        ln_term += ln_mean - T::of_usize(n).ln();
        // Past the Poisson peak terms shrink geometrically.
        if T::of_usize(n) > mean && ln_term.exp() <= tail * T::epsilon() {
            break;
        }
        if n > dim + 100_000 {
            break;
        }
    }
    tail
}

/// Geometric mass `(nbar/(nbar+1))^dim` beyond the truncation.
pub fn thermal_tail<T: Real>(nbar0: T, dim: usize) -> T {
    (nbar0 / (nbar0 + T::one())).powi(dim as i32)
}

/// Truncation dimension for `|alpha>`: starts from
/// `max(32, ceil(|alpha|^2 + 8|alpha| + 16))` and grows until the tail is
/// below `tol`.
pub fn default_coherent_dim<T: Real>(alpha: C<T>, tol: T) -> usize {
    let r = alpha.norm().as_f64();
    let mut dim = 32usize.max((r * r + 8.0 * r + 16.0).ceil() as usize);
    while coherent_tail(alpha, dim) > tol {
        dim += 8;
    }
    dim
}

/// Smallest dimension (at least 32) whose geometric tail is below `tol`.
pub fn default_thermal_dim<T: Real>(nbar0: T, tol: T) -> usize {
    if nbar0 <= T::zero() {
        return 32;
    }
    let ratio = (nbar0 / (nbar0 + T::one())).as_f64();
    let needed = (tol.as_f64().ln() / ratio.ln()).ceil() as usize;
    32usize.max(needed)
}

/// `|alpha>` with amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
///
/// The vector is not renormalized after truncation; the Poisson tail is
/// checked against `TOL_TRUNC` instead.
pub fn coherent_state<T: Real>(alpha: C<T>, dim: usize) -> Result<StateVector<T>> {
    coherent_state_with_tol(alpha, dim, T::tol(TOL_TRUNC))
}

pub fn coherent_state_with_tol<T: Real>(alpha: C<T>, dim: usize, tol_trunc: T) -> Result<StateVector<T>> {
    check_dim(dim)?;
    let tail = coherent_tail(alpha, dim);
    if tail > tol_trunc {
        return Err(Error::Truncation {
            tail: tail.as_f64(),
            dim,
            suggested_dim: default_coherent_dim(alpha, tol_trunc),
        });
    }
    Ok(StateVector { amplitudes: coherent_amplitudes(alpha, dim), normalized: true })
}

/// Raw coherent amplitudes for `n < dim`, no tail check.
pub(crate) fn coherent_amplitudes<T: Real>(alpha: C<T>, dim: usize) -> Vec<C<T>> {
    let r = alpha.norm();
    if r == T::zero() {
        let mut v = vec![czero(); dim];
        v[0] = cone();
        return v;
    }
    let (ln_r, theta) = (r.ln(), alpha.arg());
    let half = -r * r / T::of(2.0);
    let mut ln_fact = T::zero();
    (0..dim)
        .map(|n| {
            if n > 0 {
                ln_fact += T::of_usize(n).ln();
            }
            let nn = T::of_usize(n);
            let mag = (half + nn * ln_r - ln_fact / T::of(2.0)).exp();
            Complex::from_polar(mag, nn * theta)
        })
        .collect()
}

/// Density-matrix tolerances used at construction.
#[derive(Debug, Clone, Copy)]
pub struct DensityTolerances<T> {
    pub herm: T,
    pub trace: T,
    pub pos: T,
}

impl<T: Real> Default for DensityTolerances<T> {
    fn default() -> Self {
        Self { herm: T::tol(TOL_HERM), trace: T::tol(TOL_TRACE), pos: T::tol(TOL_POS) }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        Self::with_tolerances(matrix, DensityTolerances::default())
    }

    pub fn with_tolerances(matrix: Matrix<T>, tol: DensityTolerances<T>) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        if deviation > tol.herm {
            return Err(Error::NotHermitian { deviation: deviation.as_f64() });
        }
        let trace = matrix.trace().re;
        if (trace - T::one()).abs() > tol.trace {
            return Err(Error::TraceDefect { trace: trace.as_f64() });
        }
        let min = eigh(&matrix, tol.herm)?.min_value();
        if min < -tol.pos {
            return Err(Error::NotPositive { min_eigenvalue: min.as_f64() });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for values produced by routines whose output is
    /// checked elsewhere.
    pub(crate) fn from_matrix_unchecked(matrix: Matrix<T>) -> Self {
        Self { matrix }
    }

    pub fn from_pure(state: &StateVector<T>) -> Self {
        Self { matrix: state.projector() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    /// Diagonal `<n|rho|n>`.
    pub fn populations(&self) -> Vec<T> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(eigh(&self.matrix, T::tol(TOL_HERM))?.min_value())
    }
}

/// Thermal state with mean photon number `nbar0`.
pub fn thermal_state<T: Real>(nbar0: T, dim: usize) -> Result<DensityMatrix<T>> {
    check_dim(dim)?;
    if !(nbar0 >= T::zero()) || !nbar0.is_finite() {
        return Err(Error::param("nbar0", "must be finite and non-negative"));
    }
    let tol = T::tol(TOL_TRUNC);
    let tail = thermal_tail(nbar0, dim);
    if tail > tol {
        return Err(Error::Truncation { tail: tail.as_f64(), dim, suggested_dim: default_thermal_dim(nbar0, tol) });
    }
    let p0 = T::one() / (nbar0 + T::one());
    let ratio = nbar0 / (nbar0 + T::one());
    let mut p = p0;
    let diag: Vec<T> = (0..dim)
        .map(|_| {
            let cur = p;
            p *= ratio;
            cur
        })
        .collect();
    Ok(DensityMatrix { matrix: Matrix::from_real_diagonal(&diag) })
}

/// `Tr[op rho]`
pub fn expectation<T: Real>(op: &Matrix<T>, rho: &DensityMatrix<T>) -> Result<C<T>> {
    trace_product(op, rho.as_matrix())
}

/// `Tr[a b]` without forming the product.
pub fn trace_product<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<C<T>> {
    a.check_same_dim(b)?;
    let n = a.dim();
    let mut acc = czero();
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// `Tr[n rho]` for a matrix that need not be a validated density matrix.
pub fn mean_photon_number<T: Real>(rho: &Matrix<T>) -> T {
    rho.diagonal().iter().enumerate().map(|(n, z)| T::of_usize(n) * z.re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn annihilation_small_dims() {
        let a = annihilation_op::<f64>(2).unwrap();
        assert_eq!(a[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(a[(1, 0)], Complex64::new(0.0, 0.0));
        let a3 = annihilation_op::<f64>(3).unwrap();
        assert_eq!(a3[(1, 2)].re, 2f64.sqrt());
        assert_eq!(annihilation_op::<f64>(1), Err(Error::InvalidDimension { dim: 1, min: 2 }));
    }

    #[test]
    fn number_from_ladder_product() {
        let a = annihilation_op::<f64>(8).unwrap();
        let n = &a.adjoint() * &a;
        for k in 0..8 {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
        assert!(n.max_abs_diff(&number_op(8).unwrap()) < 1e-14);
    }

    #[test]
    fn commutator_has_corner_defect() {
        for dim in [2, 5, 9] {
            let a = annihilation_op::<f64>(dim).unwrap();
            let ad = a.adjoint();
            let comm = &(&a * &ad) - &(&ad * &a);
            let mut expected = Matrix::identity(dim);
            expected[(dim - 1, dim - 1)] = Complex64::new(1.0 - dim as f64, 0.0);
            assert!(comm.max_abs_diff(&expected) < 1e-13, "dim={dim}");
        }
    }

    #[test]
    fn parity_and_position_entries() {
        let p = parity_op::<f64>(3).unwrap();
        assert_eq!(p.diagonal().iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, -1.0, 1.0]);
        let x = position_op::<f64>(3).unwrap();
        assert!((x[(0, 1)].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        let a = annihilation_op::<f64>(3).unwrap();
        let ladder = (&a + &a.adjoint()).scale_real(1.0 / 2f64.sqrt());
        assert!(x.max_abs_diff(&ladder) < 1e-15);
    }

    #[test]
    fn parity_anticommutes_with_position_exactly() {
        for dim in 2..20 {
            let p = parity_op::<f64>(dim).unwrap();
            let x = position_op::<f64>(dim).unwrap();
            let anti = &(&p * &x) + &(&x * &p);
            assert_eq!(anti.max_abs(), 0.0);
        }
    }

    #[test]
    fn sg_operator_products() {
        for dim in [2, 4, 10] {
            let v = sg_lowering_op::<f64>(dim).unwrap();
            let vd = v.adjoint();
            let mut top = Matrix::identity(dim);
            top[(dim - 1, dim - 1)] = Complex64::new(0.0, 0.0);
            assert_eq!(&v * &vd, top);
            let mut bottom = Matrix::identity(dim);
            bottom[(0, 0)] = Complex64::new(0.0, 0.0);
            assert_eq!(&vd * &v, bottom);
        }
        let v = sg_lowering_op::<f64>(5).unwrap();
        let lowered = v.mul_vec(fock_state::<f64>(3, 5).unwrap().amplitudes());
        assert_eq!(lowered, fock_state::<f64>(2, 5).unwrap().amplitudes());
        assert!(v.mul_vec(fock_state::<f64>(0, 5).unwrap().amplitudes()).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn fock_states() {
        let s = fock_state::<f64>(0, 4).unwrap();
        assert_eq!(s.populations(), vec![1.0, 0.0, 0.0, 0.0]);
        let s = fock_state::<f64>(3, 4).unwrap();
        assert_eq!(s.populations(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.norm(), 1.0);
        assert!(matches!(fock_state::<f64>(4, 4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn coherent_vacuum_and_moments() {
        let vac = coherent_state::<f64>(Complex64::new(0.0, 0.0), 6).unwrap();
        assert_eq!(vac.amplitudes(), fock_state::<f64>(0, 6).unwrap().amplitudes());

        let s = coherent_state(Complex64::new(3.0, 0.0), 64).unwrap();
        let mean: f64 = s.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        assert!((mean - 9.0).abs() < 1e-9);
        assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_populations_are_poisson() {
        let alpha = Complex64::from_polar(2.2, 0.7);
        let s = coherent_state(alpha, 48).unwrap();
        let mean = alpha.norm_sqr();
        let mut p = (-mean).exp();
        for (n, &pop) in s.populations().iter().enumerate() {
            assert!((pop - p).abs() < 1e-12, "n={n}");
            p *= mean / (n + 1) as f64;
        }
    }

    #[test]
    fn coherent_truncation_error_suggests_dim() {
        let err = coherent_state(Complex64::new(5.0, 0.0), 20).unwrap_err();
        match err {
            Error::Truncation { suggested_dim, dim, .. } => {
                assert_eq!(dim, 20);
                assert!(coherent_tail(Complex64::new(5.0, 0.0), suggested_dim) <= 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(default_coherent_dim(Complex64::new(3.0, 0.0), 1e-10), 49);
    }

    #[test]
    fn thermal_state_definition() {
        let vac = thermal_state::<f64>(0.0, 8).unwrap();
        assert_eq!(vac.as_matrix(), &vacuum_projector(8).unwrap());

        let th = thermal_state::<f64>(3.0, 256).unwrap();
        let p = th.populations();
        assert_eq!(p[0], 0.25);
        assert!((p[5] / p[4] - 0.75).abs() < 1e-15);
        let n = expectation(&number_op(256).unwrap(), &th).unwrap();
        assert!((n.re - 3.0).abs() < 1e-6);
        assert!(matches!(thermal_state::<f64>(3.0, 40), Err(Error::Truncation { .. })));
        assert!(thermal_tail(3.0, default_thermal_dim(3.0, 1e-10)) <= 1e-10);
    }

    #[test]
    fn expectation_examples() {
        let dim = 16;
        let rho = DensityMatrix::from_pure(&coherent_state(Complex64::new(0.5, 0.5), dim).unwrap());
        let id = expectation(&Matrix::identity(dim), &rho).unwrap();
        assert!((id.re - 1.0).abs() < 1e-12);
        let vac = DensityMatrix::from_pure(&fock_state(0, dim).unwrap());
        assert_eq!(expectation(&number_op(dim).unwrap(), &vac).unwrap().re, 0.0);
        assert!(matches!(expectation(&number_op::<f64>(3).unwrap(), &vac), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_validation() {
        let mut m = Matrix::<f64>::identity(2).scale_real(0.5);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m.clone()), Err(Error::NotHermitian { .. })));
        m[(1, 0)] = Complex64::new(0.1, 0.0);
        m[(0, 0)] = Complex64::new(0.6, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::TraceDefect { .. })));
        let neg = Matrix::<f64>::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(neg), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn single_precision_operators() {
        let x = position_op::<f32>(4).unwrap();
        let p = parity_op::<f32>(4).unwrap();
        assert_eq!((&(&p * &x) + &(&x * &p)).max_abs(), 0.0);
        let th = thermal_state::<f32>(1.0, 64).unwrap();
        assert!((th.populations()[0] - 0.5).abs() < 1e-7);
    }
}
