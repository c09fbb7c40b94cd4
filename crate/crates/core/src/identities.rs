//! Exponentials of operator sums that fall outside the usual Lie-algebraic
//! factorizations.
//!
//! Two structures are supported:
//!
//! * `[A, B] = AB`, equivalently `BA = 0` ([`Relation::NilCross`]). Every word
//!   in `A` and `B` with a `B` before an `A` vanishes, leaving
//!   `(A + B)^k = B^k + sum_{m=1}^{k} A^m B^{k-m}`.
//! * `[A, B] = 2AB`, equivalently `BA = -AB` ([`Relation::Anticommuting`]).
//!   Then `(wA + gB)^2 = w^2 A^2 + g^2 B^2 =: M` commutes with both operators
//!   and `exp(-it(wA + gB)) = cos(t sqrt M) - i (wA + gB) sin(t sqrt M)/sqrt M`.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{parity_op, position_op, TOL_HERM, TOL_POS};
use crate::linalg::{eigh, Eigh, Matrix};
use crate::random::{gaussian, gaussian_matrix, rng};
use crate::scalar::{cr, neg_i, Real, C};

/// Residual allowed when validating a pair's relation.
pub const TOL_RELATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `BA = 0`
    NilCross,
    /// `BA = -AB`
    Anticommuting,
}

#[derive(Debug, Clone)]
pub struct StructuredPair<T: Real> {
    a: Matrix<T>,
    b: Matrix<T>,
    relation: Relation,
}

/// `[a, b] = ab - ba`
pub fn commutator<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    &(a * b) - &(b * a)
}

impl<T: Real> StructuredPair<T> {
    /// Validates the relation to `TOL_RELATION` (max-norm).
    pub fn new(a: Matrix<T>, b: Matrix<T>, relation: Relation) -> Result<Self> {
        a.check_same_dim(&b)?;
        let pair = Self { a, b, relation };
        let residual = pair.residual();
        if residual > T::tol(TOL_RELATION) {
            return Err(Error::RelationViolated { residual: residual.as_f64() });
        }
        Ok(pair)
    }

    /// The binary-lattice pair: parity `(-1)^n` and position `x`.
    pub fn parity_position(dim: usize) -> Result<Self> {
        Self::new(parity_op(dim)?, position_op(dim)?, Relation::Anticommuting)
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `‖BA‖` for nil-cross pairs, `‖BA + AB‖` for anticommuting ones.
    pub fn residual(&self) -> T {
        let ba = &self.b * &self.a;
        match self.relation {
            Relation::NilCross => ba.max_abs(),
            Relation::Anticommuting => (&ba + &(&self.a * &self.b)).max_abs(),
        }
    }

    /// Residual of the commutator form: `[A,B] - AB` or `[A,B] - 2AB`.
    pub fn commutator_residual(&self) -> T {
        let ab = &self.a * &self.b;
        let comm = commutator(&self.a, &self.b);
        let target = match self.relation {
            Relation::NilCross => ab,
            Relation::Anticommuting => ab.scale_real(T::of(2.0)),
        };
        comm.max_abs_diff(&target)
    }

    fn expect(&self, relation: Relation) -> Result<()> {
        if self.relation != relation {
            return Err(Error::WrongRelation { expected: relation, found: self.relation });
        }
        Ok(())
    }

    /// `wA + gB`
    pub fn combination(&self, omega: T, g: T) -> Matrix<T> {
        let mut h = self.a.scale_real(omega);
        h.axpy(cr(g), &self.b);
        h
    }

    /// `w^2 A^2 + g^2 B^2`
    pub fn square_sum(&self, omega: T, g: T) -> Matrix<T> {
        let mut m = (&self.a * &self.a).scale_real(omega * omega);
        m.axpy(cr(g * g), &(&self.b * &self.b));
        m
    }
}

/// `(A + B)^k = B^k + sum_{m=1}^{k} A^m B^{k-m}` for a nil-cross pair.
pub fn power_sum<T: Real>(pair: &StructuredPair<T>, k: u32) -> Result<Matrix<T>> {
    pair.expect(Relation::NilCross)?;
    let n = pair.dim();
    let k = k as usize;
    let mut b_pows = Vec::with_capacity(k + 1);
    b_pows.push(Matrix::identity(n));
    for i in 1..=k {
        b_pows.push(&b_pows[i - 1] * pair.b());
    }
    let mut total = b_pows[k].clone();
    let mut a_pow = Matrix::identity(n);
    for m in 1..=k {
        a_pow = &a_pow * pair.a();
        total = &total + &(&a_pow * &b_pows[k - m]);
    }
    Ok(total)
}

/// Even and odd powers of `wA + gB` for an anticommuting pair:
/// `(M^n, (wA + gB) M^n)` with `M = w^2 A^2 + g^2 B^2`.
pub fn split_powers<T: Real>(pair: &StructuredPair<T>, omega: T, g: T, n: u32) -> Result<(Matrix<T>, Matrix<T>)> {
    pair.expect(Relation::Anticommuting)?;
    let even = pair.square_sum(omega, g).pow(n);
    let odd = &pair.combination(omega, g) * &even;
    Ok((even, odd))
}

/// `sin(t sqrt(l)) / sqrt(l)`, continued to `t` at `l = 0`.
pub fn sinc_sqrt<T: Real>(t: T, lambda: T) -> T {
    let x = t * t * lambda;
    if x < T::of(1e-8) {
        t * (T::one() - x / T::of(6.0))
    } else {
        let r = lambda.sqrt();
        (t * r).sin() / r
    }
}

/// Spectral data of `M = w^2 A^2 + g^2 B^2`, reusable across many `t`.
#[derive(Debug, Clone)]
pub struct AnticommutingExp<T: Real> {
    generator: Matrix<T>,
    spectrum: Eigh<T>,
}

impl<T: Real> AnticommutingExp<T> {
    /// Fails with [`Error::Unsupported`] unless `M` is Hermitian and
    /// positive semidefinite within the default tolerances; the closed form
    /// is not evaluated for non-diagonalizable or indefinite `M`.
    pub fn new(pair: &StructuredPair<T>, omega: T, g: T) -> Result<Self> {
        pair.expect(Relation::Anticommuting)?;
        let m = pair.square_sum(omega, g);
        let scale = T::one().max(m.max_abs());
        let herm = m.hermiticity_defect();
        if herm > T::tol(TOL_HERM) * scale {
            return Err(Error::Unsupported(format!(
                "w^2 A^2 + g^2 B^2 is not Hermitian (defect {:.3e})",
                herm.as_f64()
            )));
        }
        let mut spectrum = eigh(&m, T::tol(TOL_HERM) * scale)?;
        let floor = -T::tol(TOL_POS) * scale;
        if spectrum.min_value() < floor {
            return Err(Error::Unsupported(format!(
                "w^2 A^2 + g^2 B^2 is indefinite (min eigenvalue {:.3e})",
                spectrum.min_value().as_f64()
            )));
        }
        for l in &mut spectrum.values {
            *l = l.max(T::zero());
        }
        Ok(Self { generator: pair.combination(omega, g), spectrum })
    }

    /// `cos(t sqrt M) - i (wA + gB) sin(t sqrt M)/sqrt M`
    pub fn at(&self, t: T) -> Matrix<T> {
        let cos = self.spectrum.apply(|l| (t * l.sqrt()).cos());
        let sinc = self.spectrum.apply(|l| sinc_sqrt(t, l));
        let mut out = cos;
        out.axpy(neg_i(), &(&self.generator * &sinc));
        out
    }

    /// `exp(-it(wA + gB)) v` without forming the matrix: `O(dim^2)` per call.
    pub fn apply(&self, t: T, v: &[C<T>]) -> Vec<C<T>> {
        let u = &self.spectrum.vectors;
        let coords = u.adjoint().mul_vec(v);
        let cos: Vec<C<T>> = coords.iter().zip(&self.spectrum.values).map(|(c, l)| *c * (t * l.sqrt()).cos()).collect();
        let sinc: Vec<C<T>> = coords.iter().zip(&self.spectrum.values).map(|(c, l)| *c * sinc_sqrt(t, *l)).collect();
        let mut out = u.mul_vec(&cos);
        let kick = self.generator.mul_vec(&u.mul_vec(&sinc));
        for (o, k) in out.iter_mut().zip(kick) {
            *o += neg_i::<T>() * k;
        }
        out
    }

    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }
}

/// `exp(-it(wA + gB))` in closed form.
pub fn exp_anticommuting<T: Real>(pair: &StructuredPair<T>, omega: T, g: T, t: T) -> Result<Matrix<T>> {
    Ok(AnticommutingExp::new(pair, omega, g)?.at(t))
}

/// Orthonormal basis from Gram-Schmidt on a Gaussian matrix.
fn random_unitary<T: Real>(dim: usize, rng: &mut impl Rng) -> Matrix<T> {
    let g = gaussian_matrix::<T>(dim, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for u in &cols {
                let proj = u.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= *ui * proj;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    Matrix::from_fn(dim, |i, j| cols[j][i])
}

/// `A = P X`, `B = Y (I - P)` with `P` a random-rank orthogonal projector
/// in a random basis, so that `BA = Y (I - P) P X = 0`.
pub fn random_nilcross_pair<T: Real>(dim: usize, seed: u64) -> Result<StructuredPair<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let mut rng = rng(seed);
    let rank = rng.random_range(1..dim);
    let u = random_unitary::<T>(dim, &mut rng);
    let mut d = vec![T::zero(); dim];
    d[..rank].iter_mut().for_each(|x| *x = T::one());
    let p = &(&u * &Matrix::from_real_diagonal(&d)) * &u.adjoint();
    let complement = &Matrix::identity(dim) - &p;
    // Entries scaled by 1/sqrt(dim) keep the operator norms O(1).
    let scale = T::one() / T::of_usize(dim).sqrt();
    let x = gaussian_matrix::<T>(dim, &mut rng).scale_real(scale);
    let y = gaussian_matrix::<T>(dim, &mut rng).scale_real(scale);
    StructuredPair::new(&p * &x, &y * &complement, Relation::NilCross)
}

/// `A = c Π` with `Π` a random `±1` grading, `B` supported only on the
/// blocks that flip the grading, so that `BA = -AB` entrywise.
pub fn random_anticommuting_pair<T: Real>(dim: usize, seed: u64) -> Result<StructuredPair<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let mut rng = rng(seed);
    let mut signs: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
    // Both grades must be present or B is forced to vanish.
    if signs.iter().all(|&s| s) || signs.iter().all(|&s| !s) {
        let i = rng.random_range(0..dim);
        signs[i] = !signs[i];
    }
    let c: f64 = rng.random_range(0.25..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let grading: Vec<T> = signs.iter().map(|&s| if s { T::one() } else { -T::one() }).collect();
    let a = Matrix::from_real_diagonal(&grading).scale_real(T::of(c));
    let scale = T::one() / T::of_usize(dim).sqrt();
    let b = Matrix::from_fn(dim, |i, j| {
        let z = gaussian::<T>(&mut rng);
        if signs[i] != signs[j] {
            z * scale
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    StructuredPair::new(a, b, Relation::Anticommuting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use num_complex::Complex64;

    fn direct_power(pair: &StructuredPair<f64>, omega: f64, g: f64, k: u32) -> Matrix<f64> {
        let h = pair.combination(omega, g);
        let mut out = Matrix::identity(pair.dim());
        for _ in 0..k {
            out = &out * &h;
        }
        out
    }

    #[test]
    fn vector_apply_matches_matrix() {
        let pair = StructuredPair::<f64>::parity_position(24).unwrap();
        let prop = AnticommutingExp::new(&pair, 1.0, 0.5).unwrap();
        let v: Vec<C<f64>> = (0..24).map(|k| Complex::new(1.0 / (k + 1) as f64, 0.1 * k as f64)).collect();
        for t in [0.0, 0.7, 6.0] {
            let dense = prop.at(t).mul_vec(&v);
            let fast = prop.apply(t, &v);
            let diff = dense.iter().zip(&fast).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "t={t}: {diff:e}");
        }
    }

    #[test]
    fn power_sum_low_orders() {
        let pair = random_nilcross_pair::<f64>(4, 1).unwrap();
        assert_eq!(power_sum(&pair, 0).unwrap(), Matrix::identity(4));
        assert!(power_sum(&pair, 1).unwrap().max_abs_diff(&(pair.a() + pair.b())) < 1e-15);
        let k3 = power_sum(&pair, 3).unwrap();
        let direct = direct_power(&pair, 1.0, 1.0, 3);
        assert!(k3.max_abs_diff(&direct) < 1e-12 * direct.max_abs().max(1.0));
    }

    #[test]
    fn wrong_relation_is_rejected() {
        let anti = StructuredPair::<f64>::parity_position(4).unwrap();
        assert!(matches!(power_sum(&anti, 2), Err(Error::WrongRelation { .. })));
        let nil = random_nilcross_pair::<f64>(4, 2).unwrap();
        assert!(matches!(split_powers(&nil, 1.0, 1.0, 2), Err(Error::WrongRelation { .. })));
        assert!(matches!(exp_anticommuting(&nil, 1.0, 1.0, 1.0), Err(Error::WrongRelation { .. })));
    }

    #[test]
    fn relation_is_validated() {
        let a = position_op::<f64>(4).unwrap();
        let b = parity_op::<f64>(4).unwrap();
        assert!(matches!(StructuredPair::new(a, b, Relation::NilCross), Err(Error::RelationViolated { .. })));
    }

    #[test]
    fn split_powers_examples() {
        let pair = StructuredPair::<f64>::parity_position(6).unwrap();
        let (even, odd) = split_powers(&pair, 1.0, 0.0, 0).unwrap();
        assert_eq!(even, Matrix::identity(6));
        assert_eq!(odd, pair.combination(1.0, 0.0));

        let (even, odd) = split_powers(&pair, 1.0, 0.5, 2).unwrap();
        assert!(even.max_abs_diff(&direct_power(&pair, 1.0, 0.5, 4)) < 1e-12);
        assert!(odd.max_abs_diff(&direct_power(&pair, 1.0, 0.5, 5)) < 1e-12);

        let (even, _) = split_powers(&pair, 1.3, 0.0, 3).unwrap();
        let expected = pair.a().pow(6).scale_real(1.3f64.powi(6));
        assert!(even.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn exp_closed_form_examples() {
        let pair = StructuredPair::<f64>::parity_position(10).unwrap();
        let e0 = exp_anticommuting(&pair, 1.0, 0.45, 0.0).unwrap();
        assert!(e0.max_abs_diff(&Matrix::identity(10)) < 1e-14);

        let (omega, t) = (0.8, 1.7);
        let e = exp_anticommuting(&pair, omega, 0.0, t).unwrap();
        let mut expected = Matrix::identity(10).scale_real((omega * t).cos());
        expected.axpy(Complex64::new(0.0, -(omega * t).sin()), pair.a());
        assert!(e.max_abs_diff(&expected) < 1e-13);

        let pair = StructuredPair::<f64>::parity_position(64).unwrap();
        let closed = exp_anticommuting(&pair, 1.0, 0.45, 2.0).unwrap();
        let oracle = expm(&pair.combination(1.0, 0.45).scale(Complex64::new(0.0, -2.0))).unwrap();
        assert!(closed.max_abs_diff(&oracle) < 1e-10);
    }

    #[test]
    fn omega_zero_singular_square_sum_stays_finite() {
        // With w = 0, M = g^2 x^2 is singular; the sinc limit must hold.
        let pair = StructuredPair::<f64>::parity_position(9).unwrap();
        let closed = exp_anticommuting(&pair, 0.0, 0.7, 3.0).unwrap();
        assert!(closed.is_finite());
        let oracle = expm(&pair.combination(0.0, 0.7).scale(Complex64::new(0.0, -3.0))).unwrap();
        assert!(closed.max_abs_diff(&oracle) < 1e-10);
    }

    #[test]
    fn sinc_limit() {
        assert_eq!(sinc_sqrt(2.0, 0.0), 2.0);
        assert!((sinc_sqrt(2.0f64, 1e-12) - 2.0).abs() < 1e-11);
        assert!((sinc_sqrt(1.5, 4.0) - (3.0f64).sin() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_square_sum_is_unsupported() {
        // Generic complex B has a non-Hermitian B^2.
        let pair = random_anticommuting_pair::<f64>(6, 4).unwrap();
        assert!(matches!(exp_anticommuting(&pair, 1.0, 1.0, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hermitian_random_anticommuting_pair_matches_oracle() {
        let pair = random_anticommuting_pair::<f64>(6, 9).unwrap();
        let bh = pair.b() + &pair.b().adjoint();
        let herm = StructuredPair::new(pair.a().clone(), bh, Relation::Anticommuting).unwrap();
        let closed = exp_anticommuting(&herm, 0.9, 1.1, 2.5).unwrap();
        let oracle = expm(&herm.combination(0.9, 1.1).scale(Complex64::new(0.0, -2.5))).unwrap();
        assert!(closed.max_abs_diff(&oracle) < 1e-10);
    }

    #[test]
    fn generators_are_deterministic_and_structured() {
        let p1 = random_nilcross_pair::<f64>(5, 77).unwrap();
        let p2 = random_nilcross_pair::<f64>(5, 77).unwrap();
        assert_eq!(p1.a(), p2.a());
        assert_eq!(p1.b(), p2.b());
        assert!(p1.residual() < 1e-12);

        let q = random_anticommuting_pair::<f64>(6, 5).unwrap();
        assert_eq!(q.residual(), 0.0);
        assert!(q.b().max_abs() > 0.0);
    }

    #[test]
    fn nilcross_pairs_do_not_commute() {
        let min_ab = (0..100)
            .map(|seed| {
                let p = random_nilcross_pair::<f64>(4, seed).unwrap();
                (p.a() * p.b()).max_abs()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min_ab > 1e-6);
    }

    #[test]
    fn commutator_reformulations() {
        for seed in 0..20 {
            let nil = random_nilcross_pair::<f64>(5, seed).unwrap();
            assert!(nil.commutator_residual() < 1e-12);
            let anti = random_anticommuting_pair::<f64>(5, seed).unwrap();
            assert!(anti.commutator_residual() < 1e-12);
        }
    }
}
