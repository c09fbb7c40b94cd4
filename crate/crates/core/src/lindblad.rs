//! Single-photon decay through the Susskind-Glogower operator `V`:
//!
//! `dρ/dt = 2γ VρV† - γ ρV†V - γ V†Vρ = (J + L - 2γ) ρ`
//!
//! with `Jρ = 2γ VρV†` and `Lρ = γ(ρ|0><0| + |0><0|ρ)`. Since `J L = 0` the
//! power identity for nil-cross pairs turns `exp((J + L)t)` into `exp(Jt)`
//! plus three scalar-weighted families of vacuum-edge corrections, which is
//! what [`evolve_analytic`] evaluates. [`integrate_rk4`] is the independent
//! numerical oracle.
//!
//! `V` lowers `|n>` to `|n-1>`, so `VρV†` is an index shift and all
//! superoperators here run in `O(dim^2)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_tail, default_coherent_dim, mean_photon_number, DensityMatrix, DensityTolerances, TOL_HERM, TOL_POS,
    TOL_TRACE, TOL_TRUNC,
};
use crate::linalg::{eigh, Matrix};
use crate::scalar::{cr, czero, ln_factorial_table, Real, C};
use crate::special::ln_bessel_i;
use crate::timeseries::TimeSeries;

pub const DEFAULT_TOL_SERIES: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 512;
/// RK4 outputs failing the density-matrix checks by more than this abort.
pub const RK4_BREACH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladConfig<T> {
    pub gamma: T,
    pub dim: usize,
    pub tol_series: T,
    pub max_terms: usize,
}

impl<T: Real> LindbladConfig<T> {
    pub fn new(gamma: T, dim: usize) -> Result<Self> {
        Self::with_series(gamma, dim, T::of(DEFAULT_TOL_SERIES), DEFAULT_MAX_TERMS)
    }

    pub fn with_series(gamma: T, dim: usize, tol_series: T, max_terms: usize) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::param("gamma", "decay constant must be positive"));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, min: 2 });
        }
        if !(tol_series > T::zero() && tol_series < T::of(1e-3)) {
            return Err(Error::param("tol_series", "must lie in (0, 1e-3)"));
        }
        if max_terms == 0 {
            return Err(Error::param("max_terms", "must be positive"));
        }
        Ok(Self { gamma, dim, tol_series, max_terms })
    }

    fn check(&self, rho: &Matrix<T>) -> Result<()> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        Ok(())
    }
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::param("t", "time must be finite and non-negative"));
    }
    Ok(())
}

/// `VρV†`: entry `(i, j)` becomes `ρ(i+1, j+1)`, last row and column zero.
pub fn sandwich_v<T: Real>(rho: &Matrix<T>) -> Matrix<T> {
    let n = rho.dim();
    Matrix::from_fn(n, |i, j| if i + 1 < n && j + 1 < n { rho[(i + 1, j + 1)] } else { czero() })
}

/// `V^k ρ V†^k`
pub fn sandwich_v_pow<T: Real>(rho: &Matrix<T>, k: usize) -> Matrix<T> {
    let n = rho.dim();
    Matrix::from_fn(n, |i, j| if i + k < n && j + k < n { rho[(i + k, j + k)] } else { czero() })
}

/// `Jρ = 2γ VρV†`
pub fn apply_j<T: Real>(rho: &Matrix<T>, gamma: T) -> Matrix<T> {
    sandwich_v(rho).scale_real(T::of(2.0) * gamma)
}

/// `2γ vρv†` for an explicit jump operator `v` (dense route).
pub fn apply_j_with<T: Real>(v: &Matrix<T>, rho: &Matrix<T>, gamma: T) -> Result<Matrix<T>> {
    v.check_same_dim(rho)?;
    Ok((&(v * rho) * &v.adjoint()).scale_real(T::of(2.0) * gamma))
}

/// `Lρ = γ(ρ|0><0| + |0><0|ρ)`
pub fn apply_l<T: Real>(rho: &Matrix<T>, gamma: T) -> Matrix<T> {
    let n = rho.dim();
    let mut out = Matrix::zeros(n);
    for k in 0..n {
        out[(0, k)] += rho[(0, k)] * gamma;
        out[(k, 0)] += rho[(k, 0)] * gamma;
    }
    out
}

/// Closed form of `L^m ρ`:
/// `γ^m [ |0><0|ρ + (2^m - 2)|0><0|ρ|0><0| + ρ|0><0| ]` for `m >= 1`.
pub fn apply_l_pow<T: Real>(rho: &Matrix<T>, gamma: T, m: u32) -> Matrix<T> {
    if m == 0 {
        return rho.clone();
    }
    let n = rho.dim();
    let g = gamma.powi(m as i32);
    let mut out = Matrix::zeros(n);
    for k in 0..n {
        out[(0, k)] += rho[(0, k)] * g;
        out[(k, 0)] += rho[(k, 0)] * g;
    }
    out[(0, 0)] += rho[(0, 0)] * (g * (T::of(2.0).powi(m as i32) - T::of(2.0)));
    out
}

/// `(J + L - 2γ) ρ = 2γVρV† + γρ|0><0| + γ|0><0|ρ - 2γρ`
pub fn lindblad_rhs<T: Real>(rho: &Matrix<T>, gamma: T) -> Matrix<T> {
    let n = rho.dim();
    let two_g = T::of(2.0) * gamma;
    Matrix::from_fn(n, |i, j| {
        let mut v = -rho[(i, j)] * two_g;
        if i + 1 < n && j + 1 < n {
            v += rho[(i + 1, j + 1)] * two_g;
        }
        if i == 0 {
            v += rho[(0, j)] * gamma;
        }
        if j == 0 {
            v += rho[(i, 0)] * gamma;
        }
        v
    })
}

/// `2γ vρv† - γ ρv†v - γ v†vρ`, the form before `V†V = 1 - |0><0|` is used.
pub fn lindblad_rhs_dense<T: Real>(v: &Matrix<T>, rho: &Matrix<T>, gamma: T) -> Result<Matrix<T>> {
    v.check_same_dim(rho)?;
    let vd = v.adjoint();
    let vdv = &vd * v;
    let mut out = (&(v * rho) * &vd).scale_real(T::of(2.0) * gamma);
    out.axpy(cr(-gamma), &(rho * &vdv));
    out.axpy(cr(-gamma), &(&vdv * rho));
    Ok(out)
}

/// Fixed-step classical RK4 from `t = 0`, returning the state at every point
/// of `t_grid`. Steps are shortened where needed to land on each grid point
/// exactly; every output is re-checked as a density matrix.
pub fn integrate_rk4<T: Real>(
    rho0: &DensityMatrix<T>,
    cfg: &LindbladConfig<T>,
    t_grid: &[T],
    dt: T,
) -> Result<Vec<DensityMatrix<T>>> {
    cfg.check(rho0.as_matrix())?;
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::param("dt", "step must be positive"));
    }
    if t_grid.first().is_some_and(|&t| !(t >= T::zero())) || t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("t_grid", "must be non-negative and strictly ascending"));
    }
    let min_spacing = t_grid.windows(2).map(|w| w[1] - w[0]).fold(T::infinity(), T::min);
    if dt > min_spacing * (T::one() + T::of(1e-9)) {
        return Err(Error::param("dt", "must not exceed the output grid spacing"));
    }

    let gamma = cfg.gamma;
    let mut rho = rho0.as_matrix().clone();
    let mut t = T::zero();
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        if span > T::zero() {
            let n = (span / dt - T::of(1e-9)).ceil().max(T::one()).to_usize().unwrap_or(1);
            let h = span / T::of_usize(n);
            for _ in 0..n {
                rho = rk4_step(&rho, gamma, h);
            }
            steps += n;
            t = target;
        }
        out.push(checked_output(rho.clone(), steps, target)?);
    }
    Ok(out)
}

fn rk4_step<T: Real>(rho: &Matrix<T>, gamma: T, h: T) -> Matrix<T> {
    let half = cr(h / T::of(2.0));
    let k1 = lindblad_rhs(rho, gamma);
    let mut y = rho.clone();
    y.axpy(half, &k1);
    let k2 = lindblad_rhs(&y, gamma);
    let mut y = rho.clone();
    y.axpy(half, &k2);
    let k3 = lindblad_rhs(&y, gamma);
    let mut y = rho.clone();
    y.axpy(cr(h), &k3);
    let k4 = lindblad_rhs(&y, gamma);
    let sixth = cr(h / T::of(6.0));
    let mut next = rho.clone();
    next.axpy(sixth, &k1);
    next.axpy(sixth * T::of(2.0), &k2);
    next.axpy(sixth * T::of(2.0), &k3);
    next.axpy(sixth, &k4);
    next
}

fn checked_output<T: Real>(rho: Matrix<T>, steps: usize, time: T) -> Result<DensityMatrix<T>> {
    let drift = T::epsilon() * T::of(64.0) * T::of_usize(steps);
    let cap = T::of(RK4_BREACH);
    let tol = DensityTolerances {
        herm: (T::tol(TOL_HERM) + drift).min(cap),
        trace: (T::tol(TOL_TRACE) + drift).min(cap),
        pos: (T::tol(TOL_POS) + drift).min(cap),
    };
    DensityMatrix::with_tolerances(rho, tol)
        .map_err(|e| Error::IntegrationFailure { time: time.as_f64(), detail: e.to_string() })
}

/// `e^{Jt} ρ0 = sum_k (2γt)^k/k! V^k ρ0 V†^k`, summed until a rigorous bound
/// on the remainder falls below `tol_series`.
pub fn evolve_exp_j<T: Real>(rho0: &Matrix<T>, t: T, cfg: &LindbladConfig<T>) -> Result<Matrix<T>> {
    cfg.check(rho0)?;
    check_time(t)?;
    let n = rho0.dim();
    let x = T::of(2.0) * cfg.gamma * t;
    // tail_max[k] = max |ρ0(i, j)| over i, j >= k bounds every later term.
    let mut tail_max = vec![T::zero(); n + 1];
    for k in (0..n).rev() {
        let mut m = tail_max[k + 1];
        for l in k..n {
            m = m.max(rho0[(k, l)].norm()).max(rho0[(l, k)].norm());
        }
        tail_max[k] = m;
    }
    let mut acc = rho0.clone();
    let mut coef = T::one();
    for k in 1..n {
        if k > cfg.max_terms {
            return Err(Error::SeriesTruncation { what: "exp(Jt)", terms: cfg.max_terms });
        }
        coef = coef * x / T::of_usize(k);
        let shifted = sandwich_v_pow(rho0, k);
        acc.axpy(cr(coef), &shifted);
        // Beyond k the coefficient ratio is at most 1/2, so the remainder is
        // bounded by twice the next term.
        if T::of_usize(k + 1) >= T::of(2.0) * x {
            let next = coef * x / T::of_usize(k + 1);
            if T::of(2.0) * next * tail_max[k + 1] < cfg.tol_series {
                break;
            }
        }
    }
    Ok(acc)
}

/// Scalar weights of the vacuum-edge corrections, indexed by the number of
/// jumps `n`:
///
/// * `projector[n] = sum_{m>=1} (γt)^{n+m}/(n+m)! 2^n (2^m - 2)`
/// * `edge[n]      = sum_{m>=1} (γt)^{n+m}/(n+m)! 2^n`
///
/// Both are tails of the `2γt` exponential series, `v_k = (2γt)^k / k!`,
/// evaluated by backward recurrence so no power of two is formed explicitly.
#[derive(Debug, Clone)]
pub struct CorrectionWeights<T> {
    pub projector: Vec<T>,
    pub edge: Vec<T>,
}

impl<T: Real> CorrectionWeights<T> {
    pub fn compute(gamma: T, t: T, len: usize, cfg: &LindbladConfig<T>) -> Result<Self> {
        let x2 = T::of(2.0) * gamma * t;
        if x2 == T::zero() {
            return Ok(Self { projector: vec![T::zero(); len], edge: vec![T::zero(); len] });
        }
        // v_k up to the point where the series is exhausted.
        let mut v = vec![T::one()];
        let mut k = 0usize;
        let floor = cfg.tol_series * T::epsilon();
        loop {
            k += 1;
            let next = v[k - 1] * x2 / T::of_usize(k);
            v.push(next);
            if k > len && T::of_usize(k) > T::of(2.0) * x2 && next < floor {
                break;
            }
            if k > len + cfg.max_terms {
                return Err(Error::SeriesTruncation { what: "correction weights", terms: k });
            }
        }
        let top = v.len();
        // suffix[n] = sum_{k>n} v_k ; halved[n] = sum_{k>n} v_k 2^{-(k-n)}
        let mut suffix = vec![T::zero(); top];
        let mut halved = vec![T::zero(); top];
        for n in (0..top - 1).rev() {
            suffix[n] = v[n + 1] + suffix[n + 1];
            halved[n] = (v[n + 1] + halved[n + 1]) / T::of(2.0);
        }
        let get = |arr: &[T], n: usize| if n < arr.len() { arr[n] } else { T::zero() };
        let projector = (0..len).map(|n| (get(&suffix, n) - T::of(2.0) * get(&halved, n)).max(T::zero())).collect();
        let edge = (0..len).map(|n| get(&halved, n)).collect();
        Ok(Self { projector, edge })
    }
}

/// `ρ(t) = e^{-2γt} [ e^{Jt}ρ0 + sum_n c_P(n) <0|σ_n|0> |0><0|
///                   + sum_n c_E(n) (|0><0|σ_n + σ_n|0><0|) ]`
/// with `σ_n = V^n ρ0 V†^n` and weights from [`CorrectionWeights`].
pub fn evolve_analytic<T: Real>(rho0: &DensityMatrix<T>, t: T, cfg: &LindbladConfig<T>) -> Result<DensityMatrix<T>> {
    let r0 = rho0.as_matrix();
    cfg.check(r0)?;
    check_time(t)?;
    let n = r0.dim();
    let mut rho = evolve_exp_j(r0, t, cfg)?;
    let w = CorrectionWeights::compute(cfg.gamma, t, n, cfg)?;
    for s in 0..n {
        // <0|σ_s|j> = ρ0(s, s + j), <i|σ_s|0> = ρ0(s + i, s)
        let edge = w.edge[s];
        if edge != T::zero() {
            for j in 0..n - s {
                rho[(0, j)] += r0[(s, s + j)] * edge;
                rho[(j, 0)] += r0[(s + j, s)] * edge;
            }
        }
        rho[(0, 0)] += r0[(s, s)] * w.projector[s];
    }
    let decay = (-T::of(2.0) * cfg.gamma * t).exp();
    DensityMatrix::new(rho.scale_real(decay))
}

/// `n̄(t) = e^{-2γt} Tr[n e^{Jt} ρ0]`
pub fn mean_photon_trace<T: Real>(rho0: &Matrix<T>, t: T, cfg: &LindbladConfig<T>) -> Result<T> {
    let evolved = evolve_exp_j(rho0, t, cfg)?;
    Ok((-T::of(2.0) * cfg.gamma * t).exp() * mean_photon_number(&evolved))
}

/// Sums a series whose terms eventually decrease, stopping once past the
/// peak with the current term below `tol_abs` or negligible against the sum.
fn sum_decaying<T: Real>(
    what: &'static str,
    tol_abs: T,
    max_terms: usize,
    mut term: impl FnMut(usize) -> T,
) -> Result<T> {
    let mut sum = T::zero();
    let mut prev = T::infinity();
    for n in 0..max_terms {
        let t = term(n);
        sum += t;
        let a = t.abs();
        if a <= prev && (a <= tol_abs || a <= sum.abs() * T::epsilon()) {
            return Ok(sum);
        }
        prev = a;
    }
    Err(Error::SeriesTruncation { what, terms: max_terms })
}

/// Density matrix for an initial coherent state, from the closed-form
/// coherent-state series (Hermiticity-preserving form: the first family
/// carries `(2γt|α|^2)^n/n!` and bra-side amplitudes are conjugated).
pub fn coherent_rho_analytic<T: Real>(alpha: C<T>, t: T, cfg: &LindbladConfig<T>) -> Result<DensityMatrix<T>> {
    check_time(t)?;
    let dim = cfg.dim;
    let tol_trunc = T::tol(TOL_TRUNC);
    let tail = coherent_tail(alpha, dim);
    if tail > tol_trunc {
        return Err(Error::Truncation {
            tail: tail.as_f64(),
            dim,
            suggested_dim: default_coherent_dim(alpha, tol_trunc),
        });
    }
    let r = alpha.norm();
    if r == T::zero() {
        let mut vac = Matrix::zeros(dim);
        vac[(0, 0)] = cr(T::one());
        return Ok(DensityMatrix::from_matrix_unchecked(vac));
    }
    let mean = r * r;
    let (ln_r, theta) = (r.ln(), alpha.arg());
    let two = T::of(2.0);
    let decay = -two * cfg.gamma * t - mean;
    let max_n = cfg.max_terms;
    let lnf = ln_factorial_table::<T>(dim + max_n + 1);
    let tol = cfg.tol_series * T::of(1e-2);
    let k_ln = (two * cfg.gamma * t * mean).ln();
    let zero_t = t == T::zero();

    // First family: α^{j'} conj(α)^j sum_n K^n/n! / sqrt((j+n)! (j'+n)!)
    let mut rho = Matrix::zeros(dim);
    for jp in 0..dim {
        for j in 0..=jp {
            let ln_pref = decay + T::of_usize(j + jp) * ln_r;
            let mag = if zero_t {
                (ln_pref - (lnf[j] + lnf[jp]) / two).exp()
            } else {
                sum_decaying("coherent density series", tol, max_n, |n| {
                    let nn = T::of_usize(n);
                    (ln_pref + nn * k_ln - lnf[n] - (lnf[j + n] + lnf[jp + n]) / two).exp()
                })?
            };
            let phase = Complex::from_polar(T::one(), T::of_usize(jp) * theta - T::of_usize(j) * theta);
            rho[(jp, j)] = phase * mag;
            rho[(j, jp)] = (phase * mag).conj();
        }
    }

    if !zero_t {
        let w = CorrectionWeights::compute(cfg.gamma, t, max_n, cfg)?;
        // |0><0| family: sum_n c_P(n) |α|^{2n}/n!
        let p = sum_decaying("coherent projector series", tol, max_n, |n| {
            let nn = T::of_usize(n);
            w.projector[n] * (decay + two * nn * ln_r - lnf[n]).exp()
        })?;
        rho[(0, 0)] += cr(p);
        // |0><j| and |j><0| families: sum_n c_E(n) |α|^{2n} / sqrt(n! (j+n)!)
        for j in 0..dim {
            let ln_pref = decay + T::of_usize(j) * ln_r;
            let s = sum_decaying("coherent edge series", tol, max_n, |n| {
                let nn = T::of_usize(n);
                w.edge[n] * (ln_pref + two * nn * ln_r - (lnf[n] + lnf[j + n]) / two).exp()
            })?;
            let bra = Complex::from_polar(s, -T::of_usize(j) * theta);
            rho[(0, j)] += bra;
            rho[(j, 0)] += bra.conj();
        }
    }
    DensityMatrix::new(rho)
}

/// `n̄(t) = e^{-2γt} e^{-|α|^2} sum_{k>=1} k (|α|^2/(2γt))^{k/2} I_k(sqrt(8γt|α|^2))`.
pub fn mean_photon_coherent_bessel<T: Real>(alpha: C<T>, gamma: T, t: T, k_max: usize) -> Result<T> {
    check_time(t)?;
    let mean = alpha.norm_sqr();
    if t == T::zero() || mean == T::zero() {
        return Ok(mean);
    }
    let two = T::of(2.0);
    let x = (T::of(8.0) * gamma * t * mean).sqrt();
    let ln_ratio = (mean / (two * gamma * t)).ln();
    let ln_pref = -two * gamma * t - mean;
    let mut sum = T::zero();
    let mut prev = T::zero();
    for k in 1..=k_max {
        let kk = T::of_usize(k);
        let term = (ln_pref + kk.ln() + kk / two * ln_ratio + ln_bessel_i(k, x)?).exp();
        sum += term;
        if term < prev && term <= sum * T::of(1e-14) {
            return Ok(sum);
        }
        prev = term;
    }
    Err(Error::SeriesTruncation { what: "Bessel photon-number series", terms: k_max })
}

/// `n̄(t) = n̄0 exp(-2γt/(n̄0 + 1))`
pub fn mean_photon_thermal<T: Real>(nbar0: T, gamma: T, t: T) -> T {
    nbar0 * (-T::of(2.0) * gamma * t / (nbar0 + T::one())).exp()
}

/// `Tr[n ρ(t)]` sampled from an RK4 trajectory.
pub fn mean_photon_rk4<T: Real>(
    rho0: &DensityMatrix<T>,
    cfg: &LindbladConfig<T>,
    times: &[T],
    dt: T,
    label: &str,
) -> Result<TimeSeries<T>> {
    let traj = integrate_rk4(rho0, cfg, times, dt)?;
    let values = traj.iter().map(|r| mean_photon_number(r.as_matrix())).collect();
    TimeSeries::new(label, times.to_vec(), values)
}

/// Smallest eigenvalue, for positivity diagnostics on raw matrices.
pub fn min_eigenvalue<T: Real>(m: &Matrix<T>) -> Result<T> {
    Ok(eigh(m, T::tol(TOL_HERM))?.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fock_state, number_op, sg_lowering_op, thermal_state, vacuum_projector};
    use crate::random::{random_density_supported, random_hermitian};
    use num_complex::Complex64;

    fn cfg(gamma: f64, dim: usize) -> LindbladConfig<f64> {
        LindbladConfig::new(gamma, dim).unwrap()
    }

    fn proj(n: usize, dim: usize) -> Matrix<f64> {
        DensityMatrix::from_pure(&fock_state(n, dim).unwrap()).into_matrix()
    }

    #[test]
    fn config_validation() {
        assert!(LindbladConfig::new(0.0, 4).is_err());
        assert!(LindbladConfig::new(0.5, 1).is_err());
        assert!(LindbladConfig::with_series(0.5, 4, 1e-2, 10).is_err());
        assert!(LindbladConfig::with_series(0.5, 4, 1e-9, 0).is_err());
    }

    #[test]
    fn jump_superoperator_examples() {
        let g = 0.3;
        assert_eq!(apply_j(&proj(0, 5), g).max_abs(), 0.0);
        assert!(apply_j(&proj(1, 5), g).max_abs_diff(&proj(0, 5).scale_real(2.0 * g)) < 1e-15);
        let mut r = proj(4, 6);
        for _ in 0..4 {
            r = apply_j(&r, g);
        }
        assert!(r.max_abs_diff(&proj(0, 6).scale_real((2.0 * g).powi(4))) < 1e-15);
    }

    #[test]
    fn shift_matches_dense_sandwich() {
        let v = sg_lowering_op::<f64>(7).unwrap();
        let rho = random_hermitian::<f64>(7, 3);
        assert!(apply_j(&rho, 0.4).max_abs_diff(&apply_j_with(&v, &rho, 0.4).unwrap()) < 1e-15);
        assert!(matches!(apply_j_with(&v, &Matrix::zeros(3), 0.4), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vacuum_superoperator_examples() {
        let g = 0.7;
        assert!(apply_l(&proj(0, 4), g).max_abs_diff(&proj(0, 4).scale_real(2.0 * g)) < 1e-15);
        assert_eq!(apply_l(&proj(1, 4), g).max_abs(), 0.0);
        for seed in 0..10 {
            let rho = random_hermitian::<f64>(6, seed);
            assert!(apply_j(&apply_l(&rho, g), g).max_abs() < 1e-13);
        }
    }

    #[test]
    fn vacuum_superoperator_power_formula() {
        let rho = random_hermitian::<f64>(5, 8);
        let mut iter = rho.clone();
        for m in 1..=6u32 {
            iter = apply_l(&iter, 0.45);
            assert!(iter.max_abs_diff(&apply_l_pow(&rho, 0.45, m)) < 1e-12, "m={m}");
        }
    }

    #[test]
    fn rhs_properties() {
        let g = 0.45;
        assert_eq!(lindblad_rhs(&proj(0, 6), g).max_abs(), 0.0);
        let rho = random_density_supported::<f64>(8, 8, 5).into_matrix();
        let rhs = lindblad_rhs(&rho, g);
        assert!(rhs.trace().norm() < 1e-12);
        assert!(rhs.hermiticity_defect() < 1e-15);
        let v = sg_lowering_op::<f64>(8).unwrap();
        assert!(rhs.max_abs_diff(&lindblad_rhs_dense(&v, &rho, g).unwrap()) < 1e-14);
    }

    #[test]
    fn rk4_vacuum_is_constant() {
        let c = cfg(0.45, 6);
        let rho0 = DensityMatrix::from_pure(&fock_state(0, 6).unwrap());
        let out = integrate_rk4(&rho0, &c, &[0.0, 1.0, 2.0], 1e-2).unwrap();
        for r in out {
            assert_eq!(r.as_matrix(), rho0.as_matrix());
        }
    }

    #[test]
    fn rk4_rejects_coarse_step() {
        let c = cfg(0.45, 4);
        let rho0 = DensityMatrix::from_pure(&fock_state(1, 4).unwrap());
        assert!(integrate_rk4(&rho0, &c, &[0.0, 0.1], 0.5).is_err());
    }

    #[test]
    fn rk4_fock_matches_analytic() {
        let c = cfg(0.45, 8);
        let rho0 = DensityMatrix::from_pure(&fock_state(2, 8).unwrap());
        let times = [0.5, 1.0, 2.0];
        let traj = integrate_rk4(&rho0, &c, &times, 1e-3).unwrap();
        for (t, r) in times.iter().zip(&traj) {
            let exact = evolve_analytic(&rho0, *t, &c).unwrap();
            assert!(r.as_matrix().max_abs_diff(exact.as_matrix()) < 1e-6);
        }
    }

    #[test]
    fn exp_j_examples() {
        let c = cfg(0.45, 8);
        let rho0 = proj(3, 8);
        assert_eq!(evolve_exp_j(&rho0, 0.0, &c).unwrap(), rho0);
        assert_eq!(evolve_exp_j(&proj(0, 8), 3.0, &c).unwrap(), proj(0, 8));

        let c = cfg(0.45, 256);
        let th = thermal_state(3.0, 256).unwrap();
        let t = 1.3;
        let evolved = evolve_exp_j(th.as_matrix(), t, &c).unwrap();
        let expected = th.as_matrix().scale_real((2.0 * 0.45 * t * 0.75f64).exp());
        assert!(evolved.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn analytic_zero_time_and_validity() {
        let c = cfg(0.45, 10);
        let rho0 = random_density_supported::<f64>(10, 10, 2);
        let r = evolve_analytic(&rho0, 0.0, &c).unwrap();
        assert!(r.as_matrix().max_abs_diff(rho0.as_matrix()) < 1e-15);
        let r = evolve_analytic(&rho0, 2.0, &c).unwrap();
        assert!((r.as_matrix().trace().re - 1.0).abs() < 1e-8);
        assert!(r.as_matrix().hermiticity_defect() < 1e-8);
    }

    #[test]
    fn correction_weights_match_direct_double_sum() {
        let c = cfg(0.45, 8);
        let (gamma, t) = (0.45, 1.7);
        let w = CorrectionWeights::compute(gamma, t, 8, &c).unwrap();
        let x = gamma * t;
        for n in 0..8 {
            let (mut p, mut e) = (0.0, 0.0);
            let mut fact = (1..=n).map(|k| k as f64).product::<f64>();
            for m in 1..80 {
                fact *= (n + m) as f64;
                let base = x.powi((n + m) as i32) / fact * 2f64.powi(n as i32);
                p += base * (2f64.powi(m as i32) - 2.0);
                e += base;
            }
            assert!((w.projector[n] - p).abs() < 1e-13 * p.max(1.0), "n={n}");
            assert!((w.edge[n] - e).abs() < 1e-13 * e.max(1.0), "n={n}");
        }
    }

    #[test]
    fn photon_number_trace_examples() {
        let c = cfg(0.45, 6);
        assert_eq!(mean_photon_trace(&proj(0, 6), 1.0, &c).unwrap(), 0.0);
        let t = 0.8;
        let got = mean_photon_trace(&proj(1, 6), t, &c).unwrap();
        assert!((got - (-2.0 * 0.45 * t).exp()).abs() < 1e-15);
    }

    #[test]
    fn coherent_closed_form_matches_operator_series() {
        let alpha = Complex64::new(2.0, 0.0);
        let c = cfg(0.45, 48);
        let rho0 = DensityMatrix::from_pure(&coherent_state(alpha, 48).unwrap());
        let at0 = coherent_rho_analytic(alpha, 0.0, &c).unwrap();
        assert!(at0.as_matrix().max_abs_diff(rho0.as_matrix()) < 1e-14);
        for t in [0.5, 1.0, 2.0] {
            let closed = coherent_rho_analytic(alpha, t, &c).unwrap();
            let series = evolve_analytic(&rho0, t, &c).unwrap();
            assert!(closed.as_matrix().max_abs_diff(series.as_matrix()) < 1e-9, "t={t}");
        }
    }

    #[test]
    fn complex_alpha_keeps_hermiticity() {
        let alpha = Complex64::from_polar(1.5, 0.9);
        let c = cfg(0.3, 40);
        let closed = coherent_rho_analytic(alpha, 1.1, &c).unwrap();
        assert!(closed.as_matrix().hermiticity_defect() < 1e-12);
        let rho0 = DensityMatrix::from_pure(&coherent_state(alpha, 40).unwrap());
        let series = evolve_analytic(&rho0, 1.1, &c).unwrap();
        assert!(closed.as_matrix().max_abs_diff(series.as_matrix()) < 1e-9);
    }

    #[test]
    fn bessel_series_limits_and_agreement() {
        let a = Complex64::new(3.0, 0.0);
        assert_eq!(mean_photon_coherent_bessel(a, 0.45, 0.0, 200).unwrap(), 9.0);
        let small = mean_photon_coherent_bessel(a, 0.45, 1e-9, 400).unwrap();
        assert!((small - 9.0).abs() < 1e-6);
        let c = cfg(0.45, 64);
        let rho0 = coherent_state(a, 64).unwrap().projector();
        for t in [0.5, 1.0, 2.0] {
            let bessel = mean_photon_coherent_bessel(a, 0.45, t, 400).unwrap();
            let trace = mean_photon_trace(&rho0, t, &c).unwrap();
            assert!((bessel - trace).abs() < 1e-8, "t={t}: {bessel} vs {trace}");
        }
    }

    #[test]
    fn thermal_decay_law() {
        assert_eq!(mean_photon_thermal(3.0, 0.45, 0.0), 3.0);
        assert!((mean_photon_thermal(3.0f64, 0.45, 1.0) - 2.3956).abs() < 1e-4);
        let c = cfg(0.45, 128);
        let th = thermal_state(3.0, 128).unwrap();
        let n = number_op(128).unwrap();
        let traj = integrate_rk4(&th, &c, &[1.0], 1e-3).unwrap();
        let rk4 = crate::fock::expectation(&n, &traj[0]).unwrap().re;
        assert!((rk4 - mean_photon_thermal(3.0, 0.45, 1.0)).abs() < 1e-4);
    }

    #[test]
    fn vacuum_projector_is_stationary_under_analytic_flow() {
        let c = cfg(0.9, 5);
        let vac = DensityMatrix::from_pure(&fock_state(0, 5).unwrap());
        let r = evolve_analytic(&vac, 3.0, &c).unwrap();
        assert!(r.as_matrix().max_abs_diff(&vacuum_projector(5).unwrap()) < 1e-14);
    }
}
