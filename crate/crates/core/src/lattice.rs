//! Binary Glauber-Fock lattice `H = w (-1)^n + g x`.
//!
//! In the position representation parity maps `|x>` to `|-x>`, so the
//! propagator acts pointwise on the pair `(x, -x)`:
//!
//! `psi(x; z) = [cos(z W) - i g x sin(z W)/W] psi0(x) - i w sin(z W)/W psi0(-x)`
//!
//! with `W(x) = sqrt(w^2 + g^2 x^2)`. Waveguide amplitudes are overlaps with
//! oscillator eigenfunctions. [`propagate_fock`] is the independent Fock-basis
//! route through the matrix exponential.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_state_with_tol, default_coherent_dim, fock_state, parity_op, position_op, StateVector, TOL_TRUNC,
};
use crate::identities::{sinc_sqrt, AnticommutingExp, StructuredPair};
use crate::linalg::{expm, Matrix};
use crate::scalar::{cr, czero, Real, C};
use crate::special::{hermite_gauss_upto, HERMITE_MAX_ORDER};

/// Norm defect tolerated on a sampled initial field before the grid is
/// considered too narrow.
pub const TOL_EXTENT: f64 = 1e-8;

/// Symmetric uniform grid `x_j = (j - c) h`, `j = 0..points`, `c = (points-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid<T: Real> {
    nodes: Vec<T>,
    spacing: T,
}

impl<T: Real> PositionGrid<T> {
    pub fn symmetric(half_width: T, points: usize) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::param("half_width", "must be positive"));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::param("points", "must be odd and at least 3"));
        }
        let c = (points - 1) / 2;
        let h = half_width / T::of_usize(c);
        let nodes =
            (0..points).map(|j| if j >= c { T::of_usize(j - c) * h } else { -(T::of_usize(c - j) * h) }).collect();
        Ok(Self { nodes, spacing: h })
    }

    /// Accepts arbitrary nodes, checking uniform spacing and an odd count.
    /// Mirror symmetry is checked separately by [`is_symmetric`](Self::is_symmetric).
    pub fn from_nodes(nodes: Vec<T>) -> Result<Self> {
        if nodes.len() < 3 || nodes.len() % 2 == 0 {
            return Err(Error::param("points", "must be odd and at least 3"));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let h = (nodes[nodes.len() - 1] - nodes[0]) / T::of_usize(nodes.len() - 1);
        if !(h > T::zero()) {
            return Err(Error::NonUniformGrid);
        }
        let tol = h * T::of(1e-9);
        if nodes.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
            return Err(Error::NonUniformGrid);
        }
        Ok(Self { nodes, spacing: h })
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.nodes.len();
        (0..n).all(|j| self.nodes[j] == -self.nodes[n - 1 - j])
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn half_width(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Composite Simpson rule over the grid.
    pub fn simpson(&self, f: &[T]) -> T {
        simpson(self.spacing, f)
    }

    pub fn simpson_complex(&self, f: &[C<T>]) -> C<T> {
        let n = f.len();
        let mut acc = f[0] + f[n - 1];
        for (j, v) in f.iter().enumerate().take(n - 1).skip(1) {
            acc += *v * if j % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        }
        acc * (self.spacing / T::of(3.0))
    }
}

/// `h/3 [f0 + 4 f1 + 2 f2 + ... + 4 f_{n-2} + f_{n-1}]` for odd `n`.
pub fn simpson<T: Real>(h: T, f: &[T]) -> T {
    let n = f.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson rule needs an odd number of samples");
    let mut acc = f[0] + f[n - 1];
    for (j, v) in f.iter().enumerate().take(n - 1).skip(1) {
        acc += *v * if j % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
    }
    acc * h / T::of(3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig<T: Real> {
    pub omega: T,
    pub g: T,
    pub dim: usize,
    pub grid: PositionGrid<T>,
}

impl<T: Real> LatticeConfig<T> {
    pub fn new(omega: T, g: T, dim: usize, grid: PositionGrid<T>) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::param("omega", "must be finite"));
        }
        if !(g > T::zero()) || !g.is_finite() {
            return Err(Error::param("g", "coupling must be positive"));
        }
        if dim < 8 {
            return Err(Error::InvalidDimension { dim, min: 8 });
        }
        if !grid.is_symmetric() {
            return Err(Error::AsymmetricGrid);
        }
        Ok(Self { omega, g, dim, grid })
    }
}

/// `w (-1)^n + g x` in the truncated Fock basis.
pub fn lattice_hamiltonian<T: Real>(cfg: &LatticeConfig<T>) -> Result<Matrix<T>> {
    let mut h = parity_op::<T>(cfg.dim)?.scale_real(cfg.omega);
    h.axpy(cr(cfg.g), &position_op(cfg.dim)?);
    Ok(h)
}

/// Sampled complex field on a [`PositionGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T: Real> {
    grid: PositionGrid<T>,
    samples: Vec<C<T>>,
}

impl<T: Real> WaveFunction<T> {
    pub fn new(grid: PositionGrid<T>, samples: Vec<C<T>>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: samples.len() });
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> &PositionGrid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn intensity(&self) -> Vec<T> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∫ |psi|^2 dx` by Simpson's rule.
    pub fn norm_sqr(&self) -> T {
        self.grid.simpson(&self.intensity())
    }

    /// `∫ conj(self) other dx`
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.grid != other.grid {
            return Err(Error::param("grid", "wave functions live on different grids"));
        }
        let f: Vec<C<T>> = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).collect();
        Ok(self.grid.simpson_complex(&f))
    }
}

/// Initial field launched into the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialKind<T> {
    Gaussian,
    HermiteGauss(usize),
    /// `(phi_j + phi_k)/sqrt(2)`, `j != k`.
    Superposition(usize, usize),
    Coherent(C<T>),
}

impl<T: Real> InitialKind<T> {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::HermiteGauss(n) if n > HERMITE_MAX_ORDER => {
                Err(Error::OutOfRange { what: "Hermite-Gauss order", value: n as f64, limit: HERMITE_MAX_ORDER as f64 })
            }
            Self::Superposition(j, k) if j == k => Err(Error::param("superposition", "orders must differ")),
            Self::Superposition(j, k) if j.max(k) > HERMITE_MAX_ORDER => Err(Error::OutOfRange {
                what: "Hermite-Gauss order",
                value: j.max(k) as f64,
                limit: HERMITE_MAX_ORDER as f64,
            }),
            Self::Coherent(a) if !a.re.is_finite() || !a.im.is_finite() => Err(Error::NonFinite),
            _ => Ok(()),
        }
    }

    /// Fock cutoff used when the field is expanded in oscillator modes.
    pub fn fock_cutoff(&self) -> Result<usize> {
        self.validate()?;
        Ok(match *self {
            Self::Gaussian => 1,
            Self::HermiteGauss(n) => n + 1,
            Self::Superposition(j, k) => j.max(k) + 1,
            Self::Coherent(a) => {
                let d = default_coherent_dim(a, T::tol(TOL_TRUNC));
                if d > HERMITE_MAX_ORDER + 1 {
                    return Err(Error::OutOfRange {
                        what: "coherent Fock cutoff",
                        value: d as f64,
                        limit: (HERMITE_MAX_ORDER + 1) as f64,
                    });
                }
                d
            }
        })
    }

    /// Fock-basis coefficients `c_n` with `psi0 = sum_n c_n phi_n`.
    pub fn fock_coefficients(&self, dim: usize) -> Result<StateVector<T>> {
        self.validate()?;
        match *self {
            Self::Gaussian => fock_state(0, dim),
            Self::HermiteGauss(n) => fock_state(n, dim),
            Self::Superposition(j, k) => {
                if j.max(k) >= dim {
                    return Err(Error::OutOfRange {
                        what: "superposition order",
                        value: j.max(k) as f64,
                        limit: dim as f64,
                    });
                }
                let w = cr(T::one() / T::of(2.0).sqrt());
                let mut amps = vec![czero(); dim];
                amps[j] = w;
                amps[k] = w;
                StateVector::new(amps)
            }
            Self::Coherent(a) => coherent_state_with_tol(a, dim, T::tol(TOL_TRUNC)),
        }
    }
}

impl<T: Real> fmt::Display for InitialKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => write!(f, "gaussian"),
            Self::HermiteGauss(n) => write!(f, "hermite:{n}"),
            Self::Superposition(j, k) => write!(f, "superposition:{j},{k}"),
            Self::Coherent(a) if a.im == T::zero() => write!(f, "coherent:{}", a.re),
            Self::Coherent(a) => write!(f, "coherent:{},{}", a.re, a.im),
        }
    }
}

/// Parses `gaussian`, `hermite:N`, `superposition:J,K`, `coherent:RE[,IM]`.
impl<T: Real> FromStr for InitialKind<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("init", "expected gaussian, hermite:N, superposition:J,K or coherent:RE[,IM]");
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let ints =
            |a: &str| a.split(',').map(|p| p.trim().parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>();
        let kind = match (head.to_ascii_lowercase().as_str(), args) {
            ("gaussian", None) => Self::Gaussian,
            ("hermite", Some(a)) => match ints(a).map_err(|_| bad())?.as_slice() {
                [n] => Self::HermiteGauss(*n),
                _ => return Err(bad()),
            },
            ("superposition", Some(a)) => match ints(a).map_err(|_| bad())?.as_slice() {
                [j, k] => Self::Superposition(*j, *k),
                _ => return Err(bad()),
            },
            ("coherent", Some(a)) => {
                let parts: Vec<f64> = a
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                match parts.as_slice() {
                    [re] => Self::Coherent(Complex::new(T::of(*re), T::zero())),
                    [re, im] => Self::Coherent(Complex::new(T::of(*re), T::of(*im))),
                    _ => return Err(bad()),
                }
            }
            _ => return Err(bad()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// `phi_0..=phi_m_max` sampled on the grid, one row per order.
pub fn mode_table<T: Real>(grid: &PositionGrid<T>, m_max: usize) -> Result<Vec<Vec<T>>> {
    if m_max > HERMITE_MAX_ORDER {
        return Err(Error::OutOfRange { what: "mode order", value: m_max as f64, limit: HERMITE_MAX_ORDER as f64 });
    }
    let mut rows = vec![Vec::with_capacity(grid.len()); m_max + 1];
    for &x in grid.nodes() {
        for (m, v) in hermite_gauss_upto(m_max, x).into_iter().enumerate() {
            rows[m].push(v);
        }
    }
    Ok(rows)
}

/// Samples the initial field on the grid. Fails with [`Error::Extent`] when
/// the sampled norm misses 1 by more than [`TOL_EXTENT`].
pub fn initial_wavefunction<T: Real>(kind: InitialKind<T>, grid: &PositionGrid<T>) -> Result<WaveFunction<T>> {
    let cutoff = kind.fock_cutoff()?;
    let coeffs = kind.fock_coefficients(cutoff.max(2))?;
    let modes = mode_table(grid, cutoff - 1)?;
    let samples = (0..grid.len())
        .map(|j| modes.iter().zip(coeffs.amplitudes()).fold(czero(), |acc: C<T>, (phi, c)| acc + *c * phi[j]))
        .collect();
    let psi = WaveFunction::new(grid.clone(), samples)?;
    let norm = psi.norm_sqr();
    let expected = coeffs.norm() * coeffs.norm();
    if (norm - expected).abs() > T::tol(TOL_EXTENT) {
        return Err(Error::Extent { norm: norm.as_f64() });
    }
    Ok(psi)
}

/// Closed-form propagation to distance `z` in the position representation.
pub fn psi_evolved<T: Real>(psi0: &WaveFunction<T>, cfg: &LatticeConfig<T>, z: T) -> Result<WaveFunction<T>> {
    if !psi0.grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    if psi0.grid != cfg.grid {
        return Err(Error::param("grid", "field and lattice configuration use different grids"));
    }
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = psi0.samples.len();
    let (w, g) = (cfg.omega, cfg.g);
    let samples = psi0
        .grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let lambda = w * w + g * g * x * x;
            let cos = (z * lambda.sqrt()).cos();
            let sinc = sinc_sqrt(z, lambda);
            let direct = Complex::new(cos, -g * x * sinc);
            let mirror = Complex::new(T::zero(), -w * sinc);
            direct * psi0.samples[j] + mirror * psi0.samples[n - 1 - j]
        })
        .collect();
    WaveFunction::new(psi0.grid.clone(), samples)
}

/// Largest mode order the grid resolves: `h <= 0.1 / sqrt(m_max + 1)`.
pub fn resolved_order<T: Real>(grid: &PositionGrid<T>) -> usize {
    let h = grid.spacing().as_f64();
    ((0.1 / h).powi(2) - 1.0).floor().max(0.0) as usize
}

fn check_resolution<T: Real>(grid: &PositionGrid<T>, m_max: usize) -> Result<()> {
    let limit = 0.1 / ((m_max + 1) as f64).sqrt();
    let h = grid.spacing().as_f64();
    if h > limit * (1.0 + 1e-12) {
        return Err(Error::ResolutionGuard { spacing: h, limit, order: m_max });
    }
    Ok(())
}

/// `E_m = ∫ phi_m(x) psi(x) dx` for `m = 0..=m_max`, given a precomputed
/// [`mode_table`].
pub fn project_modes<T: Real>(psi: &WaveFunction<T>, modes: &[Vec<T>]) -> Vec<C<T>> {
    modes
        .iter()
        .map(|phi| {
            let f: Vec<C<T>> = phi.iter().zip(&psi.samples).map(|(p, s)| *s * *p).collect();
            psi.grid.simpson_complex(&f)
        })
        .collect()
}

/// Waveguide amplitudes `E_m(z)`, `m = 0..=m_max`.
pub fn field_amplitudes<T: Real>(
    psi0: &WaveFunction<T>,
    cfg: &LatticeConfig<T>,
    z: T,
    m_max: usize,
) -> Result<Vec<C<T>>> {
    check_resolution(&cfg.grid, m_max)?;
    let modes = mode_table(&cfg.grid, m_max)?;
    Ok(project_modes(&psi_evolved(psi0, cfg, z)?, &modes))
}

/// `exp(-i z H) c0` through the scaling-and-squaring exponential.
pub fn propagate_fock<T: Real>(c0: &StateVector<T>, cfg: &LatticeConfig<T>, z: T) -> Result<StateVector<T>> {
    if c0.dim() != cfg.dim {
        return Err(Error::DimensionMismatch { expected: cfg.dim, found: c0.dim() });
    }
    let u = expm(&lattice_hamiltonian(cfg)?.scale(Complex::new(T::zero(), -z)))?;
    StateVector::unnormalized(u.mul_vec(c0.amplitudes()))
}

/// Closed-form Fock-basis propagator for the parity/position pair, with the
/// spectral data computed once.
#[derive(Debug, Clone)]
pub struct FockPropagator<T: Real> {
    closed: AnticommutingExp<T>,
    dim: usize,
}

impl<T: Real> FockPropagator<T> {
    pub fn new(cfg: &LatticeConfig<T>) -> Result<Self> {
        let pair = StructuredPair::parity_position(cfg.dim)?;
        Ok(Self { closed: AnticommutingExp::new(&pair, cfg.omega, cfg.g)?, dim: cfg.dim })
    }

    pub fn unitary(&self, z: T) -> Matrix<T> {
        self.closed.at(z)
    }

    pub fn propagate(&self, c0: &StateVector<T>, z: T) -> Result<StateVector<T>> {
        if c0.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: c0.dim() });
        }
        StateVector::unnormalized(self.closed.apply(z, c0.amplitudes()))
    }
}

/// Same as [`propagate_fock`] but through the closed form.
pub fn propagate_fock_closed<T: Real>(c0: &StateVector<T>, cfg: &LatticeConfig<T>, z: T) -> Result<StateVector<T>> {
    FockPropagator::new(cfg)?.propagate(c0, z)
}

/// `|psi(x; z)|^2`, one row per `z`.
pub fn intensity_map_continuum<T: Real>(
    psi0: &WaveFunction<T>,
    cfg: &LatticeConfig<T>,
    z_grid: &[T],
) -> Result<Vec<Vec<T>>> {
    z_grid.par_iter().map(|&z| Ok(psi_evolved(psi0, cfg, z)?.intensity())).collect()
}

/// `|E_m(z)|^2` for `m = 0..=m_max`, one row per `z`.
pub fn intensity_map_waveguides<T: Real>(
    psi0: &WaveFunction<T>,
    cfg: &LatticeConfig<T>,
    z_grid: &[T],
    m_max: usize,
) -> Result<Vec<Vec<T>>> {
    check_resolution(&cfg.grid, m_max)?;
    let modes = mode_table(&cfg.grid, m_max)?;
    z_grid
        .par_iter()
        .map(|&z| Ok(project_modes(&psi_evolved(psi0, cfg, z)?, &modes).iter().map(|e| e.norm_sqr()).collect()))
        .collect()
}

/// `<c|H|c>` in the Fock basis.
pub fn energy<T: Real>(c: &StateVector<T>, cfg: &LatticeConfig<T>) -> Result<T> {
    Ok(c.expectation(&lattice_hamiltonian(cfg)?)?.re)
}
