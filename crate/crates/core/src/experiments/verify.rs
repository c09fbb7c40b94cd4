//! Property suites behind `opexp verify`. Each property reports the largest
//! deviation seen and the tolerance it was held to.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{expectation, fock_state, sg_lowering_op, thermal_state, vacuum_projector, DensityMatrix};
use crate::identities::sinc_sqrt;
use crate::identities::{
    commutator, power_sum, random_anticommuting_pair, random_nilcross_pair, split_powers, AnticommutingExp,
    StructuredPair,
};
use crate::lattice::{
    energy, field_amplitudes, initial_wavefunction, lattice_hamiltonian, mode_table, propagate_fock, psi_evolved,
    FockPropagator, InitialKind, LatticeConfig, PositionGrid,
};
use crate::linalg::{expm, Matrix};
use crate::lindblad::{
    apply_j_with, apply_l, apply_l_pow, evolve_analytic, integrate_rk4, lindblad_rhs, lindblad_rhs_dense,
    LindbladConfig,
};
use crate::random::{random_density, random_hermitian};

use super::output::{Cell, Table};
use super::RunOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Lindblad,
    Lattice,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "lindblad" => Ok(Suite::Lindblad),
            "lattice" => Ok(Suite::Lattice),
            "all" => Ok(Suite::All),
            _ => Err(Error::param("suite", "expected identities, lindblad, lattice or all")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub suite: &'static str,
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Property {
    fn new(suite: &'static str, name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        Self { suite, name, max_deviation, tolerance }
    }

    /// NaN deviations fail.
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// `max |x - y| / max(1, max |y|)`: absolute for O(1) entries, relative once
/// matrix powers grow.
pub fn scaled_deviation(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    x.max_abs_diff(y) / y.max_abs().max(1.0)
}

pub fn run_suite(suite: Suite, seed: u64, fault: f64) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        out.extend(identities(seed)?);
    }
    if matches!(suite, Suite::Lindblad | Suite::All) {
        out.extend(lindblad(seed, fault)?);
    }
    if matches!(suite, Suite::Lattice | Suite::All) {
        out.extend(lattice()?);
    }
    Ok(out)
}

pub fn to_output(props: &[Property]) -> RunOutput {
    let mut table = Table::new(&["suite", "property", "max_deviation", "tolerance", "passed"]);
    for p in props {
        table.push(vec![
            Cell::Text(p.suite.into()),
            Cell::Text(p.name.into()),
            Cell::Num(p.max_deviation),
            Cell::Num(p.tolerance),
            Cell::Bool(p.passed()),
        ]);
    }
    let failed = props.iter().filter(|p| !p.passed()).count();
    RunOutput {
        table,
        report: vec![("properties".into(), props.len() as f64), ("failed".into(), failed as f64)],
        passed: failed == 0,
    }
}

pub fn identities(seed: u64) -> Result<Vec<Property>> {
    const S: &str = "identities";
    let (mut nil, mut split, mut nil_comm, mut anti_comm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..200u64 {
        let dim = 2 + (i % 7) as usize;
        let k = ((i / 7) % 7) as u32;
        let pair = random_nilcross_pair::<f64>(dim, seed.wrapping_add(i))?;
        let direct = (pair.a() + pair.b()).pow(k);
        nil = nil.max(scaled_deviation(&power_sum(&pair, k)?, &direct));
        let ab = pair.a() * pair.b();
        nil_comm = nil_comm.max(scaled_deviation(&commutator(pair.a(), pair.b()), &ab));

        let n = ((i / 7) % 5) as u32;
        let (omega, g) = (0.5 + 0.3 * (i % 5) as f64, 0.2 + 0.4 * (i % 3) as f64);
        let pair = random_anticommuting_pair::<f64>(dim, seed.wrapping_add(1000 + i))?;
        let (even, odd) = split_powers(&pair, omega, g, n)?;
        let h = pair.combination(omega, g);
        split = split.max(scaled_deviation(&even, &h.pow(2 * n))).max(scaled_deviation(&odd, &h.pow(2 * n + 1)));
        let ab2 = (pair.a() * pair.b()).scale_real(2.0);
        anti_comm = anti_comm.max(scaled_deviation(&commutator(pair.a(), pair.b()), &ab2));
    }
    let mut closed = 0.0f64;
    for dim in [8, 32, 64] {
        let pair = StructuredPair::<f64>::parity_position(dim)?;
        let prop = AnticommutingExp::new(&pair, 1.0, 0.45)?;
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let oracle = expm(&prop.generator().scale(Complex64::new(0.0, -t)))?;
            closed = closed.max(prop.at(t).max_abs_diff(&oracle));
        }
    }
    Ok(vec![
        Property::new(S, "nilcross_power_sum", nil, 1e-11),
        Property::new(S, "anticommuting_split_powers", split, 1e-11),
        Property::new(S, "nilcross_commutator_form", nil_comm, 1e-12),
        Property::new(S, "anticommuting_commutator_form", anti_comm, 1e-12),
        Property::new(S, "closed_form_exponential", closed, 1e-9),
    ])
}

/// `fault` is added to every entry of `V` in the dense checks, so a nonzero
/// value must make this suite fail.
pub fn lindblad(seed: u64, fault: f64) -> Result<Vec<Property>> {
    const S: &str = "lindblad";
    let gamma = 0.45;
    let perturbed = |dim: usize| -> Result<Matrix<f64>> {
        let mut v = sg_lowering_op::<f64>(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                v[(i, j)].re += fault;
            }
        }
        Ok(v)
    };
    let v = perturbed(8)?;
    let j = |rho: &Matrix<f64>| apply_j_with(&v, rho, gamma);

    let (mut nilcross, mut lift, mut lpow, mut rewrite, mut trace) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..100u64 {
        let rho = random_hermitian::<f64>(8, seed.wrapping_add(i));
        nilcross = nilcross.max(j(&apply_l(&rho, gamma))?.max_abs());

        let mut jk = vec![rho.clone()];
        for k in 1..=5 {
            jk.push(j(&jk[k - 1])?);
        }
        let mut direct = rho.clone();
        for k in 1..=5usize {
            direct = &j(&direct)? + &apply_l(&direct, gamma);
            let mut identity = jk[k].clone();
            for m in 1..=k {
                identity = &identity + &apply_l_pow(&jk[k - m], gamma, m as u32);
            }
            lift = lift.max(scaled_deviation(&identity, &direct));
        }

        let mut iter = rho.clone();
        for m in 1..=6u32 {
            iter = apply_l(&iter, gamma);
            lpow = lpow.max(scaled_deviation(&apply_l_pow(&rho, gamma, m), &iter));
        }

        let dens = random_density::<f64>(8, seed.wrapping_add(500 + i)).into_matrix();
        let dense = lindblad_rhs_dense(&v, &dens, gamma)?;
        rewrite = rewrite.max(dense.max_abs_diff(&lindblad_rhs(&dens, gamma)));
        trace = trace.max(dense.trace().norm());
    }
    let vacuum = lindblad_rhs_dense(&v, &vacuum_projector(8)?, gamma)?.max_abs();

    let (dim, nbar0) = (128, 3.0);
    let v_big = perturbed(dim)?;
    let th = thermal_state(nbar0, dim)?.into_matrix();
    let ratio = nbar0 / (nbar0 + 1.0);
    let mut eigen = 0.0f64;
    let mut sandwich = th.clone();
    let vd = v_big.adjoint();
    for k in 1..=5 {
        sandwich = &(&v_big * &sandwich) * &vd;
        eigen = eigen.max(sandwich.max_abs_diff(&th.scale_real(ratio.powi(k))));
    }

    let cfg = LindbladConfig::new(gamma, 8)?;
    let rho0 = DensityMatrix::from_pure(&fock_state(2, 8)?);
    let times = [0.5, 1.0, 2.0];
    let traj = integrate_rk4(&rho0, &cfg, &times, 1e-3)?;
    let (mut cross, mut min_eig) = (0.0f64, f64::INFINITY);
    for (t, r) in times.iter().zip(&traj) {
        cross = cross.max(r.as_matrix().max_abs_diff(evolve_analytic(&rho0, *t, &cfg)?.as_matrix()));
        min_eig = min_eig.min(r.min_eigenvalue()?);
    }

    Ok(vec![
        Property::new(S, "jump_after_vacuum_map_vanishes", nilcross, 1e-13),
        Property::new(S, "lifted_power_identity", lift, 1e-11),
        Property::new(S, "vacuum_map_power_formula", lpow, 1e-12),
        Property::new(S, "rewritten_generator", rewrite, 1e-12),
        Property::new(S, "trace_preservation", trace, 1e-12),
        Property::new(S, "vacuum_stationary", vacuum, 1e-15),
        Property::new(S, "thermal_eigendensity", eigen, 1e-9),
        Property::new(S, "analytic_vs_rk4_fock2", cross, 1e-6),
        Property::new(S, "rk4_positivity", (-min_eig).max(0.0), 1e-7),
    ])
}

pub fn lattice() -> Result<Vec<Property>> {
    const S: &str = "lattice";
    let default_grid = PositionGrid::symmetric(12.0, 1201)?;

    let mut dual = 0.0f64;
    for dim in [32, 64] {
        for g in [0.45, 0.5] {
            let cfg = LatticeConfig::new(1.0, g, dim, default_grid.clone())?;
            let h = lattice_hamiltonian(&cfg)?;
            let prop = FockPropagator::new(&cfg)?;
            for z in [0.1, 1.0, 2.0, 5.0, 10.0] {
                let oracle = expm(&h.scale(Complex64::new(0.0, -z)))?;
                dual = dual.max(prop.unitary(z).max_abs_diff(&oracle));
            }
        }
    }

    let fine = PositionGrid::symmetric(12.0, 2401)?;
    let cfg = LatticeConfig::new(1.0, 0.5, 128, fine.clone())?;
    let kind = InitialKind::HermiteGauss(3);
    let psi0 = initial_wavefunction(kind, &fine)?;
    let c0 = kind.fock_coefficients(128)?;
    let (mut routes, mut mass, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for z in [0.0, 2.5, 5.0, 7.5, 10.0] {
        let e = field_amplitudes(&psi0, &cfg, z, 80)?;
        let c = propagate_fock(&c0, &cfg, z)?;
        routes = routes.max(e.iter().zip(c.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        mass = mass.max((e.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0).abs());
        norm = norm.max((psi_evolved(&psi0, &cfg, z)?.norm_sqr() - 1.0).abs());
    }

    let mut energy_drift = 0.0f64;
    let small = LatticeConfig::new(1.0, 0.5, 64, default_grid.clone())?;
    let c3 = kind.fock_coefficients(64)?;
    let e0 = energy(&c3, &small)?;
    let prop = FockPropagator::new(&small)?;
    for z in [1.0, 2.5, 5.0, 10.0] {
        energy_drift = energy_drift.max((energy(&prop.propagate(&c3, z)?, &small)? - e0).abs());
    }

    let cont = LatticeConfig::new(1.0, 0.45, 16, default_grid.clone())?;
    let odd = initial_wavefunction(InitialKind::HermiteGauss(1), &default_grid)?;
    let center = default_grid.len() / 2;
    let mut node = 0.0f64;
    for step in 0..=20 {
        let z = 0.5 * step as f64;
        node = node.max(psi_evolved(&odd, &cont, z)?.samples()[center].norm_sqr());
    }

    // Real even input: |psi(x)|^2 = psi0(x)^2 (1 + 2 w g x S^2) with
    // S = sin(zW)/W, and |psi_w(-x)| = |psi_{-w}(x)|.
    let gauss = initial_wavefunction(InitialKind::Gaussian, &default_grid)?;
    let flipped = LatticeConfig { omega: -1.0, ..cont.clone() };
    let (mut law, mut mirror) = (0.0f64, 0.0f64);
    let nodes = default_grid.nodes();
    let n = nodes.len();
    for z in [0.7, 3.0, 9.1] {
        let a = psi_evolved(&gauss, &cont, z)?;
        let b = psi_evolved(&gauss, &flipped, z)?;
        for (i, &x) in nodes.iter().enumerate() {
            let s = sinc_sqrt(z, 1.0 + 0.45 * 0.45 * x * x);
            let expected = gauss.samples()[i].norm_sqr() * (1.0 + 2.0 * 0.45 * x * s * s);
            law = law.max((a.samples()[i].norm_sqr() - expected).abs());
            mirror = mirror.max((a.samples()[n - 1 - i].norm() - b.samples()[i].norm()).abs());
        }
    }

    let modes = mode_table(&default_grid, 20)?;
    let mut ortho = 0.0f64;
    for (m, pm) in modes.iter().enumerate() {
        for (k, pk) in modes.iter().enumerate() {
            let f: Vec<f64> = pm.iter().zip(pk).map(|(a, b)| a * b).collect();
            ortho = ortho.max((default_grid.simpson(&f) - if m == k { 1.0 } else { 0.0 }).abs());
        }
    }

    // Sanity check of the energy functional itself on a Fock state.
    let h = lattice_hamiltonian(&small)?;
    let diag = expectation(&h, &DensityMatrix::from_pure(&c3))?.re - h[(3, 3)].re;

    Ok(vec![
        Property::new(S, "closed_form_vs_expm", dual, 1e-10),
        Property::new(S, "position_vs_fock_amplitudes", routes, 1e-6),
        Property::new(S, "mode_mass_conservation", mass, 1e-6),
        Property::new(S, "position_norm_conservation", norm, 1e-6),
        Property::new(S, "energy_conservation", energy_drift, 1e-8),
        Property::new(S, "odd_input_keeps_node", node, 1e-6),
        Property::new(S, "even_input_intensity_law", law, 1e-12),
        Property::new(S, "detuning_mirror_relation", mirror, 1e-12),
        Property::new(S, "mode_orthonormality", ortho, 1e-8),
        Property::new(S, "fock_energy_functional", diag.abs(), 1e-15),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn identities_suite_passes_and_is_deterministic() {
        let a = identities(7).unwrap();
        assert!(a.iter().all(Property::passed), "{a:?}");
        assert_eq!(a, identities(7).unwrap());
    }

    #[test]
    fn lindblad_suite_detects_fault() {
        let clean = lindblad(1, 0.0).unwrap();
        assert!(clean.iter().all(Property::passed), "{clean:?}");
        let broken = lindblad(1, 1e-3).unwrap();
        assert!(!broken.iter().all(Property::passed));
    }
}
