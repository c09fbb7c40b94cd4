//! Named experiments with validated parameter schemas and presets, producing
//! tables plus a tolerance report. Double precision throughout.

pub mod output;
pub mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::fock::{
    coherent_state, default_coherent_dim, default_thermal_dim, mean_photon_number, thermal_state, TOL_TRUNC,
};
use crate::lattice::{
    initial_wavefunction, intensity_map_continuum, mode_table, project_modes, psi_evolved, FockPropagator, InitialKind,
    LatticeConfig, PositionGrid,
};
use crate::lindblad::{integrate_rk4, mean_photon_coherent_bessel, mean_photon_thermal, LindbladConfig};
use crate::timeseries::uniform_grid;

pub use output::{Cell, Format, RunManifest, Table};
pub use verify::{Property, Suite};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Upper index for the Bessel photon-number series.
const BESSEL_K_MAX: usize = 4000;
/// Fock dimension used only to satisfy the continuum configuration.
const CONTINUUM_DIM: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    DecayCoherent,
    DecayThermal,
    LatticeContinuum,
    LatticeWaveguides,
    Verify,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::DecayCoherent,
        Command::DecayThermal,
        Command::LatticeContinuum,
        Command::LatticeWaveguides,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::DecayCoherent => "decay-coherent",
            Command::DecayThermal => "decay-thermal",
            Command::LatticeContinuum => "lattice-continuum",
            Command::LatticeWaveguides => "lattice-waveguides",
            Command::Verify => "verify",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::param("command", format!("unknown command `{name}`")))
    }

    pub fn schema(self) -> &'static [ParamSpec] {
        match self {
            Command::DecayCoherent => COHERENT_SCHEMA,
            Command::DecayThermal => THERMAL_SCHEMA,
            Command::LatticeContinuum => CONTINUUM_SCHEMA,
            Command::LatticeWaveguides => WAVEGUIDE_SCHEMA,
            Command::Verify => VERIFY_SCHEMA,
        }
    }

    fn takes_init(self) -> bool {
        matches!(self, Command::LatticeContinuum | Command::LatticeWaveguides)
    }

    fn default_choice(self) -> Option<&'static str> {
        match self {
            Command::LatticeContinuum => Some("gaussian"),
            Command::LatticeWaveguides => Some("hermite:3"),
            Command::Verify => Some("all"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Positive,
    NonNegative,
    /// Non-negative integer.
    Count,
    /// Positive integer.
    CountPositive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: f64,
    pub help: &'static str,
}

impl ParamSpec {
    pub const fn new(name: &'static str, kind: ParamKind, default: f64, help: &'static str) -> Self {
        Self { name, kind, default, help }
    }

    fn check(&self, v: f64) -> Result<()> {
        let fail = |reason: &str| Err(Error::param(self.name, reason));
        if !v.is_finite() {
            return fail("must be finite");
        }
        match self.kind {
            ParamKind::Real => Ok(()),
            ParamKind::Positive if v <= 0.0 => fail("must be positive"),
            ParamKind::NonNegative if v < 0.0 => fail("must be non-negative"),
            ParamKind::Count | ParamKind::CountPositive if v.fract() != 0.0 || !(0.0..=1e9).contains(&v) => {
                fail("must be a non-negative integer")
            }
            ParamKind::CountPositive if v < 1.0 => fail("must be at least 1"),
            _ => Ok(()),
        }
    }
}

const COHERENT_SCHEMA: &[ParamSpec] = &[
    ParamSpec::new("alpha", ParamKind::NonNegative, 3.0, "coherent amplitude (real)"),
    ParamSpec::new("gamma", ParamKind::Positive, 0.45, "decay constant"),
    ParamSpec::new("t_max", ParamKind::Positive, 10.0, "final time"),
    ParamSpec::new("steps", ParamKind::CountPositive, 100.0, "output intervals"),
    ParamSpec::new("dim", ParamKind::Count, 0.0, "Fock truncation (0 = from tail rule)"),
    ParamSpec::new("dt", ParamKind::Positive, 1e-3, "RK4 step"),
];

const THERMAL_SCHEMA: &[ParamSpec] = &[
    ParamSpec::new("nbar0", ParamKind::NonNegative, 3.0, "initial mean photon number"),
    ParamSpec::new("gamma", ParamKind::Positive, 0.45, "decay constant"),
    ParamSpec::new("t_max", ParamKind::Positive, 10.0, "final time"),
    ParamSpec::new("steps", ParamKind::CountPositive, 100.0, "output intervals"),
    ParamSpec::new("dim", ParamKind::Count, 0.0, "Fock truncation (0 = from tail rule)"),
    ParamSpec::new("dt", ParamKind::Positive, 1e-3, "RK4 step"),
];

const CONTINUUM_SCHEMA: &[ParamSpec] = &[
    ParamSpec::new("omega", ParamKind::Real, 1.0, "alternating detuning"),
    ParamSpec::new("g", ParamKind::Positive, 0.45, "coupling scale"),
    ParamSpec::new("z_max", ParamKind::Positive, 10.0, "propagation length"),
    ParamSpec::new("z_steps", ParamKind::CountPositive, 100.0, "output intervals in z"),
    ParamSpec::new("half_width", ParamKind::Positive, 12.0, "grid half width"),
    ParamSpec::new("points", ParamKind::CountPositive, 1201.0, "grid points (odd)"),
];

const WAVEGUIDE_SCHEMA: &[ParamSpec] = &[
    ParamSpec::new("omega", ParamKind::Real, 1.0, "alternating detuning"),
    ParamSpec::new("g", ParamKind::Positive, 0.5, "coupling scale"),
    ParamSpec::new("z_max", ParamKind::Positive, 10.0, "propagation length"),
    ParamSpec::new("z_steps", ParamKind::CountPositive, 100.0, "output intervals in z"),
    ParamSpec::new("m_max", ParamKind::Count, 80.0, "highest waveguide index"),
    ParamSpec::new("half_width", ParamKind::Positive, 12.0, "grid half width"),
    ParamSpec::new("points", ParamKind::CountPositive, 2401.0, "grid points (odd)"),
    ParamSpec::new("dim", ParamKind::Count, 128.0, "Fock truncation of the cross-check"),
];

const VERIFY_SCHEMA: &[ParamSpec] =
    &[ParamSpec::new("fault", ParamKind::NonNegative, 0.0, "perturbation added to V (harness self-check)")];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub command: Command,
    pub choice: Option<&'static str>,
    pub values: &'static [(&'static str, f64)],
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig1a", command: Command::DecayCoherent, choice: None, values: &[("alpha", 3.0), ("gamma", 0.45)] },
    Preset { name: "fig1b", command: Command::DecayCoherent, choice: None, values: &[("alpha", 4.0), ("gamma", 0.9)] },
    Preset { name: "fig2a", command: Command::DecayThermal, choice: None, values: &[("nbar0", 3.0), ("gamma", 0.45)] },
    Preset { name: "fig2b", command: Command::DecayThermal, choice: None, values: &[("nbar0", 2.0), ("gamma", 0.6)] },
    Preset {
        name: "fig3a",
        command: Command::LatticeContinuum,
        choice: Some("gaussian"),
        values: &[("omega", 1.0), ("g", 0.45)],
    },
    Preset {
        name: "fig3b",
        command: Command::LatticeContinuum,
        choice: Some("hermite:1"),
        values: &[("omega", 1.0), ("g", 0.45)],
    },
    Preset {
        name: "fig4a",
        command: Command::LatticeWaveguides,
        choice: Some("hermite:3"),
        values: &[("omega", 1.0), ("g", 0.5)],
    },
    Preset {
        name: "fig4b",
        command: Command::LatticeWaveguides,
        choice: Some("superposition:3,6"),
        values: &[("omega", 1.0), ("g", 0.5)],
    },
    // sqrt(40): mean photon number 40. Spreads to m ~ 130, hence the wider,
    // finer grid and the larger Fock space.
    Preset {
        name: "fig4c",
        command: Command::LatticeWaveguides,
        choice: Some("coherent:6.324555320336759"),
        values: &[
            ("omega", 1.0),
            ("g", 0.5),
            ("m_max", 140.0),
            ("half_width", 16.0),
            ("points", 4001.0),
            ("dim", 256.0),
        ],
    },
];

pub fn find_preset(command: Command, name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name && p.command == command)
        .ok_or_else(|| Error::param("preset", format!("no preset `{name}` for {}", command.name())))
}

/// A fully resolved run request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub preset: Option<String>,
    pub parameters: BTreeMap<String, f64>,
    /// Initial field for lattice commands, suite name for `verify`.
    pub choice: Option<String>,
    pub format: Format,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Layers schema defaults, then the preset, then `entries` in order
    /// (later entries win). Keys are parameter names plus `preset`, `init`,
    /// `suite`, `format` and `seed`.
    pub fn resolve(command: Command, entries: &[(String, String)]) -> Result<Self> {
        let preset_name = entries.iter().rev().find(|(k, _)| k == "preset").map(|(_, v)| v.clone());
        let schema = command.schema();
        let mut parameters: BTreeMap<String, f64> = schema.iter().map(|p| (p.name.to_string(), p.default)).collect();
        let mut choice = command.default_choice().map(str::to_string);
        if let Some(name) = &preset_name {
            let preset = find_preset(command, name)?;
            for (k, v) in preset.values {
                parameters.insert(k.to_string(), *v);
            }
            if let Some(c) = preset.choice {
                choice = Some(c.to_string());
            }
        }
        let mut format = Format::Csv;
        let mut seed = 0u64;
        for (key, raw) in entries {
            let raw = raw.trim();
            match key.as_str() {
                "preset" => {}
                "init" if command.takes_init() => choice = Some(raw.to_string()),
                "suite" if command == Command::Verify => choice = Some(raw.to_string()),
                "format" => format = raw.parse()?,
                "seed" => seed = raw.parse().map_err(|_| Error::param("seed", "expected a non-negative integer"))?,
                name => {
                    let spec = schema
                        .iter()
                        .find(|p| p.name == name)
                        .ok_or_else(|| Error::param(name, format!("not a parameter of {}", command.name())))?;
                    let v: f64 = raw.parse().map_err(|_| Error::param(name, format!("`{raw}` is not a number")))?;
                    spec.check(v)?;
                    parameters.insert(name.to_string(), v);
                }
            }
        }
        for p in schema {
            p.check(parameters[p.name])?;
        }
        if command.takes_init() {
            choice.as_deref().unwrap_or_default().parse::<InitialKind<f64>>()?;
        }
        if command == Command::Verify {
            choice.as_deref().unwrap_or_default().parse::<Suite>()?;
        }
        Ok(Self { command, preset: preset_name, parameters, choice, format, seed })
    }

    pub fn param(&self, name: &str) -> f64 {
        self.parameters[name]
    }

    fn count(&self, name: &str) -> usize {
        self.parameters[name] as usize
    }

    /// Default file name: the preset name if any, else the command name.
    pub fn default_file_name(&self) -> String {
        let stem = self.preset.clone().unwrap_or_else(|| self.command.name().to_string());
        format!("{stem}.{}", self.format.extension())
    }

    pub fn default_output_path(&self, root: &Path) -> PathBuf {
        root.join(self.default_file_name())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command.name(),
            "preset": self.preset,
            "parameters": self.parameters,
            "choice": self.choice,
            "format": self.format.extension(),
            "seed": self.seed,
        })
    }
}

/// Data and diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub report: Vec<(String, f64)>,
    /// False when a verification property failed.
    pub passed: bool,
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    match spec.command {
        Command::DecayCoherent => decay_coherent(spec),
        Command::DecayThermal => decay_thermal(spec),
        Command::LatticeContinuum => lattice_continuum(spec),
        Command::LatticeWaveguides => lattice_waveguides(spec),
        Command::Verify => {
            let suite: Suite = spec.choice.as_deref().unwrap_or("all").parse()?;
            let props = verify::run_suite(suite, spec.seed, spec.param("fault"))?;
            Ok(verify::to_output(&props))
        }
    }
}

/// Result of [`execute`]: where the data went and whether properties held.
#[derive(Debug, Clone, PartialEq)]
pub struct Executed {
    pub data_path: PathBuf,
    pub manifest_path: PathBuf,
    pub passed: bool,
    pub report: Vec<(String, f64)>,
}

/// Runs `spec` and writes the data file plus its manifest sidecar. The data
/// file depends only on the spec; wall time goes to the sidecar alone.
pub fn execute(spec: &ExperimentSpec, path: &Path) -> Result<Executed> {
    let start = Instant::now();
    let out = run(spec)?;
    let mut manifest = RunManifest {
        spec: spec.to_value(),
        tool_version: TOOL_VERSION,
        seed: spec.seed,
        wall_time_seconds: None,
        tolerance_report: out.report.clone(),
    };
    let data = match spec.format {
        Format::Csv => out.table.to_csv(),
        Format::Json => out.table.to_json(&manifest.to_value(false)),
    };
    output::write_atomic(path, data.as_bytes())?;
    manifest.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    let sidecar = output::manifest_path(path);
    let mut text = serde_json::to_string_pretty(&manifest.to_value(true)).expect("finite manifest");
    text.push('\n');
    output::write_atomic(&sidecar, text.as_bytes())?;
    Ok(Executed { data_path: path.to_path_buf(), manifest_path: sidecar, passed: out.passed, report: out.report })
}

/// Process exit status for an error: 2 for bad input, 3 for numerical
/// guards.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. }
        | Error::InvalidDimension { .. }
        | Error::OutOfRange { .. }
        | Error::DimensionMismatch { .. }
        | Error::Shape(_)
        | Error::AsymmetricGrid
        | Error::NonUniformGrid
        | Error::WrongRelation { .. }
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn decay_table(times: &[f64], analytic: &[f64], rk4: &[f64]) -> (Table, f64) {
    let mut table = Table::new(&["t", "nbar_analytic", "nbar_rk4"]);
    let mut dev = 0.0f64;
    for ((t, a), r) in times.iter().zip(analytic).zip(rk4) {
        dev = dev.max((a - r).abs());
        table.push(vec![Cell::Num(*t), Cell::Num(*a), Cell::Num(*r)]);
    }
    (table, dev)
}

fn rk4_photon_numbers(
    rho0: &DensityMatrix<f64>,
    cfg: &LindbladConfig<f64>,
    times: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, f64)> {
    let traj = integrate_rk4(rho0, cfg, times, dt)?;
    let drift = traj.iter().map(|r| (r.as_matrix().trace().re - 1.0).abs()).fold(0.0, f64::max);
    Ok((traj.iter().map(|r| mean_photon_number(r.as_matrix())).collect(), drift))
}

fn decay_coherent(spec: &ExperimentSpec) -> Result<RunOutput> {
    let alpha = Complex64::new(spec.param("alpha"), 0.0);
    let gamma = spec.param("gamma");
    let dim = match spec.count("dim") {
        0 => default_coherent_dim(alpha, TOL_TRUNC),
        d => d,
    };
    let cfg = LindbladConfig::new(gamma, dim)?;
    let times = uniform_grid(spec.param("t_max"), spec.count("steps"));
    let rho0 = DensityMatrix::from_pure(&coherent_state(alpha, dim)?);
    let analytic: Vec<f64> =
        times.par_iter().map(|&t| mean_photon_coherent_bessel(alpha, gamma, t, BESSEL_K_MAX)).collect::<Result<_>>()?;
    let (rk4, drift) = rk4_photon_numbers(&rho0, &cfg, &times, spec.param("dt"))?;
    let (table, dev) = decay_table(&times, &analytic, &rk4);
    let report = vec![
        ("dim".into(), dim as f64),
        ("max_abs_analytic_minus_rk4".into(), dev),
        ("max_rk4_trace_drift".into(), drift),
    ];
    Ok(RunOutput { table, report, passed: true })
}

fn decay_thermal(spec: &ExperimentSpec) -> Result<RunOutput> {
    let nbar0 = spec.param("nbar0");
    let gamma = spec.param("gamma");
    let dim = match spec.count("dim") {
        0 => default_thermal_dim(nbar0, TOL_TRUNC),
        d => d,
    };
    let cfg = LindbladConfig::new(gamma, dim)?;
    let times = uniform_grid(spec.param("t_max"), spec.count("steps"));
    let rho0 = thermal_state(nbar0, dim)?;
    let analytic: Vec<f64> = times.iter().map(|&t| mean_photon_thermal(nbar0, gamma, t)).collect();
    let (rk4, drift) = rk4_photon_numbers(&rho0, &cfg, &times, spec.param("dt"))?;
    let (table, dev) = decay_table(&times, &analytic, &rk4);
    let report = vec![
        ("dim".into(), dim as f64),
        ("max_abs_analytic_minus_rk4".into(), dev),
        ("max_rk4_trace_drift".into(), drift),
    ];
    Ok(RunOutput { table, report, passed: true })
}

fn lattice_setup(spec: &ExperimentSpec, dim: usize) -> Result<(LatticeConfig<f64>, InitialKind<f64>)> {
    let grid = PositionGrid::symmetric(spec.param("half_width"), spec.count("points"))?;
    let cfg = LatticeConfig::new(spec.param("omega"), spec.param("g"), dim, grid)?;
    let kind = spec.choice.as_deref().unwrap_or_default().parse()?;
    Ok((cfg, kind))
}

fn lattice_continuum(spec: &ExperimentSpec) -> Result<RunOutput> {
    let (cfg, kind) = lattice_setup(spec, CONTINUUM_DIM)?;
    let psi0 = initial_wavefunction(kind, &cfg.grid)?;
    let zs = uniform_grid(spec.param("z_max"), spec.count("z_steps"));
    let map = intensity_map_continuum(&psi0, &cfg, &zs)?;
    let nodes = cfg.grid.nodes();
    let center = nodes.len() / 2;
    let mut table = Table::new(&["z", "x", "intensity"]);
    let (mut norm_defect, mut center_max, mut argmax_abs) = (0.0f64, 0.0f64, 0.0f64);
    for (z, row) in zs.iter().zip(&map) {
        norm_defect = norm_defect.max((cfg.grid.simpson(row) - 1.0).abs());
        center_max = center_max.max(row[center]);
        let (imax, _) = row.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        argmax_abs = argmax_abs.max(nodes[imax].abs());
        for (x, v) in nodes.iter().zip(row) {
            table.push(vec![Cell::Num(*z), Cell::Num(*x), Cell::Num(*v)]);
        }
    }
    let report = vec![
        ("max_norm_defect".into(), norm_defect),
        ("max_center_intensity".into(), center_max),
        ("max_abs_row_argmax_x".into(), argmax_abs),
    ];
    Ok(RunOutput { table, report, passed: true })
}

fn lattice_waveguides(spec: &ExperimentSpec) -> Result<RunOutput> {
    let m_max = spec.count("m_max");
    let dim = spec.count("dim");
    if dim <= m_max {
        return Err(Error::param("dim", "Fock cross-check needs dim > m_max"));
    }
    let (cfg, kind) = lattice_setup(spec, dim)?;
    let psi0 = initial_wavefunction(kind, &cfg.grid)?;
    let c0 = kind.fock_coefficients(dim)?;
    let zs = uniform_grid(spec.param("z_max"), spec.count("z_steps"));
    let guard = crate::lattice::resolved_order(&cfg.grid);
    if m_max > guard {
        return Err(Error::ResolutionGuard {
            spacing: cfg.grid.spacing(),
            limit: 0.1 / ((m_max + 1) as f64).sqrt(),
            order: m_max,
        });
    }
    let modes = mode_table(&cfg.grid, m_max)?;
    let fock = FockPropagator::new(&cfg)?;
    let rows: Vec<(Vec<f64>, f64)> = zs
        .par_iter()
        .map(|&z| {
            let e = project_modes(&psi_evolved(&psi0, &cfg, z)?, &modes);
            let c = fock.propagate(&c0, z)?;
            let dev = e.iter().zip(c.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            Ok((e.iter().map(|v| v.norm_sqr()).collect(), dev))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["z", "m", "intensity"]);
    let (mut mass_defect, mut fock_dev) = (0.0f64, 0.0f64);
    for (z, (row, dev)) in zs.iter().zip(&rows) {
        mass_defect = mass_defect.max((row.iter().sum::<f64>() - 1.0).abs());
        fock_dev = fock_dev.max(*dev);
        for (m, v) in row.iter().enumerate() {
            table.push(vec![Cell::Num(*z), Cell::from(m), Cell::Num(*v)]);
        }
    }
    let mean_m0 = rows[0].0.iter().enumerate().map(|(m, p)| m as f64 * p).sum::<f64>();
    let report = vec![
        ("max_mass_defect".into(), mass_defect),
        ("max_abs_position_minus_fock".into(), fock_dev),
        ("mean_m_at_launch".into(), mean_m0),
    ];
    Ok(RunOutput { table, report, passed: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(kv: &[(&str, &str)]) -> Vec<(String, String)> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn layering_order() {
        let s = ExperimentSpec::resolve(Command::DecayCoherent, &entries(&[("preset", "fig1b")])).unwrap();
        assert_eq!(s.param("alpha"), 4.0);
        assert_eq!(s.param("t_max"), 10.0);
        let s =
            ExperimentSpec::resolve(Command::DecayCoherent, &entries(&[("preset", "fig1b"), ("alpha", "2")])).unwrap();
        assert_eq!(s.param("alpha"), 2.0);
        assert_eq!(s.param("gamma"), 0.9);
        let s = ExperimentSpec::resolve(Command::LatticeWaveguides, &entries(&[("preset", "fig4c")])).unwrap();
        assert_eq!(s.choice.as_deref(), Some("coherent:6.324555320336759"));
    }

    #[test]
    fn schema_violations_are_usage_errors() {
        for bad in [
            vec![("gamma", "-1")],
            vec![("steps", "2.5")],
            vec![("bogus", "1")],
            vec![("preset", "fig3a")],
            vec![("alpha", "abc")],
            vec![("format", "xml")],
        ] {
            let err = ExperimentSpec::resolve(Command::DecayCoherent, &entries(&bad)).unwrap_err();
            assert_eq!(exit_code(&err), 2, "{bad:?}: {err}");
        }
        let err = ExperimentSpec::resolve(Command::LatticeContinuum, &entries(&[("init", "plane")])).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn sqrt40_preset_literal() {
        assert_eq!(40f64.sqrt().to_string(), "6.324555320336759");
    }

    #[test]
    fn thermal_preset_short_run() {
        let s = ExperimentSpec::resolve(
            Command::DecayThermal,
            &entries(&[("preset", "fig2b"), ("t_max", "1"), ("steps", "4")]),
        )
        .unwrap();
        let out = run(&s).unwrap();
        assert_eq!(out.table.rows.len(), 5);
        assert_eq!(out.table.rows[0][1], Cell::Num(2.0));
        assert!(out.report[1].1 < 1e-4);
    }

    #[test]
    fn execute_writes_data_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let s = ExperimentSpec::resolve(
            Command::LatticeContinuum,
            &entries(&[
                ("preset", "fig3b"),
                ("z_steps", "3"),
                ("points", "301"),
                ("half_width", "8"),
                ("format", "json"),
            ]),
        )
        .unwrap();
        let path = s.default_output_path(dir.path());
        assert!(path.ends_with("fig3b.json"));
        let a = execute(&s, &path).unwrap();
        let first = std::fs::read(&a.data_path).unwrap();
        execute(&s, &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        let manifest: Value = serde_json::from_slice(&std::fs::read(&a.manifest_path).unwrap()).unwrap();
        assert!(manifest["wall_time_seconds"].is_number());
        let data: Value = serde_json::from_slice(&first).unwrap();
        assert_eq!(data["rows"].as_array().unwrap().len(), 4 * 301);
        assert_eq!(data["manifest"]["spec"]["preset"], json!("fig3b"));
    }
}
