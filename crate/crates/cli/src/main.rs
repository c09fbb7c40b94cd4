use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches};
use opexp::experiments::{self, Command, ExperimentSpec, PRESETS};
use opexp::Error;

fn cli() -> clap::Command {
    let mut app = clap::Command::new("opexp")
        .version(experiments::TOOL_VERSION)
        .about("Structured-pair operator exponentials: photon decay and waveguide-lattice experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for command in Command::ALL {
        app = app.subcommand(subcommand(command));
    }
    app
}

fn subcommand(command: Command) -> clap::Command {
    let presets: Vec<&str> = PRESETS.iter().filter(|p| p.command == command).map(|p| p.name).collect();
    let mut sub = clap::Command::new(command.name())
        .about(about(command))
        .arg(Arg::new("out").long("out").value_name("PATH").value_parser(value_parser!(PathBuf)).help("output file"))
        .arg(Arg::new("format").long("format").value_parser(["csv", "json"]).help("output format [default: csv]"))
        .arg(
            Arg::new("threads")
                .long("threads")
                .value_name("N")
                .value_parser(value_parser!(usize))
                .help("worker threads"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("N")
                .value_parser(value_parser!(u64))
                .help("random seed [default: 0]"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("key = value file; command-line flags take precedence"),
        )
        .arg(
            Arg::new("out_dir")
                .long("out-dir")
                .value_name("DIR")
                .env("OPEXP_OUT_DIR")
                .value_parser(value_parser!(PathBuf))
                .help("directory for the default output file"),
        );
    if !presets.is_empty() {
        sub = sub.arg(Arg::new("preset").long("preset").value_parser(presets).help("figure parameter set"));
    }
    match command {
        Command::LatticeContinuum | Command::LatticeWaveguides => {
            sub = sub.arg(
                Arg::new("init")
                    .long("init")
                    .value_name("KIND")
                    .help("gaussian | hermite:N | superposition:J,K | coherent:RE[,IM]"),
            );
        }
        Command::Verify => {
            sub = sub.arg(
                Arg::new("suite")
                    .long("suite")
                    .value_parser(["identities", "lindblad", "lattice", "all"])
                    .help("property suite [default: all]"),
            );
        }
        _ => {}
    }
    for p in command.schema() {
        sub = sub.arg(
            Arg::new(p.name)
                .long(p.name.replace('_', "-"))
                .value_name("VALUE")
                .allow_negative_numbers(true)
                .action(ArgAction::Set)
                .help(format!("{} [default: {}]", p.help, p.default)),
        );
    }
    sub
}

fn about(command: Command) -> &'static str {
    match command {
        Command::DecayCoherent => "Photon-number decay of a coherent state: Bessel series vs RK4",
        Command::DecayThermal => "Photon-number decay of a thermal state: closed form vs RK4",
        Command::LatticeContinuum => "Intensity |psi(x; z)|^2 in the position representation",
        Command::LatticeWaveguides => "Waveguide intensities |E_m(z)|^2",
        Command::Verify => "Run the property suites and write a pass/fail report",
    }
}

/// `key = value` lines; `#` starts a comment.
fn read_config(path: &Path) -> Result<Vec<(String, String)>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::InvalidParameter {
            name: format!("{}:{}", path.display(), n + 1),
            reason: "expected key = value".into(),
        })?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

struct Invocation {
    spec: ExperimentSpec,
    out: PathBuf,
    threads: Option<usize>,
}

fn invocation(command: Command, m: &ArgMatches) -> Result<Invocation, Error> {
    let mut entries = match m.get_one::<PathBuf>("config") {
        Some(p) => read_config(p)?,
        None => Vec::new(),
    };
    let mut out: Option<PathBuf> = None;
    let mut threads: Option<usize> = None;
    // Options only the front end understands may also come from the file.
    entries.retain(|(k, v)| match k.as_str() {
        "out" => {
            out = Some(PathBuf::from(v));
            false
        }
        "threads" => {
            threads = v.parse().ok();
            false
        }
        _ => true,
    });
    for key in ["preset", "init", "suite", "format"] {
        if let Ok(Some(v)) = m.try_get_one::<String>(key) {
            entries.push((key.to_string(), v.clone()));
        }
    }
    if let Some(seed) = m.get_one::<u64>("seed") {
        entries.push(("seed".into(), seed.to_string()));
    }
    for p in command.schema() {
        if let Some(v) = m.get_one::<String>(p.name) {
            entries.push((p.name.to_string(), v.clone()));
        }
    }
    let spec = ExperimentSpec::resolve(command, &entries)?;
    if let Some(p) = m.get_one::<PathBuf>("out") {
        out = Some(p.clone());
    }
    if let Some(&n) = m.get_one::<usize>("threads") {
        threads = Some(n);
    }
    if threads == Some(0) {
        return Err(Error::InvalidParameter { name: "threads".into(), reason: "must be at least 1".into() });
    }
    let out = out.unwrap_or_else(|| {
        let root = m.get_one::<PathBuf>("out_dir").cloned().unwrap_or_else(|| PathBuf::from("."));
        spec.default_output_path(&root)
    });
    Ok(Invocation { spec, out, threads })
}

fn run(command: Command, m: &ArgMatches) -> Result<bool, Error> {
    let inv = invocation(command, m)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = inv.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Io(e.to_string()))?;
    let done = pool.install(|| experiments::execute(&inv.spec, &inv.out))?;
    println!("wrote {}", done.data_path.display());
    println!("manifest {}", done.manifest_path.display());
    for (k, v) in &done.report {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            println!("{k} = {v}");
        } else {
            println!("{k} = {v:e}");
        }
    }
    if !done.passed {
        eprintln!("one or more properties failed; see {}", done.data_path.display());
    }
    Ok(done.passed)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = Command::from_name(name).expect("registered subcommand");
    match run(command, sub) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiments::exit_code(&e) as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        cli().debug_assert();
    }

    #[test]
    fn config_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# comment\nalpha = 2.5\n\nt-max=3 # trailing\n").unwrap();
        assert_eq!(read_config(&p).unwrap(), vec![("alpha".into(), "2.5".into()), ("t_max".into(), "3".into())]);
        std::fs::write(&p, "alpha 2\n").unwrap();
        assert!(read_config(&p).is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "preset = fig1b\nalpha = 2\ngamma = 0.3\nout = x.csv\n").unwrap();
        let m = cli()
            .try_get_matches_from(["opexp", "decay-coherent", "--config", p.to_str().unwrap(), "--alpha", "1.5"])
            .unwrap();
        let inv = invocation(Command::DecayCoherent, m.subcommand_matches("decay-coherent").unwrap()).unwrap();
        assert_eq!(inv.spec.param("alpha"), 1.5);
        assert_eq!(inv.spec.param("gamma"), 0.3);
        assert_eq!(inv.spec.preset.as_deref(), Some("fig1b"));
        assert_eq!(inv.out, PathBuf::from("x.csv"));
    }
}
