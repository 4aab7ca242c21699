//! `freeqm`: coefficient tables, evolutions and verification from the command line.
//!
//! Exit status is 0 on success, 1 when a computation or verification fails and
//! 2 when the configuration is invalid.

mod output;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use freeqm::evolution::{
    char_function, heisenberg_aplus_p2, heisenberg_aplus_p_block, heisenberg_oracle,
    kinetic_tail_index, level_tail_index, matrix_element, evolve_h1, evolve_p, evolve_p2,
    evolve_x, CoeffKind, CoeffTable, EvolvedState, Generator,
};
use freeqm::fock::{vacuum_moment, Observable};
use freeqm::hilbert::hilbert_mu_pv;
use freeqm::combinatorics::catalan;
use freeqm::oracle::{truncation_level, truncation_level_for, GeneratorBound};
use freeqm::orthopoly::{phi_all, quadrature_rule, t_all};
use freeqm::{verify, Error};
use serde_json::json;

use output::{Artifact, Cell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    P,
    X,
    P2,
    H1,
}

impl From<GeneratorArg> for Generator {
    fn from(g: GeneratorArg) -> Self {
        match g {
            GeneratorArg::P => Generator::P,
            GeneratorArg::X => Generator::X,
            GeneratorArg::P2 => Generator::P2,
            GeneratorArg::H1 => Generator::H1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// `H_μ Φ_n = T_{n+1}` on a grid of interior points.
    Hilbert,
    /// Vacuum moments of `X` and `P` against Catalan numbers.
    Catalan,
}

#[derive(Debug, Parser)]
#[command(name = "freeqm", version, about = "Quantum mechanics of the semicircle law")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value = "p", global = true)]
    generator: GeneratorArg,
    /// Times, comma separated or repeated.
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true, global = true)]
    t: Vec<f64>,
    /// Source level.
    #[arg(long, default_value_t = 0, global = true)]
    k: usize,
    /// Highest output level; chosen from the tail bound when omitted.
    #[arg(long, global = true)]
    l_max: Option<usize>,
    #[arg(long, default_value_t = 4, global = true)]
    m_max: usize,
    #[arg(long, default_value_t = 4, global = true)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-10, allow_hyphen_values = true, global = true)]
    tol: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, global = true)]
    omega: f64,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Normal-order coefficient table `c_{m,n}(t)`.
    Coeffs,
    /// Amplitudes of `e^{itG}Φ_k`.
    Evolve,
    /// `⟨Φ_k, e^{itG}Φ_k⟩`.
    Char,
    /// Block of `a⁺_t − a⁺` under `P` or `P²`.
    Heisenberg,
    /// Run every invariant suite.
    Verify,
    /// Printable identity tables.
    Table {
        #[arg(long, value_enum, default_value = "hilbert")]
        which: TableKind,
    },
}

enum Failure {
    Config(String),
    Compute(Error),
    Verification(Artifact),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = std::result::Result<Artifact, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = validate(&cli) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let (artifact, code) = match run(&cli) {
        Ok(a) => (Some(a), 0),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(Failure::Verification(a)) => (Some(a), 1),
    };
    if let Some(a) = artifact {
        if let Err(e) = emit(&cli, &a) {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}

fn validate(cli: &Cli) -> std::result::Result<(), String> {
    if !(cli.tol > 0.0) {
        return Err(format!("--tol must be positive, got {}", cli.tol));
    }
    if !cli.omega.is_finite() {
        return Err("--omega must be finite".into());
    }
    if let Some(l) = cli.l_max {
        if l < cli.k {
            return Err(format!("--l-max {l} is below --k {}", cli.k));
        }
    }
    let needs_t = !matches!(cli.command, Command::Verify | Command::Table { .. });
    if needs_t && cli.t.is_empty() {
        return Err("at least one --t value is required".into());
    }
    if cli.t.iter().any(|t| !t.is_finite()) {
        return Err("--t values must be finite".into());
    }
    Ok(())
}

fn config_echo(cli: &Cli) -> serde_json::Value {
    let command = match cli.command {
        Command::Coeffs => "coeffs".to_string(),
        Command::Evolve => "evolve".into(),
        Command::Char => "char".into(),
        Command::Heisenberg => "heisenberg".into(),
        Command::Verify => "verify".into(),
        Command::Table { which } => format!("table-{}", format!("{which:?}").to_lowercase()),
    };
    json!({
        "command": command,
        "generator": format!("{:?}", Generator::from(cli.generator)),
        "t_values": cli.t,
        "k": cli.k,
        "l_max": cli.l_max,
        "m_max": cli.m_max,
        "n_max": cli.n_max,
        "tol": cli.tol,
        "omega": cli.omega,
        "seed": cli.seed,
    })
}

fn emit(cli: &Cli, a: &Artifact) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Csv => a.write_csv(&mut out),
        Format::Json => a.write_json(config_echo(cli), &mut out),
    }?;
    out.flush()
}

fn run(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Coeffs => coeffs(cli),
        Command::Evolve => evolve(cli),
        Command::Char => char_rows(cli),
        Command::Heisenberg => heisenberg(cli),
        Command::Verify => run_verify(cli),
        Command::Table { which } => table(which),
    }
}

fn coeffs(cli: &Cli) -> Outcome {
    let kind = match cli.generator {
        GeneratorArg::P => CoeffKind::MomentumI,
        GeneratorArg::X => CoeffKind::PositionI,
        GeneratorArg::P2 => CoeffKind::KineticI2,
        GeneratorArg::H1 => {
            return Err(Failure::Config("coeffs needs --generator p, x or p2".into()))
        }
    };
    let mut a = Artifact::new(&["m", "n", "t", "re", "im", "method_agreement"]);
    let mut worst: f64 = 0.0;
    for &t in &cli.t {
        let table = CoeffTable::build(kind, t, cli.m_max, cli.n_max, cli.tol)?;
        for (&(m, n), z) in &table.entries {
            let r = table.agreement[&(m, n)];
            worst = worst.max(r);
            a.row(vec![m.into(), n.into(), t.into(), z.re.into(), z.im.into(), r.into()]);
        }
    }
    a.residual("max_method_agreement", worst);
    Ok(a)
}

fn evolve_one(cli: &Cli, t: f64) -> freeqm::Result<EvolvedState> {
    let k = cli.k;
    match cli.generator {
        GeneratorArg::P => evolve_p(k, t, cli.l_max.unwrap_or(level_tail_index(t, k, cli.tol)), cli.tol),
        GeneratorArg::X => evolve_x(k, t, cli.l_max.unwrap_or(level_tail_index(t, k, cli.tol)), cli.tol),
        GeneratorArg::P2 => {
            evolve_p2(k, t, cli.l_max.unwrap_or(kinetic_tail_index(t, k, cli.tol)), cli.tol)
        }
        GeneratorArg::H1 => evolve_h1(k, t, cli.omega),
    }
}

fn evolve(cli: &Cli) -> Outcome {
    let mut a = Artifact::new(&["l", "re", "im"]);
    for &t in &cli.t {
        let s = evolve_one(cli, t)?;
        for (l, z) in s.amplitudes.iter().enumerate() {
            a.row(vec![l.into(), z.re.into(), z.im.into()]);
        }
        let name = if cli.t.len() == 1 {
            "norm_defect".to_string()
        } else {
            format!("norm_defect(t={t:?})")
        };
        a.residual(name, s.norm_defect());
    }
    Ok(a)
}

fn char_rows(cli: &Cli) -> Outcome {
    let gen = Generator::from(cli.generator);
    let mut a = Artifact::new(&["t", "re", "im"]);
    for &t in &cli.t {
        let z = match gen {
            Generator::P | Generator::X if cli.k == 0 => char_function(gen, t)?,
            Generator::H1 => evolve_h1(cli.k, t, cli.omega)?.amplitudes[cli.k],
            _ => matrix_element(gen, cli.k, cli.k, t)?,
        };
        a.row(vec![t.into(), z.re.into(), z.im.into()]);
    }
    Ok(a)
}

fn heisenberg(cli: &Cli) -> Outcome {
    let gen = Generator::from(cli.generator);
    let dim = cli.m_max.max(cli.n_max) + 1;
    let mut a = Artifact::new(&["t", "m", "n", "re", "im"]);
    let mut worst: f64 = 0.0;
    for &t in &cli.t {
        let (block, n_oracle) = match gen {
            Generator::P => (
                heisenberg_aplus_p_block(t, dim, cli.omega, cli.tol)?,
                truncation_level(t, dim + 2, cli.tol),
            ),
            Generator::P2 => (
                heisenberg_aplus_p2(t, dim, cli.omega, cli.tol)?,
                truncation_level_for(GeneratorBound::PENTADIAGONAL, t, dim + 2, cli.tol),
            ),
            _ => return Err(Failure::Config("heisenberg needs --generator p or p2".into())),
        };
        let oracle = heisenberg_oracle(gen, t, n_oracle, 1e-15)?;
        for m in 0..=cli.m_max {
            for n in 0..=cli.n_max {
                let z = block[(m, n)];
                worst = worst.max((z - oracle[(m, n)] * cli.omega).norm());
                a.row(vec![t.into(), m.into(), n.into(), z.re.into(), z.im.into()]);
            }
        }
    }
    a.residual("max_oracle_difference", worst);
    Ok(a)
}

fn run_verify(cli: &Cli) -> Outcome {
    let report = verify::run(cli.tol, cli.seed)?;
    let mut a = Artifact::new(&["module", "identity", "max_residual", "tol", "passed"]);
    for c in &report.checks {
        a.row(vec![
            c.module.into(),
            c.identity.clone().into(),
            c.max_residual.into(),
            c.tol.into(),
            c.passed().into(),
        ]);
    }
    let failed = report.failures().count();
    a.residual("failed_checks", failed as f64);
    for c in report.failures() {
        eprintln!(
            "FAIL [{}] {}: residual {:e} > {:e}",
            c.module, c.identity, c.max_residual, c.tol
        );
    }
    if report.passed() {
        Ok(a)
    } else {
        Err(Failure::Verification(a))
    }
}

fn table(which: TableKind) -> Outcome {
    match which {
        TableKind::Hilbert => {
            let rule = quadrature_rule(2048);
            let mut a = Artifact::new(&["n", "x", "hilbert_pv", "t_next", "residual"]);
            let mut worst: f64 = 0.0;
            for n in 0..=8 {
                for i in 0..7 {
                    let x = -1.5 + 0.5 * i as f64 + 0.01;
                    let pv = hilbert_mu_pv(|y| phi_all(n, y)[n], x, &rule)?;
                    let tn = t_all(n + 1, x)[n + 1];
                    worst = worst.max((pv - tn).abs());
                    a.row(vec![n.into(), x.into(), pv.into(), tn.into(), (pv - tn).abs().into()]);
                }
            }
            a.residual("max_residual", worst);
            Ok(a)
        }
        TableKind::Catalan => {
            let mut a = Artifact::new(&["n", "catalan", "x_moment", "p_moment"]);
            let mut worst = 0i64;
            for n in 0..=10 {
                let c = catalan(n as u32)? as i64;
                let x = vacuum_moment(2 * n, Observable::X, 2 * n + 2)?;
                let p = vacuum_moment(2 * n, Observable::P, 2 * n + 2)?;
                worst = worst.max((x - c).abs()).max((p - c).abs());
                a.row(vec![
                    Cell::Int(n as i64),
                    Cell::Int(c),
                    Cell::Int(x),
                    Cell::Int(p),
                ]);
            }
            a.residual("max_residual", worst as f64);
            Ok(a)
        }
    }
}
