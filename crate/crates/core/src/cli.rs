//! Command-line surface: `build`, `spectrum`, `pseudometric`, `metric`,
//! `hermitize`, `scan` and `verify`.
//!
//! Machine-readable output goes to stdout (or the `--json` / `--csv` path),
//! diagnostics to stderr. Usage errors exit with 2, computational failures
//! with 1.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dieudonne::{inertia, kernel_basis, residual, DEFAULT_RANK_TOL};
use crate::error::Error;
use crate::matrix::{MatrixJson, Meta, SquareMatrix};
use crate::metric::{closed_form_pseudometric, diagonal_metric, hermiticity_defect, hermitize, theta_family_k2, MetricResult};
use crate::model::{Couplings, GraphSpec};
use crate::scan::{parse_fixed, scan_reality_domain, Axis, ScanRequest};
use crate::spectral::{eigenvalues_with_tol, spectra_match, DEFAULT_REALITY_TOL};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "qgraph", version, about = "Metrics, pseudometrics and reality domains of non-Hermitian quantum-graph Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble a lattice Hamiltonian and print it as matrix JSON.
    Build(BuildArgs),
    /// Eigenvalues of a built lattice, or of matrix JSON read from stdin.
    Spectrum(SpectrumArgs),
    /// Closed-form pseudometric (L = 1) and the numerical basis of symmetric intertwiners.
    Pseudometric(LoopArgs),
    /// Diagonal metric of H(g, g; z), or the K = 2 family member with --alpha.
    Metric(MetricArgs),
    /// Dyson map and Hermitian image of H(g, g; z).
    Hermitize(MetricArgs),
    /// Reality-domain scan over up to three coupling axes.
    Scan(ScanArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Chain,
    Star,
    Loop,
}

#[derive(Debug, Args)]
pub struct CouplingArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
}

impl CouplingArgs {
    /// `h` defaults to `g`.
    fn couplings(&self) -> Couplings {
        Couplings::new(self.g, self.h.unwrap_or(self.g), self.z)
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    pub graph: Option<GraphKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long = "arm-len")]
    pub arm_len: Option<usize>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "L", default_value_t = 1)]
    pub l: usize,
    #[command(flatten)]
    pub couplings: CouplingArgs,
}

impl GraphArgs {
    fn spec(&self) -> Result<Option<GraphSpec>, CliError> {
        let need = |v: Option<usize>, flag: &str, kind: &str| v.ok_or_else(|| CliError::Usage(format!("--graph {kind} requires {flag}")));
        let spec = match self.graph {
            None => return Ok(None),
            Some(GraphKind::Chain) => GraphSpec::Chain { n_points: need(self.n, "--n", "chain")? },
            Some(GraphKind::Star) => GraphSpec::Star { q: need(self.q, "--q", "star")?, arm_len: need(self.arm_len, "--arm-len", "star")? },
            Some(GraphKind::Loop) => GraphSpec::Loop { k: need(self.k, "--K", "loop")?, l: self.l },
        };
        Ok(Some(spec))
    }

    fn meta(&self, spec: GraphSpec) -> Meta {
        let couplings = matches!(spec, GraphSpec::Loop { .. }).then(|| self.couplings.couplings());
        Meta { graph: Some(spec), couplings }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LoopArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "L", default_value_t = 1)]
    pub l: usize,
    #[command(flatten)]
    pub couplings: CouplingArgs,
    /// Relative singular-value cutoff for the null space.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "L", default_value_t = 1)]
    pub l: usize,
    #[command(flatten)]
    pub couplings: CouplingArgs,
    /// Mix in the pseudometric: Θ(α) = Θ_diag + α P (K = 2, L = 1 only).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "L", default_value_t = 1)]
    pub l: usize,
    /// name:min:max:steps with name in g, h, z, gamma, delta (repeatable, at most 3).
    #[arg(long = "axis", allow_hyphen_values = true)]
    pub axes: Vec<String>,
    /// name=val,... for the parameters that are not scanned (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub fixed: Option<String>,
    #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "K-max", default_value_t = 6)]
    pub k_max: usize,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Compute { op: &'static str, source: Error },
    Io(io::Error),
    Failed,
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

trait Op<T> {
    fn op(self, name: &'static str) -> Result<T, CliError>;
}

impl<T> Op<T> for crate::Result<T> {
    fn op(self, name: &'static str) -> Result<T, CliError> {
        self.map_err(|source| match source {
            Error::Size(_) | Error::InvalidParameter(_) | Error::GridTooLarge { .. } => {
                CliError::Usage(format!("{name}: {source}"))
            }
            _ => CliError::Compute { op: name, source },
        })
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(CliError::Compute { op, source }) => {
            let _ = writeln!(stderr, "error: {op} failed: {source}");
            1
        }
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
        Err(CliError::Failed) => 1,
    }
}

fn emit<S: Serialize>(value: &S, path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    match path {
        Some(p) => {
            let mut f = File::create(p)?;
            writeln!(f, "{text}")?;
        }
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

fn balanced_g(c: &CouplingArgs) -> Result<f64, CliError> {
    match c.h {
        Some(h) if h != c.g => Err(CliError::Usage(format!("metrics need h = g (got g = {}, h = {h})", c.g))),
        _ => Ok(c.g),
    }
}

fn metric_for(args: &MetricArgs) -> Result<MetricResult, CliError> {
    let g = balanced_g(&args.couplings)?;
    match args.alpha {
        Some(alpha) => {
            if args.k != 2 || args.l != 1 {
                return Err(CliError::Usage("--alpha is only defined for K = 2, L = 1".into()));
            }
            theta_family_k2(g, args.couplings.z, alpha).op("theta_family_k2")
        }
        None => {
            let theta = diagonal_metric(args.k, args.l, g, args.couplings.z).op("diagonal_metric")?;
            MetricResult::evaluate(theta, None).op("is_positive_definite")
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Build(args) => {
            let spec = args.graph.spec()?.ok_or_else(|| CliError::Usage("build requires --graph".into()))?;
            let m = spec.hamiltonian(&args.graph.couplings.couplings()).op("build")?;
            emit(&m.to_json(args.graph.meta(spec)), args.out.json.as_ref(), stdout)
        }
        Command::Spectrum(args) => {
            let m = match args.graph.spec()? {
                Some(spec) => spec.hamiltonian(&args.graph.couplings.couplings()).op("build")?,
                None => {
                    let mut text = String::new();
                    stdin.read_to_string(&mut text)?;
                    MatrixJson::from_json_str(&text).and_then(|j| j.to_matrix()).op("read matrix JSON")?
                }
            };
            let report = eigenvalues_with_tol(&m, args.tol).op("eigenvalues")?;
            emit(&report.to_json(), args.out.json.as_ref(), stdout)
        }
        Command::Pseudometric(args) => {
            let c = args.couplings.couplings();
            let spec = GraphSpec::Loop { k: args.k, l: args.l };
            let h = spec.hamiltonian(&c).op("build")?;
            let meta = Meta { graph: Some(spec), couplings: Some(c) };
            let closed_form = if args.l == 1 {
                let p = closed_form_pseudometric(args.k, &c).op("closed_form_pseudometric")?;
                let mut v = serde_json::to_value(p.to_json(meta.clone())).expect("matrix json");
                v["residual"] = json!(residual(&h, &p).op("residual")?);
                v["inertia"] = json!(inertia(&p, 1e-12).op("inertia")?.as_tuple());
                Some(v)
            } else {
                None
            };
            let basis = kernel_basis(&h, args.tol).op("kernel_basis")?;
            let out = json!({
                "meta": meta,
                "closed_form": closed_form,
                "kernel_dimension": basis.kernel_dimension,
                "gap_ratio": basis.gap_ratio,
                "rank_tol": basis.rank_tol,
                "basis": basis.to_json(),
            });
            emit(&out, args.out.json.as_ref(), stdout)
        }
        Command::Metric(args) => {
            let result = metric_for(&args)?;
            let c = Couplings::balanced(args.couplings.g, args.couplings.z);
            let meta = Meta { graph: Some(GraphSpec::Loop { k: args.k, l: args.l }), couplings: Some(c) };
            emit(&result.to_json(meta), args.out.json.as_ref(), stdout)
        }
        Command::Hermitize(args) => {
            let result = metric_for(&args)?;
            let c = Couplings::balanced(args.couplings.g, args.couplings.z);
            let spec = GraphSpec::Loop { k: args.k, l: args.l };
            let h = spec.hamiltonian(&c).op("build")?;
            let pair = hermitize(&h, &result.theta).op("hermitize")?;
            let before = eigenvalues_with_tol(&h, args.tol).op("eigenvalues")?;
            let after = eigenvalues_with_tol(&pair.hermitized, args.tol).op("eigenvalues")?;
            let matched = spectra_match(&before, &after, 1e-10).op("spectra_match")?;
            let meta = Meta { graph: Some(spec), couplings: Some(c) };
            let out = json!({
                "omega": pair.omega.to_json(meta.clone()),
                "hermitized": pair.hermitized.to_json(meta),
                "hermiticity_defect": hermiticity_defect(&pair.hermitized),
                "spectrum_distance": matched.distance,
            });
            emit(&out, args.out.json.as_ref(), stdout)
        }
        Command::Scan(args) => {
            let mut req = ScanRequest::new(args.k, args.l);
            req.tol = args.tol;
            for a in &args.axes {
                req.axes.push(a.parse::<Axis>().op("scan")?);
            }
            if let Some(f) = &args.fixed {
                req.fixed = parse_fixed(f).op("scan")?;
            }
            let scan = scan_reality_domain(&req).op("scan_reality_domain")?;
            if let Some(path) = &args.json {
                emit(&scan, Some(path), stdout)?;
            }
            match &args.csv {
                Some(path) => scan.write_csv(BufWriter::new(File::create(path)?))?,
                None if args.json.is_none() => scan.write_csv(&mut *stdout)?,
                None => {}
            }
            writeln!(stderr, "{} of {} points have a real spectrum", scan.real_count(), scan.points.len())?;
            Ok(())
        }
        Command::Verify(args) => {
            let checks = verify::run_all(args.k_max, args.seed).op("verify")?;
            for c in &checks {
                writeln!(stdout, "{}", c.line())?;
            }
            if checks.iter().all(|c| c.pass) {
                Ok(())
            } else {
                Err(CliError::Failed)
            }
        }
    }
}

/// Convenience for tests: the matrix a `build` invocation would print.
pub fn parse_matrix_output(text: &str) -> crate::Result<SquareMatrix> {
    MatrixJson::from_json_str(text.trim())?.to_matrix()
}
