//! Command-line front end of the `cuspidal` binary.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for bad input
//! (unreadable or malformed files, invalid flags). Results go to stdout or
//! `--out`; diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::puiseux_from_jump;
use crate::brieskorn::reduce;
use crate::equivalence::{
    cusp_torus_equivalent, invariant_report, one_dof_equivalent, parabolic_equivalent, BaseMap, CompareOptions,
    EquivalenceMode,
};
use crate::flows::{
    pullback_checks, torus_point, transport_map, verify_lattice, Bump, LatticeCheck, LatticeMethod, PeriodLattice,
    Point, PullbackCheck, SymplecticModel, Transported,
};
use crate::gk::Tolerance;
use crate::model::{Density, FibrationModel, ModelKind, Stratum};
use crate::quadrature::{action_chart, GridSpec};
use crate::specfun::constants;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "cuspidal", version, about = "Symplectic invariants of parabolic orbits and cuspidal tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output format (csv is available for `actions` only).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A single system: `--model` is a model JSON file or a kind name
/// (`cusp_local`, `cusp_compact`, `one_dof`, `node`); `--density` replaces its density.
#[derive(Debug, Clone, clap::Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub density: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a density to `α(H) + β(H) y` and cross-check against quadrature.
    Decompose {
        density: PathBuf,
        /// Skip the quadrature cross-check.
        #[arg(long)]
        no_check: bool,
    },
    /// Action variables on a grid of base points.
    Actions {
        #[command(flatten)]
        system: SystemArgs,
        /// Grid size as `NHxNL`.
        #[arg(long, default_value = "9x9")]
        grid: String,
        #[arg(long, allow_hyphen_values = true)]
        h_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: Option<String>,
        /// Keep only rows of this stratum.
        #[arg(long)]
        stratum: Option<String>,
    },
    /// Verify an equivalence between two systems through a base map.
    Compare {
        sys1: String,
        sys2: String,
        /// Base map JSON `{"h": poly, "f": poly}` in `(H, λ)`; identity by default.
        #[arg(long)]
        phi: Option<PathBuf>,
        /// Range searched for the μ-shift, `K1..K2`.
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        k_range: String,
        /// One-degree comparisons: `h-preserving` or `fibration-preserving`.
        #[arg(long, default_value = "fibration-preserving")]
        mode: String,
    },
    /// Invariants of one system.
    Invariants {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Period lattice of a torus and a return check of its basis.
    Lattice {
        #[command(flatten)]
        system: SystemArgs,
        /// Base point `H,λ`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        stratum: String,
        /// `exact` or a finite-difference step (e.g. `1e-4`).
        #[arg(long, default_value = "1e-4")]
        method: String,
        /// Multiplier of the basis vectors before flowing (0.5 gives half-vectors).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Return distance threshold.
        #[arg(long, default_value_t = 1e-6)]
        return_tol: f64,
    },
    /// Fiberwise transport map between two systems, with pullback residuals.
    Transport {
        sys1: String,
        sys2: String,
        /// JSON array of phase points `[x, y, λ, φ]`.
        #[arg(long)]
        points: PathBuf,
        /// Section offset `x₀` (defaults to the first system's).
        #[arg(long)]
        section: Option<f64>,
        /// Step of the difference Jacobian.
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Input(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// On-disk form of a system: a model plus an optional bump deformation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub kind: ModelKind,
    #[serde(default)]
    pub density: Option<Density>,
    #[serde(default)]
    pub x0: Option<f64>,
    #[serde(default)]
    pub mu_shift: Option<i64>,
    #[serde(default)]
    pub bump: Option<Bump>,
}

impl SystemFile {
    fn model(&self) -> FibrationModel {
        let mut m = FibrationModel::new(self.kind, self.density.clone().unwrap_or(Density::constant(1.0)));
        if let Some(x0) = self.x0 {
            m.x0 = x0;
        }
        if let Some(k) = self.mu_shift {
            m.mu_shift = k;
        }
        m
    }
}

fn load_system(spec: &str, density: Option<&Path>) -> CliResult<SystemFile> {
    let mut sys = match ModelKind::deserialize(serde_json::Value::String(spec.to_string())) {
        Ok(kind) => SystemFile { kind, density: None, x0: None, mu_shift: None, bump: None },
        Err(_) => parse_json(Path::new(spec))?,
    };
    if let Some(p) = density {
        sys.density = Some(parse_json(p)?);
    }
    sys.model().validate()?;
    Ok(sys)
}

fn load_model(args: &SystemArgs) -> CliResult<FibrationModel> {
    Ok(load_system(&args.model, args.density.as_deref())?.model())
}

fn symplectic(sys: &SystemFile) -> CliResult<SymplecticModel> {
    Ok(match sys.bump {
        Some(b) => SymplecticModel::deformed(sys.model(), b)?,
        None => SymplecticModel::new(sys.model())?,
    })
}

fn parse_pair<T: FromStr>(s: &str, sep: &str, what: &str) -> CliResult<(T, T)> {
    let bad = || CliError::Input(format!("{what}: expected `A{sep}B`, got {s:?}"));
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_stratum(s: &str) -> CliResult<Stratum> {
    Stratum::from_str(s).map_err(CliError::from)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn require_json(format: Option<Format>, cmd: &str) -> CliResult<()> {
    match format {
        Some(Format::Csv) => Err(CliError::Input(format!("{cmd} writes JSON only"))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct LatticeOutput {
    h: f64,
    lambda: f64,
    stratum: Stratum,
    point: Point,
    lattice: PeriodLattice,
    scale: f64,
    checks: Vec<LatticeCheck>,
    returned: bool,
}

#[derive(Serialize)]
struct TransportOutput {
    points: Vec<Transported>,
    checks: Vec<PullbackCheck>,
    max_pullback: f64,
    max_fiber: f64,
}

/// Runs one parsed command and returns the text to emit.
pub fn execute(cli: &Cli) -> CliResult<String> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let tol = Tolerance::new(cli.tol * 1e-3, cli.tol);
    match &cli.command {
        Command::Decompose { density, no_check } => {
            require_json(cli.format, "decompose")?;
            let f: Density = parse_json(density)?;
            let pair = reduce(&f)?;
            if !no_check {
                let m = FibrationModel::new(ModelKind::OneDof, f);
                let fit = puiseux_from_jump(&m, 4, 30, Tolerance::tight())?;
                let c = constants();
                let worst = (0..3).fold(0.0f64, |w, k| {
                    let da = (fit.triple.a.coeff(k) - c.c0 * pair.alpha.coeff(k)).abs();
                    let db = (fit.triple.b.coeff(k) - c.c1 * pair.beta.coeff(k)).abs();
                    w.max(da).max(db)
                });
                eprintln!("quadrature cross-check: max |a_k − C0·α_k|, |b_k − C1·β_k| (k ≤ 2) = {worst:.3e}");
            }
            Ok(json(&pair))
        }
        Command::Actions { system, grid, h_range, lambda_range, stratum } => {
            let model = load_model(system)?;
            let (nh, nl) = parse_pair::<usize>(grid, "x", "--grid")?;
            let mut spec = GridSpec::default_for(&model, nh, nl);
            if let Some(r) = h_range {
                spec.h_range = parse_pair(r, ",", "--h-range")?;
            }
            if let Some(r) = lambda_range {
                spec.lambda_range = parse_pair(r, ",", "--lambda-range")?;
            }
            let mut chart = action_chart(&model, &spec, tol);
            if let Some(s) = stratum {
                chart = chart.filter(parse_stratum(s)?);
            }
            Ok(match cli.format {
                Some(Format::Json) => json(&chart),
                _ => chart.to_csv(),
            })
        }
        Command::Compare { sys1, sys2, phi, k_range, mode } => {
            require_json(cli.format, "compare")?;
            let s1 = load_system(sys1, None)?.model();
            let s2 = load_system(sys2, None)?.model();
            if s1.kind != s2.kind {
                return Err(CliError::Input(format!("cannot compare {:?} with {:?}", s1.kind, s2.kind)));
            }
            let phi = match phi {
                Some(p) => parse_json(p)?,
                None => BaseMap::identity(),
            };
            let opts = CompareOptions::default();
            match s1.kind {
                ModelKind::OneDof | ModelKind::Node => {
                    let mode = match mode.as_str() {
                        "h-preserving" => EquivalenceMode::HPreserving,
                        "fibration-preserving" => EquivalenceMode::FibrationPreserving,
                        _ => return Err(CliError::Input(format!("unknown --mode {mode:?}"))),
                    };
                    Ok(json(&one_dof_equivalent(&s1.density, &s2.density, mode)?))
                }
                ModelKind::CuspLocal => Ok(json(&parabolic_equivalent(&s1, &s2, &phi, &opts, tol)?)),
                ModelKind::CuspCompact => {
                    let k = parse_pair::<i64>(k_range, "..", "--k-range")?;
                    Ok(json(&cusp_torus_equivalent(&s1, &s2, &phi, k, &opts, tol)?))
                }
            }
        }
        Command::Invariants { system } => {
            require_json(cli.format, "invariants")?;
            Ok(json(&invariant_report(&load_model(system)?, tol)?))
        }
        Command::Lattice { system, point, stratum, method, scale, return_tol } => {
            require_json(cli.format, "lattice")?;
            let sys = load_system(&system.model, system.density.as_deref())?;
            let model = sys.model();
            let (h, lambda) = parse_pair::<f64>(point, ",", "--point")?;
            let stratum = parse_stratum(stratum)?;
            let method = if method == "exact" {
                LatticeMethod::Exact
            } else {
                let step = method
                    .parse()
                    .map_err(|_| CliError::Input(format!("--method: expected `exact` or a step, got {method:?}")))?;
                LatticeMethod::FiniteDifference { step }
            };
            let lattice = crate::flows::period_lattice(&model, h, lambda, stratum, method, tol)?;
            let sm = symplectic(&sys)?;
            let p = torus_point(&model, h, lambda, stratum)?;
            let checks = lattice
                .basis
                .iter()
                .map(|row| verify_lattice(&sm, &p, [scale * row[0], scale * row[1]], *return_tol))
                .collect::<crate::Result<Vec<_>>>()?;
            let returned = checks.iter().all(|c| c.returned);
            Ok(json(&LatticeOutput { h, lambda, stratum, point: p, lattice, scale: *scale, checks, returned }))
        }
        Command::Transport { sys1, sys2, points, section, step } => {
            require_json(cli.format, "transport")?;
            let a = symplectic(&load_system(sys1, None)?)?;
            let b = symplectic(&load_system(sys2, None)?)?;
            let pts: Vec<Point> = parse_json(points)?;
            let mapped = pts
                .iter()
                .map(|q| transport_map(&a, &b, q, *section))
                .collect::<crate::Result<Vec<_>>>()?;
            let checks = pullback_checks(&a, &b, &pts, *section, *step)?;
            let max_pullback = checks.iter().fold(0.0f64, |m, c| m.max(c.pullback));
            let max_fiber = checks.iter().fold(0.0f64, |m, c| m.max(c.fiber));
            Ok(json(&TransportOutput { points: mapped, checks, max_pullback, max_fiber }))
        }
    }
}

/// Parses `args`, runs the command, writes the result and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cuspidal: {e}");
            e.exit_code()
        }
    }
}
