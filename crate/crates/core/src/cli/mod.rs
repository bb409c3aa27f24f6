//! The `defquad` command line.
//!
//! Exit status: 0 on success, 2 for usage and parameter-domain errors, 1 for
//! numerical failures, I/O errors and failed verification.

pub mod figure;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::deformation::{Deformation, DeformationSpec};
use crate::error::Error;
use crate::polynomials::{check_grid, eval_grid};
use crate::spectral::{ground_density, support_estimate, DensityMethod, DensityOptions};
use crate::wavefunction::{eigenstate_coefficients, eigenstate_residual, ProbabilityDensity, WavefunctionSample};

use output::{emit, Format, Table};

pub const DEFAULT_LEVELS: usize = 400;
pub const DEFAULT_POINTS: usize = 801;

#[derive(Debug, Parser)]
#[command(name = "defquad", version, about = "Quadrature eigenstates and wavefunctions of f-deformed oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deformed numbers [0] ..= [n].
    Brackets {
        #[command(flatten)]
        spec: SpecArgs,
        /// Highest bracket index.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Orthonormal polynomials J_0 ..= J_n on a grid.
    Polys {
        #[command(flatten)]
        spec: SpecArgs,
        /// Highest polynomial order.
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normalized probability density |Psi_n|^2 (n = 0 is the orthogonality weight).
    Density {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        truncation: LevelArgs,
        /// Excitation level.
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Quadrature wavefunction Psi_n(x) = exp(-i n theta) J_n(x) Psi_0(x).
    Wavefunction {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        truncation: LevelArgs,
        /// Excitation level.
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Quadrature phase in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fock coefficients of the quadrature eigenstate |x_theta>.
    Eigenstate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        truncation: LevelArgs,
        /// Eigenvalue x_theta.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
        /// Quadrature phase in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write the figure datasets as fig<panel>.<format> files.
    Figure {
        /// Panel to write.
        #[arg(long, value_enum, default_value_t = Panel::All)]
        which: Panel,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
        #[command(flatten)]
        truncation: LevelArgs,
        /// Grid points on [-4, 4].
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// File format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run invariant suites and print a JSON report.
    Verify {
        /// Suite to run.
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        /// Deformation family [default: harmonic, mathq 0.9 and 0.5, physicsq 1.1 and 1.9, pq (1.3,0.5) and (1.9,0.5)].
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Deformation parameter q [default: none; required for mathq, physicsq and pq].
        #[arg(long)]
        q: Option<f64>,
        /// Deformation parameter p [default: none; required for pq].
        #[arg(long)]
        p: Option<f64>,
        /// Truncation used by the algebra suite.
        #[arg(long, default_value_t = verify::DEFAULT_ALGEBRA_DIM)]
        dim: usize,
        /// Report path [default: standard output].
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Harmonic,
    Mathq,
    Physicsq,
    Pq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Panel {
    #[value(name = "1a")]
    P1a,
    #[value(name = "1b")]
    P1b,
    #[value(name = "2a")]
    P2a,
    #[value(name = "2b")]
    P2b,
    #[value(name = "3a")]
    P3a,
    #[value(name = "3b")]
    P3b,
    All,
}

impl Panel {
    fn names(self) -> Vec<&'static str> {
        match self {
            Panel::P1a => vec!["1a"],
            Panel::P1b => vec!["1b"],
            Panel::P2a => vec!["2a"],
            Panel::P2b => vec!["2b"],
            Panel::P3a => vec!["3a"],
            Panel::P3b => vec!["3b"],
            Panel::All => figure::PANELS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodChoice {
    /// stieltjes for bounded or slowly growing brackets, smoothed-gauss otherwise
    Auto,
    Stieltjes,
    SmoothedGauss,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Deformation family.
    #[arg(long, value_enum, default_value_t = Kind::Harmonic)]
    kind: Kind,
    /// Deformation parameter q [default: none; required for mathq, physicsq and pq].
    #[arg(long)]
    q: Option<f64>,
    /// Deformation parameter p [default: none; required for pq].
    #[arg(long)]
    p: Option<f64>,
}

impl SpecArgs {
    fn deformation(&self) -> Result<Deformation, CliError> {
        deformation_from(self.kind, self.q, self.p)
    }
}

#[derive(Debug, Args)]
struct LevelArgs {
    /// Truncation N (number of Fock levels).
    #[arg(long, env = "DEFQUAD_LEVELS", default_value_t = DEFAULT_LEVELS)]
    levels: usize,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid start [default: -max(|lo|,|hi|) of the support estimate if bounded, else -4].
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    /// Grid end [default: max(|lo|,|hi|) of the support estimate if bounded, else 4].
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Density method.
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    method: MethodChoice,
    /// Broadening [default: 1e-3 for stieltjes, median core node spacing for smoothed-gauss].
    #[arg(long)]
    eta: Option<f64>,
}

impl MethodArgs {
    fn options(&self) -> DensityOptions {
        let method = match self.method {
            MethodChoice::Auto => None,
            MethodChoice::Stieltjes => Some(DensityMethod::Stieltjes),
            MethodChoice::SmoothedGauss => Some(DensityMethod::SmoothedGauss),
        };
        DensityOptions { method, eta: self.eta }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path [default: standard output].
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Default half-width of density grids when the support is unbounded.
const UNBOUNDED_HALF_WIDTH: f64 = 4.0;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

fn deformation_from(kind: Kind, q: Option<f64>, p: Option<f64>) -> Result<Deformation, CliError> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Usage(format!("--{name} is required for --kind {}", kind_name(kind))))
    };
    let spec = match kind {
        Kind::Harmonic => {
            if q.is_some() || p.is_some() {
                return Err(CliError::Usage("--kind harmonic takes no --q or --p".into()));
            }
            DeformationSpec::Harmonic
        }
        Kind::Mathq | Kind::Physicsq if p.is_some() => {
            return Err(CliError::Usage(format!("--p is only used with --kind pq, not {}", kind_name(kind))));
        }
        Kind::Mathq => DeformationSpec::MathQ { q: need("q", q)? },
        Kind::Physicsq => DeformationSpec::PhysicsQ { q: need("q", q)? },
        Kind::Pq => DeformationSpec::PQ { p: need("p", p)?, q: need("q", q)? },
    };
    Ok(Deformation::new(spec)?)
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Harmonic => "harmonic",
        Kind::Mathq => "mathq",
        Kind::Physicsq => "physicsq",
        Kind::Pq => "pq",
    }
}

fn build_grid(def: &Deformation, levels: usize, args: &GridArgs) -> Result<Vec<f64>, CliError> {
    if args.points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {}", args.points)));
    }
    let (lo, hi) = match (args.xmin, args.xmax) {
        (Some(lo), Some(hi)) => (lo, hi),
        (lo, hi) => {
            let half = match support_estimate(def, levels.max(8)) {
                Ok(s) if s.bounded => s.lo.abs().max(s.hi.abs()),
                Ok(_) => UNBOUNDED_HALF_WIDTH,
                Err(e) => return Err(e.into()),
            };
            (lo.unwrap_or(-half), hi.unwrap_or(half))
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!("grid bounds must be finite with xmin < xmax, got [{lo}, {hi}]")));
    }
    let grid: Vec<f64> = (0..args.points).map(|i| lo + (hi - lo) * i as f64 / (args.points - 1) as f64).collect();
    check_grid(&grid)?;
    Ok(grid)
}

fn write_table(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    let text = table.render(out.format);
    emit(&text, out.output.as_deref()).map_err(|e| match &out.output {
        Some(p) => io_error(p, e),
        None => CliError::Io(format!("cannot write to standard output: {e}")),
    })
}

fn spec_meta(table: &mut Table, def: &Deformation) {
    table.meta("spec", def.spec().to_string()).meta("Q", def.deformation_q());
}

fn brackets(spec: &SpecArgs, n: usize, out: &OutputArgs) -> Result<(), CliError> {
    let def = spec.deformation()?;
    let mut table = Table::new(["n", "bracket"]);
    spec_meta(&mut table, &def);
    table.push(vec![0.0, 0.0]);
    if n > 0 {
        let seq = def.bracket_sequence(n)?;
        for (k, v) in seq.values.iter().enumerate().skip(1) {
            table.push(vec![k as f64, *v]);
        }
    }
    write_table(&table, out)
}

fn polys(spec: &SpecArgs, n: usize, grid: &GridArgs, out: &OutputArgs) -> Result<(), CliError> {
    let def = spec.deformation()?;
    let grid = build_grid(&def, DEFAULT_LEVELS, grid)?;
    let rows = eval_grid(&def, &grid, n)?;
    let mut columns = vec!["x".to_string()];
    columns.extend((0..=n).map(|k| format!("J{k}")));
    let mut table = Table::new(columns);
    spec_meta(&mut table, &def);
    table.meta("order", n);
    for row in rows {
        if let Some(k) = row.overflow_at {
            return Err(CliError::Numeric(format!("overflow: J_{k}({}) exceeds 1e300", row.x)));
        }
        let mut cells = vec![row.x];
        cells.extend(row.values);
        table.push(cells);
    }
    write_table(&table, out)
}

fn density_meta(table: &mut Table, d: &ProbabilityDensity) {
    spec_meta(table, &d.deformation);
    table
        .meta("level", d.level)
        .meta("levels", d.levels)
        .meta("method", d.method.as_str())
        .meta("eta", d.eta)
        .meta("normalization", d.normalization);
}

fn warn_normalization(d: &ProbabilityDensity) {
    if !d.normalization_ok() {
        eprintln!("warning: normalization factor {} of |Psi_{}|^2 lies outside [0.98, 1.02]", d.normalization, d.level);
    }
}

fn density(
    spec: &SpecArgs,
    levels: usize,
    n: usize,
    grid: &GridArgs,
    method: &MethodArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let def = spec.deformation()?;
    let grid = build_grid(&def, levels, grid)?;
    let ground = ground_density(&def, levels, &grid, &method.options())?;
    let d = ProbabilityDensity::from_density(&ground, n)?;
    let mut table = Table::new(["x", "density"]);
    density_meta(&mut table, &d);
    table.meta("regime", format!("{:?}", ground.regime).to_lowercase());
    for (x, v) in d.grid.iter().zip(&d.density) {
        table.push(vec![*x, *v]);
    }
    warn_normalization(&d);
    write_table(&table, out)
}

#[allow(clippy::too_many_arguments)]
fn wavefunction(
    spec: &SpecArgs,
    levels: usize,
    n: usize,
    theta: f64,
    grid: &GridArgs,
    method: &MethodArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let def = spec.deformation()?;
    let grid = build_grid(&def, levels, grid)?;
    let ground = ground_density(&def, levels, &grid, &method.options())?;
    let psi = WavefunctionSample::from_density(&ground, n, theta)?;
    let mut table = Table::new(["x", "re", "im", "probability"]);
    spec_meta(&mut table, &def);
    table
        .meta("level", n)
        .meta("theta", theta)
        .meta("levels", levels)
        .meta("method", ground.method.as_str())
        .meta("eta", ground.eta);
    for (x, v) in psi.grid.iter().zip(&psi.values) {
        table.push(vec![*x, v.re, v.im, v.norm_sqr()]);
    }
    write_table(&table, out)
}

fn eigenstate(
    spec: &SpecArgs,
    levels: usize,
    x: f64,
    theta: f64,
    method: &MethodArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let def = spec.deformation()?;
    if !(x.is_finite() && theta.is_finite()) {
        return Err(CliError::Usage("--x and --theta must be finite".into()));
    }
    let coeffs = eigenstate_coefficients(&def, x, theta, levels, &method.options())?;
    let residual = eigenstate_residual(&def, x, theta, levels)?;
    let mut table = Table::new(["n", "re", "im"]);
    spec_meta(&mut table, &def);
    table.meta("x", x).meta("theta", theta).meta("levels", levels).meta("residual", residual);
    for (k, c) in coeffs.iter().enumerate() {
        table.push(vec![k as f64, c.re, c.im]);
    }
    write_table(&table, out)
}

fn figures(which: Panel, outdir: &Path, levels: usize, points: usize, format: Format) -> Result<(), CliError> {
    fs::create_dir_all(outdir).map_err(|e| io_error(outdir, e))?;
    for name in which.names() {
        let panel = figure::figure_panel(name, levels, points)?;
        for (_, d) in &panel.curves {
            warn_normalization(d);
        }
        let path = figure::panel_path(outdir, name, format);
        fs::write(&path, panel.to_table().render(format)).map_err(|e| io_error(&path, e))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run_verify(
    suite: verify::Suite,
    kind: Option<Kind>,
    q: Option<f64>,
    p: Option<f64>,
    dim: usize,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let specs = match kind {
        Some(kind) => Some(vec![deformation_from(kind, q, p)?]),
        None if q.is_some() || p.is_some() => return Err(CliError::Usage("--q and --p need --kind".into())),
        None => None,
    };
    let report = verify::verify(suite, specs.as_deref(), dim);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(&text, output).map_err(|e| match output {
        Some(path) => io_error(path, e),
        None => CliError::Io(format!("cannot write to standard output: {e}")),
    })?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<String> =
            report.checks.iter().filter(|c| !c.passed).map(|c| format!("{} {} {}", c.suite, c.spec, c.name)).collect();
        Err(CliError::Failed(format!("{} check(s) failed: {}", failed.len(), failed.join("; "))))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Brackets { spec, n, out } => brackets(&spec, n, &out),
        Command::Polys { spec, n, grid, out } => polys(&spec, n, &grid, &out),
        Command::Density { spec, truncation, n, grid, method, out } => {
            density(&spec, truncation.levels, n, &grid, &method, &out)
        }
        Command::Wavefunction { spec, truncation, n, theta, grid, method, out } => {
            wavefunction(&spec, truncation.levels, n, theta, &grid, &method, &out)
        }
        Command::Eigenstate { spec, truncation, x, theta, method, out } => {
            eigenstate(&spec, truncation.levels, x, theta, &method, &out)
        }
        Command::Figure { which, outdir, truncation, points, format } => {
            figures(which, &outdir, truncation.levels, points, format)
        }
        Command::Verify { suite, kind, q, p, dim, output } => run_verify(suite, kind, q, p, dim, output.as_deref()),
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to standard error as one line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    eprint!("{e}");
                    2
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("error: invalid arguments");
                    eprintln!("{}", line.trim_end());
                    2
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("defquad: {line}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_rules() {
        assert!(matches!(deformation_from(Kind::Mathq, None, None), Err(CliError::Usage(_))));
        assert!(matches!(deformation_from(Kind::Harmonic, Some(0.5), None), Err(CliError::Usage(_))));
        assert!(
            matches!(deformation_from(Kind::Mathq, Some(1.2), None), Err(CliError::Usage(m)) if m.contains("0<q<1"))
        );
        assert!(deformation_from(Kind::Pq, Some(0.5), Some(1.5)).is_ok());
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(run(["defquad", "brackets", "--bogus"]), 2);
        assert_eq!(run(["defquad", "density", "--kind", "mathq", "--q", "1.2"]), 2);
        assert_eq!(run(["defquad", "--help"]), 0);
    }
}
