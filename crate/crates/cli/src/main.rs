use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use areal::report::{g17, report_text, write_csv, Status};
use areal::run::PlotData;
use areal::{run, CliError, Command, Options, Scenario};
use clap::{Args, Parser, Subcommand};

/// Lengths, areal values and consistency checks for parameter-invariant
/// functionals described by a JSON scenario.
///
/// Exit status: 0 when every check passes, 1 when one fails, 2 on invalid
/// input, 3 on a numerical failure.
#[derive(Debug, Parser)]
#[command(name = "areal", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Length of the scenario's curve.
    Length,
    /// Areal value of the scenario's k-piece.
    Area,
    /// Run the scenario's checks, or only those named NAME.
    Check { name: Option<String> },
    /// First variations along a basis of perturbation fields.
    Variation,
}

#[derive(Debug, Args)]
struct Global {
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Override the Gauss–Legendre order.
    #[arg(long, global = true)]
    gauss_order: Option<usize>,
    /// Override the number of cells per axis.
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Write result rows as CSV here, overriding the scenario.
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Write the text report here, overriding the scenario.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Write sampled integrand values as CSV here.
    #[arg(long, global = true, value_name = "FILE")]
    plot: Option<PathBuf>,
    /// Do not print the report.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Record wall time per row. Makes the CSV non-reproducible.
    #[arg(long, global = true)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(failed) => ExitCode::from(u8::from(failed)),
        Err(e) => {
            eprintln!("areal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Returns whether any check failed.
fn execute(cli: Cli) -> Result<bool, CliError> {
    let g = cli.global;
    let path = g
        .scenario
        .ok_or_else(|| CliError::Input("--scenario is required".into()))?;
    let text = fs::read_to_string(&path).map_err(|e| read_error(&path, e))?;
    let scenario = Scenario::from_json(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        e => e,
    })?;
    let command = match cli.command {
        Cmd::Length => Command::Length,
        Cmd::Area => Command::Area,
        Cmd::Check { name } => Command::Check(name),
        Cmd::Variation => Command::Variation,
    };
    if g.plot.is_some() && !matches!(command, Command::Length | Command::Area) {
        return Err(CliError::Input(
            "--plot applies to `length` and `area` only".into(),
        ));
    }
    let opts = Options {
        seed: g.seed,
        gauss_order: g.gauss_order,
        cells: g.cells,
        timing: g.timing,
        plot: g.plot.is_some(),
    };
    let outcome = run(&scenario, &command, &opts)?;

    // render everything before touching the filesystem
    let report = report_text(&outcome.header, &outcome.rows);
    let mut csv = Vec::new();
    write_csv(&outcome.rows, &mut csv)?;
    let mut outputs: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    if let Some(p) = g.csv.or_else(|| scenario.output.csv.map(PathBuf::from)) {
        outputs.push((p, csv));
    }
    if let Some(p) = g
        .report
        .or_else(|| scenario.output.report.map(PathBuf::from))
    {
        outputs.push((p, report.clone().into_bytes()));
    }
    if let (Some(p), Some(plot)) = (g.plot, &outcome.plot) {
        outputs.push((p, plot_csv(plot)));
    }
    for (p, bytes) in outputs {
        fs::write(&p, bytes).map_err(|e| read_error(&p, e))?;
    }
    if !g.quiet {
        std::io::stdout()
            .write_all(report.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
    }
    Ok(outcome.rows.iter().any(|r| r.status() == Status::Fail))
}

fn plot_csv(plot: &PlotData) -> Vec<u8> {
    let mut out = plot.columns.join(",");
    out.push('\n');
    for row in &plot.rows {
        out.push_str(&row.iter().map(|&x| g17(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out.into_bytes()
}
