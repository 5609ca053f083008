use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fwlab_cli::config::{ConfigError, OutputFormat, ScenarioConfig};
use fwlab_cli::report::Verdict;
use fwlab_cli::suites::{self, Suite};

#[derive(Parser)]
#[command(name = "fwlab", version, about = "Foldy-Wouthuysen verification harness")]
struct Cli {
    /// Scenario file (INI with [model], [run], [tolerances]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set model.points=32`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact transform diagnostics, free limits and approximation consistency.
    Verify,
    /// Residual scans over amplitude, wavenumber or mass.
    Scan,
    /// Exact rational coefficient and identity checks.
    Symbolic {
        #[arg(long)]
        order: Option<usize>,
    },
    /// Doubled-Hamiltonian checks.
    Fv,
}

fn load(cli: &Cli) -> Result<ScenarioConfig, ConfigError> {
    let text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?),
        None => None,
    };
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("run.seed={seed}"));
    }
    if let Command::Symbolic { order: Some(k) } = cli.command {
        overrides.push(format!("run.order={k}"));
    }
    ScenarioConfig::load(text.as_deref(), &overrides)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fwlab: {e}");
            return ExitCode::from(2);
        }
    };
    let suite = match cli.command {
        Command::Verify => Suite::Verify,
        Command::Scan => Suite::Scan,
        Command::Symbolic { .. } => Suite::Symbolic,
        Command::Fv => Suite::Fv,
    };
    let (report, code) = suites::run(suite, &cfg);
    let format = match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => cfg.run.format,
    };
    let text = report.render(format);
    let target = cli.output.or_else(|| cfg.run.output.as_ref().map(PathBuf::from));
    match &target {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("fwlab: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    let failed = report.rows().iter().filter(|r| r.verdict == Verdict::Fail).count();
    eprintln!("fwlab {}: {} rows, {} failed, exit {}", suite.name(), report.rows().len(), failed, code);
    if let Some((_, msg)) = report.header().iter().find(|(k, _)| k == "error") {
        eprintln!("fwlab: {msg}");
    }
    ExitCode::from(code as u8)
}
