mod formats;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coinvariant::catalog::{self, EntryKind};
use formats::{bundled_scenario, bundled_scenario_names, load_scenario, Cutoff, Format};
use run::{execute, table, Overrides, Record};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error(transparent)]
    Core(#[from] coinvariant::Error),
}

#[derive(Parser)]
#[command(name = "coinvariant", version, about = "Exact invariant and coinvariant cohomology of cell complexes with group actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: a bundled name or a path to a scenario file.
    Run {
        scenario: String,
        /// Cover windows only.
        #[arg(long)]
        window_radius: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Cover scenarios only.
        #[arg(long, value_enum)]
        cutoff: Option<Cutoff>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Write `<scenario>.json` and `<scenario>.txt` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled complexes, actions, covers and scenarios.
    List {
        /// complex, action, cover or scenario
        #[arg(long)]
        kind: Option<String>,
    },
}

fn list(kind: Option<&str>) -> Result<String, CliError> {
    let mut out = String::new();
    match kind {
        Some("scenario") => {
            for name in bundled_scenario_names() {
                out.push_str(&format!("scenario  {name}\n"));
            }
        }
        Some(k) => {
            let kind = EntryKind::parse(k)
                .ok_or_else(|| CliError::Input(format!("unknown kind `{k}`; expected complex, action, cover or scenario")))?;
            for e in catalog::entries(Some(kind)) {
                out.push_str(&format!("{:<9} {:<22} {}\n", k, e.name, e.about));
            }
        }
        None => {
            for e in catalog::entries(None) {
                let k = match e.kind {
                    EntryKind::Complex => "complex",
                    EntryKind::Action => "action",
                    EntryKind::Cover => "cover",
                };
                out.push_str(&format!("{:<9} {:<22} {}\n", k, e.name, e.about));
            }
        }
    }
    Ok(out)
}

fn render(record: &Record, format: Format) -> String {
    match format {
        Format::Record => serde_json::to_string_pretty(record).expect("record serializes") + "\n",
        Format::Table => table(record),
    }
}

fn write_out(dir: &Path, record: &Record) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(format!("{}.json", record.scenario)), render(record, Format::Record)).map_err(io)?;
    fs::write(dir.join(format!("{}.txt", record.scenario)), render(record, Format::Table)).map_err(io)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { kind } => list(kind.as_deref()).map(|s| {
            print!("{s}");
            ExitCode::SUCCESS
        }),
        Command::Run { scenario, window_radius, max_degree, cutoff, format, out } => (|| {
            let s = match bundled_scenario(&scenario) {
                Some(s) if !Path::new(&scenario).exists() => s,
                _ if !Path::new(&scenario).exists() => {
                    return Err(CliError::Input(format!("`{scenario}` is neither a bundled scenario nor a file; see `coinvariant list`")))
                }
                _ => load_scenario(Path::new(&scenario))?,
            };
            let record = execute(&s, &Overrides { window_radius, max_degree, cutoff })?;
            let format = format.or(s.parameters.format).unwrap_or(Format::Record);
            if let Some(dir) = &out {
                write_out(dir, &record)?;
            }
            print!("{}", render(&record, format));
            if record.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                for e in record.failures() {
                    eprintln!("verification failed: {}/{}: {}", e.section, e.check, e.detail);
                }
                Ok(ExitCode::from(2))
            }
        })(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
