use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use septic_core::checks::{self, parse_order, registry, resolve};
use septic_core::constructors::{named_series, SeriesName};
use septic_core::report::{constants_report, series_csv, series_rows, Report};

const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "septic", version, about = "Exact verification of septic theta function identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity checks.
    Verify {
        /// Run every registered check (the default when no --check is given).
        #[arg(long)]
        all: bool,
        /// Check name or dotted group prefix; repeatable.
        #[arg(long = "check", value_name = "NAME")]
        checks: Vec<String>,
        /// Verify below q^ORDER; accepts N or N/D. Defaults to each check's own order.
        #[arg(long, value_name = "N[/D]")]
        order: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long, value_name = "K")]
        jobs: Option<usize>,
        /// Accepted and ignored: verification is deterministic.
        #[arg(long, hide = true)]
        seed: Option<u64>,
    },
    /// Print the coefficients of a named series.
    Dump {
        #[arg(long, value_name = "NAME")]
        series: String,
        /// Coefficients of q^e for e < ORDER.
        #[arg(long, allow_negative_numbers = true)]
        order: i64,
        #[arg(long, value_enum, default_value = "csv")]
        format: DumpFormat,
    },
    /// Print the cyclotomic constant tables.
    Constants {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List check names, default orders and identities.
    List,
    /// List the series accepted by `dump`.
    Series,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn internal(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INTERNAL)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| internal(format!("cannot write output: {e}")))
        }
    }
}

fn verify(
    all: bool,
    selectors: Vec<String>,
    order: Option<String>,
    format: Format,
    out: Option<PathBuf>,
    jobs: Option<usize>,
) -> ExitCode {
    let order = match order.as_deref().map(parse_order).transpose() {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    if jobs == Some(0) {
        return usage("--jobs must be positive");
    }
    let reg = registry();
    let selectors = if all { Vec::new() } else { selectors };
    let selected = match resolve(&reg, &selectors) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let results = checks::run(&selected, order.as_ref(), jobs);
    for r in &results {
        if let Some(d) = &r.detail {
            eprintln!("{}: {d}", r.name);
        }
    }
    let report = Report::new(&results, order.as_ref());
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => match serde_json::to_string_pretty(&report) {
            Ok(s) => s + "\n",
            Err(e) => return internal(e),
        },
    };
    if let Err(code) = emit(&text, out.as_ref()) {
        return code;
    }
    ExitCode::from(report.exit_code() as u8)
}

fn dump(series: &str, order: i64, format: DumpFormat) -> ExitCode {
    let name: SeriesName = match series.parse() {
        Ok(n) => n,
        Err(e) => return usage(e),
    };
    let s = match named_series(name, order) {
        Ok(s) => s,
        Err(e) => return internal(e),
    };
    let text = match format {
        DumpFormat::Csv => series_csv(&s),
        DumpFormat::Json => match serde_json::to_string_pretty(&series_rows(&s)) {
            Ok(t) => t + "\n",
            Err(e) => return internal(e),
        },
    };
    match emit(&text, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn constants(format: Format) -> ExitCode {
    let report = match constants_report() {
        Ok(r) => r,
        Err(e) => return internal(e),
    };
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => match serde_json::to_string_pretty(&report) {
            Ok(t) => t + "\n",
            Err(e) => return internal(e),
        },
    };
    match emit(&text, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn list() -> ExitCode {
    let reg = registry();
    let width = reg.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut text = String::new();
    for c in &reg {
        text.push_str(&format!(
            "{:<width$}  {:<12} q^{:<4} {}\n",
            c.name, c.ring, c.default_order, c.anchor
        ));
    }
    match emit(&text, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn series_list() -> ExitCode {
    let mut text = String::new();
    for n in SeriesName::all() {
        text.push_str(&format!("{:<16} {}\n", n.to_string(), n.description()));
    }
    text.push_str("e:p/N, P:p/N, Q:p/N  the e, P, Q families at alpha = p/N\n");
    match emit(&text, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Verify {
            all,
            checks,
            order,
            format,
            out,
            jobs,
            seed: _,
        } => verify(all, checks, order, format, out, jobs),
        Command::Dump { series, order, format } => dump(&series, order, format),
        Command::Constants { format } => constants(format),
        Command::List => list(),
        Command::Series => series_list(),
    }
}
