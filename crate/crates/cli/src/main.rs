//! `ckforms`: check homogeneous spaces for the invariant-ring obstruction to
//! compact Clifford–Klein forms.
//!
//! Exit status: 0 for any completed verdict, 2 for invalid input, 1 for an
//! internal failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use ckforms::catalog::{family_params, ExpectedVerdict};
use ckforms::{
    builtin_entries, catalog_sweep, family_sweep, find_entry, load_pair, CheckOptions, Error, Report,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "ckforms",
    version,
    about = "Invariant-ring obstruction checker for compact Clifford–Klein forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Highest polynomial degree searched (cohomological degree is twice this).
    #[arg(long, env = "CKFORMS_MAX_DEGREE", default_value_t = 12)]
    max_degree: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check one pair, built-in or from a pair file.
    Check {
        /// Built-in id, alias, or family instance such as `sl-pq-so-pq(5,3)`.
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        pair: Option<String>,
        /// JSON pair file.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Run the graded search even when the criterion is provably inapplicable.
        #[arg(long)]
        force: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in catalog.
    List {
        /// Keep entries whose id, alias, family or description contains this text.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check every member of a family over parameter ranges, or the whole catalog.
    Sweep {
        /// Family name; omit to sweep the built-in catalog.
        #[arg(long)]
        family: Option<String>,
        /// Parameter range `name=a..b` (inclusive) or `name=a,b,c`; one per family parameter.
        #[arg(long = "param", requires = "family")]
        params: Vec<String>,
        /// Run instances one at a time.
        #[arg(long)]
        serial: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize)]
struct ListRow {
    id: String,
    alias: Option<String>,
    family: String,
    description: String,
    source: String,
    expected_verdict: String,
    expected_witness: Option<String>,
    expected_degree: Option<u32>,
}

enum Failure {
    User(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_user_error() {
            Failure::User(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_values(spec: &str) -> Option<Vec<u32>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Some(Vec::new());
    }
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (u32, u32) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return Some((a..=b).collect());
    }
    spec.split(',').map(|v| v.trim().parse().ok()).collect()
}

fn parse_ranges(family: &str, params: &[String]) -> Result<Vec<Vec<u32>>, Failure> {
    let names = family_params(family)?;
    let mut ranges: Vec<Option<Vec<u32>>> = vec![None; names.len()];
    for p in params {
        let (name, values) = p
            .split_once('=')
            .ok_or_else(|| Failure::User(format!("parameter {p:?} is not of the form name=range")))?;
        let i = names.iter().position(|n| *n == name.trim()).ok_or_else(|| {
            Failure::User(format!(
                "{family} has no parameter {name:?}; expected {}",
                names.join(",")
            ))
        })?;
        let values = parse_values(values)
            .ok_or_else(|| Failure::User(format!("cannot parse range {values:?} for {name}")))?;
        ranges[i] = Some(values);
    }
    ranges
        .into_iter()
        .zip(names)
        .map(|(r, n)| r.ok_or_else(|| Failure::User(format!("missing --param {n}=..."))))
        .collect()
}

fn expected_label(v: ExpectedVerdict) -> String {
    match v {
        ExpectedVerdict::ObstructionFound => "obstruction_found".into(),
        ExpectedVerdict::Inconclusive => "inconclusive".into(),
        ExpectedVerdict::Inapplicable(a) => format!("inapplicable ({a:?})"),
    }
}

fn list(filter: Option<&str>, format: Format) -> String {
    let entries: Vec<_> = builtin_entries()
        .into_iter()
        .filter(|e| {
            filter.is_none_or(|f| {
                e.pair.id.contains(f)
                    || e.alias.as_deref().is_some_and(|a| a.contains(f))
                    || e.family.contains(f)
                    || e.description.contains(f)
            })
        })
        .collect();
    match format {
        Format::Json => {
            let rows: Vec<ListRow> = entries
                .iter()
                .map(|e| ListRow {
                    id: e.pair.id.clone(),
                    alias: e.alias.clone(),
                    family: e.family.clone(),
                    description: e.description.clone(),
                    source: e.source.clone(),
                    expected_verdict: expected_label(e.expected.verdict),
                    expected_witness: e.expected.witness.clone(),
                    expected_degree: e.expected.degree,
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("plain data serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let expected = match (&e.expected.witness, e.expected.degree) {
                    (Some(w), Some(d)) => {
                        format!("{} {w} (degree {d})", expected_label(e.expected.verdict))
                    }
                    _ => expected_label(e.expected.verdict),
                };
                s.push_str(&format!(
                    "{} | {} | {} | {}\n",
                    e.pair.id, e.description, e.source, expected
                ));
            }
            s
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check {
            pair,
            spec,
            force,
            timing,
            common,
        } => {
            let (p, description) = match (pair, spec) {
                (Some(id), _) => {
                    let e = find_entry(&id)?;
                    (e.pair, e.description)
                }
                (None, Some(path)) => {
                    let content = fs::read_to_string(&path)
                        .map_err(|e| Failure::User(format!("cannot read {}: {e}", path.display())))?;
                    let p = load_pair(&content)?;
                    let d = p.notes.clone();
                    (p, d)
                }
                (None, None) => return Err(Failure::User("give --pair or --spec".into())),
            };
            let opts = CheckOptions {
                max_degree: common.max_degree,
                force_search: force,
            };
            let report = Report::run(&p, &description, &opts, timing)?;
            let text = match common.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(&common.out, &text)
        }
        Command::List { filter, format } => {
            print!("{}", list(filter.as_deref(), format));
            Ok(())
        }
        Command::Sweep {
            family,
            params,
            serial,
            common,
        } => {
            let opts = CheckOptions {
                max_degree: common.max_degree,
                force_search: false,
            };
            let report = match family {
                Some(f) => {
                    let ranges = parse_ranges(&f, &params)?;
                    family_sweep(&f, &ranges, &opts, !serial)?
                }
                None => catalog_sweep(&opts, !serial)?,
            };
            let text = match common.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(&common.out, &text)?;
            if common.out.is_some() {
                println!("{}", report.summary_line());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
