use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weilscan::suites::{self, Suite};
use weilscan::{
    scan_with, table1, CatalogWriter, Format, ScanConfig, ScanError, ScanRecord, Summary,
};
use weilsum::ffield::parse_field;
use weilsum::spectra::{self, THEOREMS};

/// Exact Weil spectra of binomials over small finite fields.
#[derive(Parser)]
#[command(name = "weilscan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the spectrum and classification of one exponent.
    Spectrum {
        /// Field descriptor: `p`, `p^e` or `p^e/c0,...,ce`.
        field: String,
        /// Exponent (positional or --d).
        d: Option<u64>,
        #[arg(long = "d", conflicts_with = "d")]
        d_flag: Option<u64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Classify every exponent class over a range of fields.
    Scan(ScanArgs),
    /// Run a verification suite.
    Verify {
        /// moments | inversion | davenport-hasse | valuation | congruence | galois | theorems | all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<u64>>,
    },
    /// Compare the three-valued families with computed spectra.
    Table1 {
        /// Restrict to one characteristic.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        e_max: Option<u32>,
        #[arg(long, default_value_t = 4096)]
        q_max: u64,
    },
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7])]
    p: Vec<u64>,
    #[arg(long)]
    e_max: Option<u32>,
    #[arg(long, default_value_t = 4096)]
    q_max: u64,
    /// Catalog path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    fail_fast: bool,
    /// Add per-class wall time to each record (not reproducible).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("weilscan: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when something mathematical failed.
fn run(command: Command) -> Result<bool, ScanError> {
    match command {
        Command::Spectrum {
            field,
            d,
            d_flag,
            json,
        } => {
            let d = d
                .or(d_flag)
                .ok_or_else(|| ScanError::Config("missing exponent d".into()))?;
            let ctx = parse_field(&field)?;
            let report = spectra::classify(&ctx, d)?;
            let ok = report.failures().next().is_none();
            if json {
                writeln!(
                    io::stdout().lock(),
                    "{}",
                    serde_json::to_string_pretty(&report)?
                )?;
            } else {
                print_report(&ScanRecord::from_report(report, None));
            }
            Ok(ok)
        }
        Command::Scan(args) => {
            let config = ScanConfig {
                primes: args.p,
                e_max: args.e_max,
                q_max: args.q_max,
                format: args.format.parse::<Format>()?,
                out: args.out,
                jobs: args.jobs,
                fail_fast: args.fail_fast,
                timings: args.timings,
            };
            let mut summary = Summary::default();
            let mut failures = Vec::new();
            let sink: Box<dyn Write> = match &config.out {
                Some(path) => Box::new(File::create(path)?),
                None => Box::new(io::stdout().lock()),
            };
            let mut writer = CatalogWriter::new(config.format, sink, config.timings)?;
            scan_with(&config, |r| {
                summary.add(&r);
                failures.extend(r.failures().map(|(name, v)| format!("{name}: {v}")));
                writer.write(&r)
            })?;
            writer.finish()?;
            match config.out {
                Some(_) => summary.write_csv(io::stdout().lock())?,
                None => summary.write_csv(io::stderr().lock())?,
            }
            for f in &failures {
                eprintln!("{f}");
            }
            Ok(summary.fail_verdicts == 0)
        }
        Command::Verify { suite, q_max, p } => {
            let chosen: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut ok = true;
            for s in chosen {
                let mut bounds = suites::default_bounds(s);
                if q_max.is_some() {
                    bounds.q_max = q_max;
                }
                bounds.primes = p.clone();
                let report = suites::run(s, &bounds)?;
                writeln!(io::stdout().lock(), "{report}")?;
                ok &= report.passed();
            }
            Ok(ok)
        }
        Command::Table1 { p, e_max, q_max } => {
            if q_max > weilscan::Q_LIMIT {
                return Err(ScanError::Config(format!(
                    "q-max {q_max} exceeds {}",
                    weilscan::Q_LIMIT
                )));
            }
            let report = table1::reproduce(&table1::table1_fields(p, e_max, q_max))?;
            writeln!(io::stdout().lock(), "{report}")?;
            Ok(report.mismatches() == 0)
        }
    }
}

fn print_report(r: &ScanRecord) {
    let mut out = io::stdout().lock();
    let flag = |b: bool, name: &str| {
        if b {
            name.to_string()
        } else {
            format!("not {name}")
        }
    };
    let _ = writeln!(
        out,
        "field {}  d = {}  class size {}",
        r.field, r.d, r.orbit_size
    );
    let _ = writeln!(out, "values {}", r.values);
    if r.degenerate {
        let _ = writeln!(out, "degenerate");
    }
    let _ = writeln!(
        out,
        "{}-valued, {}, {}, {}",
        r.v,
        flag(r.rational, "rational"),
        flag(r.symmetric, "symmetric"),
        flag(r.preferred, "preferred")
    );
    if let Some(a) = r.a {
        let _ = writeln!(out, "A = {a}");
    }
    let _ = writeln!(
        out,
        "|R| = {}  Val = {}  value field degree {} (predicted {})",
        r.root_count, r.val, r.m_observed, r.m_predicted
    );
    for t in THEOREMS {
        let _ = writeln!(out, "  {t:<16} {}", r.verdict(t));
    }
}
