//! Exhaustive scans over finite fields and exponent classes, catalog
//! output, verification suites and three-valued family reproduction.
//!
//! Every output is sorted by `(p, e, d)` before it is written, so the worker
//! count never changes a catalog byte.

pub mod suites;
pub mod table1;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use weilsum::arith;
use weilsum::charsum::{CharSumError, Spectrum, WeilTable};
use weilsum::cyclo::Valuation;
use weilsum::ffield::{exponent_classes, FieldCtx, FieldError};
use weilsum::spectra::{self, SpectrumReport, Verdict, THEOREMS};

/// Largest field a scan will touch.
pub const Q_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ScanError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(ScanError::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub primes: Vec<u64>,
    pub e_max: Option<u32>,
    pub q_max: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: usize,
    pub fail_fast: bool,
    /// Record per-class wall time. Off by default: it makes catalogs
    /// differ between runs.
    pub timings: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            primes: vec![2, 3, 5, 7],
            e_max: None,
            q_max: 4096,
            out: None,
            format: Format::Jsonl,
            jobs: 1,
            fail_fast: false,
            timings: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_max > Q_LIMIT {
            return Err(ScanError::Config(format!(
                "q-max {} exceeds {Q_LIMIT}",
                self.q_max
            )));
        }
        if self.jobs == 0 {
            return Err(ScanError::Config("--jobs must be positive".into()));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(ScanError::Config(format!("{p} is not prime")));
        }
        Ok(())
    }

    /// `(p, e)` pairs in scan order.
    pub fn fields(&self) -> Vec<(u64, u32)> {
        let mut primes = self.primes.clone();
        primes.sort_unstable();
        primes.dedup();
        fields_up_to(&primes, self.q_max, self.e_max)
    }
}

/// All `(p, e)` with `p` from the list, `p^e ≤ q_max` and `e ≤ e_max`.
pub fn fields_up_to(primes: &[u64], q_max: u64, e_max: Option<u32>) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in primes {
        let mut q = p;
        let mut e = 1;
        while q <= q_max && e_max.is_none_or(|m| e <= m) {
            out.push((p, e));
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
            e += 1;
        }
    }
    out
}

/// Every prime `≤ n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| arith::is_prime(p)).collect()
}

/// One catalog line: a field and an exponent class.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub field: String,
    pub d: u64,
    pub orbit_size: usize,
    pub degenerate: bool,
    pub niho: Option<bool>,
    pub v: usize,
    pub values: Spectrum,
    pub multiplicities: Vec<u64>,
    pub rational: bool,
    pub contains_zero: bool,
    pub symmetric: bool,
    pub preferred: bool,
    #[serde(rename = "A")]
    pub a: Option<i64>,
    pub root_count: u64,
    pub val: Valuation,
    pub m_observed: u64,
    pub m_predicted: u64,
    pub verdicts: BTreeMap<String, Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ScanRecord {
    pub fn from_report(r: SpectrumReport, wall_time_ms: Option<f64>) -> Self {
        ScanRecord {
            p: r.p,
            e: r.e,
            q: r.q,
            field: r.field,
            d: r.d,
            orbit_size: r.orbit.len(),
            degenerate: r.degenerate,
            niho: r.niho,
            v: r.value_count,
            multiplicities: r.values.entries().iter().map(|(_, m)| *m).collect(),
            values: r.values,
            rational: r.rational,
            contains_zero: r.contains_zero,
            symmetric: r.symmetric,
            preferred: r.preferred,
            a: r.a,
            root_count: r.root_count,
            val: r.val,
            m_observed: r.m_observed,
            m_predicted: r.m_predicted,
            verdicts: r.verdicts,
            wall_time_ms,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Verdict)> {
        self.verdicts
            .iter()
            .filter(|(_, v)| v.is_fail())
            .map(|(k, v)| (k.as_str(), v))
    }

    pub fn verdict(&self, name: &str) -> &Verdict {
        self.verdicts.get(name).unwrap_or(&Verdict::NotApplicable)
    }
}

/// Classify one exponent class.
pub fn scan_class(ctx: &FieldCtx, d: u64, timings: bool) -> Result<ScanRecord> {
    let start = Instant::now();
    let table = WeilTable::compute(ctx, d)?;
    let report = spectra::classify_table(ctx, &table)?;
    let ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(ScanRecord::from_report(report, ms))
}

/// Counts over a catalog.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub fields: usize,
    pub classes: usize,
    pub three_valued: usize,
    pub symmetric: usize,
    pub preferred: usize,
    pub fail_verdicts: usize,
    #[serde(skip)]
    last_field: Option<(u64, u32)>,
}

impl Summary {
    pub fn of(records: &[ScanRecord]) -> Self {
        let mut s = Summary::default();
        for r in records {
            s.add(r);
        }
        s
    }

    /// Count one more record; records of a field must be contiguous.
    pub fn add(&mut self, r: &ScanRecord) {
        if self.last_field != Some((r.p, r.e)) {
            self.fields += 1;
            self.last_field = Some((r.p, r.e));
        }
        self.classes += 1;
        self.three_valued += usize::from(r.v == 3);
        self.symmetric += usize::from(r.symmetric);
        self.preferred += usize::from(r.preferred);
        self.fail_verdicts += r.failures().count();
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.serialize(self)?;
        out.flush()?;
        Ok(())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fields, {} classes: {} three-valued, {} symmetric, {} preferred, {} FAIL verdicts",
            self.fields,
            self.classes,
            self.three_valued,
            self.symmetric,
            self.preferred,
            self.fail_verdicts
        )
    }
}

/// Run the scan described by `config`, returning records in `(p, e, d)`
/// order. With `fail_fast`, records after the first failing class are
/// dropped.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let mut records = Vec::new();
    scan_with(config, |r| {
        records.push(r);
        Ok(())
    })?;
    Ok(records)
}

/// Like [`run_scan`] but hands each record to `sink` in `(p, e, d)` order
/// instead of keeping them all; large prime fields have records of several
/// megabytes.
pub fn scan_with(
    config: &ScanConfig,
    mut sink: impl FnMut(ScanRecord) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ScanError::Config(e.to_string()))?;
    for (p, e) in config.fields() {
        let ctx = FieldCtx::new(p, e, None)?;
        // classes come sorted by representative
        let classes: Vec<u64> = exponent_classes(&ctx).into_iter().map(|c| c.d).collect();
        for chunk in classes.chunks(4 * config.jobs) {
            let done: Vec<ScanRecord> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|&d| scan_class(&ctx, d, config.timings))
                    .collect::<Result<_>>()
            })?;
            for r in done {
                let failed = r.failures().next().is_some();
                sink(r)?;
                if failed && config.fail_fast {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// Write records in the chosen catalog format.
pub fn write_catalog<W: Write>(records: &[ScanRecord], format: Format, w: W) -> Result<()> {
    let mut writer =
        CatalogWriter::new(format, w, records.iter().any(|r| r.wall_time_ms.is_some()))?;
    for r in records {
        writer.write(r)?;
    }
    writer.finish()
}

/// Incremental catalog output.
pub enum CatalogWriter<W: Write> {
    Jsonl(io::BufWriter<W>),
    Csv { out: csv::Writer<W>, timings: bool },
}

impl<W: Write> CatalogWriter<W> {
    /// `timings` adds the wall-time column to CSV output.
    pub fn new(format: Format, w: W, timings: bool) -> Result<Self> {
        Ok(match format {
            Format::Jsonl => CatalogWriter::Jsonl(io::BufWriter::new(w)),
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                let mut header: Vec<&str> = vec![
                    "p",
                    "e",
                    "q",
                    "field",
                    "d",
                    "orbit_size",
                    "degenerate",
                    "niho",
                    "v",
                    "values",
                    "rational",
                    "contains_zero",
                    "symmetric",
                    "preferred",
                    "A",
                    "root_count",
                    "val",
                    "m_observed",
                    "m_predicted",
                ];
                header.extend(THEOREMS);
                if timings {
                    header.push("wall_time_ms");
                }
                out.write_record(&header)?;
                CatalogWriter::Csv { out, timings }
            }
        })
    }

    pub fn write(&mut self, r: &ScanRecord) -> Result<()> {
        match self {
            CatalogWriter::Jsonl(w) => {
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
            CatalogWriter::Csv { out, timings } => {
                let mut row = vec![
                    r.p.to_string(),
                    r.e.to_string(),
                    r.q.to_string(),
                    r.field.clone(),
                    r.d.to_string(),
                    r.orbit_size.to_string(),
                    r.degenerate.to_string(),
                    opt(r.niho),
                    r.v.to_string(),
                    r.values.to_string(),
                    r.rational.to_string(),
                    r.contains_zero.to_string(),
                    r.symmetric.to_string(),
                    r.preferred.to_string(),
                    opt(r.a),
                    r.root_count.to_string(),
                    r.val.to_string(),
                    r.m_observed.to_string(),
                    r.m_predicted.to_string(),
                ];
                row.extend(THEOREMS.iter().map(|t| r.verdict(t).to_string()));
                if *timings {
                    row.push(opt(r.wall_time_ms));
                }
                out.write_record(&row)?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match self {
            CatalogWriter::Jsonl(mut w) => w.flush()?,
            CatalogWriter::Csv { mut out, .. } => out.flush()?,
        }
        Ok(())
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
