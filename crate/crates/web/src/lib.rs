//! Browser bindings: each export takes plain arguments and returns a JSON
//! string, so the page needs no generated TypeScript types.
//!
//! The `*_json` functions are ordinary Rust and are what the tests call; the
//! `#[wasm_bindgen]` wrappers only turn errors into JS exceptions.

use serde::Serialize;
use thiserror::Error;
use wasm_bindgen::prelude::*;

use weilsum::charsum::{CharSumError, WeilTable};
use weilsum::cyclo::CycInt;
use weilsum::ffield::{self, FieldCtx, FieldError};
use weilsum::spectra::{self, SpectrumReport};

/// Largest field the page will compute over; a full class list at this size
/// takes a few seconds in a browser.
pub const WEB_Q_MAX: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum WebError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
    #[error("field of size {0} is too large for the demo (limit {WEB_Q_MAX})")]
    TooLarge(u64),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, WebError>;

fn field(descriptor: &str) -> Result<FieldCtx> {
    let ctx = ffield::parse_field(descriptor.trim())?;
    if ctx.q() > WEB_Q_MAX {
        return Err(WebError::TooLarge(ctx.q()));
    }
    Ok(ctx)
}

/// Floating approximation of a real cyclotomic integer, for plotting only.
fn approx(x: &CycInt) -> f64 {
    let n = x.n() as f64;
    x.coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * (std::f64::consts::TAU * j as f64 / n).cos())
        .sum()
}

#[derive(Serialize)]
struct PlotPoint {
    value: String,
    approx: f64,
    count: u64,
}

#[derive(Serialize)]
struct SpectrumView<'a> {
    report: &'a SpectrumReport,
    plot: Vec<PlotPoint>,
}

/// Spectrum, classification and plot points of `W_d` over the field.
pub fn spectrum_json(descriptor: &str, d: u64) -> Result<String> {
    let ctx = field(descriptor)?;
    let report = spectra::classify(&ctx, d)?;
    let plot = report
        .values
        .entries()
        .iter()
        .map(|(v, m)| PlotPoint {
            value: v.value_text(),
            approx: approx(v),
            count: *m,
        })
        .collect();
    Ok(serde_json::to_string(&SpectrumView {
        report: &report,
        plot,
    })?)
}

#[derive(Serialize)]
struct ClassRow {
    d: u64,
    orbit: Vec<u64>,
    degenerate: bool,
    niho: Option<bool>,
    value_count: usize,
    rational: bool,
    values: Vec<(String, u64)>,
    failures: Vec<String>,
}

/// Every exponent class of the field with its value count.
pub fn classes_json(descriptor: &str) -> Result<String> {
    let ctx = field(descriptor)?;
    let mut rows = Vec::new();
    for class in ffield::exponent_classes(&ctx) {
        let table = WeilTable::compute(&ctx, class.d)?;
        let report = spectra::classify_table(&ctx, &table)?;
        rows.push(ClassRow {
            d: class.d,
            orbit: class.orbit,
            degenerate: class.degenerate,
            niho: class.niho,
            value_count: report.value_count,
            rational: report.rational,
            values: report.values.text_pairs(),
            failures: report
                .failures()
                .map(|(n, v)| format!("{n}: {v}"))
                .collect(),
        });
    }
    Ok(serde_json::to_string(&rows)?)
}

#[derive(Serialize)]
struct FamilyRow {
    row: u8,
    i: Option<u32>,
    d: u64,
    class_rep: u64,
    k: u32,
    expected: Vec<(i64, u64)>,
    computed: Vec<(String, u64)>,
    matches: bool,
    also: Vec<String>,
}

#[derive(Serialize)]
struct FamilyView {
    families: Vec<FamilyRow>,
    rejected: Vec<String>,
}

/// Predicted three-valued families over `F_{p^e}` next to computed spectra.
pub fn families_json(p: u64, e: u32) -> Result<String> {
    let q = p.checked_pow(e).unwrap_or(u64::MAX);
    if q > WEB_Q_MAX {
        return Err(WebError::TooLarge(q));
    }
    let ctx = FieldCtx::new(p, e, None)?;
    let mut families = Vec::new();
    for entry in spectra::table1_families(p, e)? {
        let spectrum = WeilTable::compute(&ctx, entry.d)?.spectrum();
        families.push(FamilyRow {
            row: entry.row,
            i: entry.i,
            d: entry.d,
            class_rep: entry.class_rep,
            k: entry.k,
            expected: entry
                .expected()
                .into_iter()
                .filter(|&(_, m)| m > 0)
                .collect(),
            matches: spectra::family_matches(&entry, &spectrum),
            computed: spectrum.text_pairs(),
            also: entry
                .collisions
                .iter()
                .map(|s| format!("row {} d={}", s.row, s.d))
                .collect(),
        });
    }
    let rejected = spectra::table1_rejections(p, e)
        .into_iter()
        .map(|(s, why)| format!("row {} d={}: {why:?}", s.row, s.d))
        .collect();
    Ok(serde_json::to_string(&FamilyView { families, rejected })?)
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum(descriptor: &str, d: u32) -> std::result::Result<String, JsError> {
    js(spectrum_json(descriptor, d as u64))
}

#[wasm_bindgen]
pub fn classes(descriptor: &str) -> std::result::Result<String, JsError> {
    js(classes_json(descriptor))
}

#[wasm_bindgen]
pub fn families(p: u32, e: u32) -> std::result::Result<String, JsError> {
    js(families_json(p as u64, e))
}
