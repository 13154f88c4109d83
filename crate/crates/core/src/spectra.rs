//! Classification of Weil spectra and per-spectrum theorem verdicts.
//!
//! Every check returns a three-state [`Verdict`] so that a catalog can tell
//! a vacuous pass (hypothesis not met) from actual evidence.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::arith::{self, gcd, mod_inverse, mod_pow};
use crate::charsum::{self, Result, Spectrum, WeilTable};
use crate::cyclo::{CycInt, Valuation};
use crate::ffield::{self, FieldCtx};

/// Outcome of checking one theorem against one spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NotApplicable,
    Pass,
    /// Carries a witness.
    Fail(String),
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    fn implies(applies: bool, check: impl FnOnce() -> std::result::Result<(), String>) -> Self {
        if !applies {
            return Verdict::NotApplicable;
        }
        match check() {
            Ok(()) => Verdict::Pass,
            Err(w) => Verdict::Fail(w),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotApplicable => f.write_str("n/a"),
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail(w) => write!(f, "FAIL: {w}"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Names of the per-spectrum checks, in catalog column order.
pub const THEOREMS: &[&str] = &[
    "degenerate_form",
    "aaron",
    "natalie",
    "michael",
    "matilda",
    "julianna",
    "wilbur",
    "nancy",
    "hubert",
    "priscilla",
    "vivian",
    "genevieve",
    "rufus",
    "george",
    "william",
    "subfield",
];

/// Everything known about one `(field, exponent class)`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub field: String,
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// Canonical (smallest) member of the class.
    pub d: u64,
    pub orbit: Vec<u64>,
    pub degenerate: bool,
    pub niho: Option<bool>,
    pub value_count: usize,
    pub values: Spectrum,
    pub rational: bool,
    pub contains_zero: bool,
    pub symmetric: bool,
    pub preferred: bool,
    /// `A > 0` when the value set is `{-A, 0, A}`.
    pub a: Option<i64>,
    pub n_plus_a: Option<u64>,
    pub n_minus_a: Option<u64>,
    pub n_zero: u64,
    pub root_count: u64,
    pub val: Valuation,
    pub m_observed: u64,
    pub m_predicted: u64,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl SpectrumReport {
    pub fn verdict(&self, name: &str) -> &Verdict {
        self.verdicts.get(name).unwrap_or(&Verdict::NotApplicable)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Verdict)> {
        self.verdicts
            .iter()
            .filter(|(_, v)| v.is_fail())
            .map(|(k, v)| (k.as_str(), v))
    }

    fn witness(&self, detail: impl fmt::Display) -> String {
        format!("p={} e={} d={}: {detail}", self.p, self.e, self.d)
    }
}

/// The smallest divisor `m` of `p-1` with `d ≡ 1 (mod (p-1)/m)`.
pub fn predicted_value_field_degree(p: u64, d: u64) -> u64 {
    let n = p - 1;
    arith::divisors(n)
        .into_iter()
        .find(|&m| {
            let r = n / m;
            d % r == 1 % r
        })
        .expect("m = p - 1 always qualifies")
}

/// The action of a generator `σ: ζ_p -> ζ_p^g` of the Galois group on a
/// list of distinct values.
#[derive(Debug, Clone)]
pub struct ValueGalois {
    p: u64,
    /// `perm[i]` is the slot of `σ(values[i])`; `None` if some image is not
    /// among the values.
    perm: Option<Vec<usize>>,
    cycles: Vec<Vec<usize>>,
    m: u64,
}

impl ValueGalois {
    pub fn new(p: u64, values: &[CycInt]) -> Self {
        let g = arith::primitive_root(p);
        let slot: FxHashMap<&[i64], usize> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.coeffs(), i))
            .collect();
        let perm: Option<Vec<usize>> = values
            .iter()
            .map(|v| {
                let image = v.galois_apply(g).expect("g is a unit mod p");
                slot.get(image.coeffs()).copied()
            })
            .collect();
        match perm {
            Some(perm) => {
                let mut seen = vec![false; perm.len()];
                let mut cycles = Vec::new();
                for start in 0..perm.len() {
                    if seen[start] {
                        continue;
                    }
                    let mut cycle = Vec::new();
                    let mut i = start;
                    while !seen[i] {
                        seen[i] = true;
                        cycle.push(i);
                        i = perm[i];
                    }
                    cycles.push(cycle);
                }
                let m = cycles
                    .iter()
                    .fold(1, |acc, c| arith::lcm(acc, c.len() as u64));
                ValueGalois {
                    p,
                    perm: Some(perm),
                    cycles,
                    m,
                }
            }
            None => ValueGalois {
                p,
                perm: None,
                cycles: (0..values.len()).map(|i| vec![i]).collect(),
                m: fixing_degree(p, g, values),
            },
        }
    }

    pub fn is_closed(&self) -> bool {
        self.perm.is_some()
    }

    /// Conjugacy classes among the values (singletons if not closed).
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Degree over `Q` of the field generated by the values.
    pub fn value_field_degree(&self) -> u64 {
        self.m
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// `(p-1)/|H|` with `H` the subgroup of `F_p^×` fixing every value, found
/// by testing `g^k` for divisors `k` of `p-1`.
fn fixing_degree(p: u64, g: u64, values: &[CycInt]) -> u64 {
    arith::divisors(p - 1)
        .into_iter()
        .find(|&k| {
            let j = mod_pow(g, k, p);
            values
                .iter()
                .all(|v| &v.galois_apply(j).expect("unit") == v)
        })
        .expect("k = p - 1 fixes everything")
}

/// Degree over `Q` of the field generated by the spectrum's values.
pub fn observed_value_field_degree(spectrum: &Spectrum) -> u64 {
    let values: Vec<CycInt> = spectrum.entries().iter().map(|(v, _)| v.clone()).collect();
    ValueGalois::new(spectrum.p(), &values).value_field_degree()
}

/// Galois-conjugate values have equal multiplicities (and the value set is
/// closed under conjugation).
pub fn conjugate_multiplicity_check(spectrum: &Spectrum) -> bool {
    let values: Vec<CycInt> = spectrum.entries().iter().map(|(v, _)| v.clone()).collect();
    let galois = ValueGalois::new(spectrum.p(), &values);
    galois.is_closed() && equal_counts_on_cycles(&galois, |i| spectrum.entries()[i].1)
}

fn equal_counts_on_cycles(galois: &ValueGalois, count: impl Fn(usize) -> u64) -> bool {
    galois
        .cycles()
        .iter()
        .all(|c| c.iter().all(|&i| count(i) == count(c[0])))
}

/// Subfield degrees `(i, j)` with `j = 2i`, both dividing `e`, `d`
/// degenerate over `F_{p^i}` but not over `F_{p^j}`.
pub fn matilda_tower(p: u64, e: u32, d: u64) -> Option<(u32, u32)> {
    (1..=e / 2)
        .filter(|&i| e.is_multiple_of(2 * i))
        .find(|&i| ffield::is_degenerate_mod(p, i, d) && !ffield::is_degenerate_mod(p, 2 * i, d))
        .map(|i| (i, 2 * i))
}

pub fn check_degenerate_form(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.degenerate, || {
        let q = r.q as i64;
        let ok = r.values.multiplicity_of_int(q) == 1
            && r.values.multiplicity_of_int(0) == r.q - 2
            && r.value_count == if r.q == 2 { 1 } else { 2 };
        ok.then_some(())
            .ok_or_else(|| r.witness(format!("spectrum {}", r.values)))
    })
}

pub fn check_aaron(r: &SpectrumReport) -> Verdict {
    Verdict::implies(!r.degenerate, || {
        (r.value_count >= 3)
            .then_some(())
            .ok_or_else(|| r.witness(format!("only {} values", r.value_count)))
    })
}

pub fn check_three_valued_rationality(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.value_count == 3, || {
        if !r.rational {
            return Err(r.witness(format!("irrational values {}", r.values)));
        }
        if !r.contains_zero {
            return Err(r.witness(format!("no zero in {}", r.values)));
        }
        if (r.d % (r.p - 1)) != 1 % (r.p - 1) {
            return Err(r.witness("d is not 1 mod p-1"));
        }
        Ok(())
    })
}

/// `(q² ± qA) / (2A²)`.
pub fn n_a_formula(q: u64, a: i64) -> Option<u64> {
    let (q, a) = (q as i128, a as i128);
    let num = q * q + q * a;
    let den = 2 * a * a;
    (den != 0 && num % den == 0 && num >= 0).then(|| (num / den) as u64)
}

pub fn check_michael(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.symmetric, || {
        let a = r.a.expect("symmetric reports carry A");
        let q = r.q as i128;
        let a2 = (a as i128) * (a as i128);
        if arith::exact_log(a as u128, r.p).is_none() {
            return Err(r.witness(format!("|A|={a} is not a power of p")));
        }
        if !(a2 > q && (a as i128) < q) {
            return Err(r.witness(format!("|A|={a} outside (sqrt q, q)")));
        }
        if a2 != r.root_count as i128 * q {
            return Err(r.witness(format!("A^2={a2} but |R|q={}", r.root_count as i128 * q)));
        }
        if n_a_formula(r.q, a) != r.n_plus_a || n_a_formula(r.q, -a) != r.n_minus_a {
            return Err(r.witness(format!("multiplicities {} disagree with N_A", r.values)));
        }
        if r.d % (r.p - 1) != 1 % (r.p - 1) {
            return Err(r.witness("d is not 1 mod p-1"));
        }
        Ok(())
    })
}

pub fn check_matilda(r: &SpectrumReport) -> Verdict {
    let tower = matilda_tower(r.p, r.e, r.d);
    Verdict::implies(tower.is_some(), || {
        let (i, j) = tower.expect("applies");
        (!r.symmetric)
            .then_some(())
            .ok_or_else(|| r.witness(format!("symmetric {} over tower {i} < {j}", r.values)))
    })
}

pub fn check_julianna(r: &SpectrumReport) -> Verdict {
    Verdict::implies(arith::is_power_of_two(r.e as u64), || {
        (!r.symmetric)
            .then_some(())
            .ok_or_else(|| r.witness(format!("symmetric {}", r.values)))
    })
}

/// No three-valued spectrum when `e` is a power of 2, in the established
/// characteristics 2 and 3.
pub fn check_wilbur(r: &SpectrumReport) -> Verdict {
    let applies = (r.p == 2 || r.p == 3) && arith::is_power_of_two(r.e as u64);
    Verdict::implies(applies, || {
        (r.value_count != 3)
            .then_some(())
            .ok_or_else(|| r.witness(format!("three-valued {}", r.values)))
    })
}

/// `|A| ≥ p^{2^{s-1}} √q`, checked as `A² ≥ p^{2^s} q`.
pub fn check_nancy(r: &SpectrumReport) -> Verdict {
    let s = arith::v2(r.e as u64);
    Verdict::implies(r.symmetric && s >= 1, || {
        let a = r.a.expect("symmetric") as u128;
        let bound = (r.p as u128)
            .checked_pow(1 << s)
            .and_then(|b| b.checked_mul(r.q as u128));
        match bound {
            Some(b) if a * a >= b => Ok(()),
            _ => Err(r.witness(format!("|A|={a} below p^(2^(s-1)) sqrt(q), s={s}"))),
        }
    })
}

pub fn check_hubert(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.e.is_multiple_of(4), || {
        let bad = r.symmetric && {
            let a = r.a.expect("symmetric") as u128;
            a * a == (r.p as u128).pow(2) * r.q as u128
        };
        (!bad)
            .then_some(())
            .ok_or_else(|| r.witness(format!("value set {}", r.values)))
    })
}

pub fn check_priscilla(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.niho == Some(true), || {
        (r.value_count != 3)
            .then_some(())
            .ok_or_else(|| r.witness(format!("Niho exponent three-valued {}", r.values)))
    })
}

pub fn check_vivian(r: &SpectrumReport) -> Verdict {
    Verdict::implies(true, || {
        (r.m_observed == r.m_predicted)
            .then_some(())
            .ok_or_else(|| {
                r.witness(format!(
                    "m observed {} predicted {}",
                    r.m_observed, r.m_predicted
                ))
            })
    })
}

/// Sign of a real cyclotomic integer, exactly.
fn sign_of(v: &CycInt) -> Ordering {
    match v.as_rational_integer() {
        Some(m) => m.cmp(&0),
        None => v.real_sign(),
    }
}

/// Build the full report for `(ctx, d)`.
pub fn classify(ctx: &FieldCtx, d: u64) -> Result<SpectrumReport> {
    let table = WeilTable::compute(ctx, d)?;
    classify_table(ctx, &table)
}

pub fn classify_table(ctx: &FieldCtx, table: &WeilTable) -> Result<SpectrumReport> {
    let (p, e, q) = (ctx.p(), ctx.e(), ctx.q());
    let spectrum = table.spectrum();
    let orbit = ffield::exponent_orbit(ctx, table.d());
    let d = orbit[0];
    let degenerate = ffield::is_degenerate_mod(p, e, d);
    let niho = (e % 2 == 0).then(|| ffield::is_degenerate_mod(p, e / 2, d));
    let rational_values = spectrum.rational_values();
    let symmetric_a = match rational_values.as_deref() {
        Some([x, 0, y]) if *x == -*y && *y > 0 => Some(*y),
        _ => None,
    };
    let preferred = symmetric_a.is_some_and(|a| {
        let a2 = (a as u128).pow(2);
        let want = if e % 2 == 1 {
            p as u128 * q as u128
        } else {
            (p as u128).pow(2) * q as u128
        };
        a2 == want
    });
    let galois = ValueGalois::new(p, table.values());
    let mut val = Valuation::Infinite;
    for cycle in galois.cycles() {
        val = val.min(table.values()[cycle[0]].p_adic_valuation()?);
    }
    let mut report = SpectrumReport {
        field: ctx.descriptor(),
        p,
        e,
        q,
        d,
        orbit,
        degenerate,
        niho,
        value_count: spectrum.value_count(),
        rational: rational_values.is_some(),
        contains_zero: spectrum.contains_zero(),
        symmetric: symmetric_a.is_some(),
        preferred,
        a: symmetric_a,
        n_plus_a: symmetric_a.map(|a| spectrum.multiplicity_of_int(a)),
        n_minus_a: symmetric_a.map(|a| spectrum.multiplicity_of_int(-a)),
        n_zero: spectrum.multiplicity_of_int(0),
        root_count: charsum::root_count_r(ctx, d)?,
        val,
        m_observed: galois.value_field_degree(),
        m_predicted: predicted_value_field_degree(p, d),
        values: spectrum,
        verdicts: BTreeMap::new(),
    };
    let mut verdicts = BTreeMap::new();
    let mut put = |name: &str, v: Verdict| {
        verdicts.insert(name.to_string(), v);
    };
    put("degenerate_form", check_degenerate_form(&report));
    put("aaron", check_aaron(&report));
    put("natalie", check_three_valued_rationality(&report));
    put("michael", check_michael(&report));
    put("matilda", check_matilda(&report));
    put("julianna", check_julianna(&report));
    put("wilbur", check_wilbur(&report));
    put("nancy", check_nancy(&report));
    put("hubert", check_hubert(&report));
    put("priscilla", check_priscilla(&report));
    put("vivian", check_vivian(&report));
    put("genevieve", check_genevieve(&report, &galois, table));
    put("rufus", check_rufus(&report, table));
    put("george", check_george(&report, table));
    put("william", check_william(ctx, &report, table));
    put("subfield", check_subfield(&report));
    report.verdicts = verdicts;
    Ok(report)
}

fn check_genevieve(r: &SpectrumReport, galois: &ValueGalois, table: &WeilTable) -> Verdict {
    Verdict::implies(true, || {
        if !galois.is_closed() {
            return Err(r.witness("value set not closed under conjugation"));
        }
        for cycle in galois.cycles() {
            let first = table.counts()[cycle[0]];
            if let Some(&i) = cycle.iter().find(|&&i| table.counts()[i] != first) {
                return Err(r.witness(format!(
                    "conjugates {} and {} occur {} and {} times",
                    table.values()[cycle[0]],
                    table.values()[i],
                    first,
                    table.counts()[i]
                )));
            }
        }
        Ok(())
    })
}

/// `|W(a)| < q` for nondegenerate `d`.
fn check_rufus(r: &SpectrumReport, table: &WeilTable) -> Verdict {
    Verdict::implies(!r.degenerate, || {
        let q = r.q as i64;
        for v in table.values() {
            let ok = match v.as_rational_integer() {
                Some(m) => m.unsigned_abs() < r.q,
                None => v.real_abs_below(q),
            };
            if !ok {
                return Err(r.witness(format!("|{}| >= q", v.value_text())));
            }
        }
        Ok(())
    })
}

/// Some value is positive and some negative, for nondegenerate `d`.
fn check_george(r: &SpectrumReport, table: &WeilTable) -> Verdict {
    Verdict::implies(!r.degenerate, || {
        let (mut pos, mut neg) = (false, false);
        // rational values first: they are cheap to sign
        let mut order: Vec<&CycInt> = table.values().iter().collect();
        order.sort_by_key(|v| v.as_rational_integer().is_none());
        for v in order {
            match sign_of(v) {
                Ordering::Greater => pos = true,
                Ordering::Less => neg = true,
                Ordering::Equal => {}
            }
            if pos && neg {
                return Ok(());
            }
        }
        Err(r.witness(format!("values {} do not take both signs", r.values)))
    })
}

/// `W(a) ≥ 0` for `a` in the half-degree subfield when `d` is degenerate
/// there.
fn check_william(ctx: &FieldCtx, r: &SpectrumReport, table: &WeilTable) -> Verdict {
    Verdict::implies(r.niho == Some(true), || {
        let half = ctx.p().pow(ctx.e() / 2);
        let s = (ctx.q() - 1) / (half - 1);
        for j in (0..ctx.units_order()).step_by(s as usize) {
            let v = table.value_at_log(j);
            if sign_of(v) == Ordering::Less {
                return Err(r.witness(format!("W(g^{j}) = {} < 0", v.value_text())));
            }
        }
        Ok(())
    })
}

/// `Val = e/2` and `-p^{e/2}` is a value, for `d` degenerate over the
/// half-degree subfield but not over the field.
fn check_subfield(r: &SpectrumReport) -> Verdict {
    Verdict::implies(r.niho == Some(true) && !r.degenerate, || {
        let half = r.e / 2;
        if r.val != Valuation::integer(half as u64) {
            return Err(r.witness(format!("Val = {} instead of {half}", r.val)));
        }
        let k = r.p.pow(half) as i64;
        if r.values.multiplicity_of_int(-k) == 0 {
            return Err(r.witness(format!("-{k} is not a value")));
        }
        Ok(())
    })
}

/// Pointwise `σ_j(W(a)) = W(j^{1-1/d} a)`; returns a failing `log a`.
pub fn nathan_check(ctx: &FieldCtx, table: &WeilTable, j: u64) -> Option<u64> {
    let p = ctx.p();
    let pm1 = (p - 1).max(1);
    let dinv = mod_inverse(table.d() % pm1, pm1).unwrap_or(0);
    let exponent = (1 + pm1 - dinv) % pm1;
    let scalar = ctx.pow_u(ctx.from_int(j as i64), exponent);
    let shift = ctx.log(scalar).expect("j is a unit");
    (0..ctx.units_order()).find(|&i| {
        let lhs = table.value_at_log(i).galois_apply(j).expect("unit");
        &lhs != table.value_at_log(i + shift)
    })
}

/// `Σ_a W(a) σ_j(W(a))`, which vanishes when `σ_j` moves some value.
/// Returns `None` when `σ_j` fixes every value (nothing to check).
pub fn elaine_sum(table: &WeilTable, j: u64) -> Result<Option<CycInt>> {
    let images: Vec<CycInt> = table
        .values()
        .iter()
        .map(|v| v.galois_apply(j))
        .collect::<std::result::Result<_, _>>()?;
    if images.iter().zip(table.values()).all(|(a, b)| a == b) {
        return Ok(None);
    }
    let mut acc = CycInt::zero(table.p() as u32);
    for ((v, s), &n) in table.values().iter().zip(&images).zip(table.counts()) {
        acc = acc.try_add(&v.try_mul(s)?.try_scale(&(n as i64))?)?;
    }
    Ok(Some(acc))
}

/// Where a family exponent came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySource {
    pub row: u8,
    pub i: Option<u32>,
    /// Reduced modulo `q - 1`.
    pub d: u64,
    /// `|A| = p^k` promised by the row.
    pub k: u32,
}

/// One exponent class predicted three-valued by one of the families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyEntry {
    pub row: u8,
    pub p: u64,
    pub e: u32,
    pub i: Option<u32>,
    pub d: u64,
    pub class_rep: u64,
    /// Expected values `0, ±p^k`.
    pub k: u32,
    pub preferred: bool,
    /// Other parameter choices landing in the same class.
    pub collisions: Vec<FamilySource>,
}

impl FamilyEntry {
    pub fn a(&self) -> i64 {
        self.p.pow(self.k) as i64
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Expected `(value, multiplicity)` pairs in spectrum order.
    pub fn expected(&self) -> Vec<(i64, u64)> {
        let a = self.a();
        let q = self.q();
        let plus = n_a_formula(q, a).unwrap_or(0);
        let minus = n_a_formula(q, -a).unwrap_or(0);
        vec![(-a, minus), (0, q - 1 - plus - minus), (a, plus)]
    }

    /// Whether the collisions all promise the same magnitude.
    pub fn consistent(&self) -> bool {
        self.collisions.iter().all(|c| c.k == self.k)
    }
}

/// Why a family parameter choice was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rejection {
    Degenerate,
    NotCoprime,
}

fn table1_sources(p: u64, e: u32) -> Vec<FamilySource> {
    let q = p.pow(e);
    let n = q - 1;
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let pw = |k: u64| mod_pow(p, k, n);
    let add = |a: u64, b: u64| (a + b) % n;
    let sub = |a: u64, b: u64| (a + n - b % n) % n;
    let se = arith::v2(e as u64);
    let odd_e = e % 2 == 1;
    let gk = |i: u32| (gcd(e as u64, i as u64) as u32 + e) / 2;
    for i in 1..=e {
        if arith::v2(i as u64) < se {
            continue;
        }
        let i64_ = i as u64;
        if p == 2 {
            out.push(FamilySource {
                row: 1,
                i: Some(i),
                d: add(pw(i64_), 1),
                k: gk(i),
            });
            let d3 = add(sub(pw(2 * i64_), pw(i64_)), 1);
            out.push(FamilySource {
                row: 3,
                i: Some(i),
                d: d3,
                k: gk(i),
            });
        } else {
            let r = mod_pow(p, 2 * i64_, 2 * n);
            out.push(FamilySource {
                row: 2,
                i: Some(i),
                d: r.div_ceil(2) % n,
                k: gk(i),
            });
            let d4 = add(sub(pw(2 * i64_), pw(i64_)), 1);
            out.push(FamilySource {
                row: 4,
                i: Some(i),
                d: d4,
                k: gk(i),
            });
        }
    }
    if p == 2 && se == 1 {
        let a = (e as u64 + 2) / 4;
        let k = e / 2 + 1;
        out.push(FamilySource {
            row: 5,
            i: None,
            d: add(add(pw(e as u64 / 2), pw(a)), 1),
            k,
        });
        out.push(FamilySource {
            row: 6,
            i: None,
            d: add(pw(a), 3),
            k,
        });
    }
    if odd_e {
        let k = e.div_ceil(2);
        let h = (e as u64 - 1) / 2;
        if p == 2 {
            out.push(FamilySource {
                row: 7,
                i: None,
                d: add(pw(h), 3),
                k,
            });
        }
        if p == 3 {
            out.push(FamilySource {
                row: 8,
                i: None,
                d: add(2 * pw(h) % n, 1),
                k,
            });
        }
        for i in (1..=e).filter(|&i| (4 * i + 1) % e == 0) {
            let i64_ = i as u64;
            if p == 2 {
                let d9 = sub(add(pw(2 * i64_), pw(i64_)), 1);
                out.push(FamilySource {
                    row: 9,
                    i: Some(i),
                    d: d9,
                    k,
                });
            }
            if p == 3 {
                out.push(FamilySource {
                    row: 10,
                    i: Some(i),
                    d: add(2 * pw(i64_) % n, 1),
                    k,
                });
            }
        }
    }
    out
}

/// Family parameter choices for `(p, e)` that were discarded.
pub fn table1_rejections(p: u64, e: u32) -> Vec<(FamilySource, Rejection)> {
    let n = p.pow(e) - 1;
    table1_sources(p, e)
        .into_iter()
        .filter_map(|s| {
            if gcd(s.d, n) != 1 {
                Some((s, Rejection::NotCoprime))
            } else if ffield::is_degenerate_mod(p, e, s.d) {
                Some((s, Rejection::Degenerate))
            } else {
                None
            }
        })
        .collect()
}

/// All three-valued family instances over `F_{p^e}`, one per exponent class, in row
/// order of first appearance.
pub fn table1_families(p: u64, e: u32) -> Result<Vec<FamilyEntry>> {
    let sources = table1_sources(p, e);
    if sources.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = FieldCtx::new(p, e, None)?;
    let n = ctx.units_order();
    let mut entries: Vec<FamilyEntry> = Vec::new();
    let mut by_class: HashMap<u64, usize> = HashMap::new();
    for s in sources {
        if gcd(s.d, n) != 1 || ffield::is_degenerate_mod(p, e, s.d) {
            continue;
        }
        let rep = ffield::canonical_exponent(&ctx, s.d)?;
        match by_class.get(&rep) {
            Some(&idx) => entries[idx].collisions.push(s),
            None => {
                by_class.insert(rep, entries.len());
                let preferred = if e % 2 == 1 {
                    s.k == e.div_ceil(2)
                } else {
                    s.k == e / 2 + 1
                };
                entries.push(FamilyEntry {
                    row: s.row,
                    p,
                    e,
                    i: s.i,
                    d: s.d,
                    class_rep: rep,
                    k: s.k,
                    preferred,
                    collisions: Vec::new(),
                });
            }
        }
    }
    Ok(entries)
}

/// Compare a computed spectrum with a family prediction.
pub fn family_matches(entry: &FamilyEntry, spectrum: &Spectrum) -> bool {
    let want: Vec<(String, u64)> = entry
        .expected()
        .into_iter()
        .filter(|&(_, m)| m > 0)
        .map(|(v, m)| (v.to_string(), m))
        .collect();
    spectrum.text_pairs() == want
}
