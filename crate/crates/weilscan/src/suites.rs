//! Verification suites: each runs one family of exact identities over a
//! range of fields and counts checks and failures.

use std::fmt;
use std::str::FromStr;

use weilsum::arith;
use weilsum::charsum::{self, MultChar, WeilTable};
use weilsum::cyclo::{CycInt, Valuation};
use weilsum::ffield::{self, exponent_classes, FieldCtx};
use weilsum::spectra;

use crate::{fields_up_to, primes_up_to, Result, ScanError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Moments,
    Inversion,
    DavenportHasse,
    Valuation,
    Congruence,
    Galois,
    Theorems,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Moments,
        Suite::Inversion,
        Suite::DavenportHasse,
        Suite::Valuation,
        Suite::Congruence,
        Suite::Galois,
        Suite::Theorems,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Moments => "moments",
            Suite::Inversion => "inversion",
            Suite::DavenportHasse => "davenport-hasse",
            Suite::Valuation => "valuation",
            Suite::Congruence => "congruence",
            Suite::Galois => "galois",
            Suite::Theorems => "theorems",
        }
    }
}

impl FromStr for Suite {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| ScanError::Config(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checks, {} failures",
            self.suite,
            self.checks,
            self.failures.len()
        )?;
        for w in &self.failures {
            write!(f, "\n  FAIL {w}")?;
        }
        Ok(())
    }
}

/// Explicit fields for a suite, or every field up to `q_max`.
#[derive(Debug, Clone, Default)]
pub struct Bounds {
    pub q_max: Option<u64>,
    pub primes: Option<Vec<u64>>,
}

impl Bounds {
    fn fields_or(&self, default: &[u64]) -> Vec<(u64, u32)> {
        match self.q_max {
            Some(q) => {
                let primes = self.primes.clone().unwrap_or_else(|| primes_up_to(q));
                fields_up_to(&primes, q, None)
            }
            None => default.iter().map(|&q| prime_power(q)).collect(),
        }
    }
}

fn prime_power(q: u64) -> (u64, u32) {
    let p = arith::prime_factors(q)[0];
    (p, arith::exact_log(q as u128, p).expect("prime power"))
}

fn field(p: u64, e: u32) -> Result<FieldCtx> {
    Ok(FieldCtx::new(p, e, None)?)
}

fn valid_exponents(ctx: &FieldCtx) -> Vec<u64> {
    let n = ctx.units_order();
    if n == 1 {
        return vec![1];
    }
    (1..n).filter(|&d| arith::gcd(d, n) == 1).collect()
}

pub fn run(suite: Suite, bounds: &Bounds) -> Result<SuiteReport> {
    match suite {
        Suite::Moments => moments(&bounds.fields_or(&[])),
        Suite::Inversion => inversion(&bounds.fields_or(&[4, 5, 7, 8, 9, 11, 13, 16, 27])),
        Suite::DavenportHasse => davenport_hasse(&DH_PAIRS),
        Suite::Valuation => valuation(),
        Suite::Congruence => congruence(&CONGRUENCE_PAIRS),
        Suite::Galois => galois(&bounds.fields_or(&[5, 7, 9, 25, 27, 49])),
        Suite::Theorems => theorems(&bounds.fields_or(&[])),
    }
}

/// Default bound for the suites that range over all small fields.
pub fn default_bounds(suite: Suite) -> Bounds {
    let q_max = match suite {
        Suite::Moments => Some(128),
        Suite::Theorems => Some(1024),
        _ => None,
    };
    Bounds {
        q_max,
        primes: None,
    }
}

/// `Σ W = q`, `Σ W² = q²`, `Σ W³ = q²|R|` over `a ∈ K^×`.
pub fn moments(fields: &[(u64, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Moments);
    for &(p, e) in fields {
        let ctx = field(p, e)?;
        let q = ctx.q() as i64;
        for class in exponent_classes(&ctx) {
            let spec = charsum::weil_spectrum(&ctx, class.d)?;
            let r = charsum::root_count_r(&ctx, class.d)? as i64;
            let want = [q, q * q, q * q * r];
            for (m, &w) in (1..=3).zip(&want) {
                let got = charsum::power_moment(&spec, m)?;
                report.check(got == CycInt::from_int(p as u32, w), || {
                    format!(
                        "p={p} e={e} d={} moment {m}: {} != {w}",
                        class.d,
                        got.value_text()
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Both sides of the inversion formula for every character and exponent,
/// and the product of Gauss sums `±q^{q-2}`.
pub fn inversion(fields: &[(u64, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Inversion);
    for &(p, e) in fields {
        let ctx = field(p, e)?;
        let q = ctx.q();
        for d in valid_exponents(&ctx) {
            let table = WeilTable::compute(&ctx, d)?;
            for chi in MultChar::all(&ctx) {
                let (lhs, rhs) = charsum::fourier_inversion_sides(&ctx, &table, &chi)?;
                report.check(lhs == rhs, || {
                    format!("p={p} e={e} d={d} chi={}: {lhs} != {rhs}", chi.index())
                });
            }
            let prod = charsum::gauss_product_formula_check(&ctx, d)?;
            let target = num_bigint::BigInt::from(q).pow((q - 2) as u32);
            let ok = prod
                .as_ref()
                .is_some_and(|v| *v == target || *v == -target.clone());
            report.check(ok, || format!("p={p} e={e} d={d}: Gauss product {prod:?}"));
        }
    }
    Ok(report)
}

/// `(p, e_K, e_L)` pairs for the lifting relation.
pub const DH_PAIRS: [(u64, u32, u32); 6] = [
    (2, 1, 2),
    (2, 1, 3),
    (3, 1, 2),
    (2, 2, 4),
    (5, 1, 2),
    (3, 1, 3),
];

pub fn davenport_hasse(pairs: &[(u64, u32, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::DavenportHasse);
    for &(p, ek, el) in pairs {
        let (k, l) = (field(p, ek)?, field(p, el)?);
        for chi in MultChar::all(&k) {
            let (lhs, rhs) = charsum::davenport_hasse_check(&k, &l, &chi)?;
            report.check(lhs == rhs, || {
                format!("{}->{} chi={}: {lhs} != {rhs}", k.q(), l.q(), chi.index())
            });
        }
    }
    Ok(report)
}

fn val_of(ctx: &FieldCtx, d: u64) -> Result<Valuation> {
    Ok(charsum::min_valuation(&charsum::weil_spectrum(ctx, d)?)?)
}

/// The subfield valuation example, `Val_L ≤ [L:K] Val_K`, and the digit-sum
/// oracle.
pub fn valuation() -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Valuation);
    let f9 = field(3, 2)?;
    let spec = charsum::weil_spectrum(&f9, 5)?;
    let v = charsum::min_valuation(&spec)?;
    report.check(v == Valuation::integer(1), || {
        format!("Val over F_9, d=5 is {v}")
    });
    report.check(spec.multiplicity_of_int(-3) > 0, || {
        format!("-3 missing from {spec}")
    });
    for (p, ek, el) in [(3, 2, 4), (2, 2, 4), (2, 3, 6)] {
        let (k, l) = (field(p, ek)?, field(p, el)?);
        for d in valid_exponents(&l) {
            let big = val_of(&l, d)?;
            let small = val_of(&k, d % k.units_order())?;
            let bound = small.times((el / ek) as u64);
            report.check(big <= bound, || {
                format!("{}->{} d={d}: Val_L={big} > {bound}", k.q(), l.q())
            });
        }
    }
    for q in [8, 9, 16, 27] {
        let (p, e) = prime_power(q);
        let ctx = field(p, e)?;
        for d in valid_exponents(&ctx) {
            let (oracle, direct) = (charsum::stickelberger_min(&ctx, d)?, val_of(&ctx, d)?);
            report.check(oracle == direct, || {
                format!("q={q} d={d}: digit-sum min {oracle}, Val {direct}")
            });
        }
    }
    Ok(report)
}

/// `(p, e_K, e_L)` pairs for the subfield congruences.
pub const CONGRUENCE_PAIRS: [(u64, u32, u32); 3] = [(3, 1, 2), (2, 1, 4), (2, 1, 3)];

pub fn congruence(pairs: &[(u64, u32, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Congruence);
    for &(p, ek, el) in pairs {
        let (k, l) = (field(p, ek)?, field(p, el)?);
        for d in valid_exponents(&l) {
            for a in k.elements() {
                let ok = charsum::chiara_congruence_check(&k, &l, d, a)?;
                report.check(ok, || format!("{}->{} d={d} a={a:?}", k.q(), l.q()));
            }
            if ffield::is_degenerate_mod(p, ek, d) {
                let bad = charsum::degenerate_subfield_congruence(&k, &l, d)?;
                report.check(bad.is_none(), || {
                    format!(
                        "{}->{} d={d} degenerate over K, fails at {bad:?}",
                        k.q(),
                        l.q()
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Equivariance, conjugate multiplicities, value-field degree, scaled
/// second moments and orthogonality.
pub fn galois(fields: &[(u64, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Galois);
    for &(p, e) in fields {
        let ctx = field(p, e)?;
        for class in exponent_classes(&ctx) {
            let d = class.d;
            let table = WeilTable::compute(&ctx, d)?;
            let spec = table.spectrum();
            let tag = format!("p={p} e={e} d={d}");
            for j in 1..p {
                let bad = spectra::nathan_check(&ctx, &table, j);
                report.check(bad.is_none(), || {
                    format!("{tag} j={j}: equivariance fails at log a = {bad:?}")
                });
                if let Some(s) = spectra::elaine_sum(&table, j)? {
                    report.check(s.is_zero(), || {
                        format!("{tag} j={j}: orthogonality sum {s}")
                    });
                }
            }
            report.check(spectra::conjugate_multiplicity_check(&spec), || {
                format!("{tag}: conjugate multiplicities differ in {spec}")
            });
            let (obs, pred) = (
                spectra::observed_value_field_degree(&spec),
                spectra::predicted_value_field_degree(p, d),
            );
            report.check(obs == pred, || {
                format!("{tag}: m observed {obs}, predicted {pred}")
            });
            for b in ctx.units().filter(|&b| b != ctx.one()) {
                let s = charsum::scaled_second_moment(&ctx, &table, b)?;
                report.check(s.is_zero(), || {
                    format!("{tag} b={b:?}: scaled second moment {s}")
                });
            }
        }
    }
    Ok(report)
}

/// Every per-spectrum verdict over the given fields.
pub fn theorems(fields: &[(u64, u32)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Theorems);
    for &(p, e) in fields {
        let ctx = field(p, e)?;
        for class in exponent_classes(&ctx) {
            let r = spectra::classify(&ctx, class.d)?;
            for (name, v) in &r.verdicts {
                report.check(!v.is_fail(), || format!("{name}: {v}"));
            }
        }
    }
    Ok(report)
}
