//! Reproduction of the three-valued families: generate every instance,
//! compute its spectrum, compare with the predicted values.

use std::fmt;

use weilsum::arith;
use weilsum::charsum::{Spectrum, WeilTable};
use weilsum::ffield::FieldCtx;
use weilsum::spectra::{self, FamilyEntry, FamilySource, Rejection};

use crate::{fields_up_to, primes_up_to, Result};

#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub entry: FamilyEntry,
    pub spectrum: Spectrum,
    pub matches: bool,
}

impl fmt::Display for FamilyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entry;
        let expected: Vec<String> = e
            .expected()
            .into_iter()
            .filter(|&(_, m)| m > 0)
            .map(|(v, m)| format!("{v}:{m}"))
            .collect();
        write!(
            f,
            "{} row {} p={} e={} {}d={} values 0,±{}^{} expected {{{}}} got {}",
            if self.matches { "MATCH" } else { "MISMATCH" },
            e.row,
            e.p,
            e.e,
            e.i.map(|i| format!("i={i} ")).unwrap_or_default(),
            e.d,
            e.p,
            e.k,
            expected.join(", "),
            self.spectrum
        )?;
        if !e.collisions.is_empty() {
            let also: Vec<String> = e.collisions.iter().map(source_text).collect();
            write!(f, " (same class: {})", also.join("; "))?;
        }
        Ok(())
    }
}

fn source_text(s: &FamilySource) -> String {
    match s.i {
        Some(i) => format!("row {} i={i} d={}", s.row, s.d),
        None => format!("row {} d={}", s.row, s.d),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table1Report {
    pub checks: Vec<FamilyCheck>,
    pub rejected: Vec<(u64, u32, FamilySource, Rejection)>,
}

impl Table1Report {
    pub fn mismatches(&self) -> usize {
        self.checks.iter().filter(|c| !c.matches).count()
    }
}

impl fmt::Display for Table1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for (p, e, s, why) in &self.rejected {
            let why = match why {
                Rejection::Degenerate => "degenerate",
                Rejection::NotCoprime => "not coprime to q-1",
            };
            writeln!(f, "skip p={p} e={e} {}: {why}", source_text(s))?;
        }
        write!(
            f,
            "{} instances, {} mismatches",
            self.checks.len(),
            self.mismatches()
        )
    }
}

/// Check the families over the given fields.
pub fn reproduce(fields: &[(u64, u32)]) -> Result<Table1Report> {
    let mut report = Table1Report::default();
    for &(p, e) in fields {
        let entries = spectra::table1_families(p, e)?;
        if !entries.is_empty() {
            let ctx = FieldCtx::new(p, e, None)?;
            for entry in entries {
                let spectrum = WeilTable::compute(&ctx, entry.d)?.spectrum();
                let matches = spectra::family_matches(&entry, &spectrum);
                report.checks.push(FamilyCheck {
                    entry,
                    spectrum,
                    matches,
                });
            }
        }
        report.rejected.extend(
            spectra::table1_rejections(p, e)
                .into_iter()
                .map(|(s, r)| (p, e, s, r)),
        );
    }
    Ok(report)
}

/// Fields for a reproduction run: one prime, or every prime, with `q ≤ q_max`.
pub fn table1_fields(p: Option<u64>, e_max: Option<u32>, q_max: u64) -> Vec<(u64, u32)> {
    let primes = match p {
        Some(p) => vec![p],
        None => primes_up_to((arith::isqrt(q_max as u128) as u64).max(2)),
    };
    fields_up_to(&primes, q_max, e_max)
        .into_iter()
        .filter(|&(_, e)| e >= 2 || p.is_some())
        .collect()
}
