//! Characters of finite fields and the exact sums built from them: Weil
//! sums of binomials, Gauss sums, moments, and the subfield identities.
//!
//! Weil sums live in `Z[ζ_p]`. Gauss sums need both `ζ_p` and `ζ_{q-1}`, so
//! they live in `Z[ζ_N]` with `N = p(q-1)`, where `ζ_p = ζ_N^{q-1}` and
//! `ζ_{q-1} = ζ_N^p`.

use std::collections::HashMap;
use std::hash::BuildHasher;

use num_bigint::BigInt;
use rustc_hash::{FxBuildHasher, FxHashMap};
use serde::ser::SerializeSeq;
use thiserror::Error;

use crate::arith::{self, gcd, mod_inverse};
use crate::cyclo::{CycError, CycInt, Valuation};
use crate::ffield::{self, Embedding, FieldCtx, FieldElem, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharSumError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyc(#[from] CycError),
    #[error("extension degree must be 2, got {0}")]
    NotQuadratic(u32),
    #[error("exponent {d} must be degenerate over the subfield but not over the field")]
    DegeneracyMismatch { d: u64 },
    #[error("extension degree {0} is not a prime power")]
    BadExtensionDegree(u32),
    #[error("character index {k} is out of range for a field of order {q}")]
    BadCharacter { k: u64, q: u64 },
}

pub type Result<T, E = CharSumError> = std::result::Result<T, E>;

/// Multiplicative character `χ(g^j) = ζ_{q-1}^{k j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultChar {
    q: u64,
    k: u64,
}

impl MultChar {
    pub fn new(ctx: &FieldCtx, k: u64) -> Result<Self> {
        let n = ctx.units_order();
        if k >= n {
            return Err(CharSumError::BadCharacter { k, q: ctx.q() });
        }
        Ok(MultChar { q: ctx.q(), k })
    }

    pub fn trivial(ctx: &FieldCtx) -> Self {
        MultChar { q: ctx.q(), k: 0 }
    }

    /// All characters of the field, trivial first.
    pub fn all(ctx: &FieldCtx) -> impl Iterator<Item = MultChar> {
        let q = ctx.q();
        (0..q - 1).map(move |k| MultChar { q, k })
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0
    }

    pub fn conj(&self) -> Self {
        let n = self.q - 1;
        MultChar {
            q: self.q,
            k: (n - self.k) % n,
        }
    }

    /// `χ^m` (negative `m` allowed).
    pub fn pow(&self, m: i64) -> Self {
        let n = (self.q - 1) as i128;
        let k = (self.k as i128 * m as i128).rem_euclid(n) as u64;
        MultChar { q: self.q, k }
    }

    /// Exponent of `ζ_{q-1}` in `χ(g^j)`.
    pub fn exponent_at_log(&self, j: u64) -> u64 {
        let n = self.q - 1;
        ((self.k as u128 * j as u128) % n as u128) as u64
    }
}

/// `ψ(x) = ζ_p^{Tr(x)}`.
pub fn additive_char(ctx: &FieldCtx, x: FieldElem) -> CycInt {
    CycInt::zeta_pow(ctx.p() as u32, ctx.trace_abs(x) as i64)
}

/// Precomputed trace data for one `(field, d)`.
struct WeilKernel<'a> {
    ctx: &'a FieldCtx,
    d: u64,
    /// `Tr(g^{i d})`.
    f: Vec<u32>,
    /// `Tr(g^i)` for `i < 2(q-1)`.
    tt: Vec<u32>,
}

impl<'a> WeilKernel<'a> {
    fn new(ctx: &'a FieldCtx, d: u64) -> Result<Self> {
        let d = ctx.normalize_exponent(d)?;
        let t = ctx.trace_table_by_log();
        let n = t.len();
        let f = (0..n)
            .map(|i| t[((i as u128 * d as u128) % n as u128) as usize])
            .collect();
        let mut tt = Vec::with_capacity(2 * n);
        tt.extend_from_slice(t);
        tt.extend_from_slice(t);
        Ok(WeilKernel { ctx, d, f, tt })
    }

    /// Canonical coefficients of `W(g^j)`.
    fn value_at_log(&self, j: usize, hist: &mut Vec<u32>) -> Vec<i64> {
        let p = self.ctx.p() as usize;
        let n = self.f.len();
        hist.clear();
        hist.resize(p, 0);
        let window = &self.tt[j..j + n];
        let pp = p as u32;
        for (&a, &b) in self.f.iter().zip(window) {
            let t = a + b;
            hist[(if t >= pp { t - pp } else { t }) as usize] += 1;
        }
        // x = 0 contributes ζ^0
        hist[0] += 1;
        let top = hist[p - 1] as i64;
        hist[..p - 1].iter().map(|&c| c as i64 - top).collect()
    }
}

/// Bit-packed traces for `p = 2`, where `W(a) = q - 2·#{x : Tr(x^d + ax) = 1}`.
struct BinaryKernel {
    n: usize,
    f: Vec<u64>,
    tt: Vec<u64>,
}

impl BinaryKernel {
    fn new(kernel: &WeilKernel<'_>) -> Self {
        let n = kernel.f.len();
        let pack = |bits: &[u32], len: usize| {
            let mut words = vec![0u64; len.div_ceil(64) + 1];
            for (i, &b) in bits.iter().enumerate().take(len) {
                if b != 0 {
                    words[i / 64] |= 1 << (i % 64);
                }
            }
            words
        };
        BinaryKernel {
            n,
            f: pack(&kernel.f, n),
            tt: pack(&kernel.tt, 2 * n),
        }
    }

    fn value_at_log(&self, j: usize) -> i64 {
        let words = self.n.div_ceil(64);
        let (base, sh) = (j / 64, j % 64);
        let mut ones = 0u32;
        for k in 0..words {
            let lo = self.tt[base + k];
            let window = if sh == 0 {
                lo
            } else {
                (lo >> sh) | (self.tt[base + k + 1] << (64 - sh))
            };
            let mut x = self.f[k] ^ window;
            if k == words - 1 && !self.n.is_multiple_of(64) {
                x &= (1u64 << (self.n % 64)) - 1;
            }
            ones += x.count_ones();
        }
        1 + self.n as i64 - 2 * ones as i64
    }
}

/// `W_{K,d}(a) = Σ_x ψ(x^d + a x)`.
pub fn weil_sum(ctx: &FieldCtx, d: u64, a: FieldElem) -> Result<CycInt> {
    let kernel = WeilKernel::new(ctx, d)?;
    let p = ctx.p() as u32;
    Ok(match ctx.log(a) {
        None => CycInt::zero(p),
        Some(j) => CycInt::from_canonical(p, kernel.value_at_log(j as usize, &mut Vec::new())),
    })
}

/// The Weil sum at every `a ∈ K^×`, with equal values shared.
#[derive(Debug, Clone)]
pub struct WeilTable {
    p: u64,
    e: u32,
    d: u64,
    values: Vec<CycInt>,
    counts: Vec<u64>,
    by_log: Vec<u32>,
}

impl WeilTable {
    pub fn compute(ctx: &FieldCtx, d: u64) -> Result<Self> {
        Self::build(ctx, d, ctx.p() == 2)
    }

    /// Same as [`WeilTable::compute`] but never takes the `p = 2` shortcut.
    pub fn compute_generic(ctx: &FieldCtx, d: u64) -> Result<Self> {
        Self::build(ctx, d, false)
    }

    fn build(ctx: &FieldCtx, d: u64, binary: bool) -> Result<Self> {
        let kernel = WeilKernel::new(ctx, d)?;
        let n = ctx.units_order() as usize;
        let p = ctx.p();
        let bin = binary.then(|| BinaryKernel::new(&kernel));
        // buckets of slots keyed by the hash of the coefficient vector, so
        // each long key is hashed once and stored once
        let mut slot_of: FxHashMap<u64, Vec<u32>> = FxHashMap::default();
        let mut reps: Vec<Vec<i64>> = Vec::new();
        let mut by_log = vec![u32::MAX; n];
        let mut hist = Vec::new();
        for j in 0..n {
            if by_log[j] != u32::MAX {
                continue;
            }
            let key = match &bin {
                Some(b) => vec![b.value_at_log(j)],
                None => kernel.value_at_log(j, &mut hist),
            };
            let bucket = slot_of.entry(FxBuildHasher.hash_one(&key)).or_default();
            let slot = match bucket.iter().find(|&&s| reps[s as usize] == key) {
                Some(&s) => s,
                None => {
                    let next = reps.len() as u32;
                    reps.push(key);
                    bucket.push(next);
                    next
                }
            };
            // W(a^p) = W(a): fill the whole Frobenius orbit of j
            let mut k = j;
            loop {
                by_log[k] = slot;
                k = (k as u64 * p % n as u64) as usize;
                if k == j {
                    break;
                }
            }
        }
        let raw: Vec<CycInt> = reps
            .into_iter()
            .map(|c| CycInt::from_canonical(p as u32, c))
            .collect();
        // spectrum order: rational values ascending, then irrational values
        // by canonical coefficients
        let rational: Vec<Option<i64>> = raw.iter().map(CycInt::as_rational_integer).collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| match (rational[a], rational[b]) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => raw[a].coeffs().cmp(raw[b].coeffs()),
        });
        let mut remap = vec![0u32; raw.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        let values: Vec<CycInt> = order.iter().map(|&i| raw[i].clone()).collect();
        let mut counts = vec![0u64; values.len()];
        for s in by_log.iter_mut() {
            *s = remap[*s as usize];
            counts[*s as usize] += 1;
        }
        Ok(WeilTable {
            p,
            e: ctx.e(),
            d: kernel.d,
            values,
            counts,
            by_log,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.by_log.len() as u64 + 1
    }

    /// The (normalized) exponent.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Distinct values in spectrum order.
    pub fn values(&self) -> &[CycInt] {
        &self.values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Index into [`WeilTable::values`] of `W(g^j)`.
    pub fn slot_at_log(&self, j: u64) -> usize {
        self.by_log[(j % self.by_log.len() as u64) as usize] as usize
    }

    pub fn value_at_log(&self, j: u64) -> &CycInt {
        &self.values[self.slot_at_log(j)]
    }

    pub fn value(&self, ctx: &FieldCtx, a: FieldElem) -> CycInt {
        match ctx.log(a) {
            None => CycInt::zero(self.p as u32),
            Some(j) => self.value_at_log(j).clone(),
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            p: self.p,
            e: self.e,
            d: self.d,
            entries: self
                .values
                .iter()
                .cloned()
                .zip(self.counts.iter().copied())
                .collect(),
        }
    }
}

/// The value multiset of `W_{K,d}` over `K^×`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    p: u64,
    e: u32,
    d: u64,
    entries: Vec<(CycInt, u64)>,
}

impl Spectrum {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// `(value, multiplicity)` pairs in spectrum order.
    pub fn entries(&self) -> &[(CycInt, u64)] {
        &self.entries
    }

    pub fn value_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, v: &CycInt) -> u64 {
        self.entries
            .iter()
            .find(|(w, _)| w == v)
            .map_or(0, |(_, m)| *m)
    }

    pub fn multiplicity_of_int(&self, m: i64) -> u64 {
        self.multiplicity(&CycInt::from_int(self.p as u32, m))
    }

    /// The values when all are rational integers.
    pub fn rational_values(&self) -> Option<Vec<i64>> {
        self.entries
            .iter()
            .map(|(v, _)| v.as_rational_integer())
            .collect()
    }

    pub fn contains_zero(&self) -> bool {
        self.entries.iter().any(|(v, _)| v.is_zero())
    }

    /// `(value-text, multiplicity)` pairs as used in catalogs.
    pub fn text_pairs(&self) -> Vec<(String, u64)> {
        self.entries
            .iter()
            .map(|(v, m)| (v.value_text(), *m))
            .collect()
    }
}

impl std::fmt::Display for Spectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .text_pairs()
            .into_iter()
            .map(|(v, m)| format!("{v}:{m}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl serde::Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for pair in self.text_pairs() {
            seq.serialize_element(&pair)?;
        }
        seq.end()
    }
}

pub fn weil_spectrum(ctx: &FieldCtx, d: u64) -> Result<Spectrum> {
    Ok(WeilTable::compute(ctx, d)?.spectrum())
}

/// `Σ_v N_v v^m`.
pub fn power_moment(spectrum: &Spectrum, m: u32) -> Result<CycInt> {
    let p = spectrum.p as u32;
    let mut acc = CycInt::zero(p);
    for (v, mult) in &spectrum.entries {
        let term = v.try_pow(m)?.try_scale(&(*mult as i64))?;
        acc = acc.try_add(&term)?;
    }
    Ok(acc)
}

/// `|R|` for `R = {x : (x+1)^d = x^d + 1}`.
pub fn root_count_r(ctx: &FieldCtx, d: u64) -> Result<u64> {
    let d = ctx.normalize_exponent(d)?;
    let one = ctx.one();
    let pw = |x: FieldElem| ctx.pow_u(x, d);
    Ok(ctx
        .elements()
        .filter(|&x| pw(ctx.add(x, one)) == ctx.add(pw(x), one))
        .count() as u64)
}

/// `Σ_{a ∈ K^×} W_{L,d}(a)` over the subfield `K` of degree `k_deg`, for
/// `[L:K] = 2`.
pub fn restricted_first_moment(l: &FieldCtx, k_deg: u32, d: u64) -> Result<CycInt> {
    if k_deg == 0 || l.e() != 2 * k_deg {
        return Err(CharSumError::NotQuadratic(
            l.e().checked_div(k_deg).unwrap_or(0),
        ));
    }
    let table = WeilTable::compute(l, d)?;
    let s = (l.q() - 1) / (l.p().pow(k_deg) - 1);
    let mut acc = CycInt::zero(l.p() as u32);
    for j in (0..l.units_order()).step_by(s as usize) {
        acc = acc.try_add(table.value_at_log(j))?;
    }
    Ok(acc)
}

/// `G(χ) = Σ_{a ∈ K^×} χ(a) ψ(a)` in `Z[ζ_{p(q-1)}]`.
pub fn gauss_sum(ctx: &FieldCtx, chi: &MultChar) -> CycInt {
    let p = ctx.p();
    let n = ctx.units_order();
    let big_n = p * n;
    let mut gr = vec![0i64; big_n as usize];
    for j in 0..n {
        let e = (p * chi.exponent_at_log(j) + n * ctx.trace_of_gen_pow(j)) % big_n;
        gr[e as usize] += 1;
    }
    CycInt::from_group_ring(big_n as u32, gr)
}

/// Both sides of `Σ_a W(a^t) χ(a) = q` (trivial `χ`) or `G(χ) G(χ̄^d)`,
/// with `t = (-d)^{-1} mod (q-1)`, in `Z[ζ_{p(q-1)}]`.
pub fn fourier_inversion_check(ctx: &FieldCtx, d: u64, chi: &MultChar) -> Result<(CycInt, CycInt)> {
    let d = ctx.normalize_exponent(d)?;
    let table = WeilTable::compute(ctx, d)?;
    fourier_inversion_sides(ctx, &table, chi)
}

pub fn fourier_inversion_sides(
    ctx: &FieldCtx,
    table: &WeilTable,
    chi: &MultChar,
) -> Result<(CycInt, CycInt)> {
    let p = ctx.p();
    let n = ctx.units_order();
    let big_n = p * n;
    let d = table.d();
    let minus_d = (n - d % n) % n;
    let t = mod_inverse(minus_d, n).ok_or(FieldError::NotCoprime { d, modulus: n })?;
    let mut gr = vec![0i64; big_n as usize];
    for j in 0..n {
        let w = table.value_at_log((t as u128 * j as u128 % n as u128) as u64);
        let chi_part = p * chi.exponent_at_log(j);
        for (s, &c) in w.coeffs().iter().enumerate() {
            if c != 0 {
                let idx = (n * s as u64 + chi_part) % big_n;
                gr[idx as usize] += c;
            }
        }
    }
    let lhs = CycInt::from_group_ring(big_n as u32, gr);
    let rhs = if chi.is_trivial() {
        CycInt::from_int(big_n as u32, ctx.q() as i64)
    } else {
        let other = chi.conj().pow(d as i64);
        gauss_sum(ctx, chi).try_mul(&gauss_sum(ctx, &other))?
    };
    Ok((lhs, rhs))
}

/// `∏_{χ ≠ 1} G(χ) G(χ̄^d)`, which should be `±q^{q-2}`; `None` if the
/// product is not a rational integer.
pub fn gauss_product_formula_check(ctx: &FieldCtx, d: u64) -> Result<Option<BigInt>> {
    let d = ctx.normalize_exponent(d)?;
    let big_n = (ctx.p() * ctx.units_order()) as u32;
    let gauss: Vec<CycInt<BigInt>> = MultChar::all(ctx)
        .map(|chi| gauss_sum(ctx, &chi).to_big())
        .collect();
    let mut acc = CycInt::<BigInt>::one(big_n);
    for chi in MultChar::all(ctx).skip(1) {
        let other = chi.conj().pow(d as i64);
        acc = acc.try_mul(&gauss[chi.index() as usize])?;
        acc = acc.try_mul(&gauss[other.index() as usize])?;
    }
    Ok(acc.as_rational_integer())
}

/// The character `χ ∘ N_{L/K}` of `L` for a character `χ` of `K`, relative
/// to the embedding used throughout.
pub fn lift_character(emb: &Embedding<'_>, chi: &MultChar) -> MultChar {
    let (k, l) = (emb.sub(), emb.sup());
    let nk = k.units_order();
    let nl = l.units_order();
    let s = nl / nk;
    // g_L^s is the image of g_K^{1/u}
    let uinv = mod_inverse(emb.twist() % nk, nk).unwrap_or(0);
    let idx = (chi.index() as u128 * uinv as u128 % nk as u128) as u64 * s;
    MultChar {
        q: l.q(),
        k: idx % nl,
    }
}

/// Both sides of `-G_L(χ ∘ N) = (-G_K(χ))^{[L:K]}` in `Z[ζ_{p(|L|-1)}]`.
pub fn davenport_hasse_check(
    k: &FieldCtx,
    l: &FieldCtx,
    chi: &MultChar,
) -> Result<(CycInt, CycInt)> {
    let emb = Embedding::new(k, l)?;
    let big_n = (l.p() * l.units_order()) as u32;
    let lifted = lift_character(&emb, chi);
    let lhs = gauss_sum(l, &lifted).try_neg()?;
    let base = gauss_sum(k, chi).try_neg()?.lift(big_n)?;
    let rhs = base.try_pow(emb.degree())?;
    Ok((lhs, rhs))
}

/// `Val_{K,d}`: the least valuation among the spectrum's values.
pub fn min_valuation(spectrum: &Spectrum) -> Result<Valuation> {
    let mut best = Valuation::Infinite;
    for (v, _) in &spectrum.entries {
        best = best.min(v.p_adic_valuation()?);
    }
    Ok(best)
}

/// `s_p(k)/(p-1)`, with `s_p` the base-`p` digit sum over `e` digits.
pub fn stickelberger_valuation_oracle(ctx: &FieldCtx, k: u64) -> Result<Valuation> {
    let n = ctx.units_order();
    if k == 0 || k >= n {
        return Err(CharSumError::BadCharacter { k, q: ctx.q() });
    }
    Ok(Valuation::from_units(
        arith::digit_sum(k, ctx.p(), ctx.e()),
        ctx.p(),
    ))
}

/// `min_{k ≠ 0} (s_p(k) + s_p(-k d)) / (p-1)`.
pub fn stickelberger_min(ctx: &FieldCtx, d: u64) -> Result<Valuation> {
    let d = ctx.normalize_exponent(d)?;
    let n = ctx.units_order();
    let mut best = Valuation::Infinite;
    for k in 1..n {
        let other = (n - (k as u128 * d as u128 % n as u128) as u64) % n;
        let v = stickelberger_valuation_oracle(ctx, k)?
            .plus(&stickelberger_valuation_oracle(ctx, other)?);
        best = best.min(v);
    }
    Ok(best)
}

/// Member of the exponent class of `d` congruent to `1` modulo `|K|-1`,
/// where `d` is degenerate over `K` (degree `k_deg`).
pub fn normalize_to_subfield_identity(l: &FieldCtx, k_deg: u32, d: u64) -> u64 {
    let n = l.units_order();
    let nk = l.p().pow(k_deg) - 1;
    let mut x = d % n;
    for _ in 0..l.e() {
        if x % nk == 1 % nk {
            return x;
        }
        x = (x as u128 * l.p() as u128 % n as u128) as u64;
    }
    unreachable!("d is degenerate over the subfield")
}

/// `Z(a) = #{y ∈ Y : Tr_{L/K}(y^d + a y) = 0}` with `Y = {g_L^j : 0 ≤ j ≤ |K|}`,
/// for `[L:K] = 2` and `d` degenerate over `K` only. The exponent is first
/// moved within its class to one that is `≡ 1 mod (|K|-1)`, which leaves
/// `W_{L,d}` unchanged.
pub fn coset_trace_count(l: &FieldCtx, k_deg: u32, d: u64, a: FieldElem) -> Result<u64> {
    if k_deg == 0 || l.e() != 2 * k_deg {
        return Err(CharSumError::NotQuadratic(
            l.e().checked_div(k_deg).unwrap_or(0),
        ));
    }
    let d = l.normalize_exponent(d)?;
    if !ffield::is_degenerate_mod(l.p(), k_deg, d) || ffield::is_degenerate_mod(l.p(), l.e(), d) {
        return Err(CharSumError::DegeneracyMismatch { d });
    }
    let d = normalize_to_subfield_identity(l, k_deg, d);
    let kq = l.p().pow(k_deg);
    let mut z = 0;
    for j in 0..=kq {
        let y = l.gen_pow(j);
        let arg = l.add(l.pow_u(y, d), l.mul(a, y));
        if l.trace_rel(k_deg, arg)?.is_zero() {
            z += 1;
        }
    }
    Ok(z)
}

/// `Σ_{a ∈ K^×} W(a) W(b a)`.
pub fn scaled_second_moment(ctx: &FieldCtx, table: &WeilTable, b: FieldElem) -> Result<CycInt> {
    let p = ctx.p() as u32;
    let Some(m) = ctx.log(b) else {
        return Ok(CycInt::zero(p));
    };
    let n = ctx.units_order();
    let mut pairs: HashMap<(usize, usize), i64> = HashMap::new();
    for j in 0..n {
        *pairs
            .entry((table.slot_at_log(j), table.slot_at_log(j + m)))
            .or_default() += 1;
    }
    let mut keys: Vec<_> = pairs.into_iter().collect();
    keys.sort_unstable();
    let mut acc = CycInt::zero(p);
    for ((x, y), c) in keys {
        let prod = table.values()[x].try_mul(&table.values()[y])?;
        acc = acc.try_add(&prod.try_scale(&c)?)?;
    }
    Ok(acc)
}

/// The prime `ℓ` with `[L:K]` a power of `ℓ`.
fn prime_of_power(m: u32) -> Option<u64> {
    let f = arith::prime_factors(m as u64);
    (f.len() == 1).then(|| f[0])
}

/// The scalar `[L:K]^{1-1/d}` of `F_p`, as an element of `K`.
///
/// When `p` divides `[L:K]` the scalar is `0`.
pub fn chiara_scalar(k: &FieldCtx, deg: u32, d: u64) -> FieldElem {
    let p = k.p();
    let m = deg as u64 % p;
    if m == 0 {
        return k.zero();
    }
    let pm1 = p - 1;
    let dinv = mod_inverse(d % pm1.max(1), pm1.max(1)).unwrap_or(0);
    let exponent = (1 + pm1 - dinv % pm1.max(1)) % pm1.max(1);
    k.pow_u(k.from_int(m as i64), exponent)
}

/// `W_{L,d}(a) ≡ W_{K,d}([L:K]^{1-1/d} a) (mod ℓ)` for `a ∈ K`, with
/// `[L:K]` a power of the prime `ℓ`.
pub fn chiara_congruence_check(k: &FieldCtx, l: &FieldCtx, d: u64, a: FieldElem) -> Result<bool> {
    let emb = Embedding::new(k, l)?;
    let deg = emb.degree();
    let ell = prime_of_power(deg).ok_or(CharSumError::BadExtensionDegree(deg))?;
    let d = l.normalize_exponent(d)?;
    let wl = weil_sum(l, d, emb.apply(a))?;
    let b = k.mul(chiara_scalar(k, deg, d), a);
    let wk = weil_sum(k, k.normalize_exponent(d)?, b)?;
    Ok(wl.try_sub(&wk)?.divisible_by_integer(ell))
}

/// For `d` degenerate over `K`: `W_L(-1) ≡ |K|` and `W_L(a) ≡ 0 (mod ℓ)`
/// for the other `a ∈ K`. Returns the first failing `a`, if any.
pub fn degenerate_subfield_congruence(
    k: &FieldCtx,
    l: &FieldCtx,
    d: u64,
) -> Result<Option<FieldElem>> {
    let emb = Embedding::new(k, l)?;
    let deg = emb.degree();
    let ell = prime_of_power(deg).ok_or(CharSumError::BadExtensionDegree(deg))?;
    let table = WeilTable::compute(l, d)?;
    let p = l.p() as u32;
    for a in k.elements() {
        let expect = if a == k.neg_one() { k.q() as i64 } else { 0 };
        let diff = table
            .value(l, emb.apply(a))
            .try_sub(&CycInt::from_int(p, expect))?;
        if !diff.divisible_by_integer(ell) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Whether `gcd(d, q - 1) = 1`.
pub fn is_valid_exponent(ctx: &FieldCtx, d: u64) -> bool {
    ctx.units_order() == 1 || gcd(d % ctx.units_order(), ctx.units_order()) == 1
}
