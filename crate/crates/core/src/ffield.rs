//! Finite fields `F_{p^e}` with `q <= 2^20`.
//!
//! Elements are packed into a `u32` as the base-`p` integer `Σ c_i p^i` of
//! their power-basis coefficients (constant term in the lowest digit). A
//! field context owns the modulus, a generator of the unit group and full
//! exp/log/trace tables, so multiplication, powers and traces are table
//! lookups; addition works digit by digit (XOR for `p = 2`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arith::{self, gcd, mod_inverse};

/// Largest field order a context will build tables for.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds the supported bound 2^20")]
    TooLarge { p: u64, e: u32 },
    #[error("modulus must be monic of degree {expected} ({got} coefficients given)")]
    DegreeMismatch { expected: u32, got: usize },
    #[error("modulus coefficient {0} is not reduced modulo p")]
    CoefficientOutOfRange(u64),
    #[error("modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("F_{{{sub}}} is not a subfield of F_{{{sup}}}")]
    NotASubfield { sub: u64, sup: u64 },
    #[error("exponent {d} is not coprime to {modulus}")]
    NotCoprime { d: u64, modulus: u64 },
    #[error("extension degree {0} is odd")]
    OddDegree(u32),
    #[error("bad field descriptor {0:?}")]
    BadDescriptor(String),
    #[error("element index {0} is outside the field")]
    BadElement(u64),
}

pub type Result<T, E = FieldError> = std::result::Result<T, E>;

/// A field element in packed base-`p` form. Only meaningful together with
/// the [`FieldCtx`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    pub fn index(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A concrete finite field with fixed modulus and unit-group generator.
#[derive(Clone)]
pub struct FieldCtx {
    p: u64,
    e: u32,
    q: u64,
    modulus: Vec<u64>,
    gen: FieldElem,
    /// `p^i` for `i <= e`.
    place: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    trace_by_log: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("descriptor", &self.descriptor())
            .field("generator", &self.gen)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Build `F_{p^e}`. Without an explicit modulus the smallest irreducible
/// monic polynomial is used, ordering candidates by the base-`p` integer
/// whose digits are the coefficients (constant term least significant).
pub fn make_field(p: u64, e: u32, modulus: Option<&[u64]>) -> Result<FieldCtx> {
    FieldCtx::new(p, e, modulus)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, modulus: Option<&[u64]>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = match p.checked_pow(e) {
            Some(q) if q <= MAX_FIELD_ORDER => q,
            _ => return Err(FieldError::TooLarge { p, e }),
        };
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 || m[e as usize] != 1 {
                    return Err(FieldError::DegreeMismatch {
                        expected: e,
                        got: m.len(),
                    });
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::CoefficientOutOfRange(c));
                }
                if !poly::is_irreducible(m, p) {
                    return Err(FieldError::ReducibleModulus);
                }
                m.to_vec()
            }
            None => default_modulus(p, e),
        };
        let place: Vec<u64> = (0..=e).map(|i| p.pow(i)).collect();
        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            gen: FieldElem(1),
            place,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            trace_by_log: Vec::new(),
        };
        ctx.gen = ctx.find_generator();
        ctx.build_tables();
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the unit group, `q - 1`.
    pub fn units_order(&self) -> u64 {
        self.q - 1
    }

    /// Modulus coefficients, constant term first, leading 1 included.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.gen
    }

    /// Textual descriptor `p^e/c0,c1,...,ce`.
    pub fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/{}", self.p, self.e, coeffs.join(","))
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The additive inverse of one (equal to one when `p = 2`).
    pub fn neg_one(&self) -> FieldElem {
        FieldElem((self.p - 1).max(1) as u32)
    }

    pub fn element(&self, index: u64) -> Result<FieldElem> {
        if index < self.q {
            Ok(FieldElem(index as u32))
        } else {
            Err(FieldError::BadElement(index))
        }
    }

    /// The prime-subfield element `c mod p`.
    pub fn from_int(&self, c: i64) -> FieldElem {
        FieldElem(c.rem_euclid(self.p as i64) as u32)
    }

    /// Element from power-basis coefficients (missing high terms are zero).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.e as usize {
            return Err(FieldError::BadElement(coeffs.len() as u64));
        }
        let mut idx = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(FieldError::CoefficientOutOfRange(c));
            }
            idx += c * self.place[i];
        }
        Ok(FieldElem(idx as u32))
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u64> {
        let mut v = x.0 as u64;
        (0..self.e)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    /// All `q` elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q as u32).map(FieldElem)
    }

    /// Nonzero elements in packed order.
    pub fn units(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q as u32).map(FieldElem)
    }

    /// `g^j` for the context generator.
    pub fn gen_pow(&self, j: u64) -> FieldElem {
        FieldElem(self.exp[(j % (self.q - 1)) as usize])
    }

    /// Discrete logarithm base the generator, `None` for zero.
    pub fn log(&self, x: FieldElem) -> Option<u64> {
        if x.0 == 0 {
            None
        } else {
            Some(self.log[x.0 as usize] as u64)
        }
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(x.0 ^ y.0);
        }
        if self.e == 1 {
            return FieldElem(((x.0 as u64 + y.0 as u64) % self.p) as u32);
        }
        let (mut a, mut b) = (x.0 as u64, y.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        FieldElem(out as u32)
    }

    pub fn neg(&self, x: FieldElem) -> FieldElem {
        if self.p == 2 {
            return x;
        }
        let mut a = x.0 as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        FieldElem(out as u32)
    }

    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if x.0 == 0 || y.0 == 0 {
            return FieldElem(0);
        }
        let n = self.q - 1;
        let s = self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64;
        FieldElem(self.exp[(s % n) as usize])
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        self.pow(x, -1)
    }

    /// `x^k`, with `k` reduced modulo `q - 1` for nonzero `x`.
    pub fn pow(&self, x: FieldElem, k: i64) -> Result<FieldElem> {
        if x.0 == 0 {
            return match k {
                0 => Ok(self.one()),
                k if k > 0 => Ok(self.zero()),
                _ => Err(FieldError::ZeroInverse),
            };
        }
        let n = (self.q - 1) as i128;
        let l = self.log[x.0 as usize] as i128;
        let idx = (l * k as i128).rem_euclid(n);
        Ok(FieldElem(self.exp[idx as usize]))
    }

    /// `x^k` for a nonnegative exponent.
    pub fn pow_u(&self, x: FieldElem, k: u64) -> FieldElem {
        if x.0 == 0 {
            return if k == 0 { self.one() } else { self.zero() };
        }
        let n = self.q - 1;
        let l = self.log[x.0 as usize] as u64;
        let idx = ((l as u128 * (k % n) as u128) % n as u128) as usize;
        FieldElem(self.exp[idx])
    }

    /// `x^(p^j)`.
    pub fn frobenius(&self, x: FieldElem, j: u32) -> FieldElem {
        match j % self.e {
            0 => x,
            r => self.pow_u(x, self.place[r as usize]),
        }
    }

    /// Absolute trace to `F_p`, as an integer in `[0, p)`.
    pub fn trace_abs(&self, x: FieldElem) -> u64 {
        self.trace[x.0 as usize] as u64
    }

    /// Absolute trace of `g^j`.
    pub fn trace_of_gen_pow(&self, j: u64) -> u64 {
        self.trace_by_log[(j % (self.q - 1)) as usize] as u64
    }

    /// Trace table indexed by discrete logarithm (length `q - 1`).
    pub fn trace_table_by_log(&self) -> &[u32] {
        &self.trace_by_log
    }

    /// Relative trace onto the subfield of degree `k_deg`; the result is an
    /// element of this field lying in that subfield.
    pub fn trace_rel(&self, k_deg: u32, x: FieldElem) -> Result<FieldElem> {
        let m = self.relative_degree(k_deg)?;
        let mut acc = self.zero();
        let mut y = x;
        for _ in 0..m {
            acc = self.add(acc, y);
            y = self.frobenius(y, k_deg);
        }
        Ok(acc)
    }

    /// Relative norm onto the subfield of degree `k_deg`.
    pub fn norm_rel(&self, k_deg: u32, x: FieldElem) -> Result<FieldElem> {
        let m = self.relative_degree(k_deg)?;
        let mut acc = self.one();
        let mut y = x;
        for _ in 0..m {
            acc = self.mul(acc, y);
            y = self.frobenius(y, k_deg);
        }
        Ok(acc)
    }

    /// Whether `x` lies in the subfield of degree `k_deg`.
    pub fn in_subfield(&self, k_deg: u32, x: FieldElem) -> Result<bool> {
        self.relative_degree(k_deg)?;
        Ok(self.frobenius(x, k_deg) == x)
    }

    fn relative_degree(&self, k_deg: u32) -> Result<u32> {
        if k_deg == 0 || !self.e.is_multiple_of(k_deg) {
            return Err(FieldError::NotASubfield {
                sub: self.p.saturating_pow(k_deg),
                sup: self.q,
            });
        }
        Ok(self.e / k_deg)
    }

    /// Reduce an exponent into `[1, q-2]` (just `1` for `F_2`), checking it
    /// is coprime to `q - 1`.
    pub fn normalize_exponent(&self, d: u64) -> Result<u64> {
        let n = self.q - 1;
        if n == 1 {
            return Ok(1);
        }
        let r = d % n;
        if gcd(r, n) != 1 {
            return Err(FieldError::NotCoprime { d, modulus: n });
        }
        Ok(r)
    }

    /// Multiplication by elements of the field without tables, for setup.
    fn mul_slow(&self, x: u64, y: u64) -> u64 {
        if self.p == 2 {
            return poly::gf2_mulmod(x, y, self.modulus_bits(), self.e);
        }
        let a = self.digits(x);
        let b = self.digits(y);
        let prod = poly::mulmod(&a, &b, &self.modulus, self.p);
        self.pack(&prod)
    }

    fn modulus_bits(&self) -> u64 {
        self.modulus
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &c)| acc | (c << i))
    }

    fn digits(&self, mut v: u64) -> Vec<u64> {
        (0..self.e)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    fn pack(&self, coeffs: &[u64]) -> u64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.place[i])
            .sum()
    }

    fn pow_slow(&self, x: u64, mut k: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_slow(acc, b);
            }
            b = self.mul_slow(b, b);
            k >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> FieldElem {
        let n = self.q - 1;
        let factors = arith::prime_factors(n);
        (1..self.q)
            .find(|&x| factors.iter().all(|&r| self.pow_slow(x, n / r) != 1))
            .map(|x| FieldElem(x as u32))
            .expect("the unit group of a finite field is cyclic")
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        let q = self.q as usize;
        let mut exp = vec![0u32; n];
        let mut log = vec![u32::MAX; q];
        let g = self.gen.0 as u64;
        let mut cur = 1u64;
        for (j, slot) in exp.iter_mut().enumerate() {
            *slot = cur as u32;
            debug_assert_eq!(log[cur as usize], u32::MAX, "generator order too small");
            log[cur as usize] = j as u32;
            cur = self.mul_slow(cur, g);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;

        // Traces of the power basis, then extend by linearity.
        let basis_traces: Vec<u64> = (0..self.e)
            .map(|i| {
                let t = FieldElem(self.place[i as usize] as u32);
                let mut sum = FieldElem(0);
                let mut z = t;
                for _ in 0..self.e {
                    sum = self.add(sum, z);
                    z = FieldElem(self.pow_slow(z.0 as u64, self.p) as u32);
                }
                debug_assert!(sum.0 < self.p as u32);
                sum.0 as u64
            })
            .collect();
        let mut trace = vec![0u32; q];
        for (x, slot) in trace.iter_mut().enumerate() {
            let mut v = x as u64;
            let mut acc = 0u64;
            for bt in &basis_traces {
                acc += (v % self.p) * bt;
                v /= self.p;
            }
            *slot = (acc % self.p) as u32;
        }
        self.trace_by_log = self.exp.iter().map(|&x| trace[x as usize]).collect();
        self.trace = trace;
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Parsed form of a field descriptor: `p`, `p^e` or `p^e/c0,...,ce`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub p: u64,
    pub e: u32,
    pub modulus: Option<Vec<u64>>,
}

impl FieldDescriptor {
    pub fn build(&self) -> Result<FieldCtx> {
        FieldCtx::new(self.p, self.e, self.modulus.as_deref())
    }
}

impl FromStr for FieldDescriptor {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let s = s.trim();
        let (order, modulus) = match s.split_once('/') {
            Some((o, m)) => (o, Some(m)),
            None => (s, None),
        };
        let (p, e) = match order.split_once('^') {
            Some((p, e)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                e.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (order.trim().parse::<u64>().map_err(|_| bad())?, 1),
        };
        let modulus = match modulus {
            Some(m) => Some(
                m.split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(FieldDescriptor { p, e, modulus })
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)?;
        if let Some(m) = &self.modulus {
            let coeffs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
            write!(f, "/{}", coeffs.join(","))?;
        }
        Ok(())
    }
}

/// Parse a descriptor and build the field.
pub fn parse_field(s: &str) -> Result<FieldCtx> {
    s.parse::<FieldDescriptor>()?.build()
}

fn default_modulus(p: u64, e: u32) -> Vec<u64> {
    let count = p.pow(e);
    for idx in 0..count {
        let mut v = idx;
        let mut m: Vec<u64> = (0..e)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect();
        m.push(1);
        if poly::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Embedding of a subfield context `K` into an extension context `L`.
///
/// The map sends `g_K` to `g_L^{s·u}` with `s = (|L|-1)/(|K|-1)` and `u` the
/// smallest unit modulo `|K|-1` for which the map is a ring homomorphism.
#[derive(Debug, Clone)]
pub struct Embedding<'a> {
    sub: &'a FieldCtx,
    sup: &'a FieldCtx,
    gen_image_log: u64,
    twist: u64,
}

impl<'a> Embedding<'a> {
    pub fn new(sub: &'a FieldCtx, sup: &'a FieldCtx) -> Result<Self> {
        if sub.p != sup.p || !sup.e.is_multiple_of(sub.e) {
            return Err(FieldError::NotASubfield {
                sub: sub.q,
                sup: sup.q,
            });
        }
        let nk = sub.q - 1;
        let s = (sup.q - 1) / nk;
        if sub.e == 1 {
            // The prime field embeds uniquely.
            let image = sup.from_int(sub.gen.0 as i64);
            let l = sup.log(image).expect("generator is nonzero");
            let twist = (l / s) % nk.max(1);
            return Ok(Embedding {
                sub,
                sup,
                gen_image_log: l,
                twist: twist.max(if nk == 1 { 1 } else { 0 }),
            });
        }
        let t_log = sub.log(FieldElem(sub.p as u32)).expect("x is a unit");
        for u in (1..nk).filter(|&u| gcd(u, nk) == 1) {
            let c_log = s * u;
            let r = sup.gen_pow(c_log * t_log % (sup.q - 1));
            if !sup.is_root_of(&sub.modulus, r) {
                continue;
            }
            let g_coeffs = sub.coeffs(sub.gen);
            if sup.eval_prime_poly(&g_coeffs, r) == sup.gen_pow(c_log) {
                return Ok(Embedding {
                    sub,
                    sup,
                    gen_image_log: c_log,
                    twist: u,
                });
            }
        }
        unreachable!("an extension contains a conjugate image of every subfield element")
    }

    pub fn sub(&self) -> &'a FieldCtx {
        self.sub
    }

    pub fn sup(&self) -> &'a FieldCtx {
        self.sup
    }

    /// `[L:K]`.
    pub fn degree(&self) -> u32 {
        self.sup.e / self.sub.e
    }

    /// The unit `u` with `embed(g_K) = g_L^{s·u}`; 1 when the default choice
    /// is already a homomorphism.
    pub fn twist(&self) -> u64 {
        self.twist
    }

    /// Discrete log in `L` of the image of `g_K`.
    pub fn generator_image_log(&self) -> u64 {
        self.gen_image_log
    }

    pub fn apply(&self, x: FieldElem) -> FieldElem {
        match self.sub.log(x) {
            None => self.sup.zero(),
            Some(j) => {
                let n = self.sup.q - 1;
                let idx = (j as u128 * self.gen_image_log as u128 % n as u128) as u64;
                self.sup.gen_pow(idx)
            }
        }
    }

    /// Inverse image of an element of `L` lying in the embedded subfield.
    pub fn preimage(&self, y: FieldElem) -> Option<FieldElem> {
        let Some(l) = self.sup.log(y) else {
            return Some(self.sub.zero());
        };
        let s = (self.sup.q - 1) / (self.sub.q - 1);
        if l % s != 0 {
            return None;
        }
        let nk = self.sub.q - 1;
        let uinv = mod_inverse(self.twist % nk.max(1), nk).unwrap_or(0);
        let j = ((l / s) as u128 * uinv as u128 % nk.max(1) as u128) as u64;
        Some(self.sub.gen_pow(j))
    }
}

/// Embed `x` from `sub` into `sup`.
pub fn embed(sub: &FieldCtx, sup: &FieldCtx, x: FieldElem) -> Result<FieldElem> {
    Ok(Embedding::new(sub, sup)?.apply(x))
}

impl FieldCtx {
    fn eval_prime_poly(&self, coeffs: &[u64], r: FieldElem) -> FieldElem {
        // Horner with coefficients in the prime field.
        coeffs.iter().rev().fold(self.zero(), |acc, &c| {
            self.add(self.mul(acc, r), self.from_int(c as i64))
        })
    }

    fn is_root_of(&self, coeffs: &[u64], r: FieldElem) -> bool {
        self.eval_prime_poly(coeffs, r).is_zero()
    }
}

/// An exponent class: the orbit of `d` under `d -> p d` and `d -> 1/d`
/// modulo `q - 1`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ExponentClass {
    /// Minimum of the orbit.
    pub d: u64,
    pub orbit: Vec<u64>,
    pub degenerate: bool,
    /// Only defined for even extension degree.
    pub niho: Option<bool>,
}

/// Partition all valid exponents into classes, ordered by representative.
pub fn exponent_classes(ctx: &FieldCtx) -> Vec<ExponentClass> {
    let n = ctx.q - 1;
    if n == 1 {
        return vec![ExponentClass {
            d: 1,
            orbit: vec![1],
            degenerate: true,
            niho: None,
        }];
    }
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    for d in 1..n {
        if gcd(d, n) != 1 || seen[d as usize] {
            continue;
        }
        let orbit = exponent_orbit(ctx, d);
        for &x in &orbit {
            seen[x as usize] = true;
        }
        out.push(ExponentClass {
            d,
            degenerate: is_degenerate_mod(ctx.p, ctx.e, d),
            niho: if ctx.e.is_multiple_of(2) {
                Some(is_niho_unchecked(ctx.p, ctx.e, d))
            } else {
                None
            },
            orbit,
        });
    }
    out
}

/// Sorted orbit of a (normalized, coprime) exponent.
pub fn exponent_orbit(ctx: &FieldCtx, d: u64) -> Vec<u64> {
    let n = ctx.q - 1;
    if n == 1 {
        return vec![1];
    }
    let inv = mod_inverse(d, n).expect("exponent must be coprime to q-1");
    let mut orbit: Vec<u64> = Vec::with_capacity(2 * ctx.e as usize);
    for start in [d % n, inv] {
        let mut x = start;
        for _ in 0..ctx.e {
            orbit.push(x);
            x = (x as u128 * ctx.p as u128 % n as u128) as u64;
        }
    }
    orbit.sort_unstable();
    orbit.dedup();
    orbit
}

/// The canonical class representative of `d`.
pub fn canonical_exponent(ctx: &FieldCtx, d: u64) -> Result<u64> {
    let d = ctx.normalize_exponent(d)?;
    Ok(exponent_orbit(ctx, d)[0])
}

/// `d ≡ p^j (mod q-1)` for some `j`.
pub fn is_degenerate(ctx: &FieldCtx, d: u64) -> Result<bool> {
    let d = ctx.normalize_exponent(d)?;
    Ok(is_degenerate_mod(ctx.p, ctx.e, d))
}

/// Degeneracy of `d` over the field of order `p^k` (no coprimality check).
pub fn is_degenerate_mod(p: u64, k: u32, d: u64) -> bool {
    let n = p.pow(k) - 1;
    if n == 1 {
        return true;
    }
    let r = d % n;
    let mut x = 1u64;
    for _ in 0..k {
        if x == r {
            return true;
        }
        x = x * p % n;
    }
    false
}

/// `d ≡ p^j (mod √q - 1)`; requires even degree.
pub fn is_niho(ctx: &FieldCtx, d: u64) -> Result<bool> {
    if !ctx.e.is_multiple_of(2) {
        return Err(FieldError::OddDegree(ctx.e));
    }
    let d = ctx.normalize_exponent(d)?;
    Ok(is_niho_unchecked(ctx.p, ctx.e, d))
}

fn is_niho_unchecked(p: u64, e: u32, d: u64) -> bool {
    is_degenerate_mod(p, e / 2, d)
}

/// Dense polynomials over `F_p`, coefficients constant-first.
mod poly {
    use crate::arith::{mod_inverse, prime_factors};

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        let lead_inv = mod_inverse(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let top = r.pop().unwrap();
            if top == 0 {
                continue;
            }
            let f = top * lead_inv % p;
            let shift = r.len() - dm;
            for i in 0..dm {
                r[shift + i] = (r[shift + i] + (p - f) * m[i]) % p;
            }
        }
        r.resize(dm.max(1), 0);
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = rem(&prod, m, p);
        r.resize(m.len() - 1, 0);
        r
    }

    fn powmod(base: &[u64], mut k: u64, m: &[u64], p: u64) -> Vec<u64> {
        let d = m.len() - 1;
        let mut acc = vec![0u64; d];
        acc[0] = 1;
        let mut b = rem(base, m, p);
        b.resize(d, 0);
        while k > 0 {
            if k & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            k >>= 1;
        }
        acc
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !is_zero(&b) {
            let r = trim(rem(&a, &b, p));
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = (m.len() - 1) as u64;
        if n == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // x^(p^k) mod m by repeated p-th powers.
        let frob = |k: u64| {
            let mut y = vec![0u64, 1];
            for _ in 0..k {
                y = powmod(&y, p, m, p);
            }
            y
        };
        if sub(&frob(n), &x, p).iter().any(|&c| c != 0) {
            return false;
        }
        for r in prime_factors(n) {
            let h = sub(&frob(n / r), &x, p);
            let g = gcd(m, &h, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Carry-less product modulo a binary polynomial given as a bit mask.
    pub fn gf2_mulmod(mut a: u64, mut b: u64, m: u64, e: u32) -> u64 {
        let top = 1u64 << e;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= m;
            }
        }
        acc
    }
}
