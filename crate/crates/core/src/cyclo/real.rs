//! Rigorous sign of the real part of a cyclotomic integer.
//!
//! Cosines `cos(2πt/n)` are enclosed with fixed-point big integers: π from
//! Machin's formula, angles folded into `[0, π/4]`, Taylor series with an
//! explicit error count. Precision doubles until the sign is certain; an
//! exactly vanishing real part is detected algebraically first, so the loop
//! always terminates.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Coeff, CycInt};

const GUARD_BITS: u32 = 32;
const START_BITS: u32 = 64;
const MAX_BITS: u32 = 1 << 20;

/// Fixed-point cosine table for one root-of-unity order.
pub struct RealEmbedding {
    n: u32,
    bits: u32,
    cos: Vec<BigInt>,
    /// Absolute error bound of each table entry, in units of `2^-bits`.
    err: BigInt,
    /// The same table rounded to `2^-FAST_BITS`, each entry within
    /// `FAST_ERR` units.
    fast: Vec<i128>,
}

const FAST_BITS: u32 = 60;
const FAST_ERR: i128 = 2;

impl RealEmbedding {
    pub fn new(n: u32) -> Self {
        Self::with_bits(n, START_BITS)
    }

    /// Shared starting-precision table for order `n`.
    pub fn cached(n: u32) -> Arc<Self> {
        static CACHE: OnceLock<RwLock<HashMap<u32, Arc<RealEmbedding>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(hit) = cache.read().expect("cache poisoned").get(&n) {
            return hit.clone();
        }
        let made = Arc::new(Self::new(n));
        cache
            .write()
            .expect("cache poisoned")
            .entry(n)
            .or_insert(made)
            .clone()
    }

    fn with_bits(n: u32, bits: u32) -> Self {
        let w = bits + GUARD_BITS;
        let (pi, pi_err) = pi_fixed(w);
        let mut cos = Vec::with_capacity(n as usize);
        let mut worst = 0u64;
        for t in 0..n as u64 {
            let (v, e) = cos_turn(t, n as u64, &pi, pi_err, w);
            worst = worst.max(e);
            cos.push(v);
        }
        let fast = cos
            .iter()
            .map(|v| i128::try_from(v >> (w - FAST_BITS)).expect("|cos| <= 1"))
            .collect();
        RealEmbedding {
            n,
            bits: w,
            cos,
            err: BigInt::from(worst),
            fast,
        }
    }

    /// Sign of `Re(x)`.
    pub fn sign<C: Coeff>(&self, x: &CycInt<C>) -> Ordering {
        assert_eq!(x.n(), self.n, "embedding built for a different order");
        // a decided enclosure already excludes zero
        if let Some(sign) = self.fast_cmp(x, 0) {
            return sign;
        }
        if x.try_add(&x.conj()).expect("real part overflow").is_zero() {
            return Ordering::Equal;
        }
        let coeffs: Vec<BigInt> = x.coeffs().iter().map(Coeff::to_bigint).collect();
        let mut refined: Option<RealEmbedding> = None;
        loop {
            let emb = refined.as_ref().unwrap_or(self);
            let mut sum = <BigInt as Zero>::zero();
            let mut bound = <BigInt as Zero>::zero();
            for (c, v) in coeffs.iter().zip(&emb.cos) {
                if Zero::is_zero(c) {
                    continue;
                }
                sum += c * v;
                bound += c.abs() * &emb.err;
            }
            if sum.abs() > bound {
                return if sum.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            let next = (emb.bits - GUARD_BITS) * 2;
            assert!(next <= MAX_BITS, "real sign undecided at {next} bits");
            refined = Some(Self::with_bits(self.n, next));
        }
    }
}

impl RealEmbedding {
    /// `Re(x)` compared with the integer `m`.
    pub fn cmp_int<C: Coeff>(&self, x: &CycInt<C>, m: i64) -> Ordering {
        if let Some(ord) = self.fast_cmp(x, m) {
            return ord;
        }
        let shifted = x
            .try_sub(&CycInt::from_int(self.n, C::from_i64(m)))
            .expect("real part overflow");
        self.sign(&shifted)
    }

    /// `|Re(x)| < m`.
    pub fn abs_below<C: Coeff>(&self, x: &CycInt<C>, m: i64) -> bool {
        if let Some((sum, bound)) = self.fast_enclosure(x) {
            if let Some(target) = (m as i128).checked_mul(1 << FAST_BITS) {
                if sum.abs() + bound < target {
                    return true;
                }
            }
        }
        self.cmp_int(x, m) == Ordering::Less && self.cmp_int(x, -m) == Ordering::Greater
    }

    /// `Re(x)·2^FAST_BITS` lies within `bound` of `sum`; `None` on overflow.
    fn fast_enclosure<C: Coeff>(&self, x: &CycInt<C>) -> Option<(i128, i128)> {
        // with |c| < 2^40 and fewer than 2^20 terms nothing can overflow
        let mut small = Vec::with_capacity(x.coeffs().len());
        for c in x.coeffs() {
            let c = c.to_i64()?;
            if c.unsigned_abs() >= 1 << 40 {
                return None;
            }
            small.push(c as i128);
        }
        if small.len() >= 1 << 20 {
            return None;
        }
        let mut sum = 0i128;
        let mut bound = 0i128;
        for (&c, &v) in small.iter().zip(&self.fast) {
            sum += c * v;
            bound += c.abs();
        }
        Some((sum, bound * FAST_ERR))
    }

    /// 128-bit attempt; `None` when undecided or out of range.
    fn fast_cmp<C: Coeff>(&self, x: &CycInt<C>, m: i64) -> Option<Ordering> {
        let (sum, bound) = self.fast_enclosure(x)?;
        let target = (m as i128).checked_mul(1 << FAST_BITS)?;
        if sum.checked_sub(bound)? > target {
            Some(Ordering::Greater)
        } else if sum.checked_add(bound)? < target {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

/// `2^w / k` arctangent series: returns `(atan(1/k)·2^w, error bound)`.
fn atan_inv(k: u64, w: u32) -> (BigInt, u64) {
    let k2 = BigInt::from(k * k);
    let mut power = (BigInt::one() << w) / k;
    let mut sum = <BigInt as Zero>::zero();
    let mut j = 0u64;
    while !Zero::is_zero(&power) {
        let term = &power / (2 * j + 1);
        if j.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        j += 1;
    }
    (sum, 2 * j + 1)
}

/// π scaled by `2^w` and its error bound in ulps.
fn pi_fixed(w: u32) -> (BigInt, u64) {
    let (a5, e5) = atan_inv(5, w);
    let (a239, e239) = atan_inv(239, w);
    (a5 * 16 - a239 * 4, 16 * e5 + 4 * e239)
}

/// Taylor series of cos (`odd == false`) or sin at fixed-point `theta`,
/// `0 <= theta <= π/4`. Returns the value and its rounding-error bound
/// (excluding the error inherited from `theta`).
fn taylor(theta: &BigInt, w: u32, odd: bool) -> (BigInt, u64) {
    let one = BigInt::one() << w;
    let mut term = if odd { theta.clone() } else { one };
    let mut sum = term.clone();
    let mut k = 1u64;
    while !Zero::is_zero(&term) {
        let (a, b) = if odd {
            (2 * k, 2 * k + 1)
        } else {
            (2 * k - 1, 2 * k)
        };
        term = (((&term * theta) >> w) * theta) >> w;
        term /= a * b;
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
    // each step adds at most 3 ulps to every later term
    (sum, 3 * k * k + 2)
}

/// `cos(2π t / n)` with error bound.
fn cos_turn(t: u64, n: u64, pi: &BigInt, pi_err: u64, w: u32) -> (BigInt, u64) {
    let mut u = t % n;
    if 2 * u > n {
        u = n - u;
    }
    // now the angle is u/n of a turn, within [0, 1/2]
    let (mut a, mut b, mut negate) = (u, n, false);
    if 4 * u > n {
        a = n - 2 * u;
        b = 2 * n;
        negate = true;
    }
    // angle a/b in [0, 1/4]; cos(x) = sin(π/2 - x) beyond 1/8
    let mut use_sin = false;
    if 8 * a > b {
        a = b - 4 * a;
        b *= 4;
        use_sin = true;
    }
    let theta = (pi * BigInt::from(2 * a)) / BigInt::from(b);
    let theta_err = pi_err / 4 + 2;
    let (v, e) = taylor(&theta, w, use_sin);
    (if negate { -v } else { v }, e + theta_err)
}
