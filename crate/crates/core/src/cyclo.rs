//! Exact arithmetic in `Z[ζ_n]`.
//!
//! For prime `n` elements are stored on the basis `ζ^0 .. ζ^{n-2}`, which
//! makes the representation unique. For composite `n` they are stored as a
//! residue of length `n` in the group ring `Z[x]/(x^n - 1)`; equality and
//! zero tests reduce modulo the cyclotomic polynomial `Φ_n`.
//!
//! Coefficients are generic over [`Coeff`]: `i64` with checked arithmetic
//! (overflow is reported as [`CycError::Overflow`]) for everyday values and
//! [`BigInt`] for products that outgrow 64 bits.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, gcd};

pub mod real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("root-of-unity orders differ ({0} vs {1})")]
    OrderMismatch(u32, u32),
    #[error("{j} is not a unit modulo {n}")]
    NotAUnit { j: u64, n: u32 },
    #[error("valuation needs a prime order, got {0}")]
    OrderNotPrime(u32),
    #[error("coefficient overflow in 64-bit cyclotomic arithmetic")]
    Overflow,
    #[error("{0} does not divide {1}")]
    NotADivisor(u32, u32),
    #[error("bad cyclotomic integer text {0:?}")]
    Parse(String),
}

pub type Result<T, E = CycError> = std::result::Result<T, E>;

/// Integer coefficient types usable in [`CycInt`].
pub trait Coeff:
    Clone + fmt::Debug + fmt::Display + Eq + Ord + Hash + Send + Sync + 'static
{
    fn coeff_zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn checked_add(&self, other: &Self) -> Result<Self>;
    fn checked_sub(&self, other: &Self) -> Result<Self>;
    fn checked_mul(&self, other: &Self) -> Result<Self>;
    fn checked_neg(&self) -> Result<Self>;
    fn coeff_is_zero(&self) -> bool;
    /// Least nonnegative residue modulo `m`.
    fn rem_u64(&self, m: u64) -> u64;
    /// Exact quotient by `m` (which must divide `self`).
    fn div_exact(&self, m: u64) -> Self;
    fn to_bigint(&self) -> BigInt;
    fn to_i64(&self) -> Option<i64>;
}

impl Coeff for i64 {
    fn coeff_zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn checked_add(&self, other: &Self) -> Result<Self> {
        i64::checked_add(*self, *other).ok_or(CycError::Overflow)
    }
    fn checked_sub(&self, other: &Self) -> Result<Self> {
        i64::checked_sub(*self, *other).ok_or(CycError::Overflow)
    }
    fn checked_mul(&self, other: &Self) -> Result<Self> {
        i64::checked_mul(*self, *other).ok_or(CycError::Overflow)
    }
    fn checked_neg(&self) -> Result<Self> {
        i64::checked_neg(*self).ok_or(CycError::Overflow)
    }
    fn coeff_is_zero(&self) -> bool {
        *self == 0
    }
    fn rem_u64(&self, m: u64) -> u64 {
        (*self as i128).rem_euclid(m as i128) as u64
    }
    fn div_exact(&self, m: u64) -> Self {
        *self / m as i64
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn to_i64(&self) -> Option<i64> {
        Some(*self)
    }
}

impl Coeff for BigInt {
    fn coeff_zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(self - other)
    }
    fn checked_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn checked_neg(&self) -> Result<Self> {
        Ok(-self)
    }
    fn coeff_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn rem_u64(&self, m: u64) -> u64 {
        let r = self % BigInt::from(m);
        let r = if r.is_negative() {
            r + BigInt::from(m)
        } else {
            r
        };
        r.to_u64().expect("residue fits")
    }
    fn div_exact(&self, m: u64) -> Self {
        self / BigInt::from(m)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn to_i64(&self) -> Option<i64> {
        ToPrimitive::to_i64(self)
    }
}

/// The `n`-th cyclotomic polynomial, constant term first, computed by
/// dividing `x^n - 1` by `Φ_d` for every proper divisor `d` of `n`.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = cache.read().expect("cache poisoned").get(&n) {
        return hit.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in arith::divisors(n as u64) {
        if d == n as u64 {
            continue;
        }
        let den = cyclotomic_poly(d as u32);
        num = poly_div_exact(&num, &den);
    }
    let phi = Arc::new(num);
    cache
        .write()
        .expect("cache poisoned")
        .insert(n, phi.clone());
    phi
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (k, &dk) in den.iter().enumerate() {
                rem[i + k] -= c * dk;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division by Φ_d was not exact");
    quot
}

/// An element `Σ c_j ζ_n^j` of `Z[ζ_n]`.
#[derive(Clone, Debug)]
pub struct CycInt<C: Coeff = i64> {
    n: u32,
    prime: bool,
    coeffs: Vec<C>,
}

fn order_is_prime(n: u32) -> bool {
    arith::is_prime(n as u64)
}

impl<C: Coeff> CycInt<C> {
    fn stored_len(n: u32, prime: bool) -> usize {
        if prime {
            n as usize - 1
        } else {
            n as usize
        }
    }

    pub fn zero(n: u32) -> Self {
        assert!(n >= 1, "root-of-unity order must be positive");
        let prime = order_is_prime(n);
        CycInt {
            n,
            prime,
            coeffs: vec![C::coeff_zero(); Self::stored_len(n, prime)],
        }
    }

    pub fn from_int(n: u32, m: C) -> Self {
        let mut x = Self::zero(n);
        x.coeffs[0] = m;
        x
    }

    pub fn one(n: u32) -> Self {
        Self::from_int(n, C::from_i64(1))
    }

    /// `ζ_n^j`.
    pub fn zeta_pow(n: u32, j: i64) -> Self {
        let mut gr = vec![C::coeff_zero(); n as usize];
        gr[j.rem_euclid(n as i64) as usize] = C::from_i64(1);
        Self::from_group_ring(n, gr)
    }

    /// Build from a group-ring coefficient vector indexed by exponent mod `n`
    /// (any length; exponents wrap).
    pub fn from_group_ring(n: u32, coeffs: Vec<C>) -> Self {
        let prime = order_is_prime(n);
        let mut gr = if coeffs.len() == n as usize {
            coeffs
        } else {
            let mut v = vec![C::coeff_zero(); n as usize];
            for (i, c) in coeffs.into_iter().enumerate() {
                let k = i % n as usize;
                v[k] = v[k].checked_add(&c).expect("coefficient overflow");
            }
            v
        };
        if prime {
            let top = gr.pop().expect("n >= 2");
            if !top.coeff_is_zero() {
                for c in gr.iter_mut() {
                    *c = c.checked_sub(&top).expect("coefficient overflow");
                }
            }
        }
        CycInt {
            n,
            prime,
            coeffs: gr,
        }
    }

    /// Build from coefficients on the canonical basis `ζ^0 .. ζ^{φ(n)-1}`.
    pub fn from_canonical(n: u32, mut coeffs: Vec<C>) -> Self {
        let prime = order_is_prime(n);
        let len = Self::stored_len(n, prime);
        assert!(coeffs.len() <= len, "too many coefficients for order {n}");
        coeffs.resize(len, C::coeff_zero());
        CycInt { n, prime, coeffs }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Stored coefficients: canonical basis for prime `n`, group-ring
    /// residue for composite `n`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(CycError::OrderMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(CycInt {
            n: self.n,
            prime: self.prime,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(CycInt {
            n: self.n,
            prime: self.prime,
            coeffs,
        })
    }

    pub fn try_neg(&self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.checked_neg())
            .collect::<Result<_>>()?;
        Ok(CycInt {
            n: self.n,
            prime: self.prime,
            coeffs,
        })
    }

    pub fn try_scale(&self, m: &C) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.checked_mul(m))
            .collect::<Result<_>>()?;
        Ok(CycInt {
            n: self.n,
            prime: self.prime,
            coeffs,
        })
    }

    /// Product; composite-order results are brought back onto the reduced
    /// residue to keep coefficients small.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.n as usize;
        let mut gr = vec![C::coeff_zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.coeff_is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.coeff_is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                gr[k] = gr[k].checked_add(&a.checked_mul(b)?)?;
            }
        }
        if self.prime {
            let top = gr.pop().expect("n >= 2");
            if !top.coeff_is_zero() {
                for c in gr.iter_mut() {
                    *c = c.checked_sub(&top)?;
                }
            }
            Ok(CycInt {
                n: self.n,
                prime: true,
                coeffs: gr,
            })
        } else {
            let mut red = reduce_mod_phi(&gr, self.n)?;
            red.resize(n, C::coeff_zero());
            Ok(CycInt {
                n: self.n,
                prime: false,
                coeffs: red,
            })
        }
    }

    pub fn try_pow(&self, mut k: u32) -> Result<Self> {
        let mut acc = Self::one(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Coefficients on the canonical basis of `Z[x]/Φ_n` (length `φ(n)`).
    pub fn canonical(&self) -> Vec<C> {
        if self.prime {
            self.coeffs.clone()
        } else {
            reduce_mod_phi(&self.coeffs, self.n).expect("coefficient overflow in reduction")
        }
    }

    pub fn is_zero(&self) -> bool {
        if self.prime {
            self.coeffs.iter().all(|c| c.coeff_is_zero())
        } else {
            self.canonical().iter().all(|c| c.coeff_is_zero())
        }
    }

    /// Exact equality in `Z[ζ_n]`.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.check_order(other)?;
        if self.prime {
            Ok(self.coeffs == other.coeffs)
        } else {
            Ok(self.try_sub(other)?.is_zero())
        }
    }

    /// The rational integer `m` if this element equals `m`.
    pub fn as_rational_integer(&self) -> Option<C> {
        let owned;
        let c: &[C] = if self.prime {
            &self.coeffs
        } else {
            owned = self.canonical();
            &owned
        };
        c[1..]
            .iter()
            .all(|x| x.coeff_is_zero())
            .then(|| c[0].clone())
    }

    /// The automorphism `ζ -> ζ^j`.
    pub fn galois_apply(&self, j: u64) -> Result<Self> {
        let n = self.n as u64;
        if gcd(j % n, n) != 1 {
            return Err(CycError::NotAUnit { j, n: self.n });
        }
        let mut gr = vec![C::coeff_zero(); self.n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = ((i as u64 * (j % n)) % n) as usize;
            gr[k] = c.clone();
        }
        Ok(Self::from_group_ring(self.n, gr))
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        let j = if self.n == 1 { 1 } else { self.n as u64 - 1 };
        self.galois_apply(j).expect("n-1 is a unit")
    }

    /// Reinterpret inside `Z[ζ_m]` for a multiple `m` of `n`.
    pub fn lift(&self, m: u32) -> Result<Self> {
        if !m.is_multiple_of(self.n) {
            return Err(CycError::NotADivisor(self.n, m));
        }
        let s = (m / self.n) as usize;
        let mut gr = vec![C::coeff_zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            gr[i * s] = c.clone();
        }
        Ok(Self::from_group_ring(m, gr))
    }

    /// Every canonical coefficient divisible by `l`.
    pub fn divisible_by_integer(&self, l: u64) -> bool {
        self.canonical().iter().all(|c| c.rem_u64(l) == 0)
    }

    /// Valuation at the prime above `p` in `Z[ζ_p]`, normalized so that
    /// `v(p) = 1`.
    pub fn p_adic_valuation(&self) -> Result<Valuation> {
        Ok(self
            .p_adic_valuation_capped(u64::MAX)?
            .unwrap_or(Valuation::Infinite))
    }

    /// Like [`CycInt::p_adic_valuation`] but stops once `cap` factors of
    /// `1 - ζ_p` have been removed, returning `None`. Zero always gives
    /// `Some(Infinite)`.
    pub fn p_adic_valuation_capped(&self, cap: u64) -> Result<Option<Valuation>> {
        if !self.prime {
            return Err(CycError::OrderNotPrime(self.n));
        }
        let p = self.n as u64;
        if self.is_zero() {
            return Ok(Some(Valuation::Infinite));
        }
        let mut c = self.coeffs.clone();
        let mut units = 0u64;
        while c.iter().all(|x| x.rem_u64(p) == 0) {
            if units >= cap {
                return Ok(None);
            }
            c = c.iter().map(|x| x.div_exact(p)).collect();
            units += p - 1;
        }
        // Now x is nonzero mod p. In Z[ζ]/(p) = F_p[t]/((t-1)^{p-1}) the
        // power of 1 - ζ dividing x is the multiplicity of t = 1 as a root
        // of the reduced polynomial, which has degree < p - 1.
        let mut r: Vec<u64> = c.iter().map(|x| x.rem_u64(p)).collect();
        while r.iter().fold(0, |acc, &x| (acc + x) % p) == 0 {
            if units >= cap {
                return Ok(None);
            }
            r = divide_by_t_minus_one(&r, p);
            units += 1;
        }
        if units >= cap {
            return Ok(None);
        }
        Ok(Some(Valuation::from_units(units, p)))
    }

    pub fn to_big(&self) -> CycInt<BigInt> {
        CycInt {
            n: self.n,
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c.to_bigint()).collect(),
        }
    }

    /// `m` for rational integers, otherwise `n:[c0,c1,...]` on the
    /// canonical basis.
    pub fn value_text(&self) -> String {
        match self.as_rational_integer() {
            Some(m) => m.to_string(),
            None => self.to_string(),
        }
    }

    /// Sign of the real part under `ζ_n -> exp(2πi/n)`, decided exactly.
    pub fn real_sign(&self) -> Ordering {
        real::RealEmbedding::cached(self.n).sign(self)
    }

    /// `|Re(self)| < m`, decided exactly.
    pub fn real_abs_below(&self, m: i64) -> bool {
        real::RealEmbedding::cached(self.n).abs_below(self, m)
    }

    /// Real part compared with the rational integer `m`, decided exactly.
    pub fn real_cmp_int(&self, m: i64) -> Ordering {
        real::RealEmbedding::cached(self.n).cmp_int(self, m)
    }
}

impl CycInt<BigInt> {
    /// Back to 64-bit coefficients when every coefficient fits.
    pub fn to_small(&self) -> Option<CycInt<i64>> {
        let coeffs = self
            .coeffs
            .iter()
            .map(ToPrimitive::to_i64)
            .collect::<Option<Vec<_>>>()?;
        Some(CycInt {
            n: self.n,
            prime: self.prime,
            coeffs,
        })
    }
}

/// `x / (1 - ζ_p)` for canonical coefficients whose sum is `0 mod p`.
fn divide_by_t_minus_one(r: &[u64], p: u64) -> Vec<u64> {
    // synthetic division over F_p; the remainder r(1) is zero
    let mut out = vec![0u64; r.len().saturating_sub(1)];
    let mut carry = 0u64;
    for i in (1..r.len()).rev() {
        carry = (carry + r[i]) % p;
        out[i - 1] = carry;
    }
    out
}

/// Remainder of a group-ring vector modulo `Φ_n` (length `φ(n)`).
fn reduce_mod_phi<C: Coeff>(gr: &[C], n: u32) -> Result<Vec<C>> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    let mut a = gr.to_vec();
    if a.len() < deg {
        a.resize(deg, C::coeff_zero());
    }
    for i in (deg..a.len()).rev() {
        let top = std::mem::replace(&mut a[i], C::coeff_zero());
        if top.coeff_is_zero() {
            continue;
        }
        for (k, &pk) in phi.iter().enumerate().take(deg) {
            if pk != 0 {
                let t = top.checked_mul(&C::from_i64(pk))?;
                a[i - deg + k] = a[i - deg + k].checked_sub(&t)?;
            }
        }
    }
    a.truncate(deg);
    Ok(a)
}

impl<C: Coeff> PartialEq for CycInt<C> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.equals(other).unwrap_or(false)
    }
}

impl<C: Coeff> Eq for CycInt<C> {}

impl<C: Coeff> Hash for CycInt<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.canonical().hash(state);
    }
}

impl<C: Coeff> fmt::Display for CycInt<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.canonical().iter().map(|c| c.to_string()).collect();
        write!(f, "{}:[{}]", self.n, parts.join(","))
    }
}

impl FromStr for CycInt<i64> {
    type Err = CycError;

    /// Parses `n:[c0,...]`, with either `φ(n)` canonical or `n` group-ring
    /// coefficients.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || CycError::Parse(s.to_string());
        let (n, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        let inner = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let coeffs: Vec<i64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        let phi = arith::euler_phi(n as u64) as usize;
        if coeffs.len() == n as usize {
            Ok(Self::from_group_ring(n, coeffs))
        } else if coeffs.len() <= phi {
            Ok(Self::from_canonical(n, coeffs))
        } else {
            Err(bad())
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl<C: Coeff> std::ops::$trait<&CycInt<C>> for &CycInt<C> {
            type Output = CycInt<C>;
            fn $method(self, rhs: &CycInt<C>) -> CycInt<C> {
                self.$call(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl<C: Coeff> std::ops::Neg for &CycInt<C> {
    type Output = CycInt<C>;
    fn neg(self) -> CycInt<C> {
        self.try_neg().unwrap_or_else(|e| panic!("{e}"))
    }
}

/// A valuation `k/(p-1)` or infinity (for zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Ratio<u64>),
    Infinite,
}

impl Valuation {
    /// `units` factors of `1 - ζ_p`.
    pub fn from_units(units: u64, p: u64) -> Self {
        Valuation::Finite(Ratio::new(units, (p - 1).max(1)))
    }

    pub fn integer(k: u64) -> Self {
        Valuation::Finite(Ratio::from_integer(k))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinite => None,
        }
    }

    /// Multiply by a positive integer (degrees of extensions).
    pub fn times(&self, k: u64) -> Self {
        match self {
            Valuation::Finite(r) => Valuation::Finite(*r * k),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(*a + *b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Valuation::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl serde::Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Valuation of a rational integer at `p`.
pub fn integer_valuation(m: i64, p: u64) -> Valuation {
    match arith::valuation_u128(m.unsigned_abs() as u128, p) {
        None => Valuation::Infinite,
        Some(k) => Valuation::integer(k as u64),
    }
}
