//! Fixed-point reals with a certified absolute error bound.
//!
//! A [`HiReal`] stores an integer mantissa `m` at a binary scale `F` and an
//! error radius `e` (both in units of `2^-F`). The true value lies in
//! `[(m - e) / 2^F, (m + e) / 2^F]`. Every operation widens `e` by a bound
//! on its own rounding plus the propagated input error, so comparisons can
//! report "decided" only when the margin clears the radius.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::Rat;
use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Extra binary digits carried beyond the requested decimal precision.
pub const GUARD_BITS: u32 = 40;

/// Working precision in significant decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 64;
    /// Escalation never goes past this many digits unless asked to.
    pub const DEFAULT_CAP_DIGITS: u32 = 1024;

    pub fn digits(digits: u32) -> Self {
        Precision { digits: digits.max(1) }
    }

    pub fn get(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        (self.digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn doubled(&self) -> Self {
        Precision { digits: self.digits.saturating_mul(2) }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::digits(Self::DEFAULT_DIGITS)
    }
}

/// Outcome of a comparison carried out under an error bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certified {
    Decided(Ordering),
    Indeterminate,
}

impl Certified {
    pub fn decided(self) -> Option<Ordering> {
        match self {
            Certified::Decided(o) => Some(o),
            Certified::Indeterminate => None,
        }
    }

    pub fn is(self, ord: Ordering) -> bool {
        self == Certified::Decided(ord)
    }
}

/// Runs `f` at `start`, doubling the digit count while it returns `None`.
pub fn escalate<T>(start: Precision, cap: Precision, mut f: impl FnMut(Precision) -> Option<T>) -> Result<(T, Precision)> {
    let mut prec = start;
    loop {
        if let Some(v) = f(prec) {
            return Ok((v, prec));
        }
        if prec >= cap {
            return Err(Error::Indeterminate { digits: prec.get() });
        }
        prec = prec.doubled().min(cap);
    }
}

#[derive(Clone, Debug)]
pub struct HiReal {
    mant: BigInt,
    frac_bits: u32,
    err: BigUint,
    prec: Precision,
}

fn pow2(bits: u32) -> BigUint {
    BigUint::one() << bits
}

fn ipow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// `num / den` rounded to nearest, `den > 0`. Returns the quotient and
/// whether it was exact.
fn round_div(num: &BigInt, den: &BigInt) -> (BigInt, bool) {
    let (q, r) = num.div_mod_floor(den);
    if r.is_zero() {
        return (q, true);
    }
    let twice: BigInt = &r << 1;
    if &twice >= den {
        (q + 1, false)
    } else {
        (q, false)
    }
}

fn ceil_div(num: &BigUint, den: &BigUint) -> BigUint {
    num.div_ceil(den)
}

fn shr_ceil(v: &BigUint, bits: u32) -> BigUint {
    ceil_div(v, &pow2(bits))
}

struct Ln2Cache(Mutex<HashMap<u32, Arc<(BigInt, BigUint)>>>);

fn ln2_cache() -> &'static Ln2Cache {
    static CACHE: OnceLock<Ln2Cache> = OnceLock::new();
    CACHE.get_or_init(|| Ln2Cache(Mutex::new(HashMap::new())))
}

/// ln 2 at scale `bits` as (mantissa, error in ulps).
fn ln2_fixed(bits: u32) -> Arc<(BigInt, BigUint)> {
    if let Some(v) = ln2_cache().0.lock().unwrap().get(&bits) {
        return v.clone();
    }
    // ln 2 = 2 atanh(1/3)
    let (t, exact) = round_div(&ipow2(bits), &BigInt::from(3));
    let t_err = if exact { 0 } else { 1 };
    let (s, e) = atanh_fixed(&t, t_err, bits);
    let v = Arc::new((s << 1, e << 1));
    ln2_cache().0.lock().unwrap().insert(bits, v.clone());
    v
}

/// `sum t^(2j+1) / (2j+1)` at scale `bits` for `|t| <= 1/3`, with the input
/// carrying `t_err` ulps. Returns (mantissa, error in ulps).
fn atanh_fixed(t: &BigInt, t_err: u64, bits: u32) -> (BigInt, BigUint) {
    let one = ipow2(bits);
    debug_assert!(t.abs() * 3u32 <= &one + 3u32);
    if t.is_zero() && t_err == 0 {
        return (BigInt::zero(), BigUint::zero());
    }
    // t^2 < 1/8 and |t| < 1/2 throughout, which gives the recurrences below.
    let t2 = round_div(&(t * t), &one).0;
    let e_t2: u64 = 2 * t_err + 2;
    let mut power = t.clone();
    let mut e_pow: u64 = t_err;
    let mut sum = BigInt::zero();
    let mut e_sum: u64 = 0;
    let mut j: u64 = 0;
    loop {
        let denom = BigInt::from(2 * j + 1);
        sum += round_div(&power, &denom).0;
        e_sum += e_pow.div_ceil(2 * j + 1) + 1;
        let next = round_div(&(&power * &t2), &one).0;
        let e_next = e_pow.div_ceil(8) + e_t2.div_ceil(2) + 2;
        j += 1;
        if next.is_zero() || next.abs() <= BigInt::from(1u8) {
            // remaining true terms are bounded by (|next| + e_next) * 8/7
            let tail = (next.abs().to_u64().unwrap_or(1) + e_next) * 8 / 7 + 1;
            e_sum += tail;
            break;
        }
        power = next;
        e_pow = e_next;
    }
    (sum, BigUint::from(e_sum))
}

/// ln(num / den) at scale `bits`, for positive integers.
fn ln_fraction_fixed(num: &BigUint, den: &BigUint, bits: u32) -> (BigInt, BigUint) {
    debug_assert!(!num.is_zero() && !den.is_zero());
    // choose e with num / (den 2^e) in [1/sqrt2, sqrt2]
    let mut e: i64 = num.bits() as i64 - den.bits() as i64;
    let scaled = |e: i64| -> (BigUint, BigUint) {
        if e >= 0 {
            (num.clone(), den << (e as u64))
        } else {
            (num << ((-e) as u64), den.clone())
        }
    };
    loop {
        let (n, d) = scaled(e);
        let n2 = &n * &n;
        let d2 = &d * &d;
        if n2 > (&d2 << 1u32) {
            e += 1;
        } else if (&n2 << 1u32) < d2 {
            e -= 1;
        } else {
            break;
        }
    }
    let (n, d) = scaled(e);
    let n = BigInt::from(n);
    let d = BigInt::from(d);
    let one = ipow2(bits);
    let (m, m_exact) = round_div(&(&n << bits), &d);
    let m_err: u64 = if m_exact { 0 } else { 1 };
    let (t, t_exact) = round_div(&((&m - &one) << bits), &(&m + &one));
    let t_err: u64 = m_err.div_ceil(2) + if t_exact { 0 } else { 1 };
    let (at, at_err) = atanh_fixed(&t, t_err, bits);
    let mut value: BigInt = at << 1;
    let mut err: BigUint = at_err << 1;
    if e != 0 {
        let ln2 = ln2_fixed(bits);
        value += &ln2.0 * BigInt::from(e);
        err += &ln2.1 * BigUint::from(e.unsigned_abs());
    }
    (value, err)
}

/// exp(r) at scale `bits` for an exactly known `|r| <= 1/2`, as
/// (mantissa, error in ulps).
fn exp_small_fixed(r: &BigInt, bits: u32) -> (BigInt, BigUint) {
    let one = ipow2(bits);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut e_term: u64 = 0;
    let mut e_sum: u64 = 0;
    let mut j: u64 = 1;
    loop {
        term = round_div(&(&term * r), &(&one * BigInt::from(j))).0;
        // |r| / j <= 1/2
        e_term = e_term.div_ceil(2) + 1;
        sum += &term;
        e_sum += e_term;
        j += 1;
        if term.abs() <= BigInt::from(1u8) {
            let tail = (term.abs().to_u64().unwrap_or(1) + e_term) * 2 + 1;
            e_sum += tail;
            break;
        }
    }
    (sum, BigUint::from(e_sum))
}

impl HiReal {
    fn raw(mant: BigInt, err: BigUint, prec: Precision) -> Self {
        HiReal { mant, frac_bits: prec.bits(), err, prec }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::raw(BigInt::zero(), BigUint::zero(), prec)
    }

    pub fn from_integer(n: &BigInt, prec: Precision) -> Self {
        Self::raw(n << prec.bits(), BigUint::zero(), prec)
    }

    pub fn from_i64(n: i64, prec: Precision) -> Self {
        Self::from_integer(&BigInt::from(n), prec)
    }

    pub fn from_rat(r: &Rat, prec: Precision) -> Self {
        let (m, exact) = round_div(&(r.numer() << prec.bits()), r.denom());
        Self::raw(m, if exact { BigUint::zero() } else { BigUint::one() }, prec)
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        let r = num_rational::BigRational::from_float(v).expect("finite float");
        Self::from_rat(&Rat::from(r), prec)
    }

    /// The exact dyadic `mant / 2^bits` at precision `prec`.
    /// Grows the error radius by `radius` (rounded up to whole ulps).
    pub fn widen(&self, radius: &Rat) -> Self {
        let (num, den) = radius.to_nat_parts().expect("non-negative radius");
        let extra = ceil_div(&(num << self.frac_bits), &den);
        Self::raw(self.mant.clone(), &self.err + extra, self.prec)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn digits(&self) -> u32 {
        self.prec.get()
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// The error radius in units of the last place.
    pub fn error_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    /// Upper bound on |true value - represented value|.
    pub fn error_bound(&self) -> Rat {
        Rat::from_nats(&self.err, &pow2(self.frac_bits))
    }

    pub fn error_bound_f64(&self) -> f64 {
        self.error_bound().to_f64()
    }

    /// The represented midpoint as an exact rational.
    pub fn midpoint(&self) -> Rat {
        Rat::new(self.mant.clone(), ipow2(self.frac_bits))
    }

    /// Upper bound on |true value|.
    pub fn abs_upper(&self) -> Rat {
        Rat::new(BigInt::from(self.mant.magnitude() + &self.err), ipow2(self.frac_bits))
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// Re-express at a finer or coarser precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let bits = prec.bits();
        if bits >= self.frac_bits {
            let shift = bits - self.frac_bits;
            Self::raw(&self.mant << shift, &self.err << shift, prec)
        } else {
            let shift = self.frac_bits - bits;
            let (m, exact) = round_div(&self.mant, &ipow2(shift));
            let err = shr_ceil(&self.err, shift) + if exact { 0u32 } else { 1u32 };
            Self::raw(m, err, prec)
        }
    }

    fn aligned(&self, other: &Self) -> (HiReal, HiReal) {
        match self.frac_bits.cmp(&other.frac_bits) {
            Ordering::Equal => (self.clone(), other.clone()),
            Ordering::Less => (self.with_precision(other.prec), other.clone()),
            Ordering::Greater => (self.clone(), other.with_precision(self.prec)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::raw(a.mant + b.mant, a.err + b.err, a.prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::raw(a.mant - b.mant, a.err + b.err, a.prec)
    }

    pub fn neg(&self) -> Self {
        Self::raw(-&self.mant, self.err.clone(), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mant.abs(), self.err.clone(), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let one = ipow2(a.frac_bits);
        let (m, exact) = round_div(&(&a.mant * &b.mant), &one);
        let spread = a.mant.magnitude() * &b.err + b.mant.magnitude() * &a.err + &a.err * &b.err;
        let err = shr_ceil(&spread, a.frac_bits) + if exact { 0u32 } else { 1u32 };
        Self::raw(m, err, a.prec)
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        self.mul(&HiReal::from_rat(r, self.prec))
    }

    /// Fails when the divisor's enclosure contains zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        let bm = b.mant.magnitude();
        if bm <= &b.err {
            return Err(Error::Indeterminate { digits: a.prec.get() });
        }
        let (q, exact) = round_div(&(&a.mant << a.frac_bits), &b.mant.abs());
        let q = if b.mant.sign() == Sign::Minus { -q } else { q };
        // |a/b - ma/mb| <= (ea |mb| + |ma| eb) / ((|mb| - eb) |mb|)
        let num = (&a.err * bm + a.mant.magnitude() * &b.err) << a.frac_bits;
        let den = (bm - &b.err) * bm;
        let err = ceil_div(&num, &den) + if exact { 0u32 } else { 1u32 };
        Ok(Self::raw(q, err, a.prec))
    }

    /// Natural logarithm of a positive integer.
    pub fn ln_nat(n: &BigUint, prec: Precision) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Parse("logarithm of zero".into()));
        }
        let (m, e) = ln_fraction_fixed(n, &BigUint::one(), prec.bits());
        Ok(Self::raw(m, e, prec))
    }

    /// Natural logarithm of a positive rational, evaluated directly on the
    /// quotient rather than as a difference of two logarithms.
    pub fn ln_rat(r: &Rat, prec: Precision) -> Result<Self> {
        let (num, den) = r
            .to_nat_parts()
            .filter(|(n, _)| !n.is_zero())
            .ok_or_else(|| Error::Parse(format!("logarithm of non-positive {r}")))?;
        let (m, e) = ln_fraction_fixed(&num, &den, prec.bits());
        Ok(Self::raw(m, e, prec))
    }

    pub fn ln2(prec: Precision) -> Self {
        let v = ln2_fixed(prec.bits());
        Self::raw(v.0.clone(), v.1.clone(), prec)
    }

    /// Natural logarithm; fails unless the enclosure is strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if self.mant.sign() != Sign::Plus || self.mant.magnitude() <= &self.err {
            return Err(Error::Indeterminate { digits: self.prec.get() });
        }
        let m = self.mant.magnitude();
        let (v, e) = ln_fraction_fixed(m, &pow2(self.frac_bits), self.frac_bits);
        // |ln(m +- err) - ln m| <= err / (m - err)
        let spread = ceil_div(&(&self.err << self.frac_bits), &(m - &self.err));
        Ok(Self::raw(v, e + spread, self.prec))
    }

    pub fn exp(&self) -> Self {
        let bits = self.frac_bits;
        let ln2 = ln2_fixed(bits);
        let k = (self.to_f64() / std::f64::consts::LN_2).round() as i64;
        // r = w - k ln2
        let r = &self.mant - &ln2.0 * BigInt::from(k);
        let e_r = &self.err + &ln2.1 * BigUint::from(k.unsigned_abs());
        let (s, e_s) = exp_small_fixed(&r, bits);
        // exp(r) <= 1.7, so an input spread of d ulps moves the result by at
        // most 1.7 (e^(d 2^-F) - 1) 2^F <= 4 d ulps while d 2^-F <= 1/2.
        let mut err = e_s + (&e_r << 2u32) + 1u32;
        let mant;
        if k >= 0 {
            mant = s << (k as u64);
            err <<= k as u64;
        } else {
            let shift = (-k) as u32;
            let (m, exact) = round_div(&s, &ipow2(shift));
            mant = m;
            err = shr_ceil(&err, shift) + if exact { 0u32 } else { 1u32 };
        }
        Self::raw(mant, err, self.prec)
    }

    /// Real `q`-th root of a natural number, `q >= 1`.
    pub fn nth_root_nat(n: &BigUint, q: u32, prec: Precision) -> Self {
        assert!(q >= 1, "root index must be positive");
        let bits = prec.bits();
        let scaled = n << (bits as u64 * q as u64);
        let root = scaled.nth_root(q);
        let exact = root.pow(q) == scaled;
        // floor root: true value in [root, root + 1)
        Self::raw(BigInt::from(root), if exact { BigUint::zero() } else { BigUint::one() }, prec)
    }

    /// Integer power by repeated squaring through [`HiReal::mul`].
    pub fn powi(&self, exp: u32) -> Self {
        let mut result = HiReal::from_i64(1, self.prec).with_precision(self.prec);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Whether `r` lies inside the enclosure.
    pub fn contains(&self, r: &Rat) -> bool {
        let scaled_r = r.numer() << self.frac_bits;
        let d = (&self.mant * r.denom() - scaled_r).abs();
        d <= BigInt::from(self.err.clone()) * r.denom()
    }

    pub fn cmp_rat(&self, r: &Rat) -> Certified {
        let d = &self.mant * r.denom() - (r.numer() << self.frac_bits);
        let margin = BigInt::from(self.err.clone()) * r.denom();
        if d.abs() > margin {
            Certified::Decided(d.sign().cmp_zero())
        } else if self.err.is_zero() && d.is_zero() {
            Certified::Decided(Ordering::Equal)
        } else {
            Certified::Indeterminate
        }
    }

    pub fn cmp_hireal(&self, other: &Self) -> Certified {
        let diff = self.sub(other);
        diff.cmp_rat(&Rat::zero())
    }

    /// Decimal rendering with `places` digits after the point, rounded to
    /// nearest.
    pub fn to_decimal(&self, places: usize) -> String {
        let ten_pow = BigInt::from(10u8).pow(places as u32);
        let (v, _) = round_div(&(&self.mant * &ten_pow), &ipow2(self.frac_bits));
        let neg = v.sign() == Sign::Minus;
        let digits = v.magnitude().to_string();
        let digits = if digits.len() <= places {
            format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = digits.split_at(digits.len() - places);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(int);
        if places > 0 {
            out.push('.');
            out.push_str(frac);
        }
        out
    }
}

trait SignExt {
    fn cmp_zero(self) -> Ordering;
}

impl SignExt for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Display for HiReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places = f.precision().unwrap_or(self.prec.get() as usize);
        f.write_str(&self.to_decimal(places))
    }
}

/// Serialized as `{"value": "<decimal>", "digits": d, "error_bound": "<float>"}`.
impl Serialize for HiReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("HiReal", 3)?;
        st.serialize_field("value", &self.to_decimal(self.prec.get() as usize))?;
        st.serialize_field("digits", &self.prec.get())?;
        st.serialize_field("error_bound", &format!("{:e}", self.error_bound_f64()))?;
        st.end()
    }
}
