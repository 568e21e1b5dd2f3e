//! Exact arithmetic on `Q_p/Z_p` through the Monna correspondence.
//!
//! A natural number `n = Σ d_j p^j` stands for the fraction
//! `x = Σ d_j p^{-(j+1)}`, an element of `Q_p/Z_p`. Under this map a block of
//! `p^e` consecutive naturals `[m·p^e, (m+1)·p^e)` is exactly a ball of radius
//! `p^e`, so the distance between two indices is `p^{i+1}` where `i` is the
//! highest base-p digit at which they differ.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{root_of_unity, Real};

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::param(format!("p must be prime, got {p}")))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn as_u64(self) -> u64 {
        u64::from(self.0)
    }

    pub(crate) fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `p^e` as a `usize`, or `None` on overflow.
    pub fn checked_pow(self, e: u32) -> Option<usize> {
        (self.0 as usize).checked_pow(e)
    }

    /// If `n` is an exact power of `p`, its exponent.
    pub fn log_exact(self, n: usize) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let p = self.as_usize();
        let (mut m, mut e) = (n, 0);
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        (m == 1).then_some(e)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = u64::from(p);
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact ultrametric norm: zero, or `p^e`.
///
/// The derived ordering places `Zero` below every power and orders powers by
/// exponent, which is the order of the norms themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormValue {
    Zero,
    Pow(i64),
}

impl NormValue {
    pub fn exponent(self) -> Option<i64> {
        match self {
            NormValue::Zero => None,
            NormValue::Pow(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, NormValue::Zero)
    }

    /// Rescales the norm by `p^shift` (zero stays zero).
    pub fn shifted(self, shift: i64) -> NormValue {
        match self {
            NormValue::Zero => NormValue::Zero,
            NormValue::Pow(e) => NormValue::Pow(e + shift),
        }
    }

    pub fn to_real<T: Real>(self, p: Prime) -> T {
        match self {
            NormValue::Zero => T::zero(),
            NormValue::Pow(e) => crate::scalar::powi(p.get(), e),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => f.write_str("zero"),
            NormValue::Pow(e) => write!(f, "{e}"),
        }
    }
}

/// Base-p digits of `n`, least significant first; empty for zero.
pub fn digits_of_index(n: &BigUint, p: u32) -> Result<Vec<u32>> {
    let p = Prime::new(p)?;
    Ok(digits(n, p))
}

fn digits(n: &BigUint, p: Prime) -> Vec<u32> {
    if n.is_zero() {
        return Vec::new();
    }
    n.to_radix_le(p.get()).into_iter().map(u32::from).collect()
}

fn from_digits(ds: &[u32], p: Prime) -> BigUint {
    ds.iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * p.get() + d)
}

/// A natural number read as an element of `Q_p/Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UltrametricIndex {
    prime: Prime,
    index: BigUint,
}

impl UltrametricIndex {
    pub fn new(prime: Prime, index: impl Into<BigUint>) -> Self {
        UltrametricIndex {
            prime,
            index: index.into(),
        }
    }

    pub fn zero(prime: Prime) -> Self {
        Self::new(prime, 0u32)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.index.to_u64()
    }

    pub fn digits(&self) -> Vec<u32> {
        digits(&self.index, self.prime)
    }

    /// The fraction `η^{-1}(n)`: digit `j` of `n` sits at position `-(j+1)`.
    pub fn to_fraction(&self) -> PAdicDigits {
        let mut ds = self.digits();
        ds.reverse();
        PAdicDigits::new(self.prime, -(ds.len() as i64), ds).expect("base-p digits are in range")
    }

    /// Inverse of [`to_fraction`](Self::to_fraction); `None` if `x` has digits
    /// at nonnegative positions (it is not a reduced fraction).
    pub fn from_fraction(x: &PAdicDigits) -> Option<Self> {
        if x.is_zero() {
            return Some(Self::zero(x.prime));
        }
        if x.top_exponent() >= 0 {
            return None;
        }
        // position i < 0 carries index digit -(i+1)
        let len = (-x.start) as usize;
        let mut ds = vec![0u32; len];
        for (offset, &d) in x.digits.iter().enumerate() {
            let pos = x.start + offset as i64;
            ds[(-(pos + 1)) as usize] = d;
        }
        Some(Self::new(x.prime, from_digits(&ds, x.prime)))
    }

    /// `|η^{-1}(n)|_p`.
    pub fn norm(&self) -> NormValue {
        let len = self.digits().len();
        if len == 0 {
            NormValue::Zero
        } else {
            NormValue::Pow(len as i64)
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::param(format!(
                "prime mismatch: {} vs {}",
                self.prime, other.prime
            )))
        }
    }
}

impl fmt::Display for UltrametricIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)
    }
}

/// `|η^{-1}(m) - η^{-1}(n)|_p`.
pub fn index_distance(m: &UltrametricIndex, n: &UltrametricIndex) -> Result<NormValue> {
    m.check_prime(n)?;
    let (a, b) = (m.digits(), n.digits());
    let len = a.len().max(b.len());
    let top = (0..len)
        .rev()
        .find(|&i| a.get(i).copied().unwrap_or(0) != b.get(i).copied().unwrap_or(0));
    Ok(match top {
        None => NormValue::Zero,
        Some(i) => NormValue::Pow(i as i64 + 1),
    })
}

/// Addition in `Q_p/Z_p`: digitwise with carries running toward lower digit
/// positions; the carry out of position 0 is an integer and is discarded.
pub fn group_add(m: &UltrametricIndex, n: &UltrametricIndex) -> Result<UltrametricIndex> {
    m.check_prime(n)?;
    let p = m.prime.get();
    let (a, b) = (m.digits(), n.digits());
    let len = a.len().max(b.len());
    let mut out = vec![0u32; len];
    let mut carry = 0u32;
    for i in (0..len).rev() {
        let s = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0) + carry;
        out[i] = s % p;
        carry = s / p;
    }
    Ok(UltrametricIndex::new(m.prime, from_digits(&out, m.prime)))
}

/// The unique `c` with `group_add(c, n) == m`.
pub fn group_sub(m: &UltrametricIndex, n: &UltrametricIndex) -> Result<UltrametricIndex> {
    m.check_prime(n)?;
    let p = m.prime.get() as i64;
    let (a, b) = (m.digits(), n.digits());
    let len = a.len().max(b.len());
    let mut out = vec![0u32; len];
    let mut borrow = 0i64;
    for i in (0..len).rev() {
        let mut s =
            a.get(i).copied().unwrap_or(0) as i64 - b.get(i).copied().unwrap_or(0) as i64 - borrow;
        borrow = 0;
        if s < 0 {
            s += p;
            borrow = 1;
        }
        out[i] = s as u32;
    }
    Ok(UltrametricIndex::new(m.prime, from_digits(&out, m.prime)))
}

/// Distance exponent between two machine-sized indices: `None` when equal,
/// otherwise the smallest `e` with `m / p^e == n / p^e`.
pub fn distance_exponent(m: u64, n: u64, p: u64) -> Option<u32> {
    if m == n {
        return None;
    }
    let (mut a, mut b, mut e) = (m, n, 0u32);
    while a != b {
        a /= p;
        b /= p;
        e += 1;
    }
    Some(e)
}

/// Machine-sized [`group_add`].
pub fn group_add_u64(m: u64, n: u64, p: u64) -> u64 {
    let len = digit_len(m.max(n), p);
    let (mut out, mut carry) = (0u64, 0u64);
    let mut place = p.pow(len);
    for i in (0..len).rev() {
        place /= p;
        let s = (m / place) % p + (n / place) % p + carry;
        out += (s % p) * place;
        carry = s / p;
        debug_assert!(place == p.pow(i));
    }
    out
}

/// Number of base-p digits of `n` (0 for `n == 0`).
pub fn digit_len(n: u64, p: u64) -> u32 {
    let (mut m, mut len) = (n, 0);
    while m > 0 {
        m /= p;
        len += 1;
    }
    len
}

/// A p-adic number with a terminating expansion `Σ_{i=start}^{start+len-1} d_i p^i`.
///
/// Stored canonically: no zero digits at either end, and zero is the empty
/// expansion with `start == 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicDigits {
    prime: Prime,
    start: i64,
    digits: Vec<u32>,
}

impl PAdicDigits {
    pub fn new(prime: Prime, start: i64, digits: Vec<u32>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= prime.get()) {
            return Err(Error::param(format!(
                "digit {d} out of range for p = {prime}"
            )));
        }
        let mut x = PAdicDigits {
            prime,
            start,
            digits,
        };
        x.trim();
        Ok(x)
    }

    pub fn zero(prime: Prime) -> Self {
        PAdicDigits {
            prime,
            start: 0,
            digits: Vec::new(),
        }
    }

    /// Expansion of a nonnegative rational whose denominator is a power of `p`.
    pub fn from_rational(prime: Prime, x: &BigRational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::param(
                "negative rationals have no terminating p-adic expansion",
            ));
        }
        let p = BigInt::from(prime.get());
        let mut den = x.denom().clone();
        let mut shift = 0i64;
        while (&den % &p).is_zero() {
            den /= &p;
            shift += 1;
        }
        if !den.is_one() {
            return Err(Error::param(format!(
                "denominator of {x} is not a power of {prime}"
            )));
        }
        let numer = x.numer().to_biguint().expect("nonnegative");
        let ds = digits(&numer, prime);
        PAdicDigits::new(prime, -shift, ds)
    }

    fn trim(&mut self) {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
        let lead = self.digits.iter().take_while(|&&d| d == 0).count();
        self.digits.drain(..lead);
        self.start = if self.digits.is_empty() {
            0
        } else {
            self.start + lead as i64
        };
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    fn top_exponent(&self) -> i64 {
        self.start + self.digits.len() as i64 - 1
    }

    fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .map(move |(k, &d)| (self.start + k as i64, d))
    }

    /// `Σ d_i p^i` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        self.terms().fold(BigRational::zero(), |acc, (i, d)| {
            acc + BigRational::from_integer(BigInt::from(d)) * rational_pow(self.prime, i)
        })
    }

    /// The p-adic fractional part `Σ_{i<0} d_i p^i`, a rational in `[0, 1)`.
    pub fn fractional_part(&self) -> BigRational {
        self.terms()
            .filter(|&(i, _)| i < 0)
            .fold(BigRational::zero(), |acc, (i, d)| {
                acc + BigRational::from_integer(BigInt::from(d)) * rational_pow(self.prime, i)
            })
    }

    /// `|x|_p = p^{-start}`.
    pub fn norm(&self) -> NormValue {
        if self.is_zero() {
            NormValue::Zero
        } else {
            NormValue::Pow(-self.start)
        }
    }
}

fn rational_pow(p: Prime, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p.get()));
    match e.cmp(&0) {
        Ordering::Equal => BigRational::one(),
        Ordering::Greater => num_traits::pow(base, e as usize),
        Ordering::Less => num_traits::pow(base, (-e) as usize).recip(),
    }
}

/// p-adic norm of an arbitrary rational.
pub fn rational_norm(x: &BigRational, p: Prime) -> NormValue {
    if x.is_zero() {
        return NormValue::Zero;
    }
    let pb = BigInt::from(p.get());
    let valuation = |mut n: BigInt| {
        let mut v = 0i64;
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                return v;
            }
            n = q;
            v += 1;
        }
    };
    NormValue::Pow(valuation(x.denom().clone()) - valuation(x.numer().clone()))
}

/// The Monna map `Σ x_i p^i ↦ Σ x_i p^{-i-1}`, exactly.
pub fn monna_real(x: &PAdicDigits) -> BigRational {
    x.terms().fold(BigRational::zero(), |acc, (i, d)| {
        acc + BigRational::from_integer(BigInt::from(d)) * rational_pow(x.prime, -i - 1)
    })
}

/// The additive character `exp(2πi·frac_p(x))`.
pub fn character<T: Real>(x: &PAdicDigits) -> Complex<T> {
    let frac = x.fractional_part();
    match (frac.numer().to_u64(), frac.denom().to_u64()) {
        (Some(num), Some(den)) => root_of_unity(num, den),
        _ => {
            let phase = 2.0 * std::f64::consts::PI * frac.to_f64().unwrap_or(0.0);
            Complex::new(T::of(phase.cos()), T::of(phase.sin()))
        }
    }
}
