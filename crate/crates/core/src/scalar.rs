//! Exact arithmetic in the desk-scale valued field `Q((w))`.
//!
//! A [`Scalar`] is a Laurent polynomial in the uniformizer `w` with rational
//! coefficients, together with a precision contract: either the stored
//! polynomial *is* the element ([`Precision::Exact`]), or the element differs
//! from it by something of `w`-order at least `N` ([`Precision::KnownUpTo`]).
//!
//! Norms are never floating point. The norm of a nonzero element of order `k`
//! is represented as [`NormValue::Eps`]`(k)`, standing for `eps^k` with a fixed
//! symbolic `0 < eps < 1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("insufficient precision to decide the norm")]
    InsufficientPrecision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not in the valuation ring (negative order)")]
    NotIntegral,
    #[error("invalid scalar literal `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

/// How much of a [`Scalar`] is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    /// The true element minus the stored polynomial has order `>= N`.
    KnownUpTo(i64),
}

impl Precision {
    /// `None` stands for +infinity.
    pub fn bound(self) -> Option<i64> {
        match self {
            Precision::Exact => None,
            Precision::KnownUpTo(n) => Some(n),
        }
    }

    fn from_bound(bound: Option<i64>) -> Self {
        match bound {
            None => Precision::Exact,
            Some(n) => Precision::KnownUpTo(n),
        }
    }

    pub fn min(self, other: Precision) -> Precision {
        Precision::from_bound(min_inf(self.bound(), other.bound()))
    }
}

fn min_inf(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

fn add_inf(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

/// Norm of an element: zero, or `eps^k` for the element's order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormValue {
    Zero,
    Eps(i64),
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormValue::Zero, NormValue::Zero) => Ordering::Equal,
            (NormValue::Zero, NormValue::Eps(_)) => Ordering::Less,
            (NormValue::Eps(_), NormValue::Zero) => Ordering::Greater,
            // larger order means smaller norm
            (NormValue::Eps(k), NormValue::Eps(m)) => m.cmp(k),
        }
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for NormValue {
    type Output = NormValue;
    fn mul(self, rhs: NormValue) -> NormValue {
        match (self, rhs) {
            (NormValue::Eps(k), NormValue::Eps(m)) => NormValue::Eps(k + m),
            _ => NormValue::Zero,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => write!(f, "0"),
            NormValue::Eps(k) => write!(f, "eps^{k}"),
        }
    }
}

/// What is known about the order of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Known {
    Zero,
    Order(i64),
    /// No coefficient below the precision bound is nonzero; the element may be zero.
    AtLeast(i64),
}

/// An element of `Q((w))` with a precision contract.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    coeffs: BTreeMap<i64, BigRational>,
    precision: Precision,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            coeffs: BTreeMap::new(),
            precision: Precision::Exact,
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Scalar::monomial(c, 0)
    }

    /// `c * w^k`, exact.
    pub fn monomial(c: BigRational, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Scalar {
            coeffs,
            precision: Precision::Exact,
        }
    }

    /// `w^k`.
    pub fn uniformizer_pow(k: i64) -> Self {
        Scalar::monomial(BigRational::one(), k)
    }

    /// `O(w^n)`: nothing known except that the order is at least `n`.
    pub fn unknown(n: i64) -> Self {
        Scalar {
            coeffs: BTreeMap::new(),
            precision: Precision::KnownUpTo(n),
        }
    }

    /// Builds a scalar from `(exponent, coefficient)` pairs, normalizing.
    pub fn from_terms<I>(terms: I, precision: Precision) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert_with(BigRational::zero) += c;
        }
        let mut s = Scalar { coeffs, precision };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let bound = self.precision.bound();
        self.coeffs
            .retain(|k, c| !c.is_zero() && bound.map_or(true, |n| *k < n));
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Exact
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.coeffs.is_empty()
    }

    /// Stored `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, k: i64) -> BigRational {
        self.coeffs.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the lowest stored coefficient.
    pub fn min_stored_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lower bound on the order; `None` means the element is exactly zero.
    pub fn order_lower_bound(&self) -> Option<i64> {
        match self.known() {
            Known::Zero => None,
            Known::Order(k) | Known::AtLeast(k) => Some(k),
        }
    }

    fn known(&self) -> Known {
        match (self.min_stored_exponent(), self.precision) {
            (Some(k), _) => Known::Order(k),
            (None, Precision::Exact) => Known::Zero,
            (None, Precision::KnownUpTo(n)) => Known::AtLeast(n),
        }
    }

    /// Decided order; `Ok(None)` for exact zero.
    pub fn order(&self) -> Result<Option<i64>, ScalarError> {
        match self.known() {
            Known::Zero => Ok(None),
            Known::Order(k) => Ok(Some(k)),
            Known::AtLeast(_) => Err(ScalarError::InsufficientPrecision),
        }
    }

    pub fn norm(&self) -> Result<NormValue, ScalarError> {
        Ok(match self.order()? {
            None => NormValue::Zero,
            Some(k) => NormValue::Eps(k),
        })
    }

    /// Decides `|self| <= |other|`.
    pub fn norm_le(&self, other: &Scalar) -> Result<bool, ScalarError> {
        use Known::*;
        let undecided = Err(ScalarError::InsufficientPrecision);
        match (self.known(), other.known()) {
            (Zero, _) => Ok(true),
            (Order(_), Zero) => Ok(false),
            (Order(a), Order(b)) => Ok(a >= b),
            (Order(a), AtLeast(nb)) => {
                if a < nb {
                    Ok(false)
                } else {
                    undecided
                }
            }
            (AtLeast(na), Order(b)) => {
                if na >= b {
                    Ok(true)
                } else {
                    undecided
                }
            }
            (AtLeast(_), Zero) | (AtLeast(_), AtLeast(_)) => undecided,
        }
    }

    /// Decides `|self| < |other|`.
    pub fn norm_lt(&self, other: &Scalar) -> Result<bool, ScalarError> {
        use Known::*;
        let undecided = Err(ScalarError::InsufficientPrecision);
        match (self.known(), other.known()) {
            (_, Zero) => Ok(false),
            (Zero, Order(_)) => Ok(true),
            (Zero, AtLeast(_)) => undecided,
            (Order(a), Order(b)) => Ok(a > b),
            (Order(a), AtLeast(nb)) => {
                if a < nb {
                    Ok(false)
                } else {
                    undecided
                }
            }
            (AtLeast(na), Order(b)) => {
                if na > b {
                    Ok(true)
                } else {
                    undecided
                }
            }
            (AtLeast(_), AtLeast(_)) => undecided,
        }
    }

    /// Decides whether the element is zero.
    pub fn is_zero_decided(&self) -> Result<bool, ScalarError> {
        match self.known() {
            Known::Zero => Ok(true),
            Known::Order(_) => Ok(false),
            Known::AtLeast(_) => Err(ScalarError::InsufficientPrecision),
        }
    }

    /// Lowers the precision to at most `n`, dropping coefficients at or above `n`.
    pub fn truncate(&self, n: i64) -> Scalar {
        let mut s = Scalar {
            coeffs: self.coeffs.clone(),
            precision: self.precision.min(Precision::KnownUpTo(n)),
        };
        s.normalize();
        s
    }

    /// Multiplies by `w^k`.
    pub fn shift(&self, k: i64) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            precision: Precision::from_bound(self.precision.bound().map(|n| n + k)),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Scalar {
        if c.is_zero() && self.is_exact() {
            return Scalar::zero();
        }
        let mut s = Scalar {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
            precision: self.precision,
        };
        s.normalize();
        s
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse, correct up to order `n`.
    ///
    /// Exact monomials invert exactly. Otherwise the unit part is inverted as a
    /// power series; the result is known up to `min(n, N_b - 2 ord(b))`.
    pub fn invert(&self, n: i64) -> Result<Scalar, ScalarError> {
        let v = match self.known() {
            Known::Zero => return Err(ScalarError::DivisionByZero),
            Known::AtLeast(_) => return Err(ScalarError::InsufficientPrecision),
            Known::Order(v) => v,
        };
        if self.is_exact() && self.coeffs.len() == 1 {
            let c = &self.coeffs[&v];
            return Ok(Scalar::monomial(c.recip(), -v));
        }
        let mut target = n;
        if let Some(nb) = self.precision.bound() {
            target = target.min(nb - 2 * v);
        }
        let count = target + v;
        if count <= 0 {
            return Ok(Scalar::unknown(target));
        }
        let count = count as usize;
        let unit: Vec<BigRational> = (0..count).map(|i| self.coefficient(v + i as i64)).collect();
        let c0 = unit[0].recip();
        let mut inv: Vec<BigRational> = Vec::with_capacity(count);
        inv.push(c0.clone());
        for k in 1..count {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !unit[i].is_zero() && !inv[k - i].is_zero() {
                    acc += &unit[i] * &inv[k - i];
                }
            }
            inv.push(-(&c0 * acc));
        }
        Ok(Scalar::from_terms(
            inv.into_iter().enumerate().map(|(k, c)| (k as i64 - v, c)),
            Precision::KnownUpTo(target),
        ))
    }

    /// Exact quotient of two exact Laurent polynomials, if `other` divides `self`
    /// in `Q[w, 1/w]`.
    pub fn exact_div(&self, other: &Scalar) -> Option<Scalar> {
        if !self.is_exact() || !other.is_exact() || other.coeffs.is_empty() {
            return None;
        }
        if self.coeffs.is_empty() {
            return Some(Scalar::zero());
        }
        let va = self.min_stored_exponent()?;
        let vb = other.min_stored_exponent()?;
        let dense = |s: &Scalar, v: i64| -> Vec<BigRational> {
            let top = *s.coeffs.keys().next_back().unwrap();
            (v..=top).map(|k| s.coefficient(k)).collect()
        };
        let mut rem = dense(self, va);
        let den = dense(other, vb);
        if rem.len() < den.len() {
            return None;
        }
        let lead = den.last().unwrap().clone();
        let mut quot = vec![BigRational::zero(); rem.len() - den.len() + 1];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + den.len() - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in den.iter().enumerate() {
                if !d.is_zero() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Scalar::from_terms(
            quot.into_iter()
                .enumerate()
                .map(|(k, c)| (k as i64 + va - vb, c)),
            Precision::Exact,
        ))
    }

    /// Constant coefficient of an element of the valuation ring.
    pub fn residue(&self) -> Result<BigRational, ScalarError> {
        if let Some(k) = self.min_stored_exponent() {
            if k < 0 {
                return Err(ScalarError::NotIntegral);
            }
        }
        if let Some(n) = self.precision.bound() {
            if n <= 0 {
                return Err(ScalarError::InsufficientPrecision);
            }
        }
        Ok(self.coefficient(0))
    }

    /// Compact whitespace-free form used inside formulas, e.g. `3/2*w^-1+2-5*w^3`.
    pub fn to_token(&self) -> String {
        self.render(true)
    }

    fn render(&self, compact: bool) -> String {
        let mut out = String::new();
        let (plus, minus, times) = if compact {
            ("+", "-", "*")
        } else {
            (" + ", " - ", " ")
        };
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { minus } else { plus });
            }
            let a = c.abs();
            let body = match *k {
                0 => a.to_string(),
                1 if a.is_one() => "w".to_string(),
                1 => format!("{a}{times}w"),
                k if a.is_one() => format!("w^{k}"),
                k => format!("{a}{times}w^{k}"),
            };
            out.push_str(&body);
        }
        if let Precision::KnownUpTo(n) = self.precision {
            if !out.is_empty() {
                out.push_str(plus);
            }
            out.push_str(&format!("O(w^{n})"));
        } else if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Truncated division: `a/b` when `|a| <= |b| != 0`, otherwise `0`.
///
/// When the quotient is not an exact Laurent polynomial it is computed by
/// series division with at least `n` correct orders beyond its leading order.
pub fn ddiv(a: &Scalar, b: &Scalar, n: i64) -> Result<Scalar, ScalarError> {
    let vb = match b.known() {
        Known::Zero => return Ok(Scalar::zero()),
        Known::AtLeast(_) => return Err(ScalarError::InsufficientPrecision),
        Known::Order(v) => v,
    };
    if !a.norm_le(b)? {
        return Ok(Scalar::zero());
    }
    let Some(va) = a.order_lower_bound() else {
        return Ok(Scalar::zero());
    };
    if let Some(q) = a.exact_div(b) {
        return Ok(q);
    }
    let target = (va - vb) + n.max(1);
    let inv = b.invert(target - va)?;
    Ok((a * &inv).truncate(target))
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            *coeffs.entry(*k).or_insert_with(BigRational::zero) += c;
        }
        let mut s = Scalar {
            coeffs,
            precision: self.precision.min(rhs.precision),
        };
        s.normalize();
        s
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
            precision: self.precision,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let na = self.precision.bound();
        let nb = rhs.precision.bound();
        let oa = self.order_lower_bound();
        let ob = rhs.order_lower_bound();
        // an exact zero factor makes the product exactly zero
        let bound = if oa.is_none() && self.is_exact() || ob.is_none() && rhs.is_exact() {
            None
        } else {
            min_inf(
                min_inf(add_inf(na, ob), add_inf(nb, oa)),
                add_inf(na, nb),
            )
        };
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &rhs.coeffs {
                let k = i + j;
                if bound.map_or(true, |n| k < n) {
                    *coeffs.entry(k).or_insert_with(BigRational::zero) += a * b;
                }
            }
        }
        let mut s = Scalar {
            coeffs,
            precision: Precision::from_bound(bound),
        };
        s.normalize();
        s
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LiteralParser::new(s).parse()
    }
}

/// Parser for `3/2 w^-1 + 2 + 5 w^3`, `3/2*w^-1+2+5*w^3`, and `... + O(w^N)`.
struct LiteralParser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> LiteralParser<'a> {
    fn new(text: &'a str) -> Self {
        LiteralParser {
            text,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn err(&self, reason: impl Into<String>) -> ScalarError {
        ScalarError::Parse {
            text: self.text.to_string(),
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn signed_int(&mut self) -> Result<i64, ScalarError> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| self.err("expected an integer exponent"))?;
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<i64, ScalarError> {
        if self.eat('^') {
            if self.eat('(') {
                let e = self.signed_int()?;
                if !self.eat(')') {
                    return Err(self.err("unclosed exponent"));
                }
                Ok(e)
            } else {
                self.signed_int()
            }
        } else {
            Ok(1)
        }
    }

    fn parse(mut self) -> Result<Scalar, ScalarError> {
        if self.chars.is_empty() {
            return Err(self.err("empty literal"));
        }
        let mut terms: Vec<(i64, BigRational)> = Vec::new();
        let mut precision = Precision::Exact;
        let mut first = true;
        while self.pos < self.chars.len() {
            let negative = if self.eat('-') {
                true
            } else if self.eat('+') {
                false
            } else if first {
                false
            } else {
                return Err(self.err(format!("expected `+` or `-` at offset {}", self.pos)));
            };
            first = false;
            if self.peek() == Some('O') {
                self.pos += 1;
                if !self.eat('(') || !self.eat('w') {
                    return Err(self.err("expected `O(w^N)`"));
                }
                let n = self.exponent()?;
                if !self.eat(')') {
                    return Err(self.err("unclosed `O(`"));
                }
                precision = precision.min(Precision::KnownUpTo(n));
                continue;
            }
            let coeff = match self.digits() {
                Some(num) => {
                    let den = if self.eat('/') {
                        self.digits().ok_or_else(|| self.err("expected denominator"))?
                    } else {
                        BigInt::one()
                    };
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    Some(BigRational::new(num, den))
                }
                None => None,
            };
            let had_star = self.eat('*');
            let power = if self.eat('w') {
                Some(self.exponent()?)
            } else {
                None
            };
            if had_star && power.is_none() {
                return Err(self.err("expected `w` after `*`"));
            }
            let (c, k) = match (coeff, power) {
                (None, None) => return Err(self.err(format!("unexpected input at offset {}", self.pos))),
                (Some(c), None) => (c, 0),
                (None, Some(k)) => (BigRational::one(), k),
                (Some(c), Some(k)) => (c, k),
            };
            terms.push((k, if negative { -c } else { c }));
        }
        Ok(Scalar::from_terms(terms, precision))
    }
}

/// Parses a rational literal such as `-3/2`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cancellation_and_inverse_pair() {
        assert_eq!(s("1 + w") + s("1 - w"), Scalar::from_int(2));
        assert_eq!(s("w") * s("w^-1"), Scalar::one());
        assert!((s("w") * s("w^-1")).is_exact());
    }

    /// Interval-style oracle: represent an inexact factor by its stored part plus
    /// a symbolic tail `t * w^N`, multiply out by schoolbook, and read off the
    /// lowest order any tail contribution can reach.
    #[test]
    fn product_precision_matches_tail_oracle() {
        let a = s("w^2");
        let b = s("1 + w + O(w^3)");
        let prod = &a * &b;
        // oracle: (w^2) * (1 + w + t w^3) = w^2 + w^3 + t w^5 -> unknown from 5 on
        let tail_order = 2 + 3;
        assert_eq!(prod.precision(), Precision::KnownUpTo(tail_order));
        assert_eq!(prod.coefficient(2), q(1, 1));
        assert_eq!(prod.coefficient(3), q(1, 1));

        // two inexact factors: (1 + t1 w^2)(w + t2 w^4) -> min(2+1, 4+0, 2+4) = 3
        let c = s("1 + O(w^2)");
        let d = s("w + O(w^4)");
        assert_eq!((&c * &d).precision(), Precision::KnownUpTo(3));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(s("w^2 + 3 w^5").norm(), Ok(NormValue::Eps(2)));
        assert_eq!(Scalar::zero().norm(), Ok(NormValue::Zero));
        assert_eq!(Scalar::unknown(4).norm(), Err(ScalarError::InsufficientPrecision));
    }

    #[test]
    fn norm_value_order() {
        assert!(NormValue::Zero < NormValue::Eps(100));
        assert!(NormValue::Eps(3) < NormValue::Eps(1));
        assert_eq!(NormValue::Eps(2) * NormValue::Eps(-5), NormValue::Eps(-3));
    }

    #[test]
    fn ddiv_examples() {
        assert_eq!(ddiv(&s("w^2"), &s("w"), 8).unwrap(), s("w"));
        assert_eq!(ddiv(&Scalar::one(), &s("w"), 8).unwrap(), Scalar::zero());
        assert_eq!(ddiv(&s("w"), &Scalar::zero(), 8).unwrap(), Scalar::zero());
        let n = 6;
        let r = ddiv(&Scalar::one(), &s("1 + w"), n).unwrap();
        // back-multiplication oracle
        let back = &r * &s("1 + w");
        assert_eq!(back.truncate(n), Scalar::one().truncate(n));
        for k in 0..n {
            assert_eq!(r.coefficient(k), q(if k % 2 == 0 { 1 } else { -1 }, 1));
        }
    }

    #[test]
    fn ddiv_undecided_denominator() {
        assert_eq!(
            ddiv(&Scalar::one(), &Scalar::unknown(3), 4),
            Err(ScalarError::InsufficientPrecision)
        );
        // an all-unknown numerator below the denominator's order is still comparable
        let r = ddiv(&Scalar::unknown(5), &s("w^2"), 4).unwrap();
        assert_eq!(r.precision(), Precision::KnownUpTo(3));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(s("w").invert(5).unwrap(), s("w^-1"));
        assert_eq!(s("2").invert(5).unwrap(), s("1/2"));
        // geometric series oracle for 1/(1 - w)
        let inv = s("1 - w").invert(4).unwrap();
        let oracle: Scalar = Scalar::from_terms((0..4).map(|k| (k, q(1, 1))), Precision::KnownUpTo(4));
        assert_eq!(inv, oracle);
        assert_eq!(Scalar::zero().invert(3), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn exact_division() {
        let a = s("1 - w^2");
        let b = s("1 + w");
        assert_eq!(a.exact_div(&b), Some(s("1 - w")));
        assert_eq!(b.exact_div(&a), None);
        assert_eq!(s("w^3 + w^4").exact_div(&s("w^-1")), Some(s("w^4 + w^5")));
    }

    #[test]
    fn literal_round_trip() {
        for text in ["3/2 w^-1 + 2 + 5 w^3", "0", "-w", "1 - 1/3 w + O(w^4)", "O(w^2)"] {
            let v = s(text);
            assert_eq!(v.to_string(), text);
            assert_eq!(s(&v.to_token()), v);
        }
        assert_eq!(s("3/2*w^-1+2+5*w^3"), s("3/2 w^-1 + 2 + 5 w^3"));
        assert!("w +".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn residue_requires_integral() {
        assert_eq!(s("3 + w").residue(), Ok(q(3, 1)));
        assert_eq!(s("w^-1").residue(), Err(ScalarError::NotIntegral));
        assert_eq!(Scalar::unknown(0).residue(), Err(ScalarError::InsufficientPrecision));
    }

    fn arb_exact() -> impl Strategy<Value = Scalar> {
        prop::collection::vec((-3i64..6, -4i64..5), 0..5).prop_map(|terms| {
            Scalar::from_terms(
                terms.into_iter().map(|(k, c)| (k, BigRational::from_integer(c.into()))),
                Precision::Exact,
            )
        })
    }

    proptest! {
        #[test]
        fn ultrametric(a in arb_exact(), b in arb_exact()) {
            let na = a.norm().unwrap();
            let nb = b.norm().unwrap();
            let sum = (&a + &b).norm().unwrap();
            prop_assert!(sum <= na.max(nb));
            if na != nb {
                prop_assert_eq!(sum, na.max(nb));
            }
        }

        #[test]
        fn multiplicative(a in arb_exact(), b in arb_exact()) {
            prop_assume!(!a.is_exact_zero() && !b.is_exact_zero());
            prop_assert_eq!((&a * &b).norm().unwrap(), a.norm().unwrap() * b.norm().unwrap());
        }

        #[test]
        fn ddiv_lands_in_valuation_ring(a in arb_exact(), b in arb_exact(), n in 1i64..10) {
            let r = ddiv(&a, &b, n).unwrap();
            prop_assert!(r.order_lower_bound().map_or(true, |k| k >= 0));
        }

        #[test]
        fn precision_soundness(a in arb_exact(), b in arb_exact(), n in 1i64..6) {
            prop_assume!(!b.is_exact_zero());
            let lo = ddiv(&a, &b, n).unwrap();
            let hi = ddiv(&a, &b, n + 7).unwrap();
            if let Some(bound) = lo.precision().bound() {
                prop_assert_eq!(hi.truncate(bound), lo.clone());
            }
            let inv_lo = b.invert(n).unwrap();
            let inv_hi = b.invert(n + 5).unwrap();
            if let Some(bound) = inv_lo.precision().bound() {
                prop_assert_eq!(inv_hi.truncate(bound), inv_lo);
            }
        }
    }
}
