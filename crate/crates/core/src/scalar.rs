//! Arithmetic substrate: exact rationals, canonical quadratic surds, a
//! floating backend and the comparison policy shared by all checks.
//!
//! Every polynomial routine in the crate is generic over [`Scalar`], which is
//! implemented for [`Rational`] (exact mode) and `f64` (float mode).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational `p/q` with `q > 0` and `gcd(p, q) = 1`.
pub type Rational = num_rational::BigRational;

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Default relative tolerance for float comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Field operations needed by the polynomial code, over either exact
/// rationals or `f64`.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_float(&self) -> f64;

    /// Strict sign test, used for parameter validation.
    fn is_positive(&self) -> bool;

    /// The frame entry `value * sqrt(weight)`.
    fn root_scaled(value: &Self, weight: &Self) -> Result<Value>;

    /// Text form used in parameter records: `"p/q"` or a shortest float.
    fn label(&self) -> String;

    fn from_usize(v: usize) -> Self {
        Self::from_int(v as i64)
    }

    fn powu(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_float(&self) -> f64 {
        rational_to_f64(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn root_scaled(value: &Self, weight: &Self) -> Result<Value> {
        if value.is_zero() {
            return Ok(Value::Exact(Surd::zero()));
        }
        Ok(Value::Exact(surd_sqrt(weight)?.scale(value)))
    }

    fn label(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_float(&self) -> f64 {
        *self
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn root_scaled(value: &Self, weight: &Self) -> Result<Value> {
        if *value == 0.0 {
            return Ok(Value::Float(0.0));
        }
        if *weight < 0.0 {
            return Err(Error::NegativeRadicand(weight.to_string()));
        }
        Ok(Value::Float(value * weight.sqrt()))
    }

    fn label(&self) -> String {
        format!("{self:?}")
    }
}

/// Converts without overflowing when numerator and denominator are huge.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let (n, d) = if shift > 0 {
        (r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    if d.is_zero() {
        return if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "decimal '{t}' is not accepted in exact mode; write it as p/q"
        )));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num).map_err(|e| Error::Parse(format!("'{t}': {e}")))?;
    let d = BigInt::from_str(den).map_err(|e| Error::Parse(format!("'{t}': {e}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("'{t}': zero denominator")));
    }
    Ok(Rational::new(n, d))
}

/// Canonical string: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn small_square_free_split(mut n: u128) -> (u128, u128) {
    let mut square = 1u128;
    let mut free = 1u128;
    let mut p = 2u128;
    let mut check_square = true;
    while p * p * p <= n {
        if check_square {
            let r = n.sqrt();
            if r * r == n {
                return (square * r, free);
            }
            check_square = false;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                square *= p;
            }
            if e % 2 == 1 {
                free *= p;
            }
            check_square = true;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Remaining cofactor has at most two prime factors, both larger than p.
    let r = n.sqrt();
    if r * r == n {
        square *= r;
    } else {
        free *= n;
    }
    (square, free)
}

/// Splits `n = a^2 * b` with `b` square-free.
pub fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(v) = n.to_u128() {
        let (a, b) = small_square_free_split(v);
        return (BigUint::from(a), BigUint::from(b));
    }
    let mut n = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p = BigUint::from(2u32);
    let two = BigUint::from(2u32);
    while &p * &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut e = 0;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            for _ in 0..e / 2 {
                square *= &p;
            }
            if e % 2 == 1 {
                free *= &p;
            }
            if let Some(v) = n.to_u128() {
                let (a, b) = small_square_free_split(v);
                return (square * BigUint::from(a), free * BigUint::from(b));
            }
        }
        p = if p == two { p + 1u32 } else { p + 2u32 };
    }
    let r = n.sqrt();
    if &r * &r == n {
        square *= r;
    } else {
        free *= n;
    }
    (square, free)
}

/// A real number `coef * sqrt(radicand)` with square-free `radicand >= 1`.
///
/// The sign lives in `coef`; zero is `0 * sqrt(1)`. The representation is
/// unique, so structural equality is value equality. Sums of surds are not
/// surds; see [`RadicalSum`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    coef: Rational,
    radicand: BigUint,
}

impl Surd {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        Surd {
            coef: r,
            radicand: BigUint::one(),
        }
    }

    /// Builds and canonicalizes `coef * sqrt(radicand)` for any radicand >= 0.
    pub fn new(coef: Rational, radicand: BigUint) -> Self {
        if coef.is_zero() || radicand.is_zero() {
            return Self::zero();
        }
        let (a, b) = square_free_split(&radicand);
        Surd {
            coef: coef * Rational::from_integer(BigInt::from(a)),
            radicand: b,
        }
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn scale(&self, r: &Rational) -> Surd {
        if r.is_zero() {
            return Surd::zero();
        }
        Surd {
            coef: &self.coef * r,
            radicand: self.radicand.clone(),
        }
    }

    /// `coef^2 * radicand`.
    pub fn square(&self) -> Rational {
        &self.coef * &self.coef * Rational::from_integer(BigInt::from(self.radicand.clone()))
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        if self.is_zero() || other.is_zero() {
            return Surd::zero();
        }
        let g = self.radicand.gcd(&other.radicand);
        let rad = (&self.radicand / &g) * (&other.radicand / &g);
        Surd {
            coef: &self.coef * &other.coef * Rational::from_integer(BigInt::from(g)),
            radicand: rad,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coef) * self.radicand.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            coef: -self.coef,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", format_rational(&self.coef))
        } else {
            write!(f, "{}*sqrt({})", format_rational(&self.coef), self.radicand)
        }
    }
}

/// Canonical `r * sqrt(s)` with `(r * sqrt(s))^2 = q`.
pub fn surd_sqrt(q: &Rational) -> Result<Surd> {
    if q.is_negative() {
        return Err(Error::NegativeRadicand(format_rational(q)));
    }
    if q.is_zero() {
        return Ok(Surd::zero());
    }
    let p = q.numer().magnitude();
    let d = q.denom().magnitude();
    let (a1, b1) = square_free_split(p);
    let (a2, b2) = square_free_split(d);
    // p and d are coprime, so b1 * b2 is square-free.
    let coef = Rational::new(BigInt::from(a1), BigInt::from(a2 * &b2));
    Ok(Surd {
        coef,
        radicand: b1 * b2,
    })
}

pub fn surd_scale(a: &Surd, r: &Rational) -> Surd {
    a.scale(r)
}

pub fn surd_square(a: &Surd) -> Rational {
    a.square()
}

#[derive(Serialize, Deserialize)]
struct SurdRepr {
    coef: String,
    radicand: RadicandRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RadicandRepr {
    Small(u64),
    Big(String),
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let radicand = match self.radicand.to_u64() {
            Some(v) => RadicandRepr::Small(v),
            None => RadicandRepr::Big(self.radicand.to_string()),
        };
        SurdRepr {
            coef: format_rational(&self.coef),
            radicand,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SurdRepr::deserialize(deserializer)?;
        let coef = parse_rational(&repr.coef).map_err(serde::de::Error::custom)?;
        let radicand = match repr.radicand {
            RadicandRepr::Small(v) => BigUint::from(v),
            RadicandRepr::Big(s) => BigUint::from_str(&s).map_err(serde::de::Error::custom)?,
        };
        Ok(Surd::new(coef, radicand))
    }
}

/// A finite sum `sum_s c_s * sqrt(s)` over distinct square-free `s`.
///
/// Square roots of distinct square-free integers are linearly independent
/// over the rationals, so the sum is zero iff every coefficient is zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl RadicalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_surd(&mut self, s: &Surd) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry(s.radicand.clone()).or_insert_with(Rational::zero);
        *entry += &s.coef;
        if entry.is_zero() {
            self.terms.remove(&s.radicand);
        }
    }

    pub fn add_product(&mut self, a: &Surd, b: &Surd) {
        self.add_surd(&a.mul(b));
    }

    pub fn add_rational(&mut self, r: &Rational) {
        self.add_surd(&Surd::from_rational(r.clone()));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn equals_rational(&self, r: &Rational) -> bool {
        self.as_rational().is_some_and(|v| &v == r)
    }

    pub fn terms(&self) -> impl Iterator<Item = Surd> + '_ {
        self.terms.iter().map(|(s, c)| Surd {
            coef: c.clone(),
            radicand: s.clone(),
        })
    }

    pub fn mul(&self, other: &RadicalSum) -> RadicalSum {
        let mut out = RadicalSum::new();
        for a in self.terms() {
            for b in other.terms() {
                out.add_product(&a, &b);
            }
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.terms().map(|s| s.to_f64()).sum()
    }
}

/// An exact surd or a float; the entry type of frames and of [`scalar_eq`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Surd),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(s) => s.to_f64(),
            Value::Float(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn negated(&self) -> Value {
        match self {
            Value::Exact(s) => Value::Exact(-s.clone()),
            Value::Float(v) => Value::Float(-v),
        }
    }
}

/// JSON form of a [`Value`]: `"p/q"` for rationals, `{coef, radicand}` for
/// other surds and a plain number for floats.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Rational(String),
    Surd(Surd),
    Float(f64),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(s) if s.is_rational() => ValueRepr::Rational(format_rational(s.coef())),
            Value::Exact(s) => ValueRepr::Surd(s.clone()),
            Value::Float(v) => ValueRepr::Float(*v),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match ValueRepr::deserialize(deserializer)? {
            ValueRepr::Rational(t) => {
                Value::Exact(Surd::from_rational(parse_rational(&t).map_err(serde::de::Error::custom)?))
            }
            ValueRepr::Surd(s) => Value::Exact(s),
            ValueRepr::Float(v) => Value::Float(v),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    pub mode: Mode,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl ToleranceProfile {
    pub fn exact() -> Self {
        ToleranceProfile {
            mode: Mode::Exact,
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn float(tol: f64) -> Self {
        ToleranceProfile {
            mode: Mode::Float,
            abs_tol: tol,
            rel_tol: tol,
        }
    }

    pub fn float_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self::float(DEFAULT_ABS_TOL)
    }
}

/// Exact mode compares canonical forms when both sides are exact; anything
/// else falls back to the float rule.
pub fn scalar_eq(a: &Value, b: &Value, profile: &ToleranceProfile) -> bool {
    match (profile.mode, a, b) {
        (Mode::Exact, Value::Exact(x), Value::Exact(y)) => x == y,
        (Mode::Exact, _, _) => a.to_f64() == b.to_f64(),
        (Mode::Float, _, _) => profile.float_eq(a.to_f64(), b.to_f64()),
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn rational_sign(r: &Rational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
