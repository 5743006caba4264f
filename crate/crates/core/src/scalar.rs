//! Complex scalars in two flavours: double precision and exact rationals.
//!
//! Diagonal-domain computations are rational once the common factor `π^n`
//! is divided out of every monomial norm, so the exact flavour carries
//! `Complex<BigRational>` and the factor is tracked separately as a
//! [`PiRational`].

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CQ = Complex<BigRational>;

/// Relative threshold below which a floating pivot counts as zero.
pub const RANK_TOL: f64 = 1e-10;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Exact for the rational flavour: every finite double is a dyadic rational.
    fn from_parts(re: f64, im: f64) -> Result<Self>;
    fn from_rational(q: &BigRational) -> Self;
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self;
    fn conj(&self) -> Self;
    /// `|x|²` as a real-valued scalar.
    fn abs_sqr(&self) -> Self;
    fn to_c64(&self) -> C64;
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn is_zero(&self) -> bool;
    /// Exact flavour: `is_zero`. Float flavour: `|x| <= RANK_TOL * scale`.
    fn is_negligible(&self, scale: f64) -> bool;
    fn re_f64(&self) -> f64 {
        self.to_c64().re
    }
    /// Exact real part, when the flavour has one.
    fn re_rational(&self) -> Option<BigRational>;
    fn im_rational(&self) -> Option<BigRational>;
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_parts(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {re}+{im}i")));
        }
        Ok(C64::new(re, im))
    }
    fn from_rational(q: &BigRational) -> Self {
        C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self {
        C64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn abs_sqr(&self) -> Self {
        C64::new(self.norm_sqr(), 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.norm() <= RANK_TOL * scale
    }
    fn re_rational(&self) -> Option<BigRational> {
        None
    }
    fn im_rational(&self) -> Option<BigRational> {
        None
    }
}

impl Scalar for CQ {
    const EXACT: bool = true;

    fn zero() -> Self {
        CQ::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        CQ::new(BigRational::one(), BigRational::zero())
    }
    fn from_parts(re: f64, im: f64) -> Result<Self> {
        let re = BigRational::from_f64(re)
            .ok_or_else(|| Error::InvalidArgument(format!("non-finite coefficient {re}")))?;
        let im = BigRational::from_f64(im)
            .ok_or_else(|| Error::InvalidArgument(format!("non-finite coefficient {im}")))?;
        Ok(CQ::new(re, im))
    }
    fn from_rational(q: &BigRational) -> Self {
        CQ::new(q.clone(), BigRational::zero())
    }
    fn from_complex_rational(re: &BigRational, im: &BigRational) -> Self {
        CQ::new(re.clone(), im.clone())
    }
    fn conj(&self) -> Self {
        CQ::new(self.re.clone(), -self.im.clone())
    }
    fn abs_sqr(&self) -> Self {
        CQ::new(&self.re * &self.re + &self.im * &self.im, BigRational::zero())
    }
    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn magnitude(&self) -> f64 {
        if Scalar::is_zero(self) {
            0.0
        } else {
            // Any nonzero value is a valid exact pivot.
            1.0
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        Scalar::is_zero(self)
    }
    fn re_rational(&self) -> Option<BigRational> {
        Some(self.re.clone())
    }
    fn im_rational(&self) -> Option<BigRational> {
        Some(self.im.clone())
    }
}

/// Parse "p", "p/q" or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if q.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(text) {
        return Ok(BigRational::from_integer(p));
    }
    let x: f64 = text
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("not a number: {text}")))?;
    BigRational::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("not finite: {text}")))
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A real value `rational · π^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiRational {
    pub pi_power: i32,
    pub rational: BigRational,
}

impl PiRational {
    pub fn new(pi_power: i32, rational: BigRational) -> Self {
        Self { pi_power, rational }
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_power)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.rational.is_negative()
    }
}

impl Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", rational_to_string(&self.rational)),
            1 => write!(f, "pi*{}", rational_to_string(&self.rational)),
            p => write!(f, "pi^{}*{}", p, rational_to_string(&self.rational)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PiRationalJson {
    pi_power: i32,
    rational: String,
}

impl Serialize for PiRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiRationalJson {
            pi_power: self.pi_power,
            rational: rational_to_string(&self.rational),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PiRationalJson::deserialize(d)?;
        let rational = parse_rational(&raw.rational).map_err(serde::de::Error::custom)?;
        Ok(PiRational::new(raw.pi_power, rational))
    }
}

/// A nonnegative quantity that may be `+∞`, with its exact form when known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    /// `f64::INFINITY` encodes `+∞`; serialized as `null`.
    #[serde(with = "extended_f64")]
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<PiRational>,
}

impl Quantity {
    pub fn float(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn infinite() -> Self {
        Self { value: f64::INFINITY, exact: None }
    }

    pub fn exact(q: PiRational) -> Self {
        Self { value: q.to_f64(), exact: Some(q) }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// Build from a scaled real scalar; exact scalars keep their rational form.
    pub fn from_scalar<S: Scalar>(x: &S, pi_power: i32) -> Self {
        match x.re_rational() {
            Some(q) => Self::exact(PiRational::new(pi_power, q)),
            None => Self::float(x.re_f64() * std::f64::consts::PI.powi(pi_power)),
        }
    }
}

impl Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.exact, self.value.is_infinite()) {
            (_, true) => write!(f, "inf"),
            (Some(q), _) => write!(f, "{} ({})", q, self.value),
            (None, _) => write!(f, "{}", self.value),
        }
    }
}

pub(crate) mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Exact rational from a double, for parameters that arrive as JSON numbers.
pub fn exact_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("not finite: {x}")))
}

/// Floor of a rational as an integer (toward −∞).
pub fn floor_rational(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_conversion_is_exact() {
        let q = <CQ as Scalar>::from_parts(0.75, -0.5).unwrap();
        assert_eq!(q.re, BigRational::new(3.into(), 4.into()));
        assert_eq!(q.im, BigRational::new((-1).into(), 2.into()));
        assert!(<CQ as Scalar>::from_parts(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/5").unwrap(), BigRational::new(3.into(), 5.into()));
        assert_eq!(parse_rational("-7").unwrap(), BigRational::from_integer((-7).into()));
        assert_eq!(parse_rational("0.5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn pi_rational_json_shape() {
        let q = PiRational::new(2, BigRational::new(1.into(), 5.into()));
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"pi_power":2,"rational":"1/5"}"#);
        let back: PiRational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!((q.to_f64() - std::f64::consts::PI.powi(2) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn infinite_quantity_serializes_as_null() {
        let s = serde_json::to_string(&Quantity::infinite()).unwrap();
        assert_eq!(s, r#"{"value":null}"#);
        let back: Quantity = serde_json::from_str(&s).unwrap();
        assert!(back.is_infinite());
    }
}
