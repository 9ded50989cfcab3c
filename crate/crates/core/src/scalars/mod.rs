//! Coefficient tower: exact rationals, multivariate polynomials in the
//! deformation parameters `t1, t2, ...` / `x1, x2, ...`, and quotients of
//! such polynomials.
//!
//! All downstream structures are generic over a [`Scalar`] ring so the same
//! coderivation code runs over plain rationals, polynomial grids and
//! rational-function grids.

mod poly;
mod ratfun;

pub use poly::{Monomial, MultiPoly};
pub use ratfun::RatFun;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar. Always stored reduced with positive denominator.
pub type Rational = BigRational;

/// Convenience constructor for small integer rationals.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convenience constructor `n/d` for small rationals. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Errors from the scalar layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("invalid rational literal `{0}`")]
    BadRational(String),
    #[error("denominator vanishes under substitution")]
    DenominatorVanishes,
    #[error("parameter {0} has no assigned value")]
    UnboundParameter(ParamName),
}

/// Parses `p` or `p/q` (optionally signed) into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::BadRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = BigInt::from_str(num_str.trim()).map_err(|_| bad())?;
    let den = match den_str {
        Some(d) => BigInt::from_str(d.trim()).map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Renders a rational as `p` or `p/q`, matching [`parse_rational`].
pub fn render_rational(r: &Rational) -> String {
    r.to_string()
}

/// True if `r` is a square in the rationals; returns the nonnegative root.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let sqrt_exact = |n: &BigInt| -> Option<BigInt> {
        let root = n.sqrt();
        (&root * &root == *n).then_some(root)
    };
    let num = sqrt_exact(r.numer())?;
    let den = sqrt_exact(r.denom())?;
    Some(Rational::new(num, den))
}

/// Which family a deformation parameter belongs to: `t` parameters label
/// cohomology directions, `x` parameters label the complementary directions
/// that get solved away while constructing a miniversal deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    T,
    X,
}

/// A deformation parameter such as `t3` or `x1`. Indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamName {
    pub kind: ParamKind,
    pub index: u32,
}

impl ParamName {
    pub fn t(index: u32) -> Self {
        assert!(index >= 1, "parameter indices start at 1");
        ParamName { kind: ParamKind::T, index }
    }

    pub fn x(index: u32) -> Self {
        assert!(index >= 1, "parameter indices start at 1");
        ParamName { kind: ParamKind::X, index }
    }

    /// Pretty form with a superscript index, e.g. `t³`.
    pub fn pretty(&self) -> String {
        let letter = match self.kind {
            ParamKind::T => 't',
            ParamKind::X => 'x',
        };
        format!("{}{}", letter, superscript(self.index))
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            ParamKind::T => 't',
            ParamKind::X => 'x',
        };
        write!(f, "{}{}", letter, self.index)
    }
}

/// Renders a nonnegative integer with superscript digits.
pub fn superscript(mut n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if n == 0 {
        return DIGITS[0].to_string();
    }
    let mut out = Vec::new();
    while n > 0 {
        out.push(DIGITS[(n % 10) as usize]);
        n /= 10;
    }
    out.iter().rev().collect()
}

/// Minimal commutative-ring interface shared by every coefficient type.
///
/// Having our own trait keeps the generic bounds on coderivations and
/// matrices short, and gives a single place for the rational embedding.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn vanishes(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
}

/// Scalars with exact division, needed for matrix inversion.
pub trait FieldScalar: Scalar {
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        rat(0)
    }
    fn one() -> Self {
        rat(1)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl FieldScalar for Rational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Sign of a rational as -1, 0 or 1 in `i32`, handy for normalisations.
pub fn rational_signum(r: &Rational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// A full rational-valued assignment of parameters, as used when pinning a
/// deformation at a concrete point.
pub type PointAssignment = BTreeMap<ParamName, Rational>;
