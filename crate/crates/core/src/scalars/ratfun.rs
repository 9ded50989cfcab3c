//! Quotients of multivariate polynomials.
//!
//! Normalisation is best-effort: exact polynomial quotients collapse to
//! denominator 1, common monomial factors and (for quotients univariate in a
//! single parameter) polynomial gcds are cancelled, and the denominator is
//! kept primitive with positive leading coefficient. Equality is decided by
//! cross-multiplication, so it is independent of how far a representative
//! was reduced.

use super::{rat, MultiPoly, ParamName, Rational, Scalar, ScalarError};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A ratio of polynomials with nonzero denominator.
#[derive(Debug, Clone, Eq)]
pub struct RatFun {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFun {
    /// Builds `num / den`, reducing where cheaply possible. Fails only when
    /// `den` is identically zero.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<RatFun, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        let mut rf = RatFun { num, den };
        rf.reduce();
        Ok(rf)
    }

    pub fn from_poly(p: MultiPoly) -> RatFun {
        RatFun { num: p, den: MultiPoly::one() }
    }

    pub fn constant(r: Rational) -> RatFun {
        RatFun::from_poly(MultiPoly::constant(r))
    }

    pub fn zero() -> RatFun {
        RatFun::constant(rat(0))
    }

    pub fn one() -> RatFun {
        RatFun::constant(rat(1))
    }

    pub fn var(p: ParamName) -> RatFun {
        RatFun::from_poly(MultiPoly::var(p))
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(p)` when the value is the polynomial `p` on the nose.
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        self.den.as_constant().and_then(|c| c.is_one().then_some(&self.num))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = MultiPoly::one();
            return;
        }
        if let Some(q) = self.num.try_div(&self.den) {
            self.num = q;
            self.den = MultiPoly::one();
        } else {
            self.cancel_monomial_content();
            self.cancel_univariate_gcd();
        }
        // Make the representative canonical up to the remaining common
        // factors: primitive denominator with positive leading term.
        let (den_prim, unit) = self.den.primitive();
        self.den = den_prim;
        self.num = self.num.scale(&unit.recip());
    }

    fn cancel_monomial_content(&mut self) {
        let mono_content = |p: &MultiPoly| {
            let mut it = p.terms();
            let first = it.next().map(|(m, _)| m.clone());
            it.fold(first, |acc, (m, _)| acc.map(|g| g.gcd(m)))
        };
        let (Some(gn), Some(gd)) = (mono_content(&self.num), mono_content(&self.den)) else {
            return;
        };
        let g = gn.gcd(&gd);
        if g.is_one() {
            return;
        }
        let strip = |p: &MultiPoly| {
            MultiPoly::from_terms(
                p.terms()
                    .map(|(m, c)| (m.try_div(&g).expect("gcd divides"), c.clone()))
                    .collect(),
            )
        };
        self.num = strip(&self.num);
        self.den = strip(&self.den);
    }

    fn cancel_univariate_gcd(&mut self) {
        let mut params = self.num.params();
        params.extend(self.den.params());
        if params.len() != 1 {
            return;
        }
        let p = *params.iter().next().unwrap();
        let (Some(a), Some(b)) = (
            self.num.univariate_coeffs(p),
            self.den.univariate_coeffs(p),
        ) else {
            return;
        };
        let g = univariate_gcd(a, b);
        if g.len() <= 1 {
            return;
        }
        let g_poly = poly_from_univariate(p, &g);
        self.num = self.num.try_div(&g_poly).expect("gcd divides numerator");
        self.den = self.den.try_div(&g_poly).expect("gcd divides denominator");
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        RatFun::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
        .expect("nonzero denominators multiply to nonzero")
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(&self.num * &other.num, &self.den * &other.den)
            .expect("nonzero denominators multiply to nonzero")
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: (&self.num).scale(&-rat(1)),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Option<RatFun> {
        if self.is_zero() {
            return None;
        }
        let mut rf = RatFun {
            num: self.den.clone(),
            den: self.num.clone(),
        };
        rf.reduce();
        Some(rf)
    }

    pub fn pow(&self, e: u32) -> RatFun {
        let mut acc = RatFun::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes rational functions for parameters in both numerator and
    /// denominator; fails when the substituted denominator collapses to 0.
    pub fn substitute(&self, map: &BTreeMap<ParamName, RatFun>) -> Result<RatFun, ScalarError> {
        let num = self.num.substitute(map);
        let den = self.den.substitute(map);
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        Ok(num.mul(&den.inv().expect("checked nonzero")))
    }

    /// Evaluates at a rational point; the point must cover every parameter
    /// and must not kill the denominator.
    pub fn eval(&self, point: &BTreeMap<ParamName, Rational>) -> Result<Rational, ScalarError> {
        let den = self.den.eval(point)?;
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        Ok(self.num.eval(point)? / den)
    }

    fn render(&self, pretty: bool) -> String {
        let num = if pretty { self.num.render_pretty() } else { self.num.render_machine() };
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            return num;
        }
        let den = if pretty { self.den.render_pretty() } else { self.den.render_machine() };
        format!("({}) / ({})", num, den)
    }

    pub fn render_machine(&self) -> String {
        self.render(false)
    }

    pub fn render_pretty(&self) -> String {
        self.render(true)
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_machine())
    }
}

impl Scalar for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn one() -> Self {
        RatFun::one()
    }
    fn add(&self, other: &Self) -> Self {
        RatFun::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFun::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFun::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFun::neg(self)
    }
    fn vanishes(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        RatFun::constant(r.clone())
    }
}

impl super::FieldScalar for RatFun {
    fn inv(&self) -> Option<Self> {
        RatFun::inv(self)
    }
}

/// Euclidean gcd of dense univariate coefficient vectors (ascending powers).
/// Returns a monic gcd; a constant gcd comes back as `[1]`.
fn univariate_gcd(a: Vec<Rational>, b: Vec<Rational>) -> Vec<Rational> {
    fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }
    fn rem(mut a: Vec<Rational>, b: &[Rational]) -> Vec<Rational> {
        let lead = b.last().expect("divisor nonzero");
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let factor = a.last().unwrap() / lead;
            for (i, bc) in b.iter().enumerate() {
                let delta = bc * &factor;
                a[k + i] -= delta;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        a
    }
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        let r = rem(a, &b);
        a = b;
        b = r;
    }
    let lead = a.last().cloned().unwrap_or_else(|| rat(1));
    a.iter().map(|c| c / &lead).collect()
}

fn poly_from_univariate(p: ParamName, coeffs: &[Rational]) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (e, c) in coeffs.iter().enumerate() {
        out.add_term(
            super::poly::Monomial::from_factors(&[(p, e as u32)]),
            c.clone(),
        );
    }
    out
}
