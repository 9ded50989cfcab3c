//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by monomial, so iteration order is
//! the canonical print order: total degree first, then earlier parameters
//! with higher exponents come first. That order is also an admissible term
//! order (graded, multiplicative, with 1 minimal), which exact division
//! relies on.

use super::{rat,
    rational_signum, superscript, ParamName, RatFun, Rational, Scalar, ScalarError,
};
use num::{BigInt, Integer, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A power product of parameters, e.g. `t1^2 * t3`. Exponents are strictly
/// positive and the variable list is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(ParamName, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(p: ParamName) -> Self {
        Monomial(vec![(p, 1)])
    }

    /// Builds from arbitrary (possibly repeated, unsorted) factors.
    pub fn from_factors(factors: &[(ParamName, u32)]) -> Self {
        let mut map: BTreeMap<ParamName, u32> = BTreeMap::new();
        for &(p, e) in factors {
            if e > 0 {
                *map.entry(p).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn factors(&self) -> &[(ParamName, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, p: ParamName) -> u32 {
        self.0
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<ParamName, u32> = self.0.iter().copied().collect();
        for &(p, e) in &other.0 {
            *map.entry(p).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }

    /// Componentwise quotient if `other` divides `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut map: BTreeMap<ParamName, u32> = self.0.iter().copied().collect();
        for &(p, e) in &other.0 {
            let slot = map.get_mut(&p)?;
            if *slot < e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                map.remove(&p);
            }
        }
        Some(Monomial(map.into_iter().collect()))
    }

    /// Componentwise minimum, the gcd of two power products.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for &(p, e) in &self.0 {
            let f = other.exponent_of(p);
            let m = e.min(f);
            if m > 0 {
                out.push((p, m));
            }
        }
        Monomial(out)
    }

    /// Machine form, e.g. `t1^2*t3`; the empty product renders as `1`.
    pub fn render_machine(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{}^{}", p, e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Pretty form with superscripted parameters, e.g. `(t¹)²t³`.
    pub fn render_pretty(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.pretty()
                } else {
                    format!("({}){}", p.pretty(), superscript(e))
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_machine())
    }
}

/// Print order: by total degree, then the monomial whose first differing
/// parameter carries the larger exponent comes first. On each degree level
/// this is a lexicographic order on dense exponent vectors with `t1` most
/// significant, so e.g. `t1*t4` prints before `t3*t5`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some(&&(pa, ea)), Some(&&(pb, eb))) => match pa.cmp(&pb) {
                    // The earlier parameter has exponent zero on the other
                    // side, so the side that carries it sorts first.
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord.reverse(),
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients. Zero coefficients are never
/// stored, so the zero polynomial has an empty term map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        MultiPoly::constant(rat(1))
    }

    pub fn constant(r: Rational) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(Monomial::one(), r);
        p
    }

    pub fn var(p: ParamName) -> Self {
        let mut out = MultiPoly::zero();
        out.add_term(Monomial::var(p), rat(1));
        out
    }

    pub fn from_terms(terms: Vec<(Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in print order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(rat(0)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn params(&self) -> BTreeSet<ParamName> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(p, _)| p))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term of total degree strictly above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest total degree among the terms; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Substitutes rational functions for parameters. Parameters missing
    /// from the map are left alone.
    pub fn substitute(&self, map: &BTreeMap<ParamName, RatFun>) -> RatFun {
        let mut acc = RatFun::zero();
        for (m, c) in &self.terms {
            let mut term = RatFun::constant(c.clone());
            for &(p, e) in m.factors() {
                let val = match map.get(&p) {
                    Some(v) => v.clone(),
                    None => RatFun::from_poly(MultiPoly::var(p)),
                };
                term = term.mul(&val.pow(e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Evaluates at a rational point. Every parameter that occurs must be
    /// assigned.
    pub fn eval(&self, point: &BTreeMap<ParamName, Rational>) -> Result<Rational, ScalarError> {
        let mut acc = rat(0);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(p, e) in m.factors() {
                let val = point
                    .get(&p)
                    .ok_or(ScalarError::UnboundParameter(p))?;
                for _ in 0..e {
                    term *= val;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&c.numer().abs());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return rat(0);
        }
        Rational::new(num_gcd, den_lcm)
    }

    /// Primitive associate with positive leading (first-printed) term, plus
    /// the signed factor `u` with `self = u * primitive`.
    pub fn primitive(&self) -> (MultiPoly, Rational) {
        if self.is_zero() {
            return (MultiPoly::zero(), rat(0));
        }
        let mut unit = self.content();
        let first = self.terms.values().next().unwrap();
        if rational_signum(first) < 0 {
            unit = -unit;
        }
        (self.scale(&unit.recip()), unit)
    }

    /// Exact polynomial division; `None` when `divisor` does not divide
    /// `self` (or is zero).
    pub fn try_div(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        if divisor.is_zero() {
            return None;
        }
        let (lead_m, lead_c) = divisor.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.iter().next_back().unwrap();
            let qm = rm.try_div(lead_m)?;
            let qc = rc / lead_c;
            let mut piece = MultiPoly::zero();
            piece.add_term(qm, qc);
            rem = &rem - &(&piece * divisor);
            quot = &quot + &piece;
        }
        Some(quot)
    }

    /// True when the polynomial involves no parameter other than `p`.
    pub fn is_univariate_in(&self, p: ParamName) -> bool {
        self.terms
            .keys()
            .all(|m| m.factors().iter().all(|&(q, _)| q == p))
    }

    /// Dense coefficient vector (ascending powers) when univariate in `p`.
    pub fn univariate_coeffs(&self, p: ParamName) -> Option<Vec<Rational>> {
        if !self.is_univariate_in(p) {
            return None;
        }
        let deg = self.total_degree() as usize;
        let mut coeffs = vec![rat(0); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.exponent_of(p) as usize] = c.clone();
        }
        Some(coeffs)
    }

    fn render(&self, pretty: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = rational_signum(c) < 0;
            let mag = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mono = if pretty { m.render_pretty() } else { m.render_machine() };
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else if pretty {
                out.push_str(&format!("{}{}", mag, mono));
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        out
    }

    /// Machine-readable rendering, e.g. `t1*t5 - t2*t3`.
    pub fn render_machine(&self) -> String {
        self.render(false)
    }

    /// Pretty rendering with superscripted parameters, e.g. `t¹t⁵ - t²t³`.
    pub fn render_pretty(&self) -> String {
        self.render(true)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_machine())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Scalar for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
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
        MultiPoly::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        MultiPoly::constant(r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, ratio};
    use super::*;

    fn t(i: u32) -> MultiPoly {
        MultiPoly::var(ParamName::t(i))
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&t(1) + &t(2)) * &(&t(1) - &t(2));
        let expect = &(&t(1) * &t(1)) - &(&t(2) * &t(2));
        assert_eq!(p, expect);
        assert_eq!(p.render_machine(), "t1^2 - t2^2");
    }

    #[test]
    fn truncation_drops_high_degree() {
        let one_plus = &MultiPoly::one() + &t(1);
        let sq = &one_plus * &one_plus;
        assert_eq!(sq.truncate(1).render_machine(), "1 + 2*t1");
        assert_eq!(sq.truncate(2), sq);
    }

    #[test]
    fn print_order_matches_reports() {
        let p = &(&t(1) * &t(4)) + &(&t(3) * &t(5));
        assert_eq!(p.render_machine(), "t1*t4 + t3*t5");
        let q = &(&t(1) * &t(5)) - &(&t(2) * &t(3));
        assert_eq!(q.render_machine(), "t1*t5 - t2*t3");
        let mixed = &(&t(2) - &(&t(1) * &t(1))) + &MultiPoly::constant(rat(3));
        assert_eq!(mixed.render_machine(), "3 + t2 - t1^2");
    }

    #[test]
    fn pretty_rendering_uses_superscripts() {
        let q = &(&t(1) * &t(5)) - &(&t(2) * &t(3));
        assert_eq!(q.render_pretty(), "t¹t⁵ - t²t³");
        let sq = &t(3) * &t(3);
        assert_eq!(sq.render_pretty(), "(t³)²");
    }

    #[test]
    fn substitution_kills_relation_on_branch() {
        // t5 -> -t1*t4/t3 sends t1*t4 + t3*t5 to zero.
        let rel = &(&t(1) * &t(4)) + &(&t(3) * &t(5));
        let val = RatFun::new((&t(1) * &t(4)).scale(&rat(-1)), t(3)).unwrap();
        let mut map = BTreeMap::new();
        map.insert(ParamName::t(5), val);
        assert!(rel.substitute(&map).is_zero());
    }

    #[test]
    fn substitution_with_identity_default() {
        let rel = &(&t(1) * &t(5)) - &(&t(2) * &t(3));
        let map = BTreeMap::new();
        let sub = rel.substitute(&map);
        assert_eq!(sub, RatFun::from_poly(rel.clone()));
    }

    #[test]
    fn eval_discriminant_sample() {
        // t1^2 - 4*t2*t3 at (5, 1, 6) is 1.
        let p = &(&t(1) * &t(1)) - &(&MultiPoly::constant(rat(4)) * &(&t(2) * &t(3)));
        let mut point = BTreeMap::new();
        point.insert(ParamName::t(1), rat(5));
        point.insert(ParamName::t(2), rat(1));
        point.insert(ParamName::t(3), rat(6));
        assert_eq!(p.eval(&point).unwrap(), rat(1));
    }

    #[test]
    fn eval_requires_full_assignment() {
        let p = t(2);
        let point = BTreeMap::new();
        assert_eq!(
            p.eval(&point),
            Err(ScalarError::UnboundParameter(ParamName::t(2)))
        );
    }

    #[test]
    fn content_and_primitive() {
        let p = &t(1).scale(&ratio(4, 3)) + &t(2).scale(&rat(-2));
        assert_eq!(p.content(), ratio(2, 3));
        let (prim, unit) = p.primitive();
        assert_eq!(prim.render_machine(), "2*t1 - 3*t2");
        assert_eq!(unit, ratio(2, 3));
        assert_eq!(prim.scale(&unit), p);
        let q = p.scale(&rat(-1));
        let (prim_q, unit_q) = q.primitive();
        // Leading term stays positive, the unit soaks up the sign.
        assert_eq!(prim_q.render_machine(), "2*t1 - 3*t2");
        assert_eq!(unit_q, ratio(-2, 3));
    }

    #[test]
    fn exact_division() {
        let p = &(&t(1) + &t(2)) * &(&t(1) - &t(2));
        let q = p.try_div(&(&t(1) + &t(2))).unwrap();
        assert_eq!(q, &t(1) - &t(2));
        assert!(p.try_div(&t(3)).is_none());
        assert!(p.try_div(&MultiPoly::zero()).is_none());
    }

    #[test]
    fn univariate_detection() {
        let p = &(&t(1) * &t(1)) + &t(1);
        assert!(p.is_univariate_in(ParamName::t(1)));
        assert!(!p.is_univariate_in(ParamName::t(2)));
        assert_eq!(
            p.univariate_coeffs(ParamName::t(1)).unwrap(),
            vec![rat(0), rat(1), rat(1)]
        );
    }

    #[test]
    fn monomial_order_is_graded() {
        let one = Monomial::one();
        let t1 = Monomial::var(ParamName::t(1));
        let t1t4 = Monomial::from_factors(&[(ParamName::t(1), 1), (ParamName::t(4), 1)]);
        let t3t5 = Monomial::from_factors(&[(ParamName::t(3), 1), (ParamName::t(5), 1)]);
        assert!(one < t1);
        assert!(t1 < t1t4);
        assert!(t1t4 < t3t5);
    }
}
