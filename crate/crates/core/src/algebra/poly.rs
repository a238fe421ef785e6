//! Sparse polynomials in odd-indexed time variables, graded by weight.
//!
//! A variable is a pair (family, index) with odd index; the weight of the
//! index-`j` variable is `j`, so the monomial weight is the sum of
//! `index * exponent` over all factors, across families. Every polynomial
//! carries a weight cutoff and silently drops terms above it, which makes
//! truncated products and exponentials well defined.
//!
//! Four families share the type: `t` (primary times), `t~` (the second copy
//! used in bilinear expressions), `s` and `p` (auxiliary time sets). Mixed
//! monomials like `t1^2 * p3` are ordinary terms, so bilinear machinery needs
//! no special casing.
//!
//! Term order is graded lexicographic (weight first, then the factor list);
//! it is the canonical order used by the on-disk serialization.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::rational::{factorial, Rational};
use super::AlgebraError;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum VarFamily {
    #[serde(rename = "t")]
    T,
    #[serde(rename = "tt")]
    TTilde,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "p")]
    P,
}

impl VarFamily {
    pub fn symbol(self) -> &'static str {
        match self {
            VarFamily::T => "t",
            VarFamily::TTilde => "t~",
            VarFamily::S => "s",
            VarFamily::P => "p",
        }
    }
}

/// One odd-indexed variable, e.g. `t3` or `p1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub family: VarFamily,
    pub index: u32,
}

impl Var {
    /// Panics on even index: only odd times exist in this algebra.
    pub fn new(family: VarFamily, index: u32) -> Self {
        assert!(index % 2 == 1, "variable index must be odd, got {index}");
        Var { family, index }
    }

    pub fn t(index: u32) -> Self {
        Var::new(VarFamily::T, index)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.symbol(), self.index)
    }
}

/// A product of variable powers in canonical (sorted) form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(Var, u32)>,
}

impl Monomial {
    /// The empty product.
    pub fn unit() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn var(v: Var) -> Self {
        Monomial { factors: vec![(v, 1)] }
    }

    /// Build from possibly unsorted factors; merges repeats, drops zero exponents.
    pub fn from_factors(factors: &[(Var, u32)]) -> Self {
        let mut m: BTreeMap<Var, u32> = BTreeMap::new();
        for &(v, e) in factors {
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        Monomial { factors: m.into_iter().collect() }
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total weight: sum of `index * exponent` over all families.
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|(v, e)| v.index * e).sum()
    }

    /// Weight restricted to one family.
    pub fn family_weight(&self, family: VarFamily) -> u32 {
        self.factors
            .iter()
            .filter(|(v, _)| v.family == family)
            .map(|(v, e)| v.index * e)
            .sum()
    }

    /// Total degree: sum of exponents.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent_of(&self, v: Var) -> u32 {
        self.factors
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Monomial::from_factors(&factors)
    }

    /// Product of `exponent!` over all factors (the symmetry factor relating
    /// coefficients and mixed partial derivatives at the origin).
    pub fn exponent_factorial(&self) -> Rational {
        let mut acc = num_bigint::BigInt::from(1);
        for &(_, e) in &self.factors {
            acc *= factorial(e as u64);
        }
        Rational::from_integer(acc)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse weight-truncated polynomial with exact rational coefficients.
///
/// Invariants: no stored coefficient is zero, no stored monomial exceeds the
/// cutoff, and only odd-indexed variables occur (enforced by [`Var::new`]).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OddPolynomial {
    cutoff: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl OddPolynomial {
    pub fn zero(cutoff: u32) -> Self {
        OddPolynomial { cutoff, terms: BTreeMap::new() }
    }

    pub fn one(cutoff: u32) -> Self {
        Self::constant(Rational::one(), cutoff)
    }

    pub fn constant(c: Rational, cutoff: u32) -> Self {
        let mut p = Self::zero(cutoff);
        p.add_term(Monomial::unit(), c);
        p
    }

    /// The single variable `family_index`, or zero if its weight exceeds the cutoff.
    pub fn var(family: VarFamily, index: u32, cutoff: u32) -> Self {
        let mut p = Self::zero(cutoff);
        p.add_term(Monomial::var(Var::new(family, index)), Rational::one());
        p
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (graded lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::unit())
    }

    /// Add `c * m`, respecting the cutoff and the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.weight() > self.cutoff {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_cutoff(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.cutoff != other.cutoff {
            Err(AlgebraError::CutoffMismatch { left: self.cutoff, right: other.cutoff })
        } else {
            Ok(())
        }
    }

    /// Truncated product; errors on mismatched cutoffs.
    pub fn poly_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_cutoff(other)?;
        let mut out = Self::zero(self.cutoff);
        for (ma, ca) in &self.terms {
            let wa = ma.weight();
            for (mb, cb) in &other.terms {
                if wa + mb.weight() > self.cutoff {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.cutoff);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        OddPolynomial { cutoff: self.cutoff, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.cutoff);
        for _ in 0..k {
            acc = acc.poly_mul(self).expect("same cutoff");
        }
        acc
    }

    /// Truncated exponential; requires a zero constant term.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::NonzeroConstantTerm);
        }
        let min_weight = self
            .terms
            .keys()
            .map(|m| m.weight())
            .min()
            .unwrap_or(self.cutoff + 1)
            .max(1);
        let mut acc = Self::one(self.cutoff);
        let mut power = Self::one(self.cutoff);
        let mut fact = Rational::one();
        let mut k = 0u32;
        while k * min_weight <= self.cutoff {
            if k > 0 {
                power = power.poly_mul(self).expect("same cutoff");
                fact *= Rational::from_integer(num_bigint::BigInt::from(k));
                if power.is_zero() {
                    break;
                }
                acc = &acc + &power.scalar_mul(&(Rational::one() / &fact));
            }
            k += 1;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to one variable.
    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self::zero(self.cutoff);
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            let mut factors: Vec<(Var, u32)> = m
                .factors()
                .iter()
                .map(|&(w, ew)| if w == v { (w, ew - 1) } else { (w, ew) })
                .collect();
            factors.retain(|&(_, ew)| ew > 0);
            out.add_term(
                Monomial::from_factors(&factors),
                c * Rational::from_integer(num_bigint::BigInt::from(e)),
            );
        }
        out
    }

    /// Evaluate by substituting a rational value for every variable.
    pub fn eval<F: Fn(Var) -> Rational>(&self, value: F) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m.factors() {
                let x = value(v);
                for _ in 0..e {
                    term *= &x;
                }
                if term.is_zero() {
                    break;
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitute `v -> scale(v) * v` for every variable, i.e. rescale each
    /// variable by a rational factor (used for `t -> t/2`).
    pub fn scale_variables<F: Fn(Var) -> Rational>(&self, scale: F) -> Self {
        let mut out = Self::zero(self.cutoff);
        for (m, c) in &self.terms {
            let mut factor = Rational::one();
            for &(v, e) in m.factors() {
                let s = scale(v);
                for _ in 0..e {
                    factor *= &s;
                }
            }
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    /// Rename every variable of one family into another family (same indices).
    pub fn retag_family(&self, from: VarFamily, to: VarFamily) -> Self {
        let mut out = Self::zero(self.cutoff);
        for (m, c) in &self.terms {
            let factors: Vec<(Var, u32)> = m
                .factors()
                .iter()
                .map(|&(v, e)| {
                    if v.family == from {
                        (Var::new(to, v.index), e)
                    } else {
                        (v, e)
                    }
                })
                .collect();
            out.add_term(Monomial::from_factors(&factors), c.clone());
        }
        out
    }

    /// Re-label the cutoff, dropping terms when it shrinks.
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        let mut out = Self::zero(cutoff);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        OddPolynomial { cutoff: self.cutoff, terms }
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// True when every term has weight exactly `w` (vacuously true for zero).
    pub fn is_homogeneous(&self, w: u32) -> bool {
        self.terms.keys().all(|m| m.weight() == w)
    }
}

impl fmt::Display for OddPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}", -c.clone())?;
            } else {
                write!(f, " + {c}")?;
            }
            if !m.is_unit() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &OddPolynomial {
    type Output = OddPolynomial;
    fn add(self, rhs: &OddPolynomial) -> OddPolynomial {
        self.check_cutoff(rhs).expect("cutoff mismatch in +");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &OddPolynomial {
    type Output = OddPolynomial;
    fn sub(self, rhs: &OddPolynomial) -> OddPolynomial {
        self.check_cutoff(rhs).expect("cutoff mismatch in -");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &OddPolynomial {
    type Output = OddPolynomial;
    fn neg(self) -> OddPolynomial {
        self.scalar_mul(&-Rational::one())
    }
}

impl Mul for &OddPolynomial {
    type Output = OddPolynomial;
    fn mul(self, rhs: &OddPolynomial) -> OddPolynomial {
        self.poly_mul(rhs).expect("cutoff mismatch in *")
    }
}

impl Add for OddPolynomial {
    type Output = OddPolynomial;
    fn add(self, rhs: OddPolynomial) -> OddPolynomial {
        &self + &rhs
    }
}

impl Sub for OddPolynomial {
    type Output = OddPolynomial;
    fn sub(self, rhs: OddPolynomial) -> OddPolynomial {
        &self - &rhs
    }
}

impl Mul for OddPolynomial {
    type Output = OddPolynomial;
    fn mul(self, rhs: OddPolynomial) -> OddPolynomial {
        &self * &rhs
    }
}

impl Neg for OddPolynomial {
    type Output = OddPolynomial;
    fn neg(self) -> OddPolynomial {
        -&self
    }
}

// ---- Canonical serialization ----
//
// Versioned JSON with terms in canonical order and numerator/denominator as
// exact integer strings. This is the coefficient-cache wire format.

pub const POLY_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct PolyWire {
    format: String,
    version: u32,
    cutoff: u32,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    m: Vec<(VarFamily, u32, u32)>,
    n: String,
    d: String,
}

impl OddPolynomial {
    pub fn to_canonical_json(&self) -> String {
        let wire = PolyWire {
            format: "oddpoly".to_string(),
            version: POLY_FORMAT_VERSION,
            cutoff: self.cutoff,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermWire {
                    m: m.factors().iter().map(|&(v, e)| (v.family, v.index, e)).collect(),
                    n: c.numer().to_string(),
                    d: c.denom().to_string(),
                })
                .collect(),
        };
        serde_json::to_string(&wire).expect("serialization cannot fail")
    }

    pub fn from_canonical_json(s: &str) -> Result<Self, String> {
        let wire: PolyWire = serde_json::from_str(s).map_err(|e| e.to_string())?;
        if wire.format != "oddpoly" {
            return Err(format!("unexpected format tag {:?}", wire.format));
        }
        if wire.version != POLY_FORMAT_VERSION {
            return Err(format!(
                "unsupported polynomial format version {} (expected {})",
                wire.version, POLY_FORMAT_VERSION
            ));
        }
        let mut poly = OddPolynomial::zero(wire.cutoff);
        for t in wire.terms {
            let num: num_bigint::BigInt = t.n.parse().map_err(|_| format!("bad numerator {:?}", t.n))?;
            let den: num_bigint::BigInt = t.d.parse().map_err(|_| format!("bad denominator {:?}", t.d))?;
            if den <= num_bigint::BigInt::from(0) {
                return Err("denominator must be positive".to_string());
            }
            let factors: Vec<(Var, u32)> =
                t.m.iter().map(|&(fam, idx, e)| (Var::new(fam, idx), e)).collect();
            poly.add_term(Monomial::from_factors(&factors), Rational::new(num, den));
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rat, rat_int};

    fn t(i: u32, cutoff: u32) -> OddPolynomial {
        OddPolynomial::var(VarFamily::T, i, cutoff)
    }

    #[test]
    fn mul_identity() {
        let one = OddPolynomial::one(4);
        let two_t1 = t(1, 4).scalar_mul(&rat_int(2));
        assert_eq!(one.poly_mul(&two_t1).unwrap(), two_t1);
    }

    #[test]
    fn mul_truncates_by_weight() {
        let t1 = t(1, 1);
        assert!(t1.poly_mul(&t1).unwrap().is_zero());
    }

    #[test]
    fn mul_hand_expansion() {
        // (2 t1 + 2 t3) * (2 t1) = 4 t1^2 + 4 t1 t3 at cutoff 4
        let a = &t(1, 4).scalar_mul(&rat_int(2)) + &t(3, 4).scalar_mul(&rat_int(2));
        let b = t(1, 4).scalar_mul(&rat_int(2));
        let prod = a.poly_mul(&b).unwrap();
        let t1sq = Monomial::from_factors(&[(Var::t(1), 2)]);
        let t1t3 = Monomial::from_factors(&[(Var::t(1), 1), (Var::t(3), 1)]);
        assert_eq!(prod.coeff(&t1sq), rat_int(4));
        assert_eq!(prod.coeff(&t1t3), rat_int(4));
        assert_eq!(prod.num_terms(), 2);
    }

    #[test]
    fn mul_cutoff_mismatch_is_an_error() {
        let a = t(1, 4);
        let b = t(1, 6);
        assert!(matches!(a.poly_mul(&b), Err(AlgebraError::CutoffMismatch { .. })));
    }

    #[test]
    fn exp_matches_hand_expansion() {
        // exp(2 t1) at cutoff 3: 1 + 2 t1 + 2 t1^2 + (4/3) t1^3
        let e = t(1, 3).scalar_mul(&rat_int(2)).exp().unwrap();
        assert_eq!(e.constant_term(), rat_int(1));
        assert_eq!(e.coeff(&Monomial::var(Var::t(1))), rat_int(2));
        assert_eq!(e.coeff(&Monomial::from_factors(&[(Var::t(1), 2)])), rat_int(2));
        assert_eq!(e.coeff(&Monomial::from_factors(&[(Var::t(1), 3)])), rat(4, 3));
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(OddPolynomial::one(2).exp().is_err());
    }

    #[test]
    fn derivative_lowers_exponent() {
        let p = t(1, 4).pow(3); // t1^3
        let d = p.derivative(Var::t(1));
        assert_eq!(d.coeff(&Monomial::from_factors(&[(Var::t(1), 2)])), rat_int(3));
    }

    #[test]
    fn eval_and_scale() {
        // p = t1^2 + 2 t3
        let p = &t(1, 4).pow(2) + &t(3, 4).scalar_mul(&rat_int(2));
        let v = p.eval(|v| if v.index == 1 { rat_int(3) } else { rat(1, 2) });
        assert_eq!(v, rat_int(10)); // 9 + 1
        let scaled = p.scale_variables(|_| rat(1, 2)); // t -> t/2
        assert_eq!(scaled.coeff(&Monomial::from_factors(&[(Var::t(1), 2)])), rat(1, 4));
        assert_eq!(scaled.coeff(&Monomial::var(Var::t(3))), rat_int(1));
    }

    #[test]
    fn retag_moves_families() {
        let p = t(3, 4).scalar_mul(&rat_int(5));
        let q = p.retag_family(VarFamily::T, VarFamily::P);
        assert_eq!(
            q.coeff(&Monomial::var(Var::new(VarFamily::P, 3))),
            rat_int(5)
        );
        assert!(q.coeff(&Monomial::var(Var::t(3))).is_zero());
    }

    #[test]
    fn canonical_json_round_trip_and_stability() {
        let p = &t(1, 5).pow(2).scalar_mul(&rat(-4, 3)) + &t(5, 5).scalar_mul(&rat_int(7));
        let s1 = p.to_canonical_json();
        let q = OddPolynomial::from_canonical_json(&s1).unwrap();
        assert_eq!(p, q);
        assert_eq!(s1, q.to_canonical_json());
    }
}
