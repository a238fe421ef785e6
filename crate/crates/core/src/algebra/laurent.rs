//! Laurent polynomials in an auxiliary variable `z` with [`OddPolynomial`]
//! coefficients. The exponent window is always finite; callers that perform
//! substitutions enforce their own window bounds.

use std::collections::BTreeMap;

use super::poly::OddPolynomial;
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentInZ {
    cutoff: u32,
    coeffs: BTreeMap<i64, OddPolynomial>,
}

impl LaurentInZ {
    pub fn zero(cutoff: u32) -> Self {
        LaurentInZ { cutoff, coeffs: BTreeMap::new() }
    }

    /// `p * z^k`.
    pub fn monomial(k: i64, p: OddPolynomial) -> Self {
        let mut l = LaurentInZ::zero(p.cutoff());
        l.add_term(k, p);
        l
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn add_term(&mut self, k: i64, p: OddPolynomial) {
        assert_eq!(p.cutoff(), self.cutoff, "coefficient cutoff mismatch");
        if p.is_zero() {
            return;
        }
        match self.coeffs.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i64) -> OddPolynomial {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| OddPolynomial::zero(self.cutoff))
    }

    /// Smallest and largest occurring exponent, if any term exists.
    pub fn window(&self) -> Option<(i64, i64)> {
        let lo = self.coeffs.keys().next()?;
        let hi = self.coeffs.keys().next_back()?;
        Some((*lo, *hi))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &OddPolynomial)> {
        self.coeffs.iter()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cutoff != other.cutoff {
            return Err(AlgebraError::CutoffMismatch { left: self.cutoff, right: other.cutoff });
        }
        let mut out = LaurentInZ::zero(self.cutoff);
        for (ka, pa) in &self.coeffs {
            for (kb, pb) in &other.coeffs {
                let prod = pa.poly_mul(pb)?;
                out.add_term(ka + kb, prod);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::VarFamily;
    use crate::algebra::rational::rat_int;

    #[test]
    fn mul_convolves_exponents() {
        let t1 = OddPolynomial::var(VarFamily::T, 1, 4);
        let a = LaurentInZ::monomial(-1, t1.clone());
        let b = LaurentInZ::monomial(2, t1.scalar_mul(&rat_int(3)));
        let c = a.mul(&b).unwrap();
        assert_eq!(c.window(), Some((1, 1)));
        assert_eq!(c.coeff(1), t1.pow(2).scalar_mul(&rat_int(3)));
    }

    #[test]
    fn cancelling_terms_vanish() {
        let one = OddPolynomial::one(2);
        let mut l = LaurentInZ::monomial(0, one.clone());
        l.add_term(0, one.scalar_mul(&rat_int(-1)));
        assert_eq!(l.window(), None);
    }
}
