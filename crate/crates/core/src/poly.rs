//! Commutative Laurent polynomials in one variable over exact scalars.
//!
//! These carry characteristic equations: defined up to a unit monomial
//! `α·X^k`, compared through [`ScalarPoly::equals_up_to_unit`], with rational
//! roots extracted exactly (see [`crate::roots`]).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::roots;
use crate::scalar::Scalar;

/// A Laurent polynomial `Σ c_k X^k` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarPoly {
    terms: BTreeMap<i64, Scalar>,
}

impl ScalarPoly {
    pub fn zero() -> Self {
        ScalarPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        ScalarPoly::from_terms(vec![(0, c)])
    }

    pub fn one() -> Self {
        ScalarPoly::constant(Scalar::one())
    }

    pub fn monomial(c: Scalar, k: i64) -> Self {
        ScalarPoly::from_terms(vec![(k, c)])
    }

    /// `X - c`.
    pub fn linear(c: &Scalar) -> Self {
        ScalarPoly::from_terms(vec![(1, Scalar::one()), (0, -c)])
    }

    pub fn from_terms(terms: Vec<(i64, Scalar)>) -> Self {
        let mut map: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(k).or_insert_with(Scalar::zero);
            *entry = entry.clone() + c;
            if entry.is_zero() {
                map.remove(&k);
            }
        }
        ScalarPoly { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_range(&self) -> Option<(i64, i64)> {
        Some((
            *self.terms.keys().next()?,
            *self.terms.keys().next_back()?,
        ))
    }

    /// Absolute degree: max exponent minus min exponent.
    pub fn deg_abs(&self) -> Option<i64> {
        self.degree_range().map(|(lo, hi)| hi - lo)
    }

    pub fn coeff(&self, k: i64) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms: Vec<(i64, Scalar)> =
            self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        terms.extend(rhs.terms.iter().map(|(k, c)| (*k, c.clone())));
        ScalarPoly::from_terms(terms)
    }

    pub fn neg(&self) -> Self {
        ScalarPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms = Vec::new();
        for (i, a) in &self.terms {
            for (j, b) in &rhs.terms {
                terms.push((i + j, a * b));
            }
        }
        ScalarPoly::from_terms(terms)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return ScalarPoly::zero();
        }
        ScalarPoly {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, c) in &self.terms {
            acc = acc + c * &x.pow(*k);
        }
        acc
    }

    /// Substitutes `X ↦ a·X`.
    pub fn substitute_scaled(&self, a: &Scalar) -> Self {
        ScalarPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c * &a.pow(*k)))
                .collect(),
        }
    }

    /// Canonical representative of the class up to a unit monomial `α X^k`:
    /// min degree 0 and leading coefficient 1.
    pub fn normalize_unit(&self) -> Self {
        let Some((lo, hi)) = self.degree_range() else {
            return ScalarPoly::zero();
        };
        let lead = self.coeff(hi).recip();
        ScalarPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k - lo, c * &lead))
                .collect(),
        }
    }

    pub fn equals_up_to_unit(&self, rhs: &Self) -> bool {
        self.normalize_unit() == rhs.normalize_unit()
    }

    /// Dense coefficients of the entire part (min degree shifted to 0).
    fn dense(&self) -> Vec<Scalar> {
        let Some((lo, hi)) = self.degree_range() else {
            return vec![];
        };
        (lo..=hi).map(|k| self.coeff(k)).collect()
    }

    /// Exact division by `(X - c)`; `None` when `c` is not a root.
    pub fn divide_linear(&self, c: &Scalar) -> Option<Self> {
        let (lo, hi) = self.degree_range()?;
        if hi == lo {
            return None;
        }
        // Synthetic division of the entire part.
        let dense = self.dense();
        let n = dense.len();
        let mut quot = vec![Scalar::zero(); n - 1];
        let mut carry = Scalar::zero();
        for i in (0..n).rev() {
            let cur = dense[i].clone() + carry.clone();
            if i == 0 {
                if !cur.is_zero() {
                    return None;
                }
                break;
            }
            carry = &cur * c;
            quot[i - 1] = cur;
        }
        Some(ScalarPoly::from_terms(
            quot.into_iter()
                .enumerate()
                .map(|(i, a)| (lo + i as i64, a))
                .collect(),
        ))
    }

    /// All rational roots with multiplicities, ignoring the trivial unit
    /// monomial factor, together with the root-free residual factor.
    pub fn rational_roots(&self) -> (Vec<(Scalar, usize)>, ScalarPoly) {
        if self.is_zero() || self.deg_abs() == Some(0) {
            return (vec![], self.clone());
        }
        let candidates = roots::rational_root_candidates(&self.dense());
        let mut out = Vec::new();
        let mut rest = self.clone();
        for r in candidates {
            let mut mult = 0usize;
            while let Some(q) = rest.divide_linear(&r) {
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                out.push((r, mult));
            }
        }
        (out, rest)
    }

    /// Rational roots, erroring when the polynomial does not split over Q.
    pub fn split_roots(&self) -> Result<Vec<(Scalar, usize)>> {
        let (roots, rest) = self.rational_roots();
        if rest.deg_abs().unwrap_or(0) > 0 {
            return Err(Error::IrrationalExponent(format!("{rest}")));
        }
        Ok(roots)
    }
}

impl fmt::Display for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.rational().numer() < &num_bigint::BigInt::from(0) {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let coeff_part = if mag.is_one() && *k != 0 {
                String::new()
            } else {
                format!("{mag}")
            };
            let var_part = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            match (coeff_part.is_empty(), var_part.is_empty()) {
                (true, false) => write!(f, "{var_part}")?,
                (false, true) => write!(f, "{coeff_part}")?,
                (false, false) => write!(f, "{coeff_part}*{var_part}")?,
                (true, true) => unreachable!(),
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn r(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn roots_of_product_of_linears() {
        // (X - 1)(X - 2)²(X - 3/2)
        let p = ScalarPoly::linear(&s(1))
            .mul(&ScalarPoly::linear(&s(2)))
            .mul(&ScalarPoly::linear(&s(2)))
            .mul(&ScalarPoly::linear(&r(3, 2)));
        let roots = p.split_roots().unwrap();
        assert_eq!(roots.len(), 3);
        let get = |c: Scalar| roots.iter().find(|(x, _)| *x == c).map(|(_, m)| *m);
        assert_eq!(get(s(1)), Some(1));
        assert_eq!(get(s(2)), Some(2));
        assert_eq!(get(r(3, 2)), Some(1));
    }

    #[test]
    fn laurent_normalization_ignores_unit_monomials() {
        let p = ScalarPoly::from_terms(vec![(-1, s(2)), (0, s(-2))]); // 2X⁻¹ - 2
        let q = ScalarPoly::from_terms(vec![(2, s(1)), (3, s(-1))]); // X² - X³
        assert!(p.equals_up_to_unit(&q));
    }

    #[test]
    fn irrational_detected() {
        // X² - 2 has no rational roots
        let p = ScalarPoly::from_terms(vec![(2, s(1)), (0, s(-2))]);
        assert!(matches!(p.split_roots(), Err(Error::IrrationalExponent(_))));
    }

    #[test]
    fn big_coefficient_roots() {
        // roots q and q² for q = 2^12: (X - q)(X - q²)
        let q = s(4096);
        let q2 = &q * &q;
        let p = ScalarPoly::linear(&q).mul(&ScalarPoly::linear(&q2));
        let roots = p.split_roots().unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|(c, m)| *c == q && *m == 1));
        assert!(roots.iter().any(|(c, m)| *c == q2 && *m == 1));
    }

    #[test]
    fn mixed_rational_and_irrational() {
        // (X - 5)(X² + 1): the rational root is found, residual reported
        let p = ScalarPoly::linear(&s(5))
            .mul(&ScalarPoly::from_terms(vec![(2, s(1)), (0, s(1))]));
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![(s(5), 1)]);
        assert_eq!(rest.deg_abs(), Some(2));
    }

    #[test]
    fn negative_and_fractional_roots() {
        // (X + 7/3)(X - 1)(X + 1)
        let p = ScalarPoly::linear(&r(-7, 3))
            .mul(&ScalarPoly::linear(&s(1)))
            .mul(&ScalarPoly::linear(&s(-1)));
        let roots = p.split_roots().unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|(c, _)| *c == r(-7, 3)));
        assert!(roots.iter().any(|(c, _)| *c == s(-1)));
    }
}
