//! The noncommutative Laurent polynomial ring `D_q = K<σ, σ⁻¹>`.
//!
//! The single commutation rule is `σ^k · x = σ_q^k(x) · σ^k` for `x ∈ K`.
//! Both the absolute degree (max σ-degree minus min σ-degree) and the z-adic
//! valuation (min over coefficient valuations) are additive under the product.
//!
//! Coefficients that become zero to precision are dropped from the term map;
//! a degree or valuation read off an `OrePoly` is therefore always a
//! statement about the stored, nonzero-to-precision coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{assert_same_ctx, Ctx, Scalar};
use crate::series::LaurentSeries;

/// An element of `D_q`: a finite map from σ-degree to a nonzero coefficient
/// series.
#[derive(Clone)]
pub struct OrePoly {
    ctx: Ctx,
    terms: BTreeMap<i64, LaurentSeries>,
}

impl OrePoly {
    pub fn zero(ctx: &Ctx) -> Self {
        OrePoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(ctx: &Ctx, terms: Vec<(i64, LaurentSeries)>) -> Self {
        let mut map: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
        for (k, s) in terms {
            assert_same_ctx(ctx, s.ctx());
            match map.remove(&k) {
                Some(prev) => {
                    let sum = prev.add(&s);
                    if !sum.is_zero_to_prec() {
                        map.insert(k, sum);
                    }
                }
                None => {
                    if !s.is_zero_to_prec() {
                        map.insert(k, s);
                    }
                }
            }
        }
        OrePoly { ctx: ctx.clone(), terms: map }
    }

    /// The constant operator 1.
    pub fn one(ctx: &Ctx, prec: i64) -> Self {
        OrePoly::from_terms(ctx, vec![(0, LaurentSeries::one(ctx, prec))])
    }

    /// `c · σ^k` for a series coefficient c.
    pub fn term(coeff: LaurentSeries, k: i64) -> Self {
        let ctx = coeff.ctx().clone();
        OrePoly::from_terms(&ctx, vec![(k, coeff)])
    }

    /// `σ - c` for a scalar exponent, exact at the given precision.
    pub fn sigma_minus_scalar(ctx: &Ctx, c: &Scalar, prec: i64) -> Self {
        OrePoly::from_terms(
            ctx,
            vec![
                (1, LaurentSeries::one(ctx, prec)),
                (0, LaurentSeries::constant(ctx, -c, prec)),
            ],
        )
    }

    /// The canonical first-order factor `z^(-mu)·σ - c`.
    pub fn slope_factor(ctx: &Ctx, mu: i64, c: &Scalar, prec: i64) -> Self {
        OrePoly::from_terms(
            ctx,
            vec![
                (1, LaurentSeries::monomial(ctx, Scalar::one(), -mu, prec - mu)),
                (0, LaurentSeries::constant(ctx, -c, prec)),
            ],
        )
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &LaurentSeries)> {
        self.terms.iter().map(|(k, s)| (*k, s))
    }

    pub fn coeff(&self, k: i64) -> Option<&LaurentSeries> {
        self.terms.get(&k)
    }

    /// (min, max) σ-degree of the stored terms.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let min = self.terms.keys().next()?;
        let max = self.terms.keys().next_back()?;
        Some((*min, *max))
    }

    /// Absolute degree: max σ-degree minus min σ-degree.
    pub fn deg_abs(&self) -> Option<i64> {
        self.degree_range().map(|(lo, hi)| hi - lo)
    }

    /// z-adic valuation: min over coefficient valuations.
    pub fn v0(&self) -> Option<i64> {
        self.terms.values().filter_map(|s| s.v0()).min()
    }

    /// Smallest precision among the coefficients.
    pub fn min_prec(&self) -> Option<i64> {
        self.terms.values().map(|s| s.prec()).min()
    }

    pub fn neg(&self) -> Self {
        OrePoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, s)| (*k, s.neg())).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let mut terms: Vec<(i64, LaurentSeries)> = Vec::new();
        for (k, s) in &self.terms {
            terms.push((*k, s.clone()));
        }
        for (k, s) in &rhs.terms {
            terms.push((*k, s.clone()));
        }
        OrePoly::from_terms(&self.ctx, terms)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// The Ore product: `(a σ^i)(b σ^j) = a · σ_q^i(b) · σ^(i+j)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let mut terms: Vec<(i64, LaurentSeries)> = Vec::new();
        for (i, a) in &self.terms {
            for (j, b) in &rhs.terms {
                terms.push((i + j, a.mul(&b.sigma_pow(*i))));
            }
        }
        OrePoly::from_terms(&self.ctx, terms)
    }

    /// Left multiplication by a series: `b · Σ a_k σ^k = Σ (b a_k) σ^k`.
    pub fn scale_left(&self, b: &LaurentSeries) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (*k, b.mul(a)))
            .collect();
        OrePoly::from_terms(&self.ctx, terms)
    }

    /// Right multiplication by a series: `Σ a_k σ^k · b = Σ a_k σ_q^k(b) σ^k`.
    pub fn mul_right_series(&self, b: &LaurentSeries) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (*k, a.mul(&b.sigma_pow(*k))))
            .collect();
        OrePoly::from_terms(&self.ctx, terms)
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (*k, a.scale(c)))
            .collect();
        OrePoly::from_terms(&self.ctx, terms)
    }

    /// Left multiplication by `σ^k`: degrees shift, coefficients pass through
    /// `σ_q^k`.
    pub fn shift_sigma(&self, k: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(d, a)| (d + k, a.sigma_pow(k)))
            .collect();
        OrePoly::from_terms(&self.ctx, terms)
    }

    /// The operator applied to a series: `P·f = Σ a_k σ_q^k(f)`.
    pub fn apply(&self, f: &LaurentSeries) -> LaurentSeries {
        assert_same_ctx(&self.ctx, f.ctx());
        let mut acc: Option<LaurentSeries> = None;
        for (k, a) in &self.terms {
            let t = a.mul(&f.sigma_pow(*k));
            acc = Some(match acc {
                Some(prev) => prev.add(&t),
                None => t,
            });
        }
        acc.unwrap_or_else(|| {
            LaurentSeries::zero(&self.ctx, f.prec().min(self.ctx.default_prec()))
        })
    }

    /// Gauge transform `P^[u] = u⁻¹ P u` for `σ_q(u) = α u`, `α = c z^μ`:
    /// the coefficient of `σ^k` is multiplied by
    /// `π_k(α) = c^k z^(kμ) q^(μ·k(k−1)/2)`.
    pub fn gauge(&self, sym: &GaugeSymbol) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| {
                let (c, shift) = sym.pi(&self.ctx, *k);
                (*k, a.scale(&c).shift(shift))
            })
            .collect();
        OrePoly::from_terms(&self.ctx, terms)
    }

    /// Base change `z = z_l^l`; σ-degrees are unchanged, coefficient
    /// valuations (hence all slopes) are multiplied by `l`.
    pub fn ramify(&self, l: u32) -> Result<Self> {
        let rctx = self.ctx.ramify(l)?;
        let mut terms = Vec::new();
        for (k, a) in &self.terms {
            terms.push((*k, a.ramify(l)?));
        }
        Ok(OrePoly::from_terms(&rctx, terms))
    }

    /// Right Euclidean division: `self = Q·D + R` with
    /// `deg_abs(R) < deg_abs(D)` (or `R = 0`).
    ///
    /// Re-multiplication is coefficient-exact within precision when the
    /// leading coefficient of `D` is a unit (valuation 0), which is the form
    /// every caller in this crate produces after normalization. For divisors
    /// with a non-unit leading coefficient the quotient loses z-adic
    /// precision at each reduction step, and coefficients cancelled at that
    /// reduced precision are dropped per the zero-to-precision rule.
    pub fn right_divide(&self, d: &Self) -> Result<(Self, Self)> {
        assert_same_ctx(&self.ctx, &d.ctx);
        let Some((_, dmax)) = d.degree_range() else {
            return Err(Error::DivisionByZeroOperator);
        };
        let wd = d.deg_abs().unwrap();
        let dlead = d.coeff(dmax).unwrap().clone();
        let mut r = self.clone();
        let mut q = OrePoly::zero(&self.ctx);
        while let Some((rmin, rmax)) = r.degree_range() {
            if rmax - rmin < wd {
                break;
            }
            let shift = rmax - dmax;
            let factor = r.coeff(rmax).unwrap().div(&dlead.sigma_pow(shift))?;
            let qterm = OrePoly::term(factor, shift);
            r = r.sub(&qterm.mul(d));
            q = q.add(&qterm);
            if let Some((_, new_max)) = r.degree_range() {
                // Each step must strictly lower the top degree.
                if new_max >= rmax {
                    return Err(Error::ResidualNonzero);
                }
            }
        }
        Ok((q, r))
    }

    /// Normal form `u·σ^k·P` with lowest σ-degree 0 and leading coefficient 1.
    /// Returns the normalized operator together with the left multiplier
    /// `u·σ^k`.
    pub fn normalize(&self) -> Result<(Self, Self)> {
        let Some((dmin, dmax)) = self.degree_range() else {
            return Err(Error::ZeroOperator);
        };
        let shifted = self.shift_sigma(-dmin);
        let lead = shifted.coeff(dmax - dmin).unwrap();
        let u = lead.invert()?;
        let monic = shifted.scale_left(&u);
        let multiplier = OrePoly::term(u, -dmin);
        Ok((monic, multiplier))
    }

    /// True when every coefficient of the difference vanishes to precision.
    pub fn equals(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero()
    }

    /// True when the operator is entire (no negative σ-degrees) and monic.
    pub fn is_entire_unitary(&self) -> bool {
        match self.degree_range() {
            None => false,
            Some((lo, hi)) => lo >= 0 && self.coeff(hi).map_or(false, |c| c.is_one_to_prec()),
        }
    }
}

impl fmt::Display for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.terms.iter().rev() {
            let body = format!("{a}");
            let single_term = a.terms().count() == 1;
            let (sign, mag) = if single_term && body.starts_with('-') {
                ("-", body[1..].to_string())
            } else {
                ("+", body)
            };
            let needs_paren = !single_term;
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let coeff_part = if mag == "1" && *k != 0 {
                String::new()
            } else if needs_paren {
                format!("({mag})")
            } else {
                mag
            };
            let var_part = match k {
                0 => String::new(),
                1 => "s".to_string(),
                _ => format!("s^{k}"),
            };
            match (coeff_part.is_empty(), var_part.is_empty()) {
                (true, false) => write!(f, "{var_part}")?,
                (false, true) => write!(f, "{coeff_part}")?,
                (false, false) => write!(f, "{coeff_part}*{var_part}")?,
                (true, true) => write!(f, "1")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The class `α = c·z^μ` of a gauge symbol `u` with `σ_q(u) = α·u`
/// (`u = e_{q,c} Θ_q^μ` up to a unit twist). The transform `P ↦ u⁻¹Pu`
/// depends on α alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeSymbol {
    c: Scalar,
    mu: i64,
}

impl GaugeSymbol {
    pub fn new(c: Scalar, mu: i64) -> Self {
        assert!(!c.is_zero(), "gauge symbol needs c != 0");
        GaugeSymbol { c, mu }
    }

    pub fn identity() -> Self {
        GaugeSymbol {
            c: Scalar::one(),
            mu: 0,
        }
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }

    /// Composition of symbols is the product of the α's.
    pub fn compose(&self, rhs: &GaugeSymbol) -> Self {
        GaugeSymbol {
            c: &self.c * &rhs.c,
            mu: self.mu + rhs.mu,
        }
    }

    pub fn inverse(&self) -> Self {
        GaugeSymbol {
            c: self.c.recip(),
            mu: -self.mu,
        }
    }

    /// The cocycle `π_k(α) = α σ_q(α) ⋯ σ_q^{k-1}(α)` as a scalar factor and
    /// a z-power, valid for every integer k.
    pub fn pi(&self, ctx: &Ctx, k: i64) -> (Scalar, i64) {
        let tri = k * (k - 1) / 2;
        (self.c.pow(k) * ctx.q_pow(self.mu * tri), k * self.mu)
    }
}
