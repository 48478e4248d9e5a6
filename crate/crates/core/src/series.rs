//! Truncated z-adic Laurent series over exact rational scalars.
//!
//! A series is its coefficient window `val .. prec`: it is known modulo
//! `z^prec`, its stored leading coefficient is nonzero, and the zero series
//! (to precision) is the empty window with `val == prec`. Every operation
//! propagates the tightest justified precision:
//!
//! - `a + b` is known modulo `z^min(pa, pb)`;
//! - `a · b` is known modulo `z^min(va + pb, vb + pa)`;
//! - `a⁻¹` (for `a` of valuation v) is known modulo `z^(pa − 2v)`.
//!
//! Equality is equality of all coefficients below the smaller precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{assert_same_ctx, Ctx, Scalar};

#[derive(Clone)]
pub struct LaurentSeries {
    ctx: Ctx,
    /// z-adic valuation of the stored data; equals `prec` when the series is
    /// zero to precision.
    val: i64,
    /// The series is known modulo `z^prec`.
    prec: i64,
    /// Coefficient of `z^(val + i)` at index i; length `prec - val`.
    coeffs: Vec<Scalar>,
}

impl LaurentSeries {
    fn build(ctx: Ctx, mut val: i64, prec: i64, mut coeffs: Vec<Scalar>) -> Self {
        debug_assert_eq!(coeffs.len() as i64, prec - val);
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                coeffs.drain(..k);
                val += k as i64;
            }
            None => {
                coeffs.clear();
                val = prec;
            }
        }
        LaurentSeries {
            ctx,
            val,
            prec,
            coeffs,
        }
    }

    /// The zero series, known modulo `z^prec`.
    pub fn zero(ctx: &Ctx, prec: i64) -> Self {
        LaurentSeries {
            ctx: ctx.clone(),
            val: prec,
            prec,
            coeffs: Vec::new(),
        }
    }

    /// Builds a series from `(exponent, coefficient)` terms; terms at or above
    /// `prec` are discarded as unknown.
    pub fn from_terms(ctx: &Ctx, prec: i64, terms: &[(i64, Scalar)]) -> Self {
        let kept: Vec<&(i64, Scalar)> = terms
            .iter()
            .filter(|(k, c)| *k < prec && !c.is_zero())
            .collect();
        let Some(lo) = kept.iter().map(|(k, _)| *k).min() else {
            return LaurentSeries::zero(ctx, prec);
        };
        let mut coeffs = vec![Scalar::zero(); (prec - lo) as usize];
        for (k, c) in kept {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = slot.clone() + c.clone();
        }
        LaurentSeries::build(ctx.clone(), lo, prec, coeffs)
    }

    pub fn constant(ctx: &Ctx, c: Scalar, prec: i64) -> Self {
        LaurentSeries::from_terms(ctx, prec, &[(0, c)])
    }

    pub fn one(ctx: &Ctx, prec: i64) -> Self {
        LaurentSeries::constant(ctx, Scalar::one(), prec)
    }

    /// `c · z^k`.
    pub fn monomial(ctx: &Ctx, c: Scalar, k: i64, prec: i64) -> Self {
        LaurentSeries::from_terms(ctx, prec, &[(k, c)])
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// z-adic valuation; `None` when the series is zero to precision.
    pub fn v0(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of known coefficient slots starting at the valuation.
    pub fn known_len(&self) -> i64 {
        self.prec - self.val
    }

    fn at(&self, k: i64) -> Scalar {
        debug_assert!(k < self.prec);
        if k < self.val {
            Scalar::zero()
        } else {
            self.coeffs[(k - self.val) as usize].clone()
        }
    }

    /// Coefficient of `z^k`; errors if `k` lies beyond the precision window.
    pub fn coeff(&self, k: i64) -> Result<Scalar> {
        if k >= self.prec {
            return Err(Error::InsufficientPrecision {
                needed: k,
                prec: self.prec,
            });
        }
        Ok(self.at(k))
    }

    pub fn constant_term(&self) -> Result<Scalar> {
        self.coeff(0)
    }

    /// Restricts knowledge to `z^p`; a no-op when `p >= prec`.
    pub fn truncate(&self, p: i64) -> Self {
        if p >= self.prec {
            return self.clone();
        }
        let keep = (p - self.val).max(0) as usize;
        LaurentSeries::build(
            self.ctx.clone(),
            self.val.min(p),
            p,
            self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
        )
    }

    /// Declares the series exactly known and widens the window to `p` with
    /// zero coefficients. Only for values that are exact by construction
    /// (monomials, canonical factors, test fixtures).
    pub fn extend_exact(&self, p: i64) -> Self {
        if p <= self.prec {
            return self.truncate(p);
        }
        let mut coeffs = self.coeffs.clone();
        let val = if coeffs.is_empty() { p } else { self.val };
        if !coeffs.is_empty() {
            coeffs.resize((p - self.val) as usize, Scalar::zero());
        }
        LaurentSeries {
            ctx: self.ctx.clone(),
            val,
            prec: p,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            ctx: self.ctx.clone(),
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let prec = self.prec.min(rhs.prec);
        let lo = self.val.min(rhs.val).min(prec);
        let mut coeffs = Vec::with_capacity((prec - lo) as usize);
        for k in lo..prec {
            coeffs.push(self.at(k) + rhs.at(k));
        }
        LaurentSeries::build(self.ctx.clone(), lo, prec, coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let prec = (self.val + rhs.prec).min(rhs.val + self.prec);
        if self.is_zero_to_prec() || rhs.is_zero_to_prec() {
            return LaurentSeries::zero(&self.ctx, prec);
        }
        let lo = self.val + rhs.val;
        let mut coeffs = vec![Scalar::zero(); (prec - lo) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let base = self.val + i as i64 + rhs.val;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = base + j as i64;
                if k >= prec {
                    break;
                }
                let slot = &mut coeffs[(k - lo) as usize];
                *slot = slot.clone() + a.clone() * b.clone();
            }
        }
        LaurentSeries::build(self.ctx.clone(), lo, prec, coeffs)
    }

    /// Multiplicative inverse in K, to precision `prec - 2·v0`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero_to_prec() {
            return Err(Error::DivisionByZeroSeries);
        }
        let v = self.val;
        let n = self.coeffs.len();
        let lead = self.coeffs[0].recip();
        let mut inv: Vec<Scalar> = Vec::with_capacity(n);
        inv.push(lead.clone());
        for m in 1..n {
            let mut acc = Scalar::zero();
            for i in 1..=m {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * inv[m - i].clone();
                }
            }
            inv.push(-(acc * lead.clone()));
        }
        Ok(LaurentSeries::build(
            self.ctx.clone(),
            -v,
            self.prec - 2 * v,
            inv,
        ))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.invert()?))
    }

    /// Coefficient-wise scaling by a scalar.
    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero(&self.ctx, self.prec);
        }
        LaurentSeries {
            ctx: self.ctx.clone(),
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            ctx: self.ctx.clone(),
            val: self.val + k,
            prec: self.prec + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `σ_q^k`: the coefficient of `z^m` is multiplied by `q^(km)`.
    pub fn sigma_pow(&self, k: i64) -> Self {
        if k == 0 || self.is_zero_to_prec() {
            return self.clone();
        }
        let step = self.ctx.q_pow(k);
        let mut factor = self.ctx.q_pow(k * self.val);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * &factor;
                factor = &factor * &step;
                out
            })
            .collect();
        LaurentSeries {
            ctx: self.ctx.clone(),
            val: self.val,
            prec: self.prec,
            coeffs,
        }
    }

    /// Solves `(σ_q − 1) h = self` on series with zero constant term, by
    /// dividing the coefficient of `z^i` by `q^i − 1`.
    pub fn q_integrate(&self) -> Result<Self> {
        if self.prec <= 0 {
            return Err(Error::InsufficientPrecision {
                needed: 0,
                prec: self.prec,
            });
        }
        if self.val <= 0 && !self.is_zero_to_prec() && !self.at(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let one = Scalar::one();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.val + i as i64;
                if k == 0 {
                    Scalar::zero()
                } else {
                    c / &(self.ctx.q_pow(k) - one.clone())
                }
            })
            .collect();
        Ok(LaurentSeries::build(
            self.ctx.clone(),
            self.val,
            self.prec,
            coeffs,
        ))
    }

    /// Projection on the constant part.
    pub fn pi0(&self) -> Result<Scalar> {
        self.constant_term()
    }

    /// The series with its constant term removed.
    pub fn minus_constant(&self) -> Result<Self> {
        let c = self.constant_term()?;
        Ok(self.sub(&LaurentSeries::constant(&self.ctx, c, self.prec)))
    }

    /// Base change `z = z_l^l`: a series in `z_l` over the ramified context,
    /// with valuation `l · v0`.
    pub fn ramify(&self, l: u32) -> Result<Self> {
        let rctx = self.ctx.ramify(l)?;
        if l == 1 {
            return Ok(LaurentSeries {
                ctx: rctx,
                val: self.val,
                prec: self.prec,
                coeffs: self.coeffs.clone(),
            });
        }
        let l = l as i64;
        let val = self.val * l;
        let prec = self.prec * l;
        let mut coeffs = vec![Scalar::zero(); (prec - val) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * l as usize] = c.clone();
        }
        Ok(LaurentSeries::build(rctx, val, prec, coeffs))
    }

    /// Equality of all coefficients below the smaller precision.
    pub fn equals(&self, rhs: &Self) -> bool {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let prec = self.prec.min(rhs.prec);
        let lo = self.val.min(rhs.val).min(prec);
        (lo..prec).all(|k| self.at(k) == rhs.at(k))
    }

    pub fn equals_scalar(&self, c: &Scalar) -> bool {
        self.equals(&LaurentSeries::constant(&self.ctx, c.clone(), self.prec))
    }

    pub fn is_one_to_prec(&self) -> bool {
        self.equals_scalar(&Scalar::one())
    }

    /// Iterator over the stored `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.val + i as i64, c))
    }
}

/// Solves `σ_q(v) = β · v` with `v(0) = 1` for a unit series `β(0) = 1`,
/// by the recurrence `v_m (q^m − 1) = Σ_{j<m} β_{m−j} v_j`.
pub fn solve_unit_twist(beta: &LaurentSeries) -> Result<LaurentSeries> {
    if beta.v0() != Some(0) || !beta.at(0).is_one() {
        return Err(Error::PreconditionViolated(
            "solve_unit_twist requires beta(0) = 1".into(),
        ));
    }
    let ctx = beta.ctx().clone();
    let prec = beta.prec();
    let one = Scalar::one();
    let mut v: Vec<Scalar> = Vec::with_capacity(prec.max(1) as usize);
    v.push(Scalar::one());
    for m in 1..prec {
        let mut acc = Scalar::zero();
        for (j, vj) in v.iter().enumerate() {
            let b = beta.at(m - j as i64);
            if !b.is_zero() {
                acc = acc + b * vj.clone();
            }
        }
        v.push(acc / (ctx.q_pow(m) - one.clone()));
    }
    Ok(LaurentSeries::build(ctx, 0, prec.max(0), v))
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_to_prec() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
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
            let coeff_part = if mag.is_one() && k != 0 {
                String::new()
            } else {
                format!("{mag}")
            };
            let var_part = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
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

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(z^{})", self.prec)
    }
}
