//! Series solutions and slope/exponent factorizations.
//!
//! The primitive is single-exponent peeling: a non-resonant exponent `c` at
//! an integer slope `μ` of `P` yields `P = Q·(z^(−μ)σ − c)·u⁻¹` with a unit
//! series `u`, `u(0) = 1`. It is realized by gauging the slope to 0 and the
//! exponent to 1, computing the unique normalized series solution, and
//! right-dividing with a zero-remainder assertion; the closed-form left
//! factor of the classical construction is kept as an independent
//! cross-check ([`peel_left_factor_formula`]).
//!
//! Repeated peeling gives per-slope factorizations and, peeling the smallest
//! slope first each time, the Birkhoff–Guenther factorization into pure
//! factors of strictly decreasing slope, the order in which the convergent
//! statement holds. In formal mode any integral slope may be peeled, which
//! yields the direct-sum decomposition into pure parts.
//!
//! Convergence of the produced series cannot be certified from truncations;
//! [`growth_class`] classifies coefficient growth (geometric versus
//! q-exponential, i.e. log-quadratic) as a falsifiable proxy.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::newton::{self, NewtonFunction, Slope};
use crate::ore::{GaugeSymbol, OrePoly};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;

/// Formal factorizations may peel any slope; convergent ones only the first
/// (smallest) slope, and refuse solves in divergent directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Formal,
    Convergent,
}

/// One first-order twisted factor `(z^(−slope)·σ − exponent)·twist⁻¹`.
#[derive(Clone, Debug)]
pub struct TwistedFactor {
    pub slope: i64,
    pub exponent: Scalar,
    /// Unit series with `twist(0) = 1`.
    pub twist: LaurentSeries,
}

impl TwistedFactor {
    /// The untwisted operator `z^(−slope)·σ − exponent`.
    pub fn base_operator(&self) -> OrePoly {
        let ctx = self.twist.ctx();
        let prec = self.twist.prec().max(ctx.default_prec());
        OrePoly::slope_factor(ctx, self.slope, &self.exponent, prec)
    }

    /// The factor as it enters the product: `base · twist⁻¹`.
    pub fn twisted_operator(&self) -> Result<OrePoly> {
        Ok(self
            .base_operator()
            .mul_right_series(&self.twist.invert()?))
    }
}

impl fmt::Display for TwistedFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z^{}*s - {})", -self.slope, self.exponent)?;
        if !self.twist.is_one_to_prec() {
            write!(f, "*({})^-1", self.twist)?;
        }
        Ok(())
    }
}

/// An exact right factorization `P = left · T_1 · T_2 ⋯ T_k` into twisted
/// first-order steps, leftmost first.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub left: OrePoly,
    pub steps: Vec<TwistedFactor>,
}

impl Factorization {
    /// Re-multiplies every factor; must reproduce the input to precision.
    pub fn remultiply(&self) -> Result<OrePoly> {
        let mut acc = self.left.clone();
        for step in &self.steps {
            acc = acc.mul(&step.twisted_operator()?);
        }
        Ok(acc)
    }
}

/// A Birkhoff–Guenther shaped factorization `P = residual · R_1 ⋯ R_k` into
/// pure blocks of strictly decreasing slope, leftmost first.
#[derive(Clone, Debug)]
pub struct SlopeFactorization {
    /// Degree-0 left residue (a unit series as an operator).
    pub residual: OrePoly,
    /// `(slope, pure factor, its first-order steps)`, slopes decreasing.
    pub blocks: Vec<SlopeBlock>,
}

#[derive(Clone, Debug)]
pub struct SlopeBlock {
    pub slope: i64,
    pub op: OrePoly,
    pub steps: Vec<TwistedFactor>,
}

impl SlopeFactorization {
    pub fn remultiply(&self) -> OrePoly {
        let mut acc = self.residual.clone();
        for b in &self.blocks {
            acc = acc.mul(&b.op);
        }
        acc
    }

    pub fn slopes(&self) -> Vec<i64> {
        self.blocks.iter().map(|b| b.slope).collect()
    }

    /// All first-order steps, leftmost first.
    pub fn steps(&self) -> Vec<TwistedFactor> {
        self.blocks.iter().flat_map(|b| b.steps.clone()).collect()
    }
}

/// The unique series solution `f` with `f(0) = 1` of `P·f = 0`, for `P`
/// having slope 0 with 1 as a non-resonant exponent there.
///
/// With `P` shifted entire and scaled so that `v0(P) = 0`, write
/// `F_j(X) = Σ_k (z^j-coefficient of the σ^k coefficient)·X^k`; then
/// `F_0` is the slope-0 characteristic polynomial and the coefficients obey
/// `f_l · F_0(q^l) = −Σ_{m<l} F_{l−m}(q^m) f_m`.
pub fn series_solution(p: &OrePoly) -> Result<LaurentSeries> {
    let ctx = p.ctx().clone();
    let Some((dmin, _)) = p.degree_range() else {
        return Err(Error::ZeroOperator);
    };
    let entire = p.shift_sigma(-dmin);
    let l = entire.v0().expect("nonzero operator has a valuation");
    // Coefficients of z^j in the σ^k coefficient, all with j ≥ 0 after the
    // calage by z^(-l).
    let shifted: Vec<(i64, LaurentSeries)> = entire
        .terms()
        .map(|(k, a)| (k, a.shift(-l)))
        .collect();
    let prec = shifted
        .iter()
        .map(|(_, a)| a.prec())
        .min()
        .expect("nonzero operator");
    if prec < 1 {
        return Err(Error::InsufficientPrecision { needed: 0, prec });
    }
    // F_j evaluated at q^m, computed lazily from exact coefficients.
    let f_eval = |j: i64, qm: &Scalar| -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (k, a) in &shifted {
            let c = a.coeff(j)?;
            if !c.is_zero() {
                acc = acc + c * &qm.pow(*k);
            }
        }
        Ok(acc)
    };
    let one = Scalar::one();
    let f0_at_one = f_eval(0, &one)?;
    if !f0_at_one.is_zero() {
        return Err(Error::PreconditionViolated(
            "1 is not an exponent at slope 0".into(),
        ));
    }
    let mut sol: Vec<Scalar> = vec![Scalar::one()];
    for m in 1..prec {
        let qm = ctx.q_pow(m);
        let denom = f_eval(0, &qm)?;
        if denom.is_zero() {
            return Err(Error::PreconditionViolated(format!(
                "resonant exponent: the slope-0 characteristic polynomial vanishes at q^{m}"
            )));
        }
        let mut acc = Scalar::zero();
        for (j, fj) in sol.iter().enumerate() {
            let val = f_eval(m - j as i64, &ctx.q_pow(j as i64))?;
            if !val.is_zero() {
                acc = acc + val * fj.clone();
            }
        }
        sol.push(-(acc / denom));
    }
    Ok(LaurentSeries::from_terms(
        &ctx,
        prec,
        &sol.into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64, c))
            .collect::<Vec<_>>(),
    ))
}

/// The classical closed-form left factor for a slope-0 peel at exponent 1:
/// given the solution series `u` of `P`, returns
/// `P_1 = Σ_j (−Σ_{i≤j} a_{n−i}·σ_q^i(u))·σ^j` with `P = P_1·(σ−1)·u⁻¹`.
/// Kept as an independent cross-check of the division route.
pub fn peel_left_factor_formula(p: &OrePoly, u: &LaurentSeries) -> Result<OrePoly> {
    let ctx = p.ctx().clone();
    let Some((dmin, dmax)) = p.degree_range() else {
        return Err(Error::ZeroOperator);
    };
    if dmin < 0 {
        return Err(Error::PreconditionViolated(
            "closed-form peel needs an entire operator".into(),
        ));
    }
    let n = dmax;
    let mut terms = Vec::new();
    for j in 0..n {
        // −Σ_{i=0..j} a_{n−i}·σ_q^i(u), with a_{n−i} the coefficient of σ^i.
        let mut acc: Option<LaurentSeries> = None;
        for i in 0..=j {
            if let Some(a) = p.coeff(i) {
                let t = a.mul(&u.sigma_pow(i));
                acc = Some(match acc {
                    Some(prev) => prev.add(&t),
                    None => t,
                });
            }
        }
        if let Some(acc) = acc {
            terms.push((j, acc.neg()));
        }
    }
    Ok(OrePoly::from_terms(&ctx, terms))
}

/// Peels one copy of the exponent `c` at the integer slope `mu`:
/// `P = Q·(z^(−μ)σ − c)·u⁻¹`. The caller guarantees non-resonance.
fn peel_one(p: &OrePoly, mu: i64, c: &Scalar) -> Result<(OrePoly, LaurentSeries)> {
    let ctx = p.ctx().clone();
    let sym = GaugeSymbol::new(c.clone(), mu);
    let gauged = p.gauge(&sym);
    let u = series_solution(&gauged)?;
    let divisor = OrePoly::sigma_minus_scalar(&ctx, &Scalar::one(), u.prec());
    let (q2, r) = gauged.mul_right_series(&u).right_divide(&divisor)?;
    if !r.is_zero() {
        return Err(Error::ResidualNonzero);
    }
    let q = q2.gauge(&sym.inverse()).scale_scalar(&c.recip());
    Ok((q, u))
}

/// Peels `m` copies of the non-resonant exponent `c` of multiplicity ≥ m at
/// the integer slope `mu`:
/// `P = Q·(z^(−μ)σ − c)·u_m⁻¹ ⋯ (z^(−μ)σ − c)·u_1⁻¹` with `u_i(0) = 1`,
/// `r_Q = r_P − m·δ_μ`, and `char_P = (X−c)^m · char_Q` at slope μ.
pub fn peel_exponent(p: &OrePoly, mu: i64, c: &Scalar, m: usize) -> Result<Factorization> {
    let exps = newton::exponents(p, mu)?;
    let found = exps.iter().find(|e| e.c == *c);
    match found {
        None => {
            return Err(Error::PreconditionViolated(format!(
                "{c} is not an exponent at slope {mu}"
            )))
        }
        Some(e) => {
            if e.resonant {
                return Err(Error::PreconditionViolated(format!(
                    "exponent {c} is resonant at slope {mu}"
                )));
            }
            if e.multiplicity < m {
                return Err(Error::PreconditionViolated(format!(
                    "exponent {c} has multiplicity {} < {m}",
                    e.multiplicity
                )));
            }
        }
    }
    let mut left = p.clone();
    let mut steps_rev: Vec<TwistedFactor> = Vec::with_capacity(m);
    for _ in 0..m {
        let (q, u) = peel_one(&left, mu, c)?;
        steps_rev.push(TwistedFactor {
            slope: mu,
            exponent: c.clone(),
            twist: u,
        });
        left = q;
    }
    steps_rev.reverse();
    Ok(Factorization {
        left,
        steps: steps_rev,
    })
}

fn first_slope_int(p: &OrePoly) -> Result<i64> {
    let nf = newton::newton_function(p)?;
    let mu = nf
        .first_slope()
        .ok_or_else(|| Error::PreconditionViolated("operator has no slopes".into()))?;
    if !mu.is_integer() {
        return Err(Error::PreconditionViolated(format!(
            "non-integral slope {mu}: ramify first"
        )));
    }
    Ok(*mu.numer())
}

/// Factors the full slope-μ part to the right: `P = Q · R` where `R` is a
/// product of first-order twisted factors, `r_R = r_P(μ)·δ_μ` and
/// `μ ∉ S(Q)`. Exponents are ordered so that within one q^Z-class the least
/// resonant (largest ε) is peeled first and therefore sits rightmost.
/// In convergent mode μ must be the first (smallest) slope.
pub fn factor_slope(p: &OrePoly, mu: i64, mode: Mode) -> Result<Factorization> {
    let nf = newton::newton_function(p)?;
    if !nf.all_integral() {
        return Err(Error::PreconditionViolated(format!(
            "non-integral slopes {nf}: ramify first"
        )));
    }
    if nf.get(&Slope::from_integer(mu)) == 0 {
        return Err(Error::PreconditionViolated(format!(
            "{mu} is not a slope of the operator"
        )));
    }
    if mode == Mode::Convergent {
        let first = first_slope_int(p)?;
        if mu != first {
            return Err(Error::NotFirstSlope { got: mu, first });
        }
    }
    // Classes sorted by (cbar, epsilon) ascending; peel from the back so the
    // largest ε of each class (the currently non-resonant exponent) is
    // removed first and lands rightmost.
    let exps = newton::exponents(p, mu)?;
    let mut left = p.clone();
    let mut steps: Vec<TwistedFactor> = Vec::new();
    for e in exps.iter().rev() {
        let fac = peel_exponent(&left, mu, &e.c, e.multiplicity)?;
        let mut block = fac.steps;
        block.extend(steps);
        steps = block;
        left = fac.left;
    }
    Ok(Factorization { left, steps })
}

/// Fully factors `P` into first-order twisted factors, peeling the smallest
/// slope first at every stage (the only order the convergent statement
/// licenses, and the order used in both modes): `P = w · T_1 ⋯ T_n` with a
/// degree-0 unit residue `w`.
pub fn full_factorization(p: &OrePoly, mode: Mode) -> Result<Factorization> {
    let mut left = p.clone();
    let mut steps: Vec<TwistedFactor> = Vec::new();
    loop {
        match left.deg_abs() {
            None => return Err(Error::ZeroOperator),
            Some(0) => break,
            Some(_) => {}
        }
        let mu = first_slope_int(&left)?;
        let fac = factor_slope(&left, mu, mode)?;
        let mut block = fac.steps;
        block.extend(steps);
        steps = block;
        left = fac.left;
    }
    Ok(Factorization { left, steps })
}

/// The Birkhoff–Guenther factorization `P = residual · R_1 ⋯ R_k` with each
/// `R_i` pure of slope `μ_i` and `μ_1 > ⋯ > μ_k`.
pub fn birkhoff_guenther(p: &OrePoly, mode: Mode) -> Result<SlopeFactorization> {
    let fac = full_factorization(p, mode)?;
    let mut blocks: Vec<SlopeBlock> = Vec::new();
    for step in fac.steps {
        match blocks.last_mut() {
            Some(b) if b.slope == step.slope => {
                b.op = b.op.mul(&step.twisted_operator()?);
                b.steps.push(step);
            }
            _ => {
                blocks.push(SlopeBlock {
                    slope: step.slope,
                    op: step.twisted_operator()?,
                    steps: vec![step],
                });
            }
        }
    }
    debug_assert!(blocks.windows(2).all(|w| w[0].slope > w[1].slope));
    Ok(SlopeFactorization {
        residual: fac.left,
        blocks,
    })
}

/// Formal decomposition data: one pure operator per slope, each obtained as
/// the left factor after peeling every other slope to the right.
/// Ranks sum to `deg_abs(P)` and the part at μ has Newton function
/// `r_P(μ)·δ_μ`.
pub fn formal_pure_parts(p: &OrePoly) -> Result<Vec<(i64, OrePoly)>> {
    let nf = newton::newton_function(p)?;
    if !nf.all_integral() {
        return Err(Error::PreconditionViolated(format!(
            "non-integral slopes {nf}: ramify first"
        )));
    }
    let slopes: Vec<i64> = nf
        .pairs_decreasing()
        .iter()
        .map(|(m, _)| *m.numer())
        .collect();
    let mut out = Vec::new();
    for &mu in &slopes {
        let mut left = p.clone();
        // Peel the other slopes smallest-first.
        for &nu in slopes.iter().rev() {
            if nu != mu {
                left = factor_slope(&left, nu, Mode::Formal)?.left;
            }
        }
        out.push((mu, left));
    }
    out.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(out)
}

/// Coefficient-growth classes: geometric (log-magnitudes affine in the
/// index) versus q-exponential (log-magnitudes quadratic, like
/// `q^(k(k−1)/2)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthKind {
    Geometric,
    QExponential,
}

#[derive(Clone, Debug)]
pub struct GrowthClass {
    pub kind: GrowthKind,
    /// Fitted rate, for reporting: the geometric ratio, or the per-step
    /// log-slope growth divided by log|q| for q-exponential data.
    pub rate: f64,
}

/// Classifies the growth of the known coefficients of `f`.
///
/// For consecutive nonzero coefficients at indices `k1 < k2 < k3` the
/// normalized second difference of `log|f|` is compared against
/// `(k3−k1)/4 · log|q|` by an exact rational power comparison; a strict
/// majority of q-exponential votes decides. Requires at least 16 known
/// coefficient slots.
pub fn growth_class(f: &LaurentSeries) -> Result<GrowthClass> {
    let have = f.known_len();
    if have < 16 {
        return Err(Error::InsufficientData { have, need: 16 });
    }
    let pts: Vec<(i64, Scalar)> = f.terms().map(|(k, c)| (k, c.abs())).collect();
    let absq = f.ctx().q().abs();
    let mut votes_q = 0usize;
    let mut votes_geo = 0usize;
    for w in pts.windows(3) {
        let (k1, a1) = (&w[0].0, &w[0].1);
        let (k2, a2) = (&w[1].0, &w[1].1);
        let (k3, a3) = (&w[2].0, &w[2].1);
        let d1 = k2 - k1;
        let d2 = k3 - k2;
        let r1 = a2 / a1;
        let r2 = a3 / a2;
        // slope2 − slope1 ≥ (k3−k1)/4·log|q|, i.e.
        // r2^(4·d1) ≥ r1^(4·d2) · |q|^(d1·d2·(k3−k1)).
        let lhs = r2.pow(4 * d1);
        let rhs = r1.pow(4 * d2) * absq.pow(d1 * d2 * (k3 - k1));
        if lhs.cmp_abs(&rhs) != Ordering::Less {
            votes_q += 1;
        } else {
            votes_geo += 1;
        }
    }
    let kind = if votes_q > votes_geo {
        GrowthKind::QExponential
    } else {
        GrowthKind::Geometric
    };
    let rate = fitted_rate(&pts, kind, &absq);
    Ok(GrowthClass { kind, rate })
}

fn fitted_rate(pts: &[(i64, Scalar)], kind: GrowthKind, absq: &Scalar) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let (k0, a0) = &pts[0];
    let (k1, a1) = &pts[pts.len() - 1];
    let span = (k1 - k0) as f64;
    let logratio = a1.to_f64().ln() - a0.to_f64().ln();
    match kind {
        GrowthKind::Geometric => (logratio / span).exp(),
        GrowthKind::QExponential => {
            // log|f_k| ≈ rate·log|q|·k²/2: fit the quadratic coefficient.
            let quad = 2.0 * logratio / ((k1 * k1 - k0 * k0) as f64);
            quad / absq.to_f64().ln()
        }
    }
}

/// Newton bookkeeping oracle: the sum of the Newton functions of the
/// returned pieces of a factorization, for cross-checks against `r_P`.
pub fn factorization_newton(f: &Factorization) -> Result<NewtonFunction> {
    let mut acc = if f.left.deg_abs() == Some(0) {
        NewtonFunction::new()
    } else {
        newton::newton_function(&f.left)?
    };
    for step in &f.steps {
        acc = acc.add(&newton::newton_function(&step.twisted_operator()?)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Ctx, QContext};

    fn ctx() -> Ctx {
        QContext::simple(2, 24)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn z_sigma_minus_one(c: &Ctx) -> OrePoly {
        OrePoly::from_terms(
            c,
            vec![
                (1, LaurentSeries::monomial(c, s(1), 1, 24)),
                (0, LaurentSeries::constant(c, s(-1), 24)),
            ],
        )
    }

    fn sigma_minus_one(c: &Ctx) -> OrePoly {
        OrePoly::sigma_minus_scalar(c, &s(1), 24)
    }

    /// qzσ² - (1+z)σ + 1 = (σ-1)(zσ-1)
    fn divergent_example(c: &Ctx) -> OrePoly {
        sigma_minus_one(c).mul(&z_sigma_minus_one(c))
    }

    /// zσ² - (1+z)σ + 1 = (zσ-1)(σ-1)
    fn split_example(c: &Ctx) -> OrePoly {
        z_sigma_minus_one(c).mul(&sigma_minus_one(c))
    }

    #[test]
    fn series_solution_trivial() {
        let c = ctx();
        let f = series_solution(&sigma_minus_one(&c)).unwrap();
        assert!(f.is_one_to_prec());
    }

    #[test]
    fn series_solution_recurrence_by_hand() {
        let c = ctx();
        // (1-z)σ - 1: f = 1 + z/(q-1) + q z²/((q-1)(q²-1)) + O(z³)
        let p = OrePoly::from_terms(
            &c,
            vec![
                (1, LaurentSeries::from_terms(&c, 24, &[(0, s(1)), (1, s(-1))])),
                (0, LaurentSeries::constant(&c, s(-1), 24)),
            ],
        );
        let f = series_solution(&p).unwrap();
        let q = c.q().clone();
        let qm1 = &q - &s(1);
        let q2m1 = &q.pow(2) - &s(1);
        assert_eq!(f.coeff(0).unwrap(), s(1));
        assert_eq!(f.coeff(1).unwrap(), Scalar::one() / qm1.clone());
        assert_eq!(f.coeff(2).unwrap(), q.clone() / (qm1 * q2m1));
        assert!(p.apply(&f).is_zero_to_prec());
    }

    #[test]
    fn series_solution_rejects_resonance() {
        let c = ctx();
        // (σ-1)(σ-q): 1 is an exponent but resonant.
        let p = sigma_minus_one(&c).mul(&OrePoly::sigma_minus_scalar(&c, c.q(), 24));
        assert!(matches!(
            series_solution(&p),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn peel_cross_check_closed_form() {
        let c = ctx();
        let p = OrePoly::from_terms(
            &c,
            vec![
                (1, LaurentSeries::from_terms(&c, 24, &[(0, s(1)), (1, s(-1))])),
                (0, LaurentSeries::constant(&c, s(-1), 24)),
            ],
        );
        let u = series_solution(&p).unwrap();
        let p1 = peel_left_factor_formula(&p, &u).unwrap();
        // P = P1·(σ-1)·u⁻¹
        let rebuilt = p1
            .mul(&sigma_minus_one(&c))
            .mul_right_series(&u.invert().unwrap());
        assert!(rebuilt.equals(&p));

        // Same cross-check through a gauge: peeling c = 1 at μ = -1 from the
        // worked example reduces, after gauging, to a slope-0 peel whose
        // closed-form left factor must match the division quotient.
        let p = divergent_example(&c);
        let sym = GaugeSymbol::new(s(1), -1);
        let gauged = p.gauge(&sym);
        let u = series_solution(&gauged).unwrap();
        let p1 = peel_left_factor_formula(&gauged, &u).unwrap();
        let divisor = OrePoly::sigma_minus_scalar(&c, &s(1), u.prec());
        let (q2, r) = gauged.mul_right_series(&u).right_divide(&divisor).unwrap();
        assert!(r.is_zero());
        assert!(p1.equals(&q2), "closed form and division quotient differ");
    }

    #[test]
    fn peel_worked_example() {
        let c = ctx();
        // qzσ²-(1+z)σ+1 at μ=-1, c=1 is the canonical factorization:
        // Q = σ-1, factor zσ-1, twist 1.
        let p = divergent_example(&c);
        let fac = peel_exponent(&p, -1, &s(1), 1).unwrap();
        assert!(fac.left.equals(&sigma_minus_one(&c)));
        assert_eq!(fac.steps.len(), 1);
        assert!(fac.steps[0].twist.is_one_to_prec());
        assert!(fac.steps[0]
            .twisted_operator()
            .unwrap()
            .equals(&z_sigma_minus_one(&c)));
        assert!(fac.remultiply().unwrap().equals(&p));
        // Newton bookkeeping: r_Q = r_P − δ_μ.
        let nf_q = newton::newton_function(&fac.left).unwrap();
        assert_eq!(nf_q, NewtonFunction::delta_int(0));
        // Characteristic bookkeeping: char_P = (X − c)·char_Q at μ = −1.
        let chp = newton::char_equation(&p, -1).unwrap().poly;
        let chq = newton::char_equation(&fac.left, -1).unwrap().poly;
        let lin = crate::poly::ScalarPoly::linear(&s(1));
        assert!(chp.equals_up_to_unit(&lin.mul(&chq)));
    }

    #[test]
    fn peel_unit_conjugate() {
        let c = ctx();
        // (1-z)σ - 1 = u·(σ-1)·u⁻¹ with u the normalized solution.
        let p = OrePoly::from_terms(
            &c,
            vec![
                (1, LaurentSeries::from_terms(&c, 24, &[(0, s(1)), (1, s(-1))])),
                (0, LaurentSeries::constant(&c, s(-1), 24)),
            ],
        );
        let fac = peel_exponent(&p, 0, &s(1), 1).unwrap();
        assert_eq!(fac.left.deg_abs(), Some(0));
        let u = series_solution(&p).unwrap();
        assert!(fac.steps[0].twist.equals(&u));
        assert!(fac.remultiply().unwrap().equals(&p));
    }

    #[test]
    fn peel_double_exponent() {
        let c = ctx();
        // (σ-1)²: exponent 1 with multiplicity 2, twists both 1.
        let p = sigma_minus_one(&c).mul(&sigma_minus_one(&c));
        let fac = peel_exponent(&p, 0, &s(1), 2).unwrap();
        assert_eq!(fac.left.deg_abs(), Some(0));
        assert!(fac.steps.iter().all(|t| t.twist.is_one_to_prec()));
        assert!(fac.remultiply().unwrap().equals(&p));
    }

    #[test]
    fn factor_slope_resonant_ordering() {
        let c = ctx();
        // (σ-1)(σ-q): both exponents in one class; c=1 must sit left of c=q.
        let p = sigma_minus_one(&c).mul(&OrePoly::sigma_minus_scalar(&c, c.q(), 24));
        let fac = factor_slope(&p, 0, Mode::Convergent).unwrap();
        assert_eq!(fac.steps.len(), 2);
        assert_eq!(fac.steps[0].exponent, s(1));
        assert_eq!(fac.steps[1].exponent, *c.q());
        assert!(fac.remultiply().unwrap().equals(&p));
        assert_eq!(fac.left.deg_abs(), Some(0));
    }

    #[test]
    fn factor_slope_convergent_requires_first_slope() {
        let c = ctx();
        let p = divergent_example(&c);
        assert!(matches!(
            factor_slope(&p, 0, Mode::Convergent),
            Err(Error::NotFirstSlope { got: 0, first: -1 })
        ));
        // Formal mode allows it.
        let fac = factor_slope(&p, 0, Mode::Formal).unwrap();
        assert!(fac.remultiply().unwrap().equals(&p));
    }

    #[test]
    fn bg_canonical_factorization() {
        let c = ctx();
        let p = divergent_example(&c);
        let bg = birkhoff_guenther(&p, Mode::Convergent).unwrap();
        assert_eq!(bg.slopes(), vec![0, -1]);
        assert!(bg.blocks[0].op.equals(&sigma_minus_one(&c)));
        assert!(bg.blocks[1].op.equals(&z_sigma_minus_one(&c)));
        assert!(bg.residual.equals(&OrePoly::one(&c, 24)));
        assert!(bg.steps().iter().all(|t| t.twist.is_one_to_prec()));
        assert!(bg.remultiply().equals(&p));
    }

    #[test]
    fn bg_split_example_remultiplies() {
        let c = ctx();
        let p = split_example(&c);
        let bg = birkhoff_guenther(&p, Mode::Convergent).unwrap();
        assert_eq!(bg.slopes(), vec![0, -1]);
        assert!(bg.remultiply().equals(&p));
        // Pure blocks have the expected Newton data.
        for b in &bg.blocks {
            let nf = newton::newton_function(&b.op).unwrap();
            assert_eq!(nf, NewtonFunction::delta_int(b.slope));
        }
    }

    #[test]
    fn bg_pure_input_is_single_block() {
        let c = ctx();
        let p = sigma_minus_one(&c);
        let bg = birkhoff_guenther(&p, Mode::Convergent).unwrap();
        assert_eq!(bg.blocks.len(), 1);
        assert!(bg.blocks[0].op.equals(&p));
    }

    #[test]
    fn pure_parts_of_split_example() {
        let c = ctx();
        let p = split_example(&c);
        let parts = formal_pure_parts(&p).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 0);
        assert_eq!(parts[1].0, -1);
        let total: i64 = parts.iter().map(|(_, op)| op.deg_abs().unwrap()).sum();
        assert_eq!(total, 2);
        for (mu, op) in &parts {
            assert_eq!(
                newton::newton_function(op).unwrap(),
                NewtonFunction::delta_int(*mu)
            );
        }
    }

    #[test]
    fn growth_of_q_exponential_series() {
        let c = ctx();
        // f_k = q^(k(k-1)/2)
        let terms: Vec<(i64, Scalar)> = (0..24).map(|k| (k, c.q_pow(k * (k - 1) / 2))).collect();
        let f = LaurentSeries::from_terms(&c, 24, &terms);
        let g = growth_class(&f).unwrap();
        assert_eq!(g.kind, GrowthKind::QExponential);
        assert!((g.rate - 1.0).abs() < 0.2);
    }

    #[test]
    fn growth_of_geometric_series() {
        let c = ctx();
        let terms: Vec<(i64, Scalar)> = (0..24).map(|k| (k, Scalar::from_ratio(1, 2).pow(k))).collect();
        let f = LaurentSeries::from_terms(&c, 24, &terms);
        let g = growth_class(&f).unwrap();
        assert_eq!(g.kind, GrowthKind::Geometric);
        assert!((g.rate - 0.5).abs() < 0.1);
    }

    #[test]
    fn growth_needs_data() {
        let c = ctx();
        let f = LaurentSeries::one(&c, 4);
        assert!(matches!(
            growth_class(&f),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn first_slope_peel_solution_is_geometric() {
        let c = ctx();
        // Twist of the slope-0 peel of (1-z)σ-1 converges geometrically.
        let p = OrePoly::from_terms(
            &c,
            vec![
                (1, LaurentSeries::from_terms(&c, 24, &[(0, s(1)), (1, s(-1))])),
                (0, LaurentSeries::constant(&c, s(-1), 24)),
            ],
        );
        let f = series_solution(&p).unwrap();
        assert_eq!(growth_class(&f).unwrap().kind, GrowthKind::Geometric);
    }
}
