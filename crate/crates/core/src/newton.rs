//! Newton polygons, Newton functions, characteristic equations, exponents.
//!
//! For a nonzero operator brought to the form `a_0 σ^n + ⋯ + a_n` (lowest
//! σ-degree 0), the polygon is the lower convex hull of the points
//! `(i, v0(a_i))` where `a_i` is the coefficient of `σ^(n−i)`: the abscissa
//! counts from the *leading* coefficient. Under this orientation the worked
//! rank-2 examples have slopes {0, −1}, the rank-1 operator `σ − a` has slope
//! `v0(a)`, and a gauge of class `c·z^μ` translates every slope by `−μ`.
//!
//! The Newton function is the multiset of hull slopes weighted by horizontal
//! extent; its total mass is the absolute degree.
//!
//! Characteristic equations multiply under the operator product in the exact
//! form `char(PQ, μ) = char(P, μ)(q^l·X) · char(Q, μ)` up to a unit monomial,
//! where `l` is the z-adic valuation of the slope-μ gauge of Q (see
//! [`gauged_valuation`]). The substitution disappears on the q^Z-classes of
//! the roots, which is the only sense in which exponents are intrinsic.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::ore::{GaugeSymbol, OrePoly};
use crate::poly::ScalarPoly;
use crate::scalar::Scalar;

/// Slopes are exact rationals with small numerators.
pub type Slope = Rational64;

/// Finitely supported map slope → multiplicity; the invariant `r_P`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NewtonFunction {
    support: BTreeMap<Slope, u64>,
}

impl NewtonFunction {
    pub fn new() -> Self {
        NewtonFunction {
            support: BTreeMap::new(),
        }
    }

    /// The Kronecker function `δ_μ`.
    pub fn delta(mu: Slope) -> Self {
        NewtonFunction::from_pairs(vec![(mu, 1)])
    }

    pub fn delta_int(mu: i64) -> Self {
        NewtonFunction::delta(Slope::from_integer(mu))
    }

    pub fn from_pairs(pairs: Vec<(Slope, u64)>) -> Self {
        let mut support = BTreeMap::new();
        for (mu, r) in pairs {
            if r > 0 {
                *support.entry(mu).or_insert(0) += r;
            }
        }
        NewtonFunction { support }
    }

    pub fn get(&self, mu: &Slope) -> u64 {
        self.support.get(mu).copied().unwrap_or(0)
    }

    /// Total mass `Σ r(μ)`; equals the absolute degree of the operator.
    pub fn mass(&self) -> u64 {
        self.support.values().sum()
    }

    /// Slopes in decreasing order `μ_1 > μ_2 > ⋯`.
    pub fn slopes_decreasing(&self) -> Vec<Slope> {
        self.support.keys().rev().copied().collect()
    }

    /// The first slope: the smallest one (the convergent direction).
    pub fn first_slope(&self) -> Option<Slope> {
        self.support.keys().next().copied()
    }

    pub fn last_slope(&self) -> Option<Slope> {
        self.support.keys().next_back().copied()
    }

    pub fn is_pure(&self) -> bool {
        self.support.len() == 1
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn pairs_decreasing(&self) -> Vec<(Slope, u64)> {
        self.support.iter().rev().map(|(m, r)| (*m, *r)).collect()
    }

    /// Pointwise sum (the polygon of a product / of an exact sequence).
    pub fn add(&self, rhs: &Self) -> Self {
        let mut support = self.support.clone();
        for (mu, r) in &rhs.support {
            *support.entry(*mu).or_insert(0) += r;
        }
        NewtonFunction { support }
    }

    /// Convolution `r(μ) = Σ_{μ1+μ2=μ} r1(μ1)·r2(μ2)` (tensor product).
    pub fn convolve(&self, rhs: &Self) -> Self {
        let mut support: BTreeMap<Slope, u64> = BTreeMap::new();
        for (m1, r1) in &self.support {
            for (m2, r2) in &rhs.support {
                *support.entry(m1 + m2).or_insert(0) += r1 * r2;
            }
        }
        NewtonFunction { support }
    }

    /// Reflection `r(μ) ↦ r(−μ)` (duality).
    pub fn reflect(&self) -> Self {
        NewtonFunction {
            support: self.support.iter().map(|(m, r)| (-m, *r)).collect(),
        }
    }

    /// Translation of every slope by `−μ` (gauge of class `c z^μ`).
    pub fn translate(&self, mu: Slope) -> Self {
        NewtonFunction {
            support: self.support.iter().map(|(m, r)| (m - mu, *r)).collect(),
        }
    }

    /// Scales every slope by `l` (ramification).
    pub fn scale_slopes(&self, l: i64) -> Self {
        NewtonFunction {
            support: self
                .support
                .iter()
                .map(|(m, r)| (m * Slope::from_integer(l), *r))
                .collect(),
        }
    }

    pub fn all_integral(&self) -> bool {
        self.support.keys().all(|m| m.is_integer())
    }
}

impl fmt::Display for NewtonFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (m, r)) in self.support.iter().rev().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}: {r}")?;
        }
        write!(f, "}}")
    }
}

/// Newton function of a nonzero operator.
pub fn newton_function(p: &OrePoly) -> Result<NewtonFunction> {
    let Some((_, dmax)) = p.degree_range() else {
        return Err(Error::ZeroOperator);
    };
    // Points (dmax - k, v0(a_k)): abscissa counted from the leading term.
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for (k, a) in p.terms() {
        if let Some(v) = a.v0() {
            pts.push((dmax - k, v));
        }
    }
    pts.sort_unstable();
    let hull = lower_hull(&pts);
    let mut pairs = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        pairs.push((Slope::new(y2 - y1, x2 - x1), (x2 - x1) as u64));
    }
    Ok(NewtonFunction::from_pairs(pairs))
}

/// Monotone-chain lower hull of points sorted by abscissa (distinct x).
fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128
                - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Vertices of the finite lower boundary reconstructed from a Newton
/// function: a decreasing-slope walk from the anchor.
pub fn polygon_vertices(r: &NewtonFunction, anchor: (i64, Rational64)) -> Vec<(i64, Rational64)> {
    let mut out = vec![anchor];
    let (mut x, mut y) = anchor;
    for (mu, mult) in r.pairs_decreasing() {
        x += mult as i64;
        y += mu * Rational64::from_integer(mult as i64);
        out.push((x, y));
    }
    out
}

/// Recovers the Newton function from a vertex walk (inverse of
/// [`polygon_vertices`]).
pub fn vertices_to_newton(vertices: &[(i64, Rational64)]) -> NewtonFunction {
    let mut pairs = Vec::new();
    for w in vertices.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let run = x2 - x1;
        if run > 0 {
            pairs.push(((y2 - y1) / Rational64::from_integer(run), run as u64));
        }
    }
    NewtonFunction::from_pairs(pairs)
}

/// The characteristic equation attached to an integer slope: the commutative
/// Laurent polynomial `(z^(−v0) · P^[e_{q,z^μ}])_{z=0}` in the variable X.
#[derive(Clone, Debug)]
pub struct CharEquation {
    pub slope: i64,
    pub poly: ScalarPoly,
}

impl CharEquation {
    pub fn deg_abs(&self) -> i64 {
        self.poly.deg_abs().unwrap_or(0)
    }
}

pub fn char_equation(p: &OrePoly, mu: i64) -> Result<CharEquation> {
    if p.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let gauged = p.gauge(&GaugeSymbol::new(Scalar::one(), mu));
    let l = gauged.v0().ok_or(Error::ZeroOperator)?;
    let mut terms = Vec::new();
    for (k, a) in gauged.terms() {
        let c = a.coeff(l)?;
        if !c.is_zero() {
            terms.push((k, c));
        }
    }
    Ok(CharEquation {
        slope: mu,
        poly: ScalarPoly::from_terms(terms),
    })
}

/// `v0(P^[e_{q,z^μ}])`: the z-adic valuation of the slope-μ gauge of P.
/// This is the twist exponent in the exact multiplicativity law for
/// characteristic equations.
pub fn gauged_valuation(p: &OrePoly, mu: i64) -> Result<i64> {
    p.gauge(&GaugeSymbol::new(Scalar::one(), mu))
        .v0()
        .ok_or(Error::ZeroOperator)
}

/// Checks the exact multiplicativity law
/// `char(PQ, μ) ~ char(P, μ)(q^l X) · char(Q, μ)` with `l = gauged_valuation(Q, μ)`,
/// equality up to a unit monomial.
pub fn char_multiplicative(p: &OrePoly, q: &OrePoly, prod: &OrePoly, mu: i64) -> Result<bool> {
    let l = gauged_valuation(q, mu)?;
    let lhs = char_equation(prod, mu)?.poly;
    let rhs = char_equation(p, mu)?
        .poly
        .substitute_scaled(&p.ctx().q_pow(l))
        .mul(&char_equation(q, mu)?.poly);
    Ok(lhs.equals_up_to_unit(&rhs))
}

/// An exponent: a nonzero rational root of a characteristic equation,
/// with `c = q^ε · c̄`, `1 ≤ |c̄| < |q|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentData {
    pub c: Scalar,
    pub multiplicity: usize,
    pub epsilon: i64,
    pub cbar: Scalar,
    /// True iff some `c·q^l`, `l ≥ 1`, is also an exponent at this slope.
    pub resonant: bool,
}

/// Exponents attached to the slope μ of P, with resonance flags. Errors with
/// [`Error::IrrationalExponent`] when the characteristic polynomial does not
/// split over the rationals.
pub fn exponents(p: &OrePoly, mu: i64) -> Result<Vec<ExponentData>> {
    let ch = char_equation(p, mu)?;
    let roots = ch.poly.split_roots()?;
    let ctx = p.ctx();
    let mut out = Vec::new();
    for (c, multiplicity) in &roots {
        let (epsilon, cbar) = ctx.decompose(c)?;
        let resonant = roots.iter().any(|(other, _)| {
            if let Ok((eps_o, cbar_o)) = ctx.decompose(other) {
                cbar_o == cbar && eps_o > epsilon
            } else {
                false
            }
        });
        out.push(ExponentData {
            c: c.clone(),
            multiplicity: *multiplicity,
            epsilon,
            cbar,
            resonant,
        });
    }
    // Deterministic order: by congruence class, then by epsilon.
    out.sort_by(|a, b| (a.cbar.clone(), a.epsilon).cmp(&(b.cbar.clone(), b.epsilon)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Ctx, QContext};
    use crate::series::LaurentSeries;

    fn ctx() -> Ctx {
        QContext::simple(2, 16)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn sl(n: i64) -> Slope {
        Slope::from_integer(n)
    }

    /// zσ² - (1+z)σ + 1
    fn split_example(c: &Ctx) -> OrePoly {
        OrePoly::from_terms(
            c,
            vec![
                (2, LaurentSeries::monomial(c, s(1), 1, 16)),
                (1, LaurentSeries::from_terms(c, 16, &[(0, s(-1)), (1, s(-1))])),
                (0, LaurentSeries::one(c, 16)),
            ],
        )
    }

    /// qzσ² - (1+z)σ + 1
    fn divergent_example(c: &Ctx) -> OrePoly {
        OrePoly::from_terms(
            c,
            vec![
                (2, LaurentSeries::monomial(c, c.q().clone(), 1, 16)),
                (1, LaurentSeries::from_terms(c, 16, &[(0, s(-1)), (1, s(-1))])),
                (0, LaurentSeries::one(c, 16)),
            ],
        )
    }

    #[test]
    fn worked_examples_have_slopes_zero_and_minus_one() {
        let c = ctx();
        let expected = NewtonFunction::from_pairs(vec![(sl(0), 1), (sl(-1), 1)]);
        assert_eq!(newton_function(&split_example(&c)).unwrap(), expected);
        assert_eq!(newton_function(&divergent_example(&c)).unwrap(), expected);
    }

    #[test]
    fn unit_operator_is_fuchsian() {
        let c = ctx();
        let p = OrePoly::sigma_minus_scalar(&c, &s(1), 16);
        assert_eq!(newton_function(&p).unwrap(), NewtonFunction::delta_int(0));
    }

    #[test]
    fn rank_one_slope_is_valuation() {
        let c = ctx();
        // σ - z has slope 1, σ - z⁻² has slope -2
        for (v, expect) in [(1i64, 1i64), (-2, -2)] {
            let p = OrePoly::from_terms(
                &c,
                vec![
                    (1, LaurentSeries::one(&c, 16)),
                    (0, LaurentSeries::monomial(&c, s(-1), v, 16)),
                ],
            );
            assert_eq!(newton_function(&p).unwrap(), NewtonFunction::delta_int(expect));
        }
    }

    #[test]
    fn char_equation_at_both_slopes() {
        let c = ctx();
        let p = split_example(&c);
        // slope 0: -X + 1 up to unit
        let ch0 = char_equation(&p, 0).unwrap();
        assert!(ch0
            .poly
            .equals_up_to_unit(&ScalarPoly::from_terms(vec![(1, s(-1)), (0, s(1))])));
        assert_eq!(ch0.deg_abs(), 1);
        // slope -1: q⁻¹X² - X up to unit
        let chm1 = char_equation(&p, -1).unwrap();
        let expect = ScalarPoly::from_terms(vec![(2, c.q_pow(-1)), (1, s(-1))]);
        assert!(chm1.poly.equals_up_to_unit(&expect));
        assert_eq!(chm1.deg_abs(), 1);
        // a non-slope yields a nonzero constant
        let ch5 = char_equation(&p, 5).unwrap();
        assert_eq!(ch5.deg_abs(), 0);
        assert!(!ch5.poly.is_zero());
    }

    #[test]
    fn exponents_of_worked_examples() {
        let c = ctx();
        // qzσ²-(1+z)σ+1 at μ=-1: exponent 1, non-resonant
        let e = exponents(&divergent_example(&c), -1).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].c, s(1));
        assert_eq!(e[0].multiplicity, 1);
        assert_eq!(e[0].epsilon, 0);
        assert!(!e[0].resonant);
        // zσ²-(1+z)σ+1 at μ=-1: exponent q with ε=1
        let e = exponents(&split_example(&c), -1).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].c, *c.q());
        assert_eq!(e[0].epsilon, 1);
        assert!(!e[0].resonant);
    }

    #[test]
    fn squared_factor_multiplicity() {
        let c = ctx();
        let sm1 = OrePoly::sigma_minus_scalar(&c, &s(1), 16);
        let p = sm1.mul(&sm1);
        let e = exponents(&p, 0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].c, s(1));
        assert_eq!(e[0].multiplicity, 2);
        assert!(!e[0].resonant);
    }

    #[test]
    fn resonant_pair_is_flagged() {
        let c = ctx();
        // (σ-1)(σ-q): exponents 1 and q share the class of 1; 1 is resonant.
        let p = OrePoly::sigma_minus_scalar(&c, &s(1), 16)
            .mul(&OrePoly::sigma_minus_scalar(&c, c.q(), 16));
        let e = exponents(&p, 0).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].c, s(1));
        assert!(e[0].resonant);
        assert_eq!(e[1].c, *c.q());
        assert!(!e[1].resonant);
    }

    #[test]
    fn irrational_exponent_reported() {
        let c = ctx();
        // σ² − 2: characteristic polynomial X² − 2 does not split over Q.
        let p = OrePoly::from_terms(
            &c,
            vec![
                (2, LaurentSeries::one(&c, 16)),
                (0, LaurentSeries::constant(&c, s(-2), 16)),
            ],
        );
        match exponents(&p, 0) {
            Err(crate::error::Error::IrrationalExponent(factor)) => {
                assert!(factor.contains("X^2"), "reports the irreducible factor");
            }
            other => panic!("expected IrrationalExponent, got {other:?}"),
        }
    }

    #[test]
    fn nf_convolve_and_reflect() {
        let d0m1 = NewtonFunction::from_pairs(vec![(sl(0), 1), (sl(-1), 1)]);
        let d1 = NewtonFunction::delta_int(1);
        let conv = d0m1.convolve(&d1);
        assert_eq!(
            conv,
            NewtonFunction::from_pairs(vec![(sl(1), 1), (sl(0), 1)])
        );
        assert_eq!(
            d0m1.reflect(),
            NewtonFunction::from_pairs(vec![(sl(0), 1), (sl(1), 1)])
        );
    }

    #[test]
    fn vertices_walk_and_roundtrip() {
        let r = NewtonFunction::from_pairs(vec![(sl(0), 1), (sl(-1), 1)]);
        let verts = polygon_vertices(&r, (0, Rational64::from_integer(0)));
        assert_eq!(
            verts,
            vec![
                (0, Rational64::from_integer(0)),
                (1, Rational64::from_integer(0)),
                (2, Rational64::from_integer(-1)),
            ]
        );
        assert_eq!(vertices_to_newton(&verts), r);

        let pure = NewtonFunction::from_pairs(vec![(sl(0), 2)]);
        let verts = polygon_vertices(&pure, (0, Rational64::from_integer(0)));
        assert_eq!(
            verts,
            vec![(0, Rational64::from_integer(0)), (2, Rational64::from_integer(0))]
        );
    }

    #[test]
    fn gauge_translates_slopes() {
        let c = ctx();
        let p = split_example(&c);
        let g = p.gauge(&GaugeSymbol::new(s(3), 2));
        let nf = newton_function(&g).unwrap();
        assert_eq!(nf, newton_function(&p).unwrap().translate(sl(2)));
    }

    #[test]
    fn ramification_scales_slopes() {
        let c = QContext::standard();
        let p = OrePoly::from_terms(
            &c,
            vec![
                (2, LaurentSeries::monomial(&c, s(1), 1, 8)),
                (1, LaurentSeries::from_terms(&c, 8, &[(0, s(-1)), (1, s(-1))])),
                (0, LaurentSeries::one(&c, 8)),
            ],
        );
        let r = p.ramify(3).unwrap();
        assert_eq!(
            newton_function(&r).unwrap(),
            newton_function(&p).unwrap().scale_slopes(3)
        );
    }

    #[test]
    fn char_is_multiplicative_on_worked_pair() {
        let c = ctx();
        let a = split_example(&c);
        let b = divergent_example(&c);
        let prod = a.mul(&b);
        for mu in -3..=3 {
            assert!(char_multiplicative(&a, &b, &prod, mu).unwrap(), "slope {mu}");
        }
        // At μ = -1 the twist is genuinely present: the naive product of the
        // two characteristic polynomials has roots {1, q} while the product
        // operator has {1, q²}; they agree in C*/q^Z only.
        let l = gauged_valuation(&b, -1).unwrap();
        assert_eq!(l, -1);
        let naive = char_equation(&a, -1)
            .unwrap()
            .poly
            .mul(&char_equation(&b, -1).unwrap().poly);
        let lhs = char_equation(&prod, -1).unwrap().poly;
        assert!(!lhs.equals_up_to_unit(&naive));
    }
}
