//! The canonical filtration by slopes, the graded module, and the
//! Hilbert–Samuel polynomial.
//!
//! From the Birkhoff–Guenther factorization `P = w·R_{μ1} ⋯ R_{μk}` with
//! strictly decreasing slopes, the tower `0 = M_0 ⊂ M_1 ⊂ ⋯ ⊂ M_k = M_P` has
//! `M_i` equal to the classes of multiples of the right product
//! `R_{μ_{i+1}} ⋯ R_{μk}`, which is isomorphic to the module of the partial
//! left product `R_{μ1} ⋯ R_{μi}`: the submodule is presented by the left
//! factor and the quotient `M_i/M_{i−1}` by the pure factor `R_{μi}`. The
//! rank-smallest submodule is therefore pure of the largest slope.
//!
//! Splitness of the tower is *reported* through the growth class of the
//! cross-solve series between adjacent pure factors (geometric evidence for
//! split, q-exponential for non-split); this is a documented heuristic, not
//! a proof.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use crate::error::Result;
use crate::factor::{self, GrowthKind, Mode, SlopeFactorization};
use crate::newton::{self, NewtonFunction, Slope};
use crate::ore::OrePoly;
use crate::qsolve;

/// The canonical (descending) filtration by slopes of `M_P`.
#[derive(Clone, Debug)]
pub struct SlopeFiltration {
    pub mode: Mode,
    /// Strictly decreasing break slopes `μ_1 > ⋯ > μ_k`.
    pub breaks: Vec<i64>,
    /// `tower[i]` presents `M_{i+1}` inside `M_P` as the classes of
    /// multiples of the right product `R_{μ_{i+2}} ⋯ R_{μk}` (so the last
    /// entry is 1, presenting `M_k = M`).
    pub tower: Vec<OrePoly>,
    /// `quotient_ops[i]` is the pure factor `R_{μ_{i+1}}` presenting
    /// `M_{i+1}/M_i`.
    pub quotient_ops: Vec<OrePoly>,
    /// Left partial products `R_{μ1} ⋯ R_{μ_{i+1}}`, isomorphic
    /// presentations of the `M_{i+1}`.
    pub left_products: Vec<OrePoly>,
    factorization: SlopeFactorization,
}

impl SlopeFiltration {
    /// Ranks of the tower modules `M_1, …, M_k`.
    pub fn ranks(&self) -> Vec<u64> {
        let mut acc = 0;
        self.quotient_ops
            .iter()
            .map(|r| {
                acc += r.deg_abs().unwrap_or(0) as u64;
                acc
            })
            .collect()
    }

    pub fn factorization(&self) -> &SlopeFactorization {
        &self.factorization
    }

    pub fn remultiply(&self) -> OrePoly {
        self.factorization.remultiply()
    }
}

/// Computes the canonical filtration of `M_P` from the Birkhoff–Guenther
/// factorization. Requires integral slopes (ramify first) and rational
/// exponents.
pub fn canonical_filtration(p: &OrePoly, mode: Mode) -> Result<SlopeFiltration> {
    let ctx = p.ctx().clone();
    let bg = factor::birkhoff_guenther(p, mode)?;
    let breaks: Vec<i64> = bg.slopes();
    let quotient_ops: Vec<OrePoly> = bg.blocks.iter().map(|b| b.op.clone()).collect();
    let k = breaks.len();
    let prec = p.min_prec().unwrap_or(ctx.default_prec());
    let mut tower = Vec::with_capacity(k);
    for i in 0..k {
        let mut right = OrePoly::one(&ctx, prec);
        for b in &bg.blocks[i + 1..] {
            right = right.mul(&b.op);
        }
        tower.push(right);
    }
    let mut left_products = Vec::with_capacity(k);
    let mut acc = OrePoly::one(&ctx, prec);
    for b in &bg.blocks {
        acc = acc.mul(&b.op);
        left_products.push(acc.clone());
    }
    Ok(SlopeFiltration {
        mode,
        breaks,
        tower,
        quotient_ops,
        left_products,
        factorization: bg,
    })
}

/// The associated graded module: one pure operator per slope.
#[derive(Clone, Debug)]
pub struct GradedModule {
    pub parts: BTreeMap<i64, OrePoly>,
}

impl GradedModule {
    /// Total Newton function of the graded pieces.
    pub fn newton(&self) -> Result<NewtonFunction> {
        let mut acc = NewtonFunction::new();
        for op in self.parts.values() {
            acc = acc.add(&newton::newton_function(op)?);
        }
        Ok(acc)
    }

    pub fn rank(&self) -> u64 {
        self.parts
            .values()
            .map(|op| op.deg_abs().unwrap_or(0) as u64)
            .sum()
    }
}

/// Graded module of `M_P`: quotient operators of the canonical filtration in
/// convergent mode, the direct-sum pure parts in formal mode. Both carry the
/// same Newton data.
pub fn graded(p: &OrePoly, mode: Mode) -> Result<GradedModule> {
    let parts: Vec<(i64, OrePoly)> = match mode {
        Mode::Formal => factor::formal_pure_parts(p)?,
        Mode::Convergent => {
            let filt = canonical_filtration(p, mode)?;
            filt.breaks
                .iter()
                .copied()
                .zip(filt.quotient_ops.iter().cloned())
                .collect()
        }
    };
    Ok(GradedModule {
        parts: parts.into_iter().collect(),
    })
}

/// A slice `F^{≥μ}(M)` of the canonical filtration.
#[derive(Clone, Debug)]
pub struct FiltrationSlice {
    /// Operator presenting the largest submodule with slopes ≥ μ (the
    /// partial left product; the operator 1 presents the zero module).
    pub op: OrePoly,
    pub rank: u64,
    pub breaks: Vec<i64>,
}

/// The largest submodule with all slopes ≥ μ.
pub fn f_geq(p: &OrePoly, mu: Rational64, mode: Mode) -> Result<FiltrationSlice> {
    let filt = canonical_filtration(p, mode)?;
    let count = filt
        .breaks
        .iter()
        .filter(|b| Rational64::from_integer(**b) >= mu)
        .count();
    let ctx = p.ctx().clone();
    let prec = p.min_prec().unwrap_or(ctx.default_prec());
    let op = if count == 0 {
        OrePoly::one(&ctx, prec)
    } else {
        filt.left_products[count - 1].clone()
    };
    let rank = if count == 0 { 0 } else { filt.ranks()[count - 1] };
    Ok(FiltrationSlice {
        op,
        rank,
        breaks: filt.breaks[..count].to_vec(),
    })
}

/// The Hilbert–Samuel polynomial `R_M(T) = Σ r_M(μ)·T^μ`, a ramified
/// polynomial: additive on exact sequences, multiplicative under tensor,
/// `T ↦ T⁻¹` under duality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSamuel {
    terms: BTreeMap<Slope, u64>,
}

impl HilbertSamuel {
    pub fn from_newton(r: &NewtonFunction) -> Self {
        HilbertSamuel {
            terms: r
                .pairs_decreasing()
                .into_iter()
                .filter(|(_, m)| *m > 0)
                .collect(),
        }
    }

    pub fn coeff(&self, mu: &Slope) -> u64 {
        self.terms.get(mu).copied().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            *terms.entry(*m).or_insert(0) += c;
        }
        HilbertSamuel { terms }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<Slope, u64> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *terms.entry(m1 + m2).or_insert(0) += c1 * c2;
            }
        }
        HilbertSamuel { terms }
    }

    /// Dualization: `T ↦ T⁻¹`.
    pub fn substitute_reciprocal(&self) -> Self {
        HilbertSamuel {
            terms: self.terms.iter().map(|(m, c)| (-m, *c)).collect(),
        }
    }
}

impl fmt::Display for HilbertSamuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *m == Slope::from_integer(0) {
                write!(f, "{c}")?;
            } else {
                if *c != 1 {
                    write!(f, "{c}*")?;
                }
                if m.is_integer() {
                    write!(f, "T^{}", m.numer())?;
                } else {
                    write!(f, "T^({m})")?;
                }
            }
        }
        Ok(())
    }
}

/// Evidence about splitness of the canonical tower, from coefficient growth
/// of the cross-solve series between adjacent pure blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitEvidence {
    /// All cross-solves geometric: consistent with a split (direct sum) tower.
    Split,
    /// Some cross-solve q-exponential: the tower does not split analytically.
    NonSplit,
    /// Single pure block: nothing to test.
    Pure,
}

/// Reports splitness evidence for the canonical filtration of `P` by
/// classifying the growth of every formal-basis solution component.
pub fn splitness_report(p: &OrePoly) -> Result<SplitEvidence> {
    let filt = canonical_filtration(p, Mode::Formal)?;
    if filt.breaks.len() <= 1 {
        return Ok(SplitEvidence::Pure);
    }
    let basis = qsolve::formal_basis(p)?;
    for sol in &basis.solutions {
        for growth in sol.component_growth()? {
            if growth.kind == GrowthKind::QExponential {
                return Ok(SplitEvidence::NonSplit);
            }
        }
    }
    Ok(SplitEvidence::Split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Ctx, QContext, Scalar};
    use crate::series::LaurentSeries;

    fn ctx() -> Ctx {
        QContext::simple(2, 24)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn sl(n: i64) -> Slope {
        Slope::from_integer(n)
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

    fn divergent_example(c: &Ctx) -> OrePoly {
        sigma_minus_one(c).mul(&z_sigma_minus_one(c))
    }

    fn split_example(c: &Ctx) -> OrePoly {
        z_sigma_minus_one(c).mul(&sigma_minus_one(c))
    }

    #[test]
    fn filtration_of_worked_example() {
        let c = ctx();
        let p = divergent_example(&c);
        let filt = canonical_filtration(&p, Mode::Convergent).unwrap();
        assert_eq!(filt.breaks, vec![0, -1]);
        assert_eq!(filt.ranks(), vec![1, 2]);
        assert!(filt.quotient_ops[0].equals(&sigma_minus_one(&c)));
        assert!(filt.quotient_ops[1].equals(&z_sigma_minus_one(&c)));
        // M_1 presented by the right product zσ-1; M_2 by 1.
        assert!(filt.tower[0].equals(&z_sigma_minus_one(&c)));
        assert!(filt.tower[1].equals(&OrePoly::one(&c, 24)));
        assert!(filt.remultiply().equals(&p));
    }

    #[test]
    fn trivial_tower_for_pure_operator() {
        let c = ctx();
        let p = sigma_minus_one(&c);
        let filt = canonical_filtration(&p, Mode::Convergent).unwrap();
        assert_eq!(filt.breaks, vec![0]);
        assert_eq!(filt.ranks(), vec![1]);
    }

    #[test]
    fn graded_of_worked_example() {
        let c = ctx();
        let p = divergent_example(&c);
        for mode in [Mode::Convergent, Mode::Formal] {
            let gr = graded(&p, mode).unwrap();
            assert_eq!(gr.parts.len(), 2);
            assert_eq!(gr.rank(), 2);
            let nf = gr.newton().unwrap();
            assert_eq!(nf, newton::newton_function(&p).unwrap());
        }
        // fuchsian operator: single part equal to P itself (up to unit).
        let f = sigma_minus_one(&c);
        let gr = graded(&f, Mode::Convergent).unwrap();
        assert_eq!(gr.parts.len(), 1);
        assert!(gr.parts[&0].equals(&f));
    }

    #[test]
    fn f_geq_slices() {
        let c = ctx();
        let p = divergent_example(&c);
        // μ = 0: the rank-1 unit submodule presented by σ-1.
        let slice = f_geq(&p, Rational64::from_integer(0), Mode::Convergent).unwrap();
        assert_eq!(slice.rank, 1);
        assert!(slice.op.equals(&sigma_minus_one(&c)));
        // μ ≤ min slope: the whole module.
        let slice = f_geq(&p, Rational64::from_integer(-5), Mode::Convergent).unwrap();
        assert_eq!(slice.rank, 2);
        assert!(slice.op.equals(&p));
        // μ > max slope: zero module.
        let slice = f_geq(&p, Rational64::from_integer(3), Mode::Convergent).unwrap();
        assert_eq!(slice.rank, 0);
        assert_eq!(slice.op.deg_abs(), Some(0));
    }

    #[test]
    fn hilbert_samuel_laws() {
        let r = NewtonFunction::from_pairs(vec![(sl(0), 1), (sl(-1), 1)]);
        let hs = HilbertSamuel::from_newton(&r);
        assert_eq!(format!("{hs}"), "1 + T^-1");
        // Multiplicative under convolution.
        let r2 = NewtonFunction::from_pairs(vec![(sl(1), 1), (sl(0), 2)]);
        let hs2 = HilbertSamuel::from_newton(&r2);
        assert_eq!(
            hs.mul(&hs2),
            HilbertSamuel::from_newton(&r.convolve(&r2))
        );
        // Additive.
        assert_eq!(hs.add(&hs2), HilbertSamuel::from_newton(&r.add(&r2)));
        // Duality: T ↦ T⁻¹.
        assert_eq!(
            hs.substitute_reciprocal(),
            HilbertSamuel::from_newton(&r.reflect())
        );
    }
}
