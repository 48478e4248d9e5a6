//! The solution symbol algebra and formal/convergent solution bases.
//!
//! Solutions live in the algebra generated over K by characters `e_{q,c}`
//! (`σ_q e = c·e`), the theta symbol (`σ_q Θ = z·Θ`) and the q-logarithm
//! (`σ_q l_q = l_q + 1`). An element is a finite sum of components indexed by
//! `(c̄, θ)` with `1 ≤ |c̄| < |q|`, each carrying a polynomial in the
//! binomial-basis symbols `l_q^(k)` with series coefficients:
//!
//! ```text
//!     Σ e_{q,c̄} · Θ^θ · Σ_k f_k(z) · l_q^(k)
//! ```
//!
//! Characters are canonicalized through `e_{q,q^ε c̄} = z^ε e_{q,c̄}`, and Θ
//! is folded into the exponent θ; no analytic theta values are ever
//! computed. σ_q acts componentwise by
//! `f ↦ c̄ z^θ σ_q(f)` together with `l_q^(k) ↦ l_q^(k) + l_q^(k−1)`.
//!
//! First-order solves follow the triangular recursions of the classical
//! treatment: a diagonal coefficientwise solve when the twisted character
//! misses `q^Z`, q-integration with an l_q-degree raise when it lands in
//! `q^Z` at level 0, and ascending coefficient recursions in the twisted
//! directions, which are exactly the directions (`θ + ν > 0`) that convergent
//! mode must refuse.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::{self, GrowthClass, Mode, TwistedFactor};
use crate::newton;
use crate::ore::OrePoly;
use crate::scalar::{assert_same_ctx, Ctx, Scalar};
use crate::series::LaurentSeries;

/// Component key: the fundamental-annulus character class and the Θ-exponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolKey {
    pub cbar: Scalar,
    pub theta: i64,
}

/// An element of the solution algebra.
#[derive(Clone, Debug)]
pub struct SymbolElement {
    ctx: Ctx,
    /// Key → l_q-polynomial in the binomial basis; index k holds the
    /// coefficient of `l_q^(k)`.
    components: BTreeMap<SymbolKey, Vec<LaurentSeries>>,
}

fn trim_lq(mut poly: Vec<LaurentSeries>) -> Vec<LaurentSeries> {
    while poly.last().map_or(false, |f| f.is_zero_to_prec()) {
        poly.pop();
    }
    poly
}

impl SymbolElement {
    pub fn zero(ctx: &Ctx) -> Self {
        SymbolElement {
            ctx: ctx.clone(),
            components: BTreeMap::new(),
        }
    }

    /// A plain element of K (component `(1, 0)` with l_q-degree 0).
    pub fn from_series(f: LaurentSeries) -> Self {
        let ctx = f.ctx().clone();
        SymbolElement::from_component(&ctx, Scalar::one(), 0, vec![f])
    }

    pub fn one(ctx: &Ctx, prec: i64) -> Self {
        SymbolElement::from_series(LaurentSeries::one(ctx, prec))
    }

    /// The q-logarithm `l_q` as an element.
    pub fn lq(ctx: &Ctx, prec: i64) -> Self {
        SymbolElement::from_component(
            ctx,
            Scalar::one(),
            0,
            vec![LaurentSeries::zero(ctx, prec), LaurentSeries::one(ctx, prec)],
        )
    }

    /// Builds `e_{q,c} Θ^θ · poly` with `c` canonicalized into `z^ε e_{q,c̄}`.
    pub fn character(ctx: &Ctx, c: &Scalar, theta: i64, poly: Vec<LaurentSeries>) -> Result<Self> {
        let (eps, cbar) = ctx.decompose(c)?;
        let shifted = poly.into_iter().map(|f| f.shift(eps)).collect();
        Ok(SymbolElement::from_component(ctx, cbar, theta, shifted))
    }

    fn from_component(ctx: &Ctx, cbar: Scalar, theta: i64, poly: Vec<LaurentSeries>) -> Self {
        let poly = trim_lq(poly);
        let mut components = BTreeMap::new();
        if !poly.is_empty() {
            components.insert(SymbolKey { cbar, theta }, poly);
        }
        SymbolElement {
            ctx: ctx.clone(),
            components,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&SymbolKey, &Vec<LaurentSeries>)> {
        self.components.iter()
    }

    pub fn component(&self, key: &SymbolKey) -> Option<&Vec<LaurentSeries>> {
        self.components.get(key)
    }

    pub fn max_lq_degree(&self) -> usize {
        self.components
            .values()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    fn merged(ctx: &Ctx, parts: Vec<(SymbolKey, Vec<LaurentSeries>)>) -> Self {
        let mut components: BTreeMap<SymbolKey, Vec<LaurentSeries>> = BTreeMap::new();
        for (key, poly) in parts {
            match components.remove(&key) {
                None => {
                    components.insert(key, poly);
                }
                Some(prev) => {
                    let n = prev.len().max(poly.len());
                    let mut sum = Vec::with_capacity(n);
                    for i in 0..n {
                        let a = prev.get(i);
                        let b = poly.get(i);
                        sum.push(match (a, b) {
                            (Some(a), Some(b)) => a.add(b),
                            (Some(a), None) => a.clone(),
                            (None, Some(b)) => b.clone(),
                            (None, None) => unreachable!(),
                        });
                    }
                    components.insert(key, sum);
                }
            }
        }
        components.retain(|_, poly| {
            *poly = trim_lq(std::mem::take(poly));
            !poly.is_empty()
        });
        SymbolElement {
            ctx: ctx.clone(),
            components,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let mut parts: Vec<(SymbolKey, Vec<LaurentSeries>)> = Vec::new();
        for (k, p) in &self.components {
            parts.push((k.clone(), p.clone()));
        }
        for (k, p) in &rhs.components {
            parts.push((k.clone(), p.clone()));
        }
        SymbolElement::merged(&self.ctx, parts)
    }

    pub fn neg(&self) -> Self {
        SymbolElement {
            ctx: self.ctx.clone(),
            components: self
                .components
                .iter()
                .map(|(k, p)| (k.clone(), p.iter().map(|f| f.neg()).collect()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// K-linear scaling by a series.
    pub fn scale_series(&self, a: &LaurentSeries) -> Self {
        let parts = self
            .components
            .iter()
            .map(|(k, p)| (k.clone(), p.iter().map(|f| f.mul(a)).collect()))
            .collect();
        SymbolElement::merged(&self.ctx, parts)
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        let parts = self
            .components
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    p.iter().map(|f| f.scale(c)).collect::<Vec<_>>(),
                )
            })
            .collect();
        SymbolElement::merged(&self.ctx, parts)
    }

    /// Product in the algebra: characters multiply (with canonicalization
    /// back into the fundamental annulus), Θ-exponents add, l_q-polynomials
    /// multiply in the binomial basis.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        assert_same_ctx(&self.ctx, &rhs.ctx);
        let mut parts: Vec<(SymbolKey, Vec<LaurentSeries>)> = Vec::new();
        for (k1, p1) in &self.components {
            for (k2, p2) in &rhs.components {
                let c = &k1.cbar * &k2.cbar;
                let (eps, cbar) = self.ctx.decompose(&c)?;
                let poly = lq_mul(p1, p2)
                    .into_iter()
                    .map(|f| f.shift(eps))
                    .collect();
                parts.push((
                    SymbolKey {
                        cbar,
                        theta: k1.theta + k2.theta,
                    },
                    poly,
                ));
            }
        }
        Ok(SymbolElement::merged(&self.ctx, parts))
    }

    /// One application of σ_q.
    pub fn sigma(&self) -> Self {
        let parts = self
            .components
            .iter()
            .map(|(key, poly)| {
                let factor =
                    LaurentSeries::monomial(&self.ctx, key.cbar.clone(), key.theta, sigma_prec(poly) + key.theta);
                let d = poly.len();
                let mut out = Vec::with_capacity(d);
                for j in 0..d {
                    // c̄·z^θ·(σ f_j + σ f_{j+1})
                    let mut t = poly[j].sigma_pow(1);
                    if j + 1 < d {
                        t = t.add(&poly[j + 1].sigma_pow(1));
                    }
                    out.push(t.mul(&factor));
                }
                (key.clone(), out)
            })
            .collect();
        SymbolElement::merged(&self.ctx, parts)
    }

    /// One application of σ_q⁻¹, by exact back-substitution.
    pub fn sigma_inverse(&self) -> Self {
        let parts = self
            .components
            .iter()
            .map(|(key, poly)| {
                let factor = LaurentSeries::monomial(
                    &self.ctx,
                    key.cbar.recip(),
                    -key.theta,
                    sigma_prec(poly) - key.theta,
                );
                let w: Vec<LaurentSeries> = poly.iter().map(|g| g.mul(&factor)).collect();
                let d = w.len();
                let mut out = vec![LaurentSeries::zero(&self.ctx, 0); d];
                for j in (0..d).rev() {
                    // f_j = σ⁻¹(w_j) − f_{j+1}
                    let mut t = w[j].sigma_pow(-1);
                    if j + 1 < d {
                        t = t.sub(&out[j + 1]);
                    }
                    out[j] = t;
                }
                (key.clone(), out)
            })
            .collect();
        SymbolElement::merged(&self.ctx, parts)
    }

    pub fn sigma_pow(&self, k: i64) -> Self {
        let mut cur = self.clone();
        for _ in 0..k.unsigned_abs() {
            cur = if k > 0 { cur.sigma() } else { cur.sigma_inverse() };
        }
        cur
    }

    /// Equality of all coefficient series to precision.
    pub fn equals(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero_to_prec()
    }

    /// Growth classes of every nonzero coefficient series.
    pub fn component_growth(&self) -> Result<Vec<GrowthClass>> {
        let mut out = Vec::new();
        for poly in self.components.values() {
            for f in poly {
                if !f.is_zero_to_prec() {
                    out.push(factor::growth_class(f)?);
                }
            }
        }
        Ok(out)
    }
}

fn sigma_prec(poly: &[LaurentSeries]) -> i64 {
    poly.iter().map(|f| f.prec()).max().unwrap_or(0)
}

/// Binomial-basis product:
/// `l^(i)·l^(j) = Σ_{k=max(i,j)}^{i+j} C(k,i)·C(i,i+j−k)·l^(k)`.
fn lq_mul(p1: &[LaurentSeries], p2: &[LaurentSeries]) -> Vec<LaurentSeries> {
    if p1.is_empty() || p2.is_empty() {
        return vec![];
    }
    let ctx = p1[0].ctx().clone();
    let dmax = p1.len() + p2.len() - 2;
    let prec = p1
        .iter()
        .chain(p2.iter())
        .map(|f| f.prec())
        .min()
        .unwrap_or(0);
    let mut out = vec![LaurentSeries::zero(&ctx, prec); dmax + 1];
    for (i, a) in p1.iter().enumerate() {
        if a.is_zero_to_prec() {
            continue;
        }
        for (j, b) in p2.iter().enumerate() {
            if b.is_zero_to_prec() {
                continue;
            }
            let ab = a.mul(b);
            for k in i.max(j)..=i + j {
                let coeff = binomial(k as u64, i as u64) * binomial(i as u64, (i + j - k) as u64);
                if coeff.is_zero() {
                    continue;
                }
                out[k] = out[k].add(&ab.scale(&coeff));
            }
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    let mut acc = Scalar::one();
    for i in 0..k {
        acc = acc * Scalar::from_int((n - i) as i64) / Scalar::from_int((i + 1) as i64);
    }
    acc
}

/// Applies an operator to a symbol element: `P·s = Σ a_k · σ_q^k(s)`.
pub fn apply_symbol(p: &OrePoly, s: &SymbolElement) -> SymbolElement {
    let mut acc = SymbolElement::zero(s.ctx());
    for (k, a) in p.terms() {
        acc = acc.add(&s.sigma_pow(k).scale_series(a));
    }
    acc
}

/// Solves `(σ_q − 1)·f = g` on polynomials in `l_q` over K, by the exact
/// triangular back-substitution; the free additive constant is fixed to 0.
/// Raises the l_q-degree by one exactly when the top coefficient of `g` has
/// a nonzero constant term.
pub fn q_integrate_lq(ctx: &Ctx, g: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
    let g = trim_lq(g.to_vec());
    if g.is_empty() {
        return Ok(vec![]);
    }
    let d = g.len() - 1;
    let prec = g.iter().map(|f| f.prec()).min().unwrap_or(0);
    let mut f = vec![LaurentSeries::zero(ctx, prec); d + 2];
    // Top: f_{d+1} is the constant π0(g_d).
    f[d + 1] = LaurentSeries::constant(ctx, g[d].pi0()?, prec);
    for i in (0..=d).rev() {
        let rhs = g[i].sub(&f[i + 1].sigma_pow(1));
        let integral = rhs.minus_constant()?.q_integrate()?;
        let constant = if i > 0 { g[i - 1].pi0()? } else { Scalar::zero() };
        f[i] = integral.add(&LaurentSeries::constant(ctx, constant, prec));
    }
    Ok(trim_lq(f))
}

/// Solves `(c·σ − 1) f = g` on K when `c ∉ q^Z`: coefficientwise
/// `f_k = g_k / (c·q^k − 1)`.
fn solve_diagonal(ctx: &Ctx, c: &Scalar, g: &LaurentSeries) -> LaurentSeries {
    let one = Scalar::one();
    let terms: Vec<(i64, Scalar)> = g
        .terms()
        .map(|(k, a)| (k, a / &(c * &ctx.q_pow(k) - one.clone())))
        .collect();
    LaurentSeries::from_terms(ctx, g.prec(), &terms)
}

/// Solves `(c·z^μ·σ − 1) f = g` on K for `μ ≠ 0` by the ascending
/// coefficient recursion; unique in formal Laurent series.
fn solve_triangular(ctx: &Ctx, c: &Scalar, mu: i64, g: &LaurentSeries) -> LaurentSeries {
    if g.is_zero_to_prec() {
        return LaurentSeries::zero(ctx, g.prec() + mu.max(0));
    }
    let v = g.v0().unwrap();
    if mu > 0 {
        // f_m = c·q^(m−μ)·f_{m−μ} − g_m, ascending from v0(g).
        let prec = g.prec();
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for m in v..prec {
            let prev = coeffs
                .get(&(m - mu))
                .cloned()
                .unwrap_or_else(Scalar::zero);
            let gm = if m < g.prec() { g.coeff(m).unwrap() } else { Scalar::zero() };
            let fm = c * &ctx.q_pow(m - mu) * prev - gm;
            if !fm.is_zero() {
                coeffs.insert(m, fm);
            }
        }
        LaurentSeries::from_terms(ctx, prec, &coeffs.into_iter().collect::<Vec<_>>())
    } else {
        // f_{m'} = (f_{m'+μ} + g_{m'+μ}) / (c·q^(m')), ascending; the
        // solution starts at v0(g) − μ.
        let am = -mu;
        let prec = g.prec() + am;
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for m in (v + am)..prec {
            let prev = coeffs
                .get(&(m - am))
                .cloned()
                .unwrap_or_else(Scalar::zero);
            let gm = g.coeff(m - am).unwrap();
            let fm = (prev + gm) / (c * &ctx.q_pow(m));
            if !fm.is_zero() {
                coeffs.insert(m, fm);
            }
        }
        LaurentSeries::from_terms(ctx, prec, &coeffs.into_iter().collect::<Vec<_>>())
    }
}

/// Solves `(c·z^μ·σ − 1) F = G` on `K[l_q]` for `(c̄, μ) ≠ (1, 0)`, by the
/// top-down triangular reduction to the K-solvers.
fn solve_lq_nonresonant(
    ctx: &Ctx,
    c: &Scalar,
    cbar_is_one: bool,
    mu: i64,
    g: &[LaurentSeries],
) -> Vec<LaurentSeries> {
    let d = g.len();
    let mut f = vec![LaurentSeries::zero(ctx, sigma_prec(g)); d];
    for i in (0..d).rev() {
        // (c z^μ σ − 1) f_i = g_i − c z^μ σ(f_{i+1})
        let mut rhs = g[i].clone();
        if i + 1 < d {
            let t = f[i + 1]
                .sigma_pow(1)
                .shift(mu)
                .scale(c);
            rhs = rhs.sub(&t);
        }
        f[i] = if mu == 0 {
            debug_assert!(!cbar_is_one);
            solve_diagonal(ctx, c, &rhs)
        } else {
            solve_triangular(ctx, c, mu, &rhs)
        };
    }
    trim_lq(f)
}

/// Solves `(d·z^ν·σ − 1)·f = g` in the symbol algebra.
///
/// Componentwise on `(c̄, θ)`: the conjugation
/// `(d z^ν σ − 1)(u Θ^θ F) = u Θ^θ (c̄ d z^(θ+ν) σ − 1) F` reduces to the
/// twisted operator with `c' = c̄·d`, `μ' = θ + ν` on `K[l_q]`. In convergent
/// mode components with `μ' > 0` raise [`Error::DivergentDirection`]. When
/// `c'` lands in `q^Z` at `μ' = 0` the kernel direction is crossed with a
/// q-integration that raises the l_q-degree; free constants are fixed to 0.
pub fn phi_solve(d: &Scalar, nu: i64, g: &SymbolElement, mode: Mode) -> Result<SymbolElement> {
    let ctx = g.ctx().clone();
    let mut parts: Vec<(SymbolKey, Vec<LaurentSeries>)> = Vec::new();
    for (key, poly) in g.components() {
        let cprime = &key.cbar * d;
        let muprime = key.theta + nu;
        if mode == Mode::Convergent && muprime > 0 {
            return Err(Error::DivergentDirection(muprime));
        }
        let (lambda, cbar_prime) = ctx.decompose(&cprime)?;
        let solved = if muprime == 0 && cbar_prime.is_one() {
            // Φ_{q^λ, 0}: conjugate by z^λ to (σ − 1) and q-integrate.
            let shifted: Vec<LaurentSeries> = poly.iter().map(|f| f.shift(lambda)).collect();
            let integrated = q_integrate_lq(&ctx, &shifted)?;
            integrated.into_iter().map(|f| f.shift(-lambda)).collect()
        } else {
            solve_lq_nonresonant(&ctx, &cprime, cbar_prime.is_one(), muprime, poly)
        };
        parts.push((key.clone(), solved));
    }
    Ok(SymbolElement::merged(&ctx, parts))
}

/// Solves `T(y) = g` for a twisted first-order factor
/// `T = (z^(−μ)σ − c)·u⁻¹`: `y = u · Φ⁻¹_{c⁻¹,−μ}(c⁻¹·g)`.
fn solve_through(t: &TwistedFactor, g: &SymbolElement, mode: Mode) -> Result<SymbolElement> {
    let cinv = t.exponent.recip();
    let x = phi_solve(&cinv, -t.slope, &g.scale_scalar(&cinv), mode)?;
    Ok(x.scale_series(&t.twist))
}

/// The symbol solution of a single twisted factor `(z^(−μ)σ − c)·u⁻¹`:
/// `u·e_{q,c}·Θ^μ`.
fn step_symbol(t: &TwistedFactor) -> Result<SymbolElement> {
    let ctx = t.twist.ctx().clone();
    SymbolElement::character(&ctx, &t.exponent, t.slope, vec![t.twist.clone()])
}

/// An ordered solution basis with the index of the first-order factor each
/// solution came from (leftmost factor = 0).
#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub solutions: Vec<SymbolElement>,
    pub provenance: Vec<usize>,
}

fn basis_from_steps(steps: &[TwistedFactor], mode: Mode) -> Result<SolutionBasis> {
    let n = steps.len();
    let mut solutions: Vec<SymbolElement> = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for j in (0..n).rev() {
        let mut f = step_symbol(&steps[j])?;
        for t in &steps[j + 1..] {
            f = solve_through(t, &f, mode)?;
        }
        solutions.push(f);
        provenance.push(j);
    }
    solutions.reverse();
    provenance.reverse();
    Ok(SolutionBasis {
        solutions,
        provenance,
    })
}

/// Builds `n = deg_abs(P)` independent formal solutions through the full
/// first-order factorization, solving each leftmost symbol through the right
/// cofactor chain. Every returned element is verified to be annihilated by
/// `P` to precision, and the q-Wronskian is checked nonzero.
pub fn formal_basis(p: &OrePoly) -> Result<SolutionBasis> {
    let fac = factor::full_factorization(p, Mode::Formal)?;
    let basis = basis_from_steps(&fac.steps, Mode::Formal)?;
    verify_basis(p, &basis)?;
    Ok(basis)
}

/// Adams' convergent solutions: exactly `r_P(μ_k)` solutions attached to the
/// first (smallest) slope `μ_k`, built from the pure right factor of the
/// convergent factorization.
pub fn adams_solutions(p: &OrePoly) -> Result<SolutionBasis> {
    let nf = newton::newton_function(p)?;
    let mu = nf
        .first_slope()
        .ok_or_else(|| Error::PreconditionViolated("operator has no slopes".into()))?;
    if !mu.is_integer() {
        return Err(Error::PreconditionViolated(format!(
            "non-integral first slope {mu}: ramify first"
        )));
    }
    let fac = factor::factor_slope(p, *mu.numer(), Mode::Convergent)?;
    let basis = basis_from_steps(&fac.steps, Mode::Convergent)?;
    verify_basis(p, &basis)?;
    Ok(basis)
}

fn verify_basis(p: &OrePoly, basis: &SolutionBasis) -> Result<()> {
    for (i, sol) in basis.solutions.iter().enumerate() {
        if sol.is_zero_to_prec() {
            return Err(Error::BasisVerificationFailed(format!(
                "solution {i} is zero to precision"
            )));
        }
        let image = apply_symbol(p, sol);
        if !image.is_zero_to_prec() {
            return Err(Error::BasisVerificationFailed(format!(
                "P does not annihilate solution {i}"
            )));
        }
    }
    let w = q_wronskian(&basis.solutions)?;
    if w.is_zero_to_prec() {
        return Err(Error::BasisVerificationFailed(
            "q-Wronskian vanishes to precision".into(),
        ));
    }
    Ok(())
}

/// The q-Wronskian (Casoratian): the determinant of the σ_q-iterate matrix
/// `(σ_q^i f_j)`, expanded in the symbol algebra.
pub fn q_wronskian(fs: &[SymbolElement]) -> Result<SymbolElement> {
    assert!(!fs.is_empty(), "q-Wronskian of an empty family");
    let n = fs.len();
    let ctx = fs[0].ctx().clone();
    let mut rows: Vec<Vec<SymbolElement>> = Vec::with_capacity(n);
    let mut cur: Vec<SymbolElement> = fs.to_vec();
    for _ in 0..n {
        rows.push(cur.clone());
        cur = cur.iter().map(|f| f.sigma()).collect();
    }
    det_symbol(&ctx, &rows)
}

fn det_symbol(ctx: &Ctx, m: &[Vec<SymbolElement>]) -> Result<SymbolElement> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = SymbolElement::zero(ctx);
    for j in 0..n {
        if m[0][j].is_zero_to_prec() {
            continue;
        }
        let minor: Vec<Vec<SymbolElement>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let cof = m[0][j].mul(&det_symbol(ctx, &minor)?)?;
        acc = if j % 2 == 0 { acc.add(&cof) } else { acc.sub(&cof) };
    }
    Ok(acc)
}

impl fmt::Display for SymbolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, poly) in &self.components {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut prefix = Vec::new();
            if !key.cbar.is_one() {
                prefix.push(format!("e[{}]", key.cbar));
            }
            if key.theta != 0 {
                prefix.push(format!("Th^{}", key.theta));
            }
            let prefix = prefix.join("*");
            let mut terms = Vec::new();
            for (k, c) in poly.iter().enumerate() {
                if c.is_zero_to_prec() {
                    continue;
                }
                let body = format!("({c})");
                if k == 0 {
                    terms.push(body);
                } else if k == 1 {
                    terms.push(format!("{body}*lq"));
                } else {
                    terms.push(format!("{body}*lq^({k})"));
                }
            }
            let body = terms.join(" + ");
            if prefix.is_empty() {
                write!(f, "{body}")?;
            } else if terms.len() == 1 && poly.len() == 1 && poly[0].is_one_to_prec() {
                write!(f, "{prefix}")?;
            } else {
                write!(f, "{prefix}*[{body}]")?;
            }
        }
        Ok(())
    }
}
