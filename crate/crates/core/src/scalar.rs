//! Exact rational scalars and the q-arithmetic context they live in.
//!
//! Every computation happens relative to a [`QContext`]: a fixed rational q
//! with |q| > 1, stored together with a base root `qbase` such that
//! `q = qbase^qexp`. Ramification to level `l` is exact precisely when `l`
//! divides `qexp`, in which case `q_l = qbase^(qexp/l)` satisfies
//! `q_l^l = q` exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational number. Arithmetic never rounds.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as an exact rational. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Scalar {
        Scalar(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero; callers guard.
    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "recip of zero scalar");
        Scalar(self.0.recip())
    }

    /// Integer power by repeated squaring. Panics on `0^e` with `e < 0`.
    pub fn pow(&self, e: i64) -> Scalar {
        if e == 0 {
            return Scalar::one();
        }
        let (mut base, mut e) = if e < 0 {
            (self.recip().0, e.unsigned_abs())
        } else {
            (self.0.clone(), e as u64)
        };
        let mut acc = BigRational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Scalar(acc)
    }

    pub fn cmp_abs(&self, other: &Scalar) -> Ordering {
        self.0.abs().cmp(&other.0.abs())
    }

    /// Approximate value as f64, for reporting only.
    pub fn to_f64(&self) -> f64 {
        let n = big_to_f64(self.0.numer());
        let d = big_to_f64(self.0.denom());
        n / d
    }
}

fn big_to_f64(b: &BigInt) -> f64 {
    // Good enough for reports: saturates far beyond f64 range.
    let s = b.to_string();
    s.parse::<f64>().unwrap_or(if b.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(&self.0 $op &rhs.0)
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0 $op rhs.0)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0 $op &rhs.0)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        Scalar(&self.0 / &rhs.0)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        (&self).div(&rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Shared handle to a q-context.
pub type Ctx = Arc<QContext>;

/// The ambient q-arithmetic: `q = qbase^qexp` with |q| > 1, plus the default
/// z-adic working precision.
#[derive(Clone)]
pub struct QContext {
    qbase: Scalar,
    qexp: u32,
    q: Scalar,
    default_prec: i64,
}

impl PartialEq for QContext {
    fn eq(&self, other: &Self) -> bool {
        self.qbase == other.qbase && self.qexp == other.qexp
    }
}

impl Eq for QContext {}

impl QContext {
    /// Builds a context with `q = qbase^qexp`. Requires `qexp >= 1`,
    /// `default_prec >= 1` and |q| > 1.
    pub fn new(qbase: Scalar, qexp: u32, default_prec: i64) -> Result<Ctx> {
        if qexp == 0 || default_prec < 1 {
            return Err(Error::PreconditionViolated(
                "qexp and default_prec must be positive".into(),
            ));
        }
        let q = qbase.pow(qexp as i64);
        if q.cmp_abs(&Scalar::one()) != Ordering::Greater {
            return Err(Error::PreconditionViolated(format!(
                "|q| must exceed 1, got q = {q}"
            )));
        }
        Ok(Arc::new(QContext {
            qbase,
            qexp,
            q,
            default_prec,
        }))
    }

    /// The default context: `q = 2^12`, giving exact q-roots at every
    /// ramification level dividing 12, with working precision 32.
    pub fn standard() -> Ctx {
        QContext::new(Scalar::from_int(2), 12, 32).expect("standard context is valid")
    }

    /// A context with `q` itself as base (no ramification headroom).
    pub fn simple(q: i64, prec: i64) -> Ctx {
        QContext::new(Scalar::from_int(q), 1, prec).expect("valid simple context")
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn qbase(&self) -> &Scalar {
        &self.qbase
    }

    pub fn qexp(&self) -> u32 {
        self.qexp
    }

    pub fn default_prec(&self) -> i64 {
        self.default_prec
    }

    /// `q^k` for any integer k.
    pub fn q_pow(&self, k: i64) -> Scalar {
        self.q.pow(k)
    }

    /// The ramified context at level `l`: variable `z_l` with `z_l^l = z` and
    /// automorphism `σ_{q_l}` with `q_l = qbase^(qexp/l)`.
    pub fn ramify(&self, l: u32) -> Result<Ctx> {
        if l == 0 || self.qexp % l != 0 {
            return Err(Error::ExactRootUnavailable {
                level: l,
                budget: self.qexp,
            });
        }
        QContext::new(
            self.qbase.clone(),
            self.qexp / l,
            self.default_prec.saturating_mul(l as i64),
        )
    }

    /// Writes `c = q^ε · c̄` with `1 <= |c̄| < |q|`. Unique on nonzero input.
    pub fn decompose(&self, c: &Scalar) -> Result<(i64, Scalar)> {
        if c.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let one = Scalar::one();
        let mut eps = 0i64;
        let mut cbar = c.clone();
        while cbar.cmp_abs(&self.q) != Ordering::Less {
            cbar = cbar / self.q.clone();
            eps += 1;
        }
        while cbar.cmp_abs(&one) == Ordering::Less {
            cbar = cbar * self.q.clone();
            eps -= 1;
        }
        Ok((eps, cbar))
    }
}

impl fmt::Debug for QContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QContext(q = {}^{} = {}, prec {})",
            self.qbase, self.qexp, self.q, self.default_prec
        )
    }
}

/// Panics unless both handles denote the same q-context.
pub(crate) fn assert_same_ctx(a: &Ctx, b: &Ctx) {
    assert!(
        Arc::ptr_eq(a, b) || **a == **b,
        "mixed q-contexts: {:?} vs {:?}",
        a,
        b
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_identity_case() {
        let ctx = QContext::simple(2, 8);
        let (eps, cbar) = ctx.decompose(&Scalar::from_int(1)).unwrap();
        assert_eq!(eps, 0);
        assert!(cbar.is_one());
    }

    #[test]
    fn decompose_three_at_q_two() {
        let ctx = QContext::simple(2, 8);
        let (eps, cbar) = ctx.decompose(&Scalar::from_int(3)).unwrap();
        assert_eq!(eps, 1);
        assert_eq!(cbar, Scalar::from_ratio(3, 2));
    }

    #[test]
    fn decompose_pure_power() {
        let ctx = QContext::simple(2, 8);
        let (eps, cbar) = ctx.decompose(&ctx.q_pow(3)).unwrap();
        assert_eq!(eps, 3);
        assert!(cbar.is_one());
    }

    #[test]
    fn decompose_recomposes_exactly() {
        let ctx = QContext::simple(2, 8);
        for (n, d) in [(1, 1), (-7, 3), (5, 8), (1, 100), (4096, 1), (-1, 1)] {
            let c = Scalar::from_ratio(n, d);
            let (eps, cbar) = ctx.decompose(&c).unwrap();
            assert_eq!(ctx.q_pow(eps) * cbar.clone(), c, "recompose {n}/{d}");
            assert!(cbar.cmp_abs(&Scalar::one()) != Ordering::Less);
            assert!(cbar.cmp_abs(ctx.q()) == Ordering::Less);
        }
    }

    #[test]
    fn decompose_rejects_zero() {
        let ctx = QContext::simple(2, 8);
        assert_eq!(ctx.decompose(&Scalar::zero()), Err(Error::ZeroScalar));
    }

    #[test]
    fn ramify_budget() {
        let ctx = QContext::standard();
        let c2 = ctx.ramify(2).unwrap();
        assert_eq!(c2.q_pow(2), *ctx.q());
        assert!(ctx.ramify(5).is_err());
    }

    #[test]
    fn scalar_pow_negative() {
        let s = Scalar::from_ratio(2, 3);
        assert_eq!(s.pow(-2), Scalar::from_ratio(9, 4));
    }
}
