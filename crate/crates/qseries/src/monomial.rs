//! Parameter specializations of the form c * q^e, and the base-change map
//! that realizes "replace q by q^k" without substituting into truncated
//! series.

use crate::error::{QError, QResult};
use crate::number::CycloRat;
use crate::series::{LaurentSeries, SeriesContext};
use num::rational::Rational64;
use num::Zero;
use std::fmt;

/// A parameter value c * q^e with exact cyclotomic-rational c != 0 and a
/// grid-rational exponent e. This is how the symbols a, b, c, d, e, u, v,
/// y, z of the identity machinery are instantiated.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamMonomial {
    coeff: CycloRat,
    exp: Rational64,
}

impl ParamMonomial {
    pub fn new(coeff: CycloRat, exp: Rational64) -> QResult<Self> {
        if coeff.is_zero() {
            return Err(QError::InvalidParameter("monomial coefficient must be nonzero".into()));
        }
        Ok(ParamMonomial { coeff, exp })
    }

    /// q^e with coefficient one (m = 1 tagging; retagged on use).
    pub fn q_pow(exp: Rational64) -> Self {
        ParamMonomial { coeff: CycloRat::one(1), exp }
    }

    pub fn q_int(exp: i64) -> Self {
        Self::q_pow(Rational64::from_integer(exp))
    }

    pub fn constant(c: CycloRat) -> QResult<Self> {
        Self::new(c, Rational64::zero())
    }

    pub fn one() -> Self {
        ParamMonomial { coeff: CycloRat::one(1), exp: Rational64::zero() }
    }

    pub fn coeff(&self) -> &CycloRat {
        &self.coeff
    }

    pub fn exp(&self) -> Rational64 {
        self.exp
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exp.is_zero()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = unify(&self.coeff, &rhs.coeff);
        ParamMonomial { coeff: a.mul(&b), exp: self.exp + rhs.exp }
    }

    pub fn div(&self, rhs: &Self) -> QResult<Self> {
        let (a, b) = unify(&self.coeff, &rhs.coeff);
        Ok(ParamMonomial { coeff: a.div(&b)?, exp: self.exp - rhs.exp })
    }

    pub fn neg(&self) -> Self {
        ParamMonomial { coeff: self.coeff.neg(), exp: self.exp }
    }

    pub fn inv(&self) -> QResult<Self> {
        Ok(ParamMonomial { coeff: self.coeff.inv()?, exp: -self.exp })
    }

    pub fn pow(&self, k: i64) -> QResult<Self> {
        Ok(ParamMonomial { coeff: self.coeff.pow(k)?, exp: self.exp * Rational64::from_integer(k) })
    }

    /// Square root: halves the exponent and takes an exact coefficient root.
    /// Whether the halved exponent is representable is decided by the grid
    /// of the context it is eventually used in.
    pub fn sqrt(&self) -> QResult<Self> {
        Ok(ParamMonomial { coeff: self.coeff.sqrt()?, exp: self.exp / Rational64::from_integer(2) })
    }

    /// Shift by an integer power of q^s: c * q^(e + k*s).
    pub fn times_q(&self, k: i64, step: Rational64) -> Self {
        ParamMonomial { coeff: self.coeff.clone(), exp: self.exp + Rational64::from_integer(k) * step }
    }

    /// Realize the monomial as a truncated series in the given context.
    pub fn series(&self, ctx: &SeriesContext) -> QResult<LaurentSeries> {
        LaurentSeries::monomial(ctx, &self.coeff.retag(ctx.cyclo_order())?, self.exp)
    }

    /// Multiply a series by this monomial exactly (shift and scale); unlike
    /// `series` + `mul`, this cannot lose precision when the exponent is
    /// large, so term generators use it for their z^n-style powers.
    pub fn apply_to(&self, s: &LaurentSeries) -> QResult<LaurentSeries> {
        s.mul_exact_monomial(&self.coeff, self.exp)
    }

    /// 1 - c*q^e as a truncated series.
    pub fn one_minus(&self, ctx: &SeriesContext) -> QResult<LaurentSeries> {
        Ok(LaurentSeries::one(ctx).sub(&self.series(ctx)?))
    }
}

/// Bring two coefficients into a common cyclotomic field (one of them must
/// be rational when the orders differ).
fn unify(a: &CycloRat, b: &CycloRat) -> (CycloRat, CycloRat) {
    if a.order() == b.order() {
        return (a.clone(), b.clone());
    }
    if let Ok(br) = b.retag(a.order()) {
        return (a.clone(), br);
    }
    let ar = a
        .retag(b.order())
        .expect("monomial coefficients live in incompatible cyclotomic fields");
    (ar, b.clone())
}

impl fmt::Display for ParamMonomial {
    /// Compact form used by reports and the CLI: `-1*q^2`, `3/2*q^(1/2)`, `q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeff.to_string();
        if self.exp.is_zero() {
            return write!(f, "{c}");
        }
        if c != "1" {
            if c.contains('+') || c[1..].contains('-') {
                write!(f, "({c})*")?;
            } else {
                write!(f, "{c}*")?;
            }
        }
        if self.exp == Rational64::from_integer(1) {
            write!(f, "q")
        } else if self.exp.is_integer() {
            write!(f, "q^{}", self.exp.numer())
        } else {
            write!(f, "q^({})", self.exp)
        }
    }
}

impl fmt::Debug for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The ambient substitution q -> q^scale. Structural exponents of a formula
/// pass through `mono`/`q`; parameters already expressed in final
/// coordinates are used as-is. Base changes are performed here, at
/// construction time, never on an existing truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct World {
    scale: Rational64,
}

impl World {
    pub fn identity() -> Self {
        World { scale: Rational64::from_integer(1) }
    }

    pub fn new(scale: Rational64) -> QResult<Self> {
        if scale <= Rational64::zero() {
            return Err(QError::InvalidParameter("base-change scale must be positive".into()));
        }
        Ok(World { scale })
    }

    pub fn scale(&self) -> Rational64 {
        self.scale
    }

    /// Structural monomial c * q^(e * scale).
    pub fn mono(&self, c: CycloRat, e: Rational64) -> QResult<ParamMonomial> {
        ParamMonomial::new(c, e * self.scale)
    }

    /// Structural power of q.
    pub fn q(&self, e: Rational64) -> ParamMonomial {
        ParamMonomial::q_pow(e * self.scale)
    }

    pub fn q_int(&self, e: i64) -> ParamMonomial {
        self.q(Rational64::from_integer(e))
    }

    /// Rescale an own-coordinate monomial into final coordinates.
    pub fn lift(&self, m: &ParamMonomial) -> ParamMonomial {
        ParamMonomial { coeff: m.coeff.clone(), exp: m.exp * self.scale }
    }
}
