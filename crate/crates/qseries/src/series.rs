//! Truncated Laurent series in q over Q(zeta_m), on a fractional exponent grid.
//!
//! A series stores finitely many nonzero coefficients indexed by exponents in
//! (1/D)*Z and asserts exact knowledge of every coefficient strictly below its
//! precision bound. The bound starts at the context truncation order and is
//! propagated honestly through arithmetic, so a comparison below the bound is
//! an exact statement about the underlying formal series. No floating point
//! appears anywhere.

use crate::error::{QError, QResult};
use crate::number::CycloRat;
use num::rational::Rational64;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Sentinel for "+infinity" on the scaled exponent axis (zero series
/// valuation, exact-polynomial precision). Kept well below i64::MAX so
/// sums of two sentinels cannot overflow.
pub const EXP_INF: i64 = i64::MAX / 4;

/// Ambient parameters of a computation: truncation order, exponent grid
/// denominator D and cyclotomic order m.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SeriesContext {
    /// Truncation order multiplied by `grid_den` (an integer on the scaled axis).
    trunc: i64,
    grid_den: u32,
    cyclo_order: u32,
}

impl SeriesContext {
    /// D = 1, m = 1 context truncated at the given integer order.
    pub fn plain(order: i64) -> Self {
        Self::new(Rational64::from_integer(order), 1, 1).expect("valid plain context")
    }

    pub fn new(order: Rational64, grid_den: u32, cyclo_order: u32) -> QResult<Self> {
        if grid_den == 0 {
            return Err(QError::InvalidParameter("grid denominator must be >= 1".into()));
        }
        CycloRat::check_order(cyclo_order)?;
        let trunc = scale_exponent(order, grid_den).ok_or_else(|| {
            QError::Grid(format!("truncation order {order} not on grid with denominator {grid_den}"))
        })?;
        if trunc <= 0 {
            return Err(QError::InvalidParameter("truncation order must be positive".into()));
        }
        Ok(SeriesContext { trunc, grid_den, cyclo_order })
    }

    pub fn truncation_order(&self) -> Rational64 {
        Rational64::new(self.trunc, self.grid_den as i64)
    }

    pub fn trunc_scaled(&self) -> i64 {
        self.trunc
    }

    pub fn grid_den(&self) -> u32 {
        self.grid_den
    }

    pub fn cyclo_order(&self) -> u32 {
        self.cyclo_order
    }

    /// Scale a grid rational onto the integer exponent axis.
    pub fn scale(&self, e: Rational64) -> QResult<i64> {
        scale_exponent(e, self.grid_den).ok_or_else(|| {
            QError::Grid(format!("exponent {e} not on grid with denominator {}", self.grid_den))
        })
    }

    pub fn unscale(&self, k: i64) -> Rational64 {
        Rational64::new(k, self.grid_den as i64)
    }

    pub fn zero_coeff(&self) -> CycloRat {
        CycloRat::zero(self.cyclo_order)
    }

    pub fn one_coeff(&self) -> CycloRat {
        CycloRat::one(self.cyclo_order)
    }
}

fn scale_exponent(e: Rational64, d: u32) -> Option<i64> {
    let scaled = e * Rational64::from_integer(d as i64);
    if scaled.is_integer() {
        Some(scaled.to_integer())
    } else {
        None
    }
}

/// Outcome of an exact comparison of two series below a given order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Mismatch { exponent: Rational64, lhs: CycloRat, rhs: CycloRat },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// A truncated Laurent series. Immutable after construction; all operations
/// return fresh values, so sharing across threads is safe.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    ctx: SeriesContext,
    /// Scaled exponent -> nonzero coefficient. Every key is < `prec`.
    terms: BTreeMap<i64, CycloRat>,
    /// Coefficients with scaled exponent < `prec` are exact.
    prec: i64,
}

impl LaurentSeries {
    pub fn zero(ctx: &SeriesContext) -> Self {
        LaurentSeries { ctx: *ctx, terms: BTreeMap::new(), prec: ctx.trunc }
    }

    pub fn one(ctx: &SeriesContext) -> Self {
        Self::constant(ctx, ctx.one_coeff())
    }

    pub fn constant(ctx: &SeriesContext, c: CycloRat) -> Self {
        let mut s = Self::zero(ctx);
        if !c.is_zero() && s.prec > 0 {
            s.terms.insert(0, c);
        }
        s
    }

    /// The series c * q^e, truncated at the context order. Exponents at or
    /// beyond the truncation order produce the zero series.
    pub fn monomial(ctx: &SeriesContext, c: &CycloRat, e: Rational64) -> QResult<Self> {
        let k = ctx.scale(e)?;
        let mut s = Self::zero(ctx);
        if !c.is_zero() && k < s.prec {
            s.terms.insert(k, c.retag(ctx.cyclo_order)?);
        }
        Ok(s)
    }

    pub fn context(&self) -> &SeriesContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent carrying a nonzero coefficient; None for the zero
    /// series (valuation +infinity).
    pub fn valuation(&self) -> Option<Rational64> {
        self.terms.keys().next().map(|&k| self.ctx.unscale(k))
    }

    fn val_scaled(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(EXP_INF)
    }

    /// Lower bound for the true valuation: first known term, or the
    /// precision bound when nothing nonzero is known yet.
    fn val_floor(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.prec)
    }

    /// Exact precision bound: coefficients below this order are trusted.
    pub fn precision(&self) -> Rational64 {
        self.ctx.unscale(self.prec.min(self.ctx.trunc))
    }

    /// Everything known about the series lies at or above this order: the
    /// first stored term, or the precision bound when nothing is stored.
    /// A sum's stopping rule treats a term as escaped once this reaches
    /// the truncation order.
    pub fn support_floor(&self) -> Rational64 {
        self.ctx.unscale(self.val_floor().min(self.ctx.trunc))
    }

    pub fn coeff(&self, e: Rational64) -> QResult<CycloRat> {
        let k = self.ctx.scale(e)?;
        Ok(self.terms.get(&k).cloned().unwrap_or_else(|| self.ctx.zero_coeff()))
    }

    /// Iterate (exponent, coefficient) in ascending exponent order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (Rational64, &CycloRat)> + '_ {
        self.terms.iter().map(|(&k, c)| (self.ctx.unscale(k), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn assert_compatible(&self, rhs: &Self) {
        assert_eq!(self.ctx, rhs.ctx, "series built in different contexts");
    }

    fn normalized(mut self) -> Self {
        let cap = self.prec.min(self.ctx.trunc);
        self.prec = cap;
        self.terms.retain(|&k, c| k < cap && !c.is_zero());
        self
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        out.prec = self.prec.min(rhs.prec);
        for (&k, c) in &rhs.terms {
            let slot = out.terms.entry(k).or_insert_with(|| self.ctx.zero_coeff());
            *slot = slot.add(c);
        }
        out.normalized()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.negate())
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scalar_mul(&self, c: &CycloRat) -> Self {
        if c.is_zero() {
            let mut z = Self::zero(&self.ctx);
            z.prec = self.prec;
            return z;
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c);
        }
        out.normalized()
    }

    /// Multiply by q^e (exact shift of the exponent axis).
    pub fn shift(&self, e: Rational64) -> QResult<Self> {
        let k = self.ctx.scale(e)?;
        let mut out = Self::zero(&self.ctx);
        out.prec = sat_add(self.prec, k);
        for (&p, c) in &self.terms {
            out.terms.insert(p + k, c.clone());
        }
        Ok(out.normalized())
    }

    /// Full convolution of stored terms, truncated to the honest precision
    /// min(prec_a + val_b, prec_b + val_a).
    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_compatible(rhs);
        let prec = sat_add(self.prec, rhs.val_floor()).min(sat_add(rhs.prec, self.val_floor()));
        let mut out = Self::zero(&self.ctx);
        out.prec = prec;
        let cap = prec.min(self.ctx.trunc);
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &rhs.terms {
                let k = ka + kb;
                if k >= cap {
                    break; // rhs keys ascend, so later products only grow
                }
                let delta = ca.mul(cb);
                if delta.is_zero() {
                    continue;
                }
                let slot = out.terms.entry(k).or_insert_with(|| self.ctx.zero_coeff());
                *slot = slot.add(&delta);
            }
        }
        out.normalized()
    }

    /// Multiply by an exact monomial c*q^e: a shift plus a coefficient
    /// scale, with no precision loss beyond the truncation cap.
    pub fn mul_exact_monomial(&self, c: &CycloRat, e: Rational64) -> QResult<Self> {
        Ok(self.shift(e)?.scalar_mul(&c.retag(self.ctx.cyclo_order)?))
    }

    /// Multiply by the binomial (1 - c*q^e) in O(#terms).
    pub fn mul_binomial(&self, c: &CycloRat, e: Rational64) -> QResult<Self> {
        let shifted = self.shift(e)?.scalar_mul(c);
        Ok(self.sub(&shifted))
    }

    /// Divide by the binomial (1 - c*q^e) with e > 0, via the recurrence
    /// r[k] = s[k] + c*r[k-e]; O(width) per call.
    pub fn div_binomial(&self, c: &CycloRat, e: Rational64) -> QResult<Self> {
        let ke = self.ctx.scale(e)?;
        if ke <= 0 {
            return Err(QError::InvalidParameter(
                "div_binomial requires a positive exponent".into(),
            ));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let v = self.val_scaled();
        let cap = self.prec.min(self.ctx.trunc);
        let width = (cap - v).max(0) as usize;
        let mut dense: Vec<CycloRat> = vec![self.ctx.zero_coeff(); width];
        for (&k, coef) in &self.terms {
            dense[(k - v) as usize] = coef.clone();
        }
        let step = ke as usize;
        for i in 0..width {
            if i >= step {
                let add = dense[i - step].mul(c);
                if !add.is_zero() {
                    dense[i] = dense[i].add(&add);
                }
            }
        }
        let mut out = Self::zero(&self.ctx);
        out.prec = self.prec;
        for (i, coef) in dense.into_iter().enumerate() {
            if !coef.is_zero() {
                out.terms.insert(v + i as i64, coef);
            }
        }
        Ok(out.normalized())
    }

    /// Multiplicative inverse. The argument must have a nonzero coefficient
    /// somewhere below its precision (a unit of the Laurent ring).
    pub fn invert(&self) -> QResult<Self> {
        if self.is_zero() {
            return Err(QError::NotAUnit(
                "inverse of the zero series (or valuation beyond truncation)".into(),
            ));
        }
        let v = self.val_scaled();
        let lead = self.terms[&v].clone();
        let lead_inv = lead.inv()?;
        // a = lead * q^v * (1 + x); invert the unit part with the standard
        // power-series recurrence, then shift back.
        let width = ((self.prec.min(self.ctx.trunc) - v).max(1)) as usize;
        let mut a_dense: Vec<CycloRat> = vec![self.ctx.zero_coeff(); width];
        for (&k, c) in &self.terms {
            let idx = (k - v) as usize;
            if idx < width {
                a_dense[idx] = c.clone();
            }
        }
        let mut inv_dense: Vec<CycloRat> = vec![self.ctx.zero_coeff(); width];
        inv_dense[0] = lead_inv.clone();
        for k in 1..width {
            let mut acc = self.ctx.zero_coeff();
            for j in 1..=k {
                if a_dense[j].is_zero() || inv_dense[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&a_dense[j].mul(&inv_dense[k - j]));
            }
            if !acc.is_zero() {
                inv_dense[k] = acc.mul(&lead_inv).neg();
            }
        }
        let prec = sat_add(self.prec, -2 * v);
        let mut out = Self::zero(&self.ctx);
        out.prec = prec;
        for (i, c) in inv_dense.into_iter().enumerate() {
            if !c.is_zero() {
                out.terms.insert(i as i64 - v, c);
            }
        }
        Ok(out.normalized())
    }

    pub fn pow_int(&self, k: i64) -> QResult<Self> {
        if k < 0 {
            return self.invert()?.pow_int(-k);
        }
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    pub fn div(&self, rhs: &Self) -> QResult<Self> {
        Ok(self.mul(&rhs.invert()?))
    }

    /// Apply q -> zeta * q coefficient-wise: c*q^e becomes c*zeta^e*q^e.
    /// Exact on integer exponents; an error otherwise.
    pub fn twist(&self, zeta: &CycloRat) -> QResult<Self> {
        let d = self.ctx.grid_den as i64;
        let mut out = Self::zero(&self.ctx);
        out.prec = self.prec;
        for (&k, c) in &self.terms {
            if k % d != 0 {
                return Err(QError::Grid(format!(
                    "twist needs integer exponents, found {}",
                    self.ctx.unscale(k)
                )));
            }
            out.terms.insert(k, c.mul(&zeta.pow(k / d)?));
        }
        Ok(out.normalized())
    }

    /// Exact comparison below `order`. Errors when either operand does not
    /// hold enough precision to decide.
    pub fn equal_up_to(&self, rhs: &Self, order: Rational64) -> QResult<Comparison> {
        self.assert_compatible(rhs);
        let k = self.ctx.scale(order)?;
        let avail = self.prec.min(rhs.prec);
        if k > avail {
            return Err(QError::InsufficientPrecision {
                requested: order.to_string(),
                available: self.ctx.unscale(avail).to_string(),
            });
        }
        let zero = self.ctx.zero_coeff();
        let mut exps: Vec<i64> = self.terms.keys().chain(rhs.terms.keys()).copied().collect();
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            if e >= k {
                break;
            }
            let a = self.terms.get(&e).unwrap_or(&zero);
            let b = rhs.terms.get(&e).unwrap_or(&zero);
            if a != b {
                return Ok(Comparison::Mismatch {
                    exponent: self.ctx.unscale(e),
                    lhs: a.clone(),
                    rhs: b.clone(),
                });
            }
        }
        Ok(Comparison::Equal)
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(EXP_INF)
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (e, c) in self.iter_terms() {
                let s = c.to_string();
                let (sign, mag) = match s.strip_prefix('-') {
                    // Only pull a leading '-' out of single-term coefficients.
                    Some(rest) if !rest.contains('+') && !rest.contains('-') => ("-", rest.to_string()),
                    _ => ("+", if s.contains('+') || s[1..].contains('-') { format!("({s})") } else { s }),
                };
                if first {
                    if sign == "-" {
                        write!(f, "-")?;
                    }
                    first = false;
                } else {
                    write!(f, " {sign} ")?;
                }
                let show_coeff = mag != "1" || e.is_zero();
                if show_coeff {
                    write!(f, "{mag}")?;
                }
                if !e.is_zero() {
                    if show_coeff {
                        write!(f, "*")?;
                    }
                    if e == Rational64::from_integer(1) {
                        write!(f, "q")?;
                    } else if e.is_integer() && e.numer() >= &0 {
                        write!(f, "q^{}", e.numer())?;
                    } else {
                        write!(f, "q^({e})")?;
                    }
                }
            }
        }
        write!(f, " + O(q^{})", self.precision())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
