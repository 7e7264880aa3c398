//! Exact coefficient arithmetic in Q(zeta_m) for small m.
//!
//! Coefficients are polynomials in a primitive m-th root of unity with
//! exact rational entries, reduced modulo the m-th cyclotomic polynomial.
//! Supported orders are m in {1, 2, 3, 4, 6, 8, 12}; m = 1 is plain Q.
//! All arithmetic is exact and equality is decidable (coefficient-wise on
//! the canonical representation).

use crate::error::{QError, QResult};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Orders for which a cyclotomic polynomial is wired in.
pub const SUPPORTED_ORDERS: &[u32] = &[1, 2, 3, 4, 6, 8, 12];

/// Euler phi for the supported orders (degree of the coefficient field).
pub fn phi(m: u32) -> usize {
    match m {
        1 | 2 => 1,
        3 | 4 | 6 => 2,
        8 | 12 => 4,
        _ => panic!("unsupported cyclotomic order {m}"),
    }
}

/// Monic cyclotomic polynomial Phi_m, low degree first.
fn cyclotomic_poly(m: u32) -> &'static [i64] {
    match m {
        1 => &[-1, 1],            // x - 1
        2 => &[1, 1],             // x + 1
        3 => &[1, 1, 1],          // x^2 + x + 1
        4 => &[1, 0, 1],          // x^2 + 1
        6 => &[1, -1, 1],         // x^2 - x + 1
        8 => &[1, 0, 0, 0, 1],    // x^4 + 1
        12 => &[1, 0, -1, 0, 1],  // x^4 - x^2 + 1
        _ => panic!("unsupported cyclotomic order {m}"),
    }
}

/// An element of Q(zeta_m), stored as rational coordinates with respect to
/// the power basis 1, zeta, ..., zeta^(phi(m)-1).
#[derive(Clone, PartialEq, Eq)]
pub struct CycloRat {
    m: u32,
    c: Vec<BigRational>,
}

impl CycloRat {
    pub fn order(&self) -> u32 {
        self.m
    }

    /// Validate a cyclotomic order.
    pub fn check_order(m: u32) -> QResult<()> {
        if SUPPORTED_ORDERS.contains(&m) {
            Ok(())
        } else {
            Err(QError::InvalidParameter(format!(
                "cyclotomic order {m} not supported (use one of {SUPPORTED_ORDERS:?})"
            )))
        }
    }

    pub fn zero(m: u32) -> Self {
        CycloRat { m, c: vec![BigRational::zero(); phi(m)] }
    }

    pub fn one(m: u32) -> Self {
        Self::from_ratio(m, 1, 1)
    }

    pub fn from_big(m: u32, r: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); phi(m)];
        c[0] = r;
        CycloRat { m, c }
    }

    pub fn from_ratio(m: u32, num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_big(m, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(m: u32, n: i64) -> Self {
        Self::from_ratio(m, n, 1)
    }

    /// The class of x, i.e. a primitive m-th root of unity.
    pub fn zeta(m: u32) -> Self {
        let d = phi(m);
        if d == 1 {
            // m = 1: zeta = 1; m = 2: zeta = -1.
            return Self::from_int(m, if m == 1 { 1 } else { -1 });
        }
        let mut c = vec![BigRational::zero(); d];
        c[1] = BigRational::one();
        CycloRat { m, c }
    }

    /// zeta_m^k, with k taken modulo m.
    pub fn zeta_pow(m: u32, k: i64) -> Self {
        let k = k.rem_euclid(m as i64) as u32;
        let mut acc = Self::one(m);
        let z = Self::zeta(m);
        for _ in 0..k {
            acc = acc.mul(&z);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// Some(r) when the element lies in the rational subfield.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    fn assert_same(&self, rhs: &Self) {
        assert_eq!(self.m, rhs.m, "mixed cyclotomic orders {} and {}", self.m, rhs.m);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same(rhs);
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect();
        CycloRat { m: self.m, c }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_same(rhs);
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect();
        CycloRat { m: self.m, c }
    }

    pub fn neg(&self) -> Self {
        CycloRat { m: self.m, c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_same(rhs);
        let d = phi(self.m);
        if d == 1 {
            return CycloRat { m: self.m, c: vec![&self.c[0] * &rhs.c[0]] };
        }
        // Schoolbook product, then reduction modulo Phi_m.
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_mod_cyclotomic(self.m, &mut prod);
        prod.truncate(d);
        prod.resize(d, BigRational::zero());
        CycloRat { m: self.m, c: prod }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        CycloRat { m: self.m, c: self.c.iter().map(|a| a * r).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]
    /// against Phi_m.
    pub fn inv(&self) -> QResult<Self> {
        if self.is_zero() {
            return Err(QError::NotAUnit("division by zero coefficient".into()));
        }
        let d = phi(self.m);
        if d == 1 {
            return Ok(CycloRat { m: self.m, c: vec![self.c[0].recip()] });
        }
        let modulus: Vec<BigRational> = cyclotomic_poly(self.m)
            .iter()
            .map(|&k| BigRational::from(BigInt::from(k)))
            .collect();
        let inv = poly_mod_inverse(&self.c, &modulus)?;
        let mut c = inv;
        c.resize(d, BigRational::zero());
        Ok(CycloRat { m: self.m, c })
    }

    pub fn div(&self, rhs: &Self) -> QResult<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, k: i64) -> QResult<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut acc = Self::one(self.m);
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

    /// Square root for the cases that actually occur in specializations:
    /// a rational perfect square, or the negative of one when the field
    /// contains i (m divisible by 4).
    pub fn sqrt(&self) -> QResult<Self> {
        let r = self.as_rational().ok_or_else(|| {
            QError::InvalidParameter("square root of a non-rational coefficient".into())
        })?;
        if r.is_zero() {
            return Ok(Self::zero(self.m));
        }
        let (root, negative) = if r.is_negative() { ((-r).clone(), true) } else { (r.clone(), false) };
        let num = sqrt_exact(root.numer())?;
        let den = sqrt_exact(root.denom())?;
        let mut out = Self::from_big(self.m, BigRational::new(num, den));
        if negative {
            if self.m % 4 != 0 {
                return Err(QError::InvalidParameter(format!(
                    "square root of negative coefficient needs i; cyclotomic order is {}",
                    self.m
                )));
            }
            out = out.mul(&Self::zeta_pow(self.m, (self.m / 4) as i64));
        }
        Ok(out)
    }

    /// Re-embed into Q(zeta_m') when the value is rational; used when a
    /// context changes cyclotomic order between sub-computations.
    pub fn retag(&self, m: u32) -> QResult<Self> {
        if m == self.m {
            return Ok(self.clone());
        }
        match self.as_rational() {
            Some(r) => Ok(Self::from_big(m, r.clone())),
            None => Err(QError::InvalidParameter(format!(
                "cannot move a non-rational coefficient from Q(zeta_{}) to Q(zeta_{})",
                self.m, m
            ))),
        }
    }
}

/// In-place reduction of a polynomial (low degree first) modulo Phi_m.
fn reduce_mod_cyclotomic(m: u32, p: &mut Vec<BigRational>) {
    let modulus = cyclotomic_poly(m);
    let d = modulus.len() - 1;
    while p.len() > d {
        let lead = p.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let top = p.len() - d; // exponent where the reduced mass lands
        for (i, &mc) in modulus.iter().take(d).enumerate() {
            if mc != 0 {
                let delta = &lead * BigRational::from(BigInt::from(mc));
                p[top + i] -= delta;
            }
        }
    }
    while p.len() < d {
        p.push(BigRational::zero());
    }
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.last().map_or(false, |x| x.is_zero()) {
        p.pop();
    }
}

fn poly_deg(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|x| !x.is_zero())
}

/// Remainder and quotient-free extended gcd step: r = a - q*b in Q[x].
fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = poly_deg(b).expect("division by zero polynomial");
    let mut rem = a.to_vec();
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(db) + 1];
    while let Some(dr) = poly_deg(&rem) {
        if dr < db {
            break;
        }
        let coef = &rem[dr] / &b[db];
        let shift = dr - db;
        quot[shift] += &coef;
        for i in 0..=db {
            if !b[i].is_zero() {
                let delta = &coef * &b[i];
                rem[shift + i] -= delta;
            }
        }
    }
    poly_trim(&mut rem);
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(&mut out);
    out
}

/// Inverse of `a` modulo `modulus` in Q[x]; the modulus is irreducible here
/// so the gcd is a nonzero constant.
fn poly_mod_inverse(a: &[BigRational], modulus: &[BigRational]) -> QResult<Vec<BigRational>> {
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Vec<BigRational> = vec![];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while poly_deg(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is the gcd, a nonzero constant.
    match poly_deg(&r0) {
        Some(0) => {
            let scale = r0[0].recip();
            Ok(s0.iter().map(|c| c * &scale).collect())
        }
        _ => Err(QError::NotAUnit("coefficient has no inverse in the cyclotomic field".into())),
    }
}

fn sqrt_exact(n: &BigInt) -> QResult<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Ok(r)
    } else {
        Err(QError::InvalidParameter(format!("{n} is not a perfect square")))
    }
}

impl fmt::Display for CycloRat {
    /// Canonical compact form without spaces, e.g. `3/2`, `-1+2*z`, `z^3`.
    /// `z` denotes the primitive m-th root of unity of the ambient field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, coef) in self.c.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let mag = coef.abs();
            if first {
                if coef.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coef.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let unit_mag = mag.is_one();
            if k == 0 || !unit_mag {
                write!(f, "{mag}")?;
            }
            if k > 0 {
                if !unit_mag {
                    write!(f, "*")?;
                }
                if k == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycloRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloRat(m={}, {})", self.m, self)
    }
}
