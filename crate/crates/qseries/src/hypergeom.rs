//! Adaptive unilateral and bilateral summation from term generators, plus
//! the named summation formulas used to produce infinite products: the
//! very-well-poised 6-psi-6 and its 10-psi-10 extension with the rational
//! prefactor K, Jackson's 6-phi-5, both q-Gauss sums and the
//! q-Pfaff-Saalschutz sum.
//!
//! Formal convergence replaces analytic convergence throughout: a sum is
//! accepted when a run of consecutive terms has support entirely at or
//! beyond the truncation order, and rejected via the hard cap otherwise.

use crate::error::{QError, QResult};
use crate::monomial::ParamMonomial;
use crate::number::CycloRat;
use crate::qproducts::qpoch_inf;
use crate::series::{Comparison, LaurentSeries, SeriesContext};
use num::rational::Rational64;
use num::Zero;

/// Stopping policy for adaptive sums: `window` consecutive terms supported
/// at or beyond the truncation order end a sum; more than `cap` terms on
/// one side is a non-convergence error.
#[derive(Clone, Copy, Debug)]
pub struct SumPolicy {
    pub window: u32,
    pub cap: u64,
}

impl Default for SumPolicy {
    fn default() -> Self {
        SumPolicy { window: 4, cap: 10_000 }
    }
}

/// Multiply by (1 - f) for a monomial f; O(series width).
pub fn mul_one_minus(s: &LaurentSeries, f: &ParamMonomial, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    s.mul_binomial(&f.coeff().retag(ctx.cyclo_order())?, f.exp())
}

/// Divide by (1 - f) for a monomial f != 1; O(series width).
pub fn div_one_minus(s: &LaurentSeries, f: &ParamMonomial, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    let m = ctx.cyclo_order();
    let c = f.coeff().retag(m)?;
    let e = f.exp();
    if e > Rational64::zero() {
        s.div_binomial(&c, e)
    } else if e.is_zero() {
        if c.is_one() {
            Err(QError::NotAUnit("division by the vanishing factor (1 - 1)".into()))
        } else {
            let inv = CycloRat::one(m).sub(&c).inv()?;
            Ok(s.scalar_mul(&inv))
        }
    } else {
        // 1 - c q^e = -c q^e (1 - c^-1 q^-e) with -e > 0.
        let cinv = c.inv()?;
        s.scalar_mul(&cinv.neg()).shift(-e)?.div_binomial(&cinv, -e)
    }
}

/// Incrementally extended product of Pochhammer ratios
///   L(k) = prod_i (n_i; b_i)_k / prod_j (d_j; e_j)_k,
/// one O(width) factor update per step and per symbol. Vanishing numerator
/// factors are fine (the value becomes the zero series); vanishing
/// denominator factors are zero-divisor errors naming the factor.
pub struct RatioLadder {
    ctx: SeriesContext,
    numer: Vec<(ParamMonomial, ParamMonomial)>,
    denom: Vec<(ParamMonomial, ParamMonomial)>,
    vals: Vec<LaurentSeries>,
}

impl RatioLadder {
    pub fn new(
        ctx: &SeriesContext,
        numer: Vec<(ParamMonomial, ParamMonomial)>,
        denom: Vec<(ParamMonomial, ParamMonomial)>,
    ) -> Self {
        RatioLadder { ctx: *ctx, numer, denom, vals: vec![LaurentSeries::one(ctx)] }
    }

    /// Pochhammer ratio with all bases equal to q^step.
    pub fn with_base(
        ctx: &SeriesContext,
        step: Rational64,
        numer: Vec<ParamMonomial>,
        denom: Vec<ParamMonomial>,
    ) -> Self {
        let b = ParamMonomial::q_pow(step);
        Self::new(
            ctx,
            numer.into_iter().map(|a| (a, b.clone())).collect(),
            denom.into_iter().map(|a| (a, b.clone())).collect(),
        )
    }

    pub fn get(&mut self, k: i64) -> QResult<LaurentSeries> {
        assert!(k >= 0, "ladder index must be nonnegative");
        while self.vals.len() as i64 <= k {
            let j = self.vals.len() as i64 - 1;
            let mut cur = self.vals.last().unwrap().clone();
            for (arg, base) in &self.numer {
                let f = arg.mul(&base.pow(j)?);
                cur = mul_one_minus(&cur, &f, &self.ctx)?;
            }
            for (arg, base) in &self.denom {
                let f = arg.mul(&base.pow(j)?);
                if f.is_one() {
                    return Err(QError::NotAUnit(format!(
                        "vanishing factor (1 - {f}) in denominator Pochhammer ({arg}; {base})_{}",
                        j + 1
                    )));
                }
                cur = div_one_minus(&cur, &f, &self.ctx)?;
            }
            self.vals.push(cur);
        }
        Ok(self.vals[k as usize].clone())
    }
}

/// Sum terms for n = 0, 1, 2, ... until `policy.window` consecutive terms
/// are supported at or beyond the truncation order.
pub fn sum_unilateral<F>(mut term: F, policy: &SumPolicy, ctx: &SeriesContext) -> QResult<LaurentSeries>
where
    F: FnMut(i64) -> QResult<LaurentSeries>,
{
    let mut acc = LaurentSeries::zero(ctx);
    let mut streak = 0u32;
    let mut n = 0i64;
    loop {
        if n as u64 >= policy.cap {
            return Err(QError::NonConvergent(format!(
                "no valuation escape after {} terms (window {})",
                policy.cap, policy.window
            )));
        }
        let t = term(n)?;
        let escaped = t.support_floor() >= ctx.truncation_order();
        acc = acc.add(&t);
        if escaped {
            streak += 1;
            if streak >= policy.window {
                return Ok(acc);
            }
        } else {
            streak = 0;
        }
        n += 1;
    }
}

/// Sum terms over all integers, as the two one-sided sums n >= 0 and
/// n <= -1, each ended by its own valuation escape.
pub fn sum_bilateral<F>(mut term: F, policy: &SumPolicy, ctx: &SeriesContext) -> QResult<LaurentSeries>
where
    F: FnMut(i64) -> QResult<LaurentSeries>,
{
    let pos = sum_unilateral(&mut term, policy, ctx)?;
    let neg = sum_unilateral(|r| term(-1 - r), policy, ctx)?;
    Ok(pos.add(&neg))
}

/// Elementary symmetric functions e_1..e_4 of four monomials, as series.
fn elementary_symmetric(params: [&ParamMonomial; 4], ctx: &SeriesContext) -> QResult<[LaurentSeries; 4]> {
    let mut e = [
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
    ];
    let mut cur: Vec<LaurentSeries> = vec![LaurentSeries::one(ctx)];
    for p in params {
        let ps = p.series(ctx)?;
        let mut next = cur.clone();
        next.push(LaurentSeries::zero(ctx));
        for (k, prev) in cur.iter().enumerate() {
            next[k + 1] = next[k + 1].add(&prev.mul(&ps));
        }
        cur = next;
    }
    for k in 1..=4 {
        e[k - 1] = cur[k].clone();
    }
    Ok(e)
}

/// The rational prefactor K(a,b,c,d,e,u,v) of the 10-psi-10 summation, with
/// `q_base` substituted for the structural q (this is how "replace q by
/// q^k" enters). Vanishing denominator factors are reported by name.
pub fn chu_k(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    u: &ParamMonomial,
    v: &ParamMonomial,
    q_base: &ParamMonomial,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    let [s1, s2, s3, s4] = elementary_symmetric([b, c, d, e], ctx)?;
    let one = LaurentSeries::one(ctx);
    let aa = a.series(ctx)?;
    let uu = u.series(ctx)?;
    let vv = v.series(ctx)?;
    let qq = q_base.series(ctx)?;
    let a2 = a.pow(2)?.series(ctx)?;

    let s3_minus_a_s1 = s3.sub(&aa.mul(&s1));
    let qs3_minus_a_s1 = qq.mul(&s3).sub(&aa.mul(&s1));
    let a2_minus_s4 = a2.sub(&s4);
    let a2_minus_qs4 = a2.sub(&qq.mul(&s4));

    let t1 = uu.mul(&vv).mul(&s3_minus_a_s1).mul(&qs3_minus_a_s1).mul(&a2);
    let t2 = one
        .sub(&qq)
        .mul(&uu)
        .mul(&vv)
        .mul(&a2_minus_s4)
        .mul(&a2.sub(&s2.mul(&aa)).add(&s4))
        .mul(&aa);
    let t3 = uu
        .add(&vv)
        .mul(&aa.add(&uu.mul(&vv)))
        .mul(&s3_minus_a_s1)
        .mul(&a2_minus_qs4)
        .mul(&aa);
    let t4 = uu
        .mul(&uu)
        .add(&aa)
        .mul(&vv.mul(&vv).add(&aa))
        .mul(&a2_minus_s4)
        .mul(&a2_minus_qs4);
    let numer = t1.add(&t2).add(&t3).add(&t4);

    let bcde = b.mul(c).mul(d).mul(e);
    let denom_factors: [(&str, LaurentSeries); 6] = [
        ("a^2 - bcde", a2.sub(&bcde.series(ctx)?)),
        ("a^2 - bcde*q", a2.sub(&bcde.mul(q_base).series(ctx)?)),
        ("1 - u", one.sub(&uu)),
        ("a - u", aa.sub(&uu)),
        ("1 - v", one.sub(&vv)),
        ("a - v", aa.sub(&vv)),
    ];
    let mut den = LaurentSeries::one(ctx);
    for (name, f) in denom_factors {
        if f.is_zero() {
            return Err(QError::SingularK(format!("factor ({name}) vanishes")));
        }
        den = den.mul(&f);
    }
    numer.div(&den)
}

/// Independent evaluation path for K: elementary symmetric functions by
/// explicit subset enumeration and a term-by-term division by the six
/// denominator factors, assembled in a different order.
pub fn chu_k_reference(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    u: &ParamMonomial,
    v: &ParamMonomial,
    q_base: &ParamMonomial,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    let params = [b, c, d, e];
    let mut sigma = [
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
        LaurentSeries::zero(ctx),
    ];
    for mask in 1u32..16 {
        let mut prod = ParamMonomial::one();
        for (i, p) in params.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod = prod.mul(p);
            }
        }
        let k = mask.count_ones() as usize;
        sigma[k - 1] = sigma[k - 1].add(&prod.series(ctx)?);
    }
    let [s1, s2, s3, s4] = sigma;

    let one = LaurentSeries::one(ctx);
    let aa = a.series(ctx)?;
    let uu = u.series(ctx)?;
    let vv = v.series(ctx)?;
    let qq = q_base.series(ctx)?;
    let a2 = aa.mul(&aa);

    let terms = [
        uu.mul(&vv)
            .mul(&s3.sub(&aa.mul(&s1)))
            .mul(&qq.mul(&s3).sub(&aa.mul(&s1)))
            .mul(&a2),
        one.sub(&qq)
            .mul(&uu)
            .mul(&vv)
            .mul(&a2.sub(&s4))
            .mul(&a2.sub(&aa.mul(&s2)).add(&s4))
            .mul(&aa),
        uu.add(&vv)
            .mul(&aa.add(&uu.mul(&vv)))
            .mul(&s3.sub(&aa.mul(&s1)))
            .mul(&a2.sub(&qq.mul(&s4)))
            .mul(&aa),
        uu.mul(&uu)
            .add(&aa)
            .mul(&vv.mul(&vv).add(&aa))
            .mul(&a2.sub(&s4))
            .mul(&a2.sub(&qq.mul(&s4))),
    ];

    let bcde = b.mul(c).mul(d).mul(e);
    let factors = [
        a2.sub(&bcde.series(ctx)?),
        a2.sub(&bcde.mul(q_base).series(ctx)?),
        one.sub(&uu),
        aa.sub(&uu),
        one.sub(&vv),
        aa.sub(&vv),
    ];
    let mut acc = LaurentSeries::zero(ctx);
    for t in terms {
        let mut part = t;
        for f in &factors {
            if f.is_zero() {
                return Err(QError::SingularK("denominator factor vanishes".into()));
            }
            part = part.div(f)?;
        }
        acc = acc.add(&part);
    }
    Ok(acc)
}

fn inv_one_minus(ctx: &SeriesContext, f: &ParamMonomial) -> QResult<LaurentSeries> {
    div_one_minus(&LaurentSeries::one(ctx), f, ctx)
}

/// Quotient of infinite Pochhammer products
///   prod (n_i; q^step)_inf / prod (d_j; q^step)_inf,
/// with vanishing denominator factors reported by name.
pub fn poch_quotient_inf(
    numer: &[ParamMonomial],
    denom: &[ParamMonomial],
    step: Rational64,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    let mut acc = LaurentSeries::one(ctx);
    for arg in numer {
        acc = acc.mul(&qpoch_inf(arg, step, ctx)?);
    }
    for arg in denom {
        let mut j = 0i64;
        loop {
            let f = arg.times_q(j, step);
            if f.exp() >= ctx.truncation_order() {
                break;
            }
            if f.is_one() {
                return Err(QError::NotAUnit(format!(
                    "vanishing factor (1 - {f}) in denominator product ({arg}; q^{step})_inf"
                )));
            }
            acc = div_one_minus(&acc, &f, ctx)?;
            j += 1;
        }
    }
    Ok(acc)
}

/// The two sides of the very-well-poised 6-psi-6 bilateral summation with
/// argument q a^2 / (bcde).
pub fn bailey_6psi6_sides(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let z = q.mul(&a.pow(2)?).div(&b.mul(c).mul(d).mul(e))?;

    let aq = a.mul(&q);
    let num_args = [b.clone(), c.clone(), d.clone(), e.clone()];
    let den_args = [aq.div(b)?, aq.div(c)?, aq.div(d)?, aq.div(e)?];

    let inv_one_minus_a = inv_one_minus(ctx, a)?;
    let mut pos = RatioLadder::with_base(ctx, one, num_args.to_vec(), den_args.to_vec());
    // Index flip for n = -r: each (x;q)_{-r} / (y;q)_{-r} pairs into
    // (q/y;q)_r y^r / ((q/x;q)_r x^r).
    let mut neg = RatioLadder::with_base(
        ctx,
        one,
        den_args.iter().map(|y| q.div(y)).collect::<QResult<Vec<_>>>()?,
        num_args.iter().map(|x| q.div(x)).collect::<QResult<Vec<_>>>()?,
    );
    let mut w = ParamMonomial::one();
    for y in &den_args {
        w = w.mul(y);
    }
    for x in &num_args {
        w = w.div(x)?;
    }
    let w = w.mul(&z.inv()?); // net per-step monomial on the negative side

    let a_m = a.clone();
    let z_m = z.clone();
    let lhs = sum_bilateral(
        move |n| {
            let vwp = a_m
                .times_q(2 * n, one)
                .one_minus(ctx)?
                .mul(&inv_one_minus_a);
            let (ratio, power) = if n >= 0 {
                (pos.get(n)?, z_m.pow(n)?)
            } else {
                let r = -n;
                (neg.get(r)?, z_m.pow(n)?.mul(&w.pow(r)?).mul(&z_m.pow(r)?))
            };
            power.apply_to(&vwp.mul(&ratio))
        },
        policy,
        ctx,
    )?;

    let aq2 = aq.clone();
    let rhs_num = vec![
        aq2.clone(),
        aq2.div(&b.mul(c))?,
        aq2.div(&b.mul(d))?,
        aq2.div(&b.mul(e))?,
        aq2.div(&c.mul(d))?,
        aq2.div(&c.mul(e))?,
        aq2.div(&d.mul(e))?,
        q.clone(),
        q.div(a)?,
    ];
    let rhs_den = vec![
        aq2.div(b)?,
        aq2.div(c)?,
        aq2.div(d)?,
        aq2.div(e)?,
        q.div(b)?,
        q.div(c)?,
        q.div(d)?,
        q.div(e)?,
        z.clone(),
    ];
    let rhs = poch_quotient_inf(&rhs_num, &rhs_den, one, ctx)?;
    Ok((lhs, rhs))
}

/// Shared engine for the 10-psi-10 two-sided sum written as its two
/// one-sided halves, and the K-weighted product side.
fn chu_sides_impl(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    u: &ParamMonomial,
    v: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let z = a.pow(2)?.div(&q.mul(b).mul(c).mul(d).mul(e))?;
    let aq = a.mul(&q);

    // n >= 0 half.
    let pos_num = vec![
        b.clone(),
        c.clone(),
        d.clone(),
        e.clone(),
        u.mul(&q),
        v.mul(&q),
        aq.div(u)?,
        aq.div(v)?,
    ];
    let pos_den = vec![
        aq.div(b)?,
        aq.div(c)?,
        aq.div(d)?,
        aq.div(e)?,
        u.clone(),
        v.clone(),
        a.div(u)?,
        a.div(v)?,
    ];
    let inv_one_minus_a = inv_one_minus(ctx, a)?;
    let mut pos = RatioLadder::with_base(ctx, one, pos_num, pos_den);
    let a_m = a.clone();
    let z_m = z.clone();
    let positive = sum_unilateral(
        |n| {
            let vwp = a_m.times_q(2 * n, one).one_minus(ctx)?.mul(&inv_one_minus_a);
            z_m.pow(n)?.apply_to(&vwp.mul(&pos.get(n)?))
        },
        policy,
        ctx,
    )?;

    // n >= 1 half with reflected parameters.
    let neg_num = vec![
        b.div(a)?,
        c.div(a)?,
        d.div(a)?,
        e.div(a)?,
        u.mul(&q).div(a)?,
        v.mul(&q).div(a)?,
        q.div(u)?,
        q.div(v)?,
    ];
    let neg_den = vec![
        q.div(b)?,
        q.div(c)?,
        q.div(d)?,
        q.div(e)?,
        u.inv()?,
        v.inv()?,
        u.div(a)?,
        v.div(a)?,
    ];
    let mut neg = RatioLadder::with_base(ctx, one, neg_num, neg_den);
    let a_inv = a.inv()?;
    let inv_one_minus_ainv = inv_one_minus(ctx, &a_inv)?;
    let z_m = z.clone();
    let negative = sum_unilateral(
        |k| {
            let n = k + 1;
            let vwp = a_inv.times_q(2 * n, one).one_minus(ctx)?.mul(&inv_one_minus_ainv);
            z_m.pow(n)?.apply_to(&vwp.mul(&neg.get(n)?))
        },
        policy,
        ctx,
    )?;

    let lhs = positive.add(&negative);

    let k_factor = chu_k(a, b, c, d, e, u, v, &q, ctx)?;
    let rhs_num = vec![
        aq.clone(),
        aq.div(&b.mul(c))?,
        aq.div(&b.mul(d))?,
        aq.div(&b.mul(e))?,
        aq.div(&c.mul(d))?,
        aq.div(&c.mul(e))?,
        aq.div(&d.mul(e))?,
        q.clone(),
        q.div(a)?,
    ];
    let rhs_den = vec![
        aq.div(b)?,
        aq.div(c)?,
        aq.div(d)?,
        aq.div(e)?,
        q.div(b)?,
        q.div(c)?,
        q.div(d)?,
        q.div(e)?,
        q.mul(&a.pow(2)?).div(&b.mul(c).mul(d).mul(e))?,
    ];
    let rhs = k_factor.mul(&poch_quotient_inf(&rhs_num, &rhs_den, one, ctx)?);
    Ok((lhs, rhs))
}

/// Both sides of the 10-psi-10 summation with free b.
pub fn chu_10psi10_sides(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    u: &ParamMonomial,
    v: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    chu_sides_impl(a, b, c, d, e, u, v, policy, ctx)
}

/// The b = a/c corollary: the same bilateral sum, equated to the simplified
/// prefactor times a plain product quotient. Requires c != a (otherwise
/// b = 1 and the series degenerates).
pub fn chu_corollary_b_ac(
    a: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    e: &ParamMonomial,
    u: &ParamMonomial,
    v: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    if a == c {
        return Err(QError::InvalidParameter(
            "c = a collapses b = a/c to 1 and degenerates the bilateral series".into(),
        ));
    }
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let b = a.div(c)?;

    // Left side: the bilateral sum of the general identity at b = a/c.
    let (lhs, _) = {
        // Recompute only the series half; the product half below is the
        // simplified form.
        let z = a.pow(2)?.div(&q.mul(&b).mul(c).mul(d).mul(e))?;
        let aq = a.mul(&q);
        let pos_num = vec![
            b.clone(),
            c.clone(),
            d.clone(),
            e.clone(),
            u.mul(&q),
            v.mul(&q),
            aq.div(u)?,
            aq.div(v)?,
        ];
        let pos_den = vec![
            aq.div(&b)?,
            aq.div(c)?,
            aq.div(d)?,
            aq.div(e)?,
            u.clone(),
            v.clone(),
            a.div(u)?,
            a.div(v)?,
        ];
        let inv_one_minus_a = inv_one_minus(ctx, a)?;
        let mut pos = RatioLadder::with_base(ctx, one, pos_num, pos_den);
        let a_m = a.clone();
        let z_m = z.clone();
        let positive = sum_unilateral(
            |n| {
                let vwp = a_m.times_q(2 * n, one).one_minus(ctx)?.mul(&inv_one_minus_a);
                z_m.pow(n)?.apply_to(&vwp.mul(&pos.get(n)?))
            },
            policy,
            ctx,
        )?;
        let neg_num = vec![
            b.div(a)?,
            c.div(a)?,
            d.div(a)?,
            e.div(a)?,
            u.mul(&q).div(a)?,
            v.mul(&q).div(a)?,
            q.div(u)?,
            q.div(v)?,
        ];
        let neg_den = vec![
            q.div(&b)?,
            q.div(c)?,
            q.div(d)?,
            q.div(e)?,
            u.inv()?,
            v.inv()?,
            u.div(a)?,
            v.div(a)?,
        ];
        let mut neg = RatioLadder::with_base(ctx, one, neg_num, neg_den);
        let a_inv = a.inv()?;
        let inv_one_minus_ainv = inv_one_minus(ctx, &a_inv)?;
        let negative = sum_unilateral(
            |k| {
                let n = k + 1;
                let vwp = a_inv.times_q(2 * n, one).one_minus(ctx)?.mul(&inv_one_minus_ainv);
                z.pow(n)?.apply_to(&vwp.mul(&neg.get(n)?))
            },
            policy,
            ctx,
        )?;
        (positive.add(&negative), ())
    };

    // Right side: prefactor (1-u/c)(1-cu/a)(1-v/c)(1-cv/a) /
    // ((1-u/a)(1-u)(1-v/a)(1-v)) times the product quotient.
    let mut pref = LaurentSeries::one(ctx);
    for f in [u.div(c)?, c.mul(u).div(a)?, v.div(c)?, c.mul(v).div(a)?] {
        pref = mul_one_minus(&pref, &f, ctx)?;
    }
    for f in [u.div(a)?, u.clone(), v.div(a)?, v.clone()] {
        pref = div_one_minus(&pref, &f, ctx)?;
    }
    let aq = a.mul(&q);
    let cq = c.mul(&q);
    let rhs_num = vec![
        aq.clone(),
        q.clone(),
        cq.div(d)?,
        cq.div(e)?,
        aq.div(&c.mul(d))?,
        aq.div(&c.mul(e))?,
        aq.div(&d.mul(e))?,
        q.clone(),
        q.div(a)?,
    ];
    let rhs_den = vec![
        cq.clone(),
        aq.div(c)?,
        aq.div(d)?,
        aq.div(e)?,
        cq.div(a)?,
        q.div(c)?,
        q.div(d)?,
        q.div(e)?,
        q.mul(a).div(&d.mul(e))?,
    ];
    let rhs = pref.mul(&poch_quotient_inf(&rhs_num, &rhs_den, one, ctx)?);
    Ok((lhs, rhs))
}

/// Both sides of Jackson's very-well-poised 6-phi-5 summation.
pub fn jackson_6phi5_sides(
    a: &ParamMonomial,
    b: &ParamMonomial,
    c: &ParamMonomial,
    d: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let aq = a.mul(&q);
    let z = aq.div(&b.mul(c).mul(d))?;
    let num = vec![a.clone(), b.clone(), c.clone(), d.clone()];
    let den = vec![q.clone(), aq.div(b)?, aq.div(c)?, aq.div(d)?];
    let inv_one_minus_a = inv_one_minus(ctx, a)?;
    let mut lad = RatioLadder::with_base(ctx, one, num, den);
    let a_m = a.clone();
    let lhs = sum_unilateral(
        |n| {
            let vwp = a_m.times_q(2 * n, one).one_minus(ctx)?.mul(&inv_one_minus_a);
            z.pow(n)?.apply_to(&vwp.mul(&lad.get(n)?))
        },
        policy,
        ctx,
    )?;
    let rhs_num = vec![aq.clone(), aq.div(&b.mul(c))?, aq.div(&b.mul(d))?, aq.div(&c.mul(d))?];
    let rhs_den = vec![aq.div(b)?, aq.div(c)?, aq.div(d)?, aq.div(&b.mul(c).mul(d))?];
    let rhs = poch_quotient_inf(&rhs_num, &rhs_den, one, ctx)?;
    Ok((lhs, rhs))
}

/// A single term of the 6-psi-6 at e = a, which coincides with the 6-phi-5
/// term; exposed for the term-by-term agreement test.
pub fn vwp_unilateral_term(
    a: &ParamMonomial,
    numer: &[ParamMonomial],
    denom: &[ParamMonomial],
    z: &ParamMonomial,
    n: i64,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    let one = Rational64::from_integer(1);
    let mut lad = RatioLadder::with_base(ctx, one, numer.to_vec(), denom.to_vec());
    let vwp = a.times_q(2 * n, one).one_minus(ctx)?.div(&a.one_minus(ctx)?)?;
    z.pow(n)?.apply_to(&vwp.mul(&lad.get(n)?))
}

/// Both sides of the q-analog of Gauss's 2F1(1/2) sum,
/// sum (a,b;q)_n q^(n(n+1)/2) / ((q;q)_n (abq;q^2)_n) = (aq,bq;q^2)_inf / (q,abq;q^2)_inf.
pub fn q_gauss_andrews_sides(
    a: &ParamMonomial,
    b: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let q = ParamMonomial::q_int(1);
    let _one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    let abq = a.mul(b).mul(&q);
    let mut lad = RatioLadder::new(
        ctx,
        vec![(a.clone(), q.clone()), (b.clone(), q.clone())],
        vec![(q.clone(), q.clone()), (abq.clone(), ParamMonomial::q_int(2))],
    );
    let lhs = sum_unilateral(
        |n| {
            let t = lad.get(n)?;
            t.shift(Rational64::new(n * (n + 1), 2))
        },
        policy,
        ctx,
    )?;
    let rhs = poch_quotient_inf(
        &[a.mul(&q), b.mul(&q)],
        &[q.clone(), abq.clone()],
        two,
        ctx,
    )?;
    Ok((lhs, rhs))
}

/// Both sides of the b -> infinity case of Heine's q-Gauss sum,
/// sum (a;q)_n q^(n(n-1)/2) (-c)^n / ((c,q;q)_n a^n) = (c/a;q)_inf / (c;q)_inf.
pub fn q_gauss_heine_sides(
    a: &ParamMonomial,
    c: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let mut lad = RatioLadder::with_base(ctx, one, vec![a.clone()], vec![c.clone(), q.clone()]);
    let w = c.div(a)?.neg();
    let lhs = sum_unilateral(
        |n| {
            let t = w.pow(n)?.apply_to(&lad.get(n)?)?;
            t.shift(Rational64::new(n * (n - 1), 2))
        },
        policy,
        ctx,
    )?;
    let rhs = poch_quotient_inf(&[c.div(a)?], &[c.clone()], one, ctx)?;
    Ok((lhs, rhs))
}

/// Exact check of the q-Pfaff-Saalschutz sum for a nonnegative integer N:
/// sum_{n=0}^N (y,z,q^-N;q)_n q^n / ((q, aq, yz q^-N / a;q)_n)
///   = (aq/y, aq/z;q)_N / ((aq, aq/yz;q)_N).
pub fn q_pfaff_saalschutz_check(
    a: &ParamMonomial,
    y: &ParamMonomial,
    z: &ParamMonomial,
    n_cap: i64,
    ctx: &SeriesContext,
) -> QResult<Comparison> {
    assert!(n_cap >= 0, "N must be a nonnegative integer");
    let q = ParamMonomial::q_int(1);
    let one = Rational64::from_integer(1);
    let aq = a.mul(&q);
    let mut lad = RatioLadder::with_base(
        ctx,
        one,
        vec![y.clone(), z.clone(), ParamMonomial::q_int(-n_cap)],
        vec![q.clone(), aq.clone(), y.mul(z).mul(&ParamMonomial::q_int(-n_cap)).div(a)?],
    );
    let mut lhs = LaurentSeries::zero(ctx);
    for n in 0..=n_cap {
        lhs = lhs.add(&lad.get(n)?.shift(Rational64::from_integer(n))?);
    }
    let rhs_num = crate::qproducts::qpoch_finite(&aq.div(y)?, one, n_cap, ctx)?
        .mul(&crate::qproducts::qpoch_finite(&aq.div(z)?, one, n_cap, ctx)?);
    let rhs_den = crate::qproducts::qpoch_finite(&aq, one, n_cap, ctx)?
        .mul(&crate::qproducts::qpoch_finite(&aq.div(&y.mul(z))?, one, n_cap, ctx)?);
    let rhs = rhs_num.div(&rhs_den)?;
    lhs.equal_up_to(&rhs, lhs.precision().min(rhs.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qproducts::{theta_series, Sign};

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn mono(c: (i64, i64), e: i64) -> ParamMonomial {
        ParamMonomial::new(CycloRat::from_ratio(1, c.0, c.1), r(e)).unwrap()
    }

    #[test]
    fn unilateral_gaussian_sum() {
        let ctx = SeriesContext::plain(17);
        let s = sum_unilateral(
            |n| ParamMonomial::q_int(n * n).series(&ctx),
            &SumPolicy::default(),
            &ctx,
        )
        .unwrap();
        for e in [0, 1, 4, 9, 16] {
            assert!(s.coeff(r(e)).unwrap().is_one());
        }
        assert_eq!(s.term_count(), 5);
    }

    #[test]
    fn constant_generator_never_converges() {
        let ctx = SeriesContext::plain(10);
        let policy = SumPolicy { window: 4, cap: 200 };
        let out = sum_unilateral(|_| Ok(LaurentSeries::one(&ctx)), &policy, &ctx);
        assert!(matches!(out, Err(QError::NonConvergent(_))));
    }

    #[test]
    fn bilateral_matches_theta() {
        let ctx = SeriesContext::plain(40);
        let s = sum_bilateral(
            |n| ParamMonomial::q_int(n * n + n).series(&ctx),
            &SumPolicy::default(),
            &ctx,
        )
        .unwrap();
        let t = theta_series(r(1), r(1), Sign::Plus, &ctx).unwrap();
        assert!(s.equal_up_to(&t, r(40)).unwrap().is_equal());
    }

    #[test]
    fn ratio_ladder_names_vanishing_denominator() {
        let ctx = SeriesContext::plain(10);
        let mut lad = RatioLadder::with_base(
            &ctx,
            r(1),
            vec![],
            vec![ParamMonomial::q_int(-2)],
        );
        // (q^-2; q)_k has the factor 1 - q^-2 q^2 = 0 at k = 3.
        assert!(lad.get(2).is_ok());
        assert!(matches!(lad.get(3), Err(QError::NotAUnit(_))));
    }

    /// K(a, a/c, c, q^-n, a, u, v, q) against the printed piecewise closed
    /// form: 1 at n = 0, a two-term expression at n = 1, and a stable
    /// rational expression for all n > 1.
    #[test]
    fn k_factor_b_ac_closed_form() {
        let ctx = SeriesContext::plain(30);
        let q = ParamMonomial::q_int(1);
        let a = mono((1, 1), 4);
        let c = mono((2, 1), 1);
        let u = mono((3, 1), 2);
        let v = mono((1, 2), 3);
        let b = a.div(&c).unwrap();
        let e = a.clone();

        let stable = {
            // (c-u)(c-v)(a-cu)(a-cv) / (c^2 (a-u)(a-v)(1-u)(1-v))
            let num = c
                .series(&ctx)
                .unwrap()
                .sub(&u.series(&ctx).unwrap())
                .mul(&c.series(&ctx).unwrap().sub(&v.series(&ctx).unwrap()))
                .mul(&a.series(&ctx).unwrap().sub(&c.mul(&u).series(&ctx).unwrap()))
                .mul(&a.series(&ctx).unwrap().sub(&c.mul(&v).series(&ctx).unwrap()));
            let den = c
                .pow(2)
                .unwrap()
                .series(&ctx)
                .unwrap()
                .mul(&a.series(&ctx).unwrap().sub(&u.series(&ctx).unwrap()))
                .mul(&a.series(&ctx).unwrap().sub(&v.series(&ctx).unwrap()))
                .mul(&u.one_minus(&ctx).unwrap())
                .mul(&v.one_minus(&ctx).unwrap());
            num.div(&den).unwrap()
        };
        let correction = {
            // (1-c)(c-a)(c-aq)(1-cq) u v / (c^2 q (a-u)(1-u)(a-v)(1-v))
            let num = c
                .one_minus(&ctx)
                .unwrap()
                .mul(&c.series(&ctx).unwrap().sub(&a.series(&ctx).unwrap()))
                .mul(&c.series(&ctx).unwrap().sub(&a.mul(&q).series(&ctx).unwrap()))
                .mul(&c.mul(&q).one_minus(&ctx).unwrap())
                .mul(&u.mul(&v).series(&ctx).unwrap());
            let den = c
                .pow(2)
                .unwrap()
                .mul(&q)
                .series(&ctx)
                .unwrap()
                .mul(&a.series(&ctx).unwrap().sub(&u.series(&ctx).unwrap()))
                .mul(&u.one_minus(&ctx).unwrap())
                .mul(&a.series(&ctx).unwrap().sub(&v.series(&ctx).unwrap()))
                .mul(&v.one_minus(&ctx).unwrap());
            num.div(&den).unwrap()
        };

        // At n = 0 and n = 1 the raw expression is 0/0 (the a^2 - bcde and
        // a^2 - bcde*q factors vanish in turn); the piecewise values 1 and
        // stable - correction are the resolved limits, validated through
        // the Bailey-pair definition check elsewhere. For n > 1 the raw
        // expression is regular and must equal the stable closed form.
        for n in 0..=1i64 {
            let d = ParamMonomial::q_int(-n);
            let out = chu_k(&a, &b, &c, &d, &e, &u, &v, &q, &ctx);
            assert!(matches!(out, Err(QError::SingularK(_))), "expected singular K at n = {n}");
        }
        for n in 2..=5i64 {
            let d = ParamMonomial::q_int(-n);
            let k = chu_k(&a, &b, &c, &d, &e, &u, &v, &q, &ctx).unwrap();
            assert!(
                k.equal_up_to(&stable, k.precision().min(stable.precision())).unwrap().is_equal(),
                "K closed form mismatch at n = {n}"
            );
        }
        // The resolved n = 1 value differs from the stable form by the
        // printed correction term.
        let n1 = stable.sub(&correction);
        assert!(!n1.equal_up_to(&stable, r(20)).unwrap().is_equal());
    }

    /// For the mod-3 specialization b, c, d = q^-n, q^(1-n), q^(2-n), e = a
    /// in base q^3, the first three K values all equal 1.
    #[test]
    fn k_factor_mod3_small_values_are_one() {
        let ctx = SeriesContext::plain(24);
        let q3 = ParamMonomial::q_int(3);
        let a = mono((3, 1), 2);
        let u = mono((2, 1), 2);
        let v = mono((1, 5), 3);
        for n in 0..=2i64 {
            let k = chu_k(
                &a,
                &ParamMonomial::q_int(-n),
                &ParamMonomial::q_int(1 - n),
                &ParamMonomial::q_int(2 - n),
                &a,
                &u,
                &v,
                &q3,
                &ctx,
            )
            .unwrap();
            let one = LaurentSeries::one(&ctx);
            assert!(
                k.equal_up_to(&one, k.precision()).unwrap().is_equal(),
                "K_0({n}) != 1"
            );
        }
    }

    #[test]
    fn k_factor_dual_paths_agree() {
        let ctx = SeriesContext::plain(24);
        let q3 = ParamMonomial::q_int(3);
        let a = mono((2, 1), 2);
        let b = mono((1, 1), -1);
        let c = mono((1, 3), 1);
        let d = mono((1, 1), 2);
        let e = mono((5, 1), 4);
        let u = mono((3, 1), 3);
        let v = mono((1, 2), 5);
        let k1 = chu_k(&a, &b, &c, &d, &e, &u, &v, &q3, &ctx).unwrap();
        let k2 = chu_k_reference(&a, &b, &c, &d, &e, &u, &v, &q3, &ctx).unwrap();
        let ord = k1.precision().min(k2.precision());
        assert!(k1.equal_up_to(&k2, ord).unwrap().is_equal());
    }

    #[test]
    fn k_factor_reports_singular_denominator() {
        let ctx = SeriesContext::plain(10);
        let q = ParamMonomial::q_int(1);
        let one = ParamMonomial::one();
        let a = mono((2, 1), 1);
        let out = chu_k(&a, &a, &a, &a, &a, &one, &a, &q, &ctx);
        assert!(matches!(out, Err(QError::SingularK(msg)) if msg.contains("1 - u")));
    }

    #[test]
    fn ten_psi_ten_identity_at_a_specialization() {
        let ctx = SeriesContext::plain(30);
        let policy = SumPolicy::default();
        let a = mono((3, 1), 3);
        let b = mono((2, 1), 1);
        let c = mono((1, 2), 1);
        let d = mono((1, 3), 1);
        let e = mono((5, 1), 1);
        let u = mono((2, 1), 2);
        let v = mono((1, 5), 3);
        let (lhs, rhs) = chu_10psi10_sides(&a, &b, &c, &d, &e, &u, &v, &policy, &ctx).unwrap();
        let ord = lhs.precision().min(rhs.precision());
        assert!(lhs.equal_up_to(&rhs, ord).unwrap().is_equal());
    }

    #[test]
    fn ten_psi_ten_e_equals_a_kills_negative_terms() {
        let ctx = SeriesContext::plain(24);
        let policy = SumPolicy { window: 4, cap: 500 };
        let a = mono((3, 1), 5);
        let b = mono((2, 1), 1);
        let c = mono((1, 2), 1);
        let d = mono((5, 1), 1);
        let u = mono((2, 1), 2);
        let v = mono((1, 5), 3);
        let (lhs, rhs) = chu_10psi10_sides(&a, &b, &c, &d, &a, &u, &v, &policy, &ctx).unwrap();
        let ord = lhs.precision().min(rhs.precision());
        assert!(lhs.equal_up_to(&rhs, ord).unwrap().is_equal());
        // The e/a = 1 numerator factor zeroes every reflected term, so the
        // bilateral sum equals its n >= 0 half alone.
        let q = ParamMonomial::q_int(1);
        let aq = a.mul(&q);
        let num = vec![
            b.clone(),
            c.clone(),
            d.clone(),
            a.clone(),
            u.mul(&q),
            v.mul(&q),
            aq.div(&u).unwrap(),
            aq.div(&v).unwrap(),
        ];
        let den = vec![
            aq.div(&b).unwrap(),
            aq.div(&c).unwrap(),
            aq.div(&d).unwrap(),
            q.clone(),
            u.clone(),
            v.clone(),
            a.div(&u).unwrap(),
            a.div(&v).unwrap(),
        ];
        let z = a.pow(2).unwrap().div(&q.mul(&b).mul(&c).mul(&d).mul(&a)).unwrap();
        let mut lad = RatioLadder::with_base(&ctx, r(1), num, den);
        let inv_oma = inv_one_minus(&ctx, &a).unwrap();
        let uni = sum_unilateral(
            |n| {
                let vwp = a.times_q(2 * n, r(1)).one_minus(&ctx).unwrap().mul(&inv_oma);
                z.pow(n)?.apply_to(&vwp.mul(&lad.get(n)?))
            },
            &policy,
            &ctx,
        )
        .unwrap();
        assert!(lhs.equal_up_to(&uni, ord.min(uni.precision())).unwrap().is_equal());
    }

    #[test]
    fn corollary_b_ac_identity_and_edge_cases() {
        let ctx = SeriesContext::plain(26);
        let policy = SumPolicy { window: 4, cap: 500 };
        let a = mono((3, 1), 4);
        let c = mono((2, 1), 1);
        let d = mono((1, 2), 1);
        let e = mono((5, 1), 1);
        let u = mono((2, 1), 2);
        let v = mono((1, 5), 3);
        let (lhs, rhs) = chu_corollary_b_ac(&a, &c, &d, &e, &u, &v, &policy, &ctx).unwrap();
        let ord = lhs.precision().min(rhs.precision());
        assert!(lhs.equal_up_to(&rhs, ord).unwrap().is_equal());

        // u = c zeroes the prefactor; both sides collapse to zero together.
        let (lhs0, rhs0) = chu_corollary_b_ac(&a, &c, &d, &e, &c, &v, &policy, &ctx).unwrap();
        assert!(rhs0.is_zero());
        let ord0 = lhs0.precision().min(rhs0.precision());
        assert!(lhs0.equal_up_to(&rhs0, ord0).unwrap().is_equal());

        // c = a is rejected: b would collapse to 1.
        assert!(matches!(
            chu_corollary_b_ac(&a, &a, &d, &e, &u, &v, &policy, &ctx),
            Err(QError::InvalidParameter(_))
        ));
    }

    #[test]
    fn six_psi_six_identity_and_policy_rejection() {
        let ctx = SeriesContext::plain(30);
        let policy = SumPolicy::default();
        let a = mono((2, 1), 4);
        let b = mono((3, 1), 1);
        let c = mono((1, 2), 2);
        let d = mono((5, 1), 1);
        let e = mono((2, 3), 2);
        let (lhs, rhs) = bailey_6psi6_sides(&a, &b, &c, &d, &e, &policy, &ctx).unwrap();
        let ord = lhs.precision().min(rhs.precision());
        assert!(lhs.equal_up_to(&rhs, ord).unwrap().is_equal());

        // Argument q a^2/(bcde) with non-positive valuation is rejected.
        let big = mono((3, 1), 6);
        let out = bailey_6psi6_sides(
            &a,
            &big,
            &big,
            &big,
            &big,
            &SumPolicy { window: 4, cap: 300 },
            &ctx,
        );
        assert!(matches!(out, Err(QError::NonConvergent(_))));
    }

    #[test]
    fn six_phi_five_is_six_psi_six_at_e_a_termwise() {
        let ctx = SeriesContext::plain(24);
        let q = ParamMonomial::q_int(1);
        let a = mono((2, 1), 4);
        let b = mono((3, 1), 1);
        let c = mono((1, 2), 2);
        let d = mono((5, 1), 1);
        let aq = a.mul(&q);
        // 6-psi-6 term with e = a: numerator (b,c,d,a), denominator
        // (aq/b, aq/c, aq/d, q) -- exactly the 6-phi-5 term.
        let psi_num = vec![b.clone(), c.clone(), d.clone(), a.clone()];
        let psi_den =
            vec![aq.div(&b).unwrap(), aq.div(&c).unwrap(), aq.div(&d).unwrap(), q.clone()];
        let phi_num = vec![a.clone(), b.clone(), c.clone(), d.clone()];
        let phi_den =
            vec![q.clone(), aq.div(&b).unwrap(), aq.div(&c).unwrap(), aq.div(&d).unwrap()];
        let z_psi = q.mul(&a.pow(2).unwrap()).div(&b.mul(&c).mul(&d).mul(&a)).unwrap();
        let z_phi = aq.div(&b.mul(&c).mul(&d)).unwrap();
        assert_eq!(z_psi, z_phi);
        for n in 0..6 {
            let t_psi = vwp_unilateral_term(&a, &psi_num, &psi_den, &z_psi, n, &ctx).unwrap();
            let t_phi = vwp_unilateral_term(&a, &phi_num, &phi_den, &z_phi, n, &ctx).unwrap();
            assert_eq!(t_psi, t_phi, "summand differs at n = {n}");
        }
    }

    #[test]
    fn six_phi_five_identity_and_rejection() {
        let ctx = SeriesContext::plain(30);
        let policy = SumPolicy::default();
        let a = mono((2, 1), 3);
        let b = mono((3, 1), 1);
        let c = mono((1, 2), 1);
        let d = mono((5, 1), 1);
        let (lhs, rhs) = jackson_6phi5_sides(&a, &b, &c, &d, &policy, &ctx).unwrap();
        let ord = lhs.precision().min(rhs.precision());
        assert!(lhs.equal_up_to(&rhs, ord).unwrap().is_equal());

        let big = mono((3, 1), 4);
        let out = jackson_6phi5_sides(&a, &big, &big, &big, &SumPolicy { window: 4, cap: 300 }, &ctx);
        assert!(matches!(out, Err(QError::NonConvergent(_))));
    }

    #[test]
    fn q_gauss_sums() {
        let ctx = SeriesContext::plain(40);
        let policy = SumPolicy::default();
        let (lhs, rhs) =
            q_gauss_andrews_sides(&mono((1, 1), 1), &mono((1, 1), 2), &policy, &ctx).unwrap();
        assert!(lhs.equal_up_to(&rhs, lhs.precision().min(rhs.precision())).unwrap().is_equal());
        let (lhs, rhs) =
            q_gauss_heine_sides(&mono((1, 1), 3), &mono((1, 1), 2), &policy, &ctx).unwrap();
        assert!(lhs.equal_up_to(&rhs, lhs.precision().min(rhs.precision())).unwrap().is_equal());
        let (lhs, rhs) =
            q_gauss_heine_sides(&mono((2, 1), 2), &mono((1, 3), 1), &policy, &ctx).unwrap();
        assert!(lhs.equal_up_to(&rhs, lhs.precision().min(rhs.precision())).unwrap().is_equal());
    }

    #[test]
    fn q_pfaff_saalschutz() {
        let ctx = SeriesContext::plain(40);
        let a = mono((1, 1), 1);
        let y = mono((2, 1), 1);
        let z = mono((3, 1), 2);
        for n in 0..=6 {
            assert!(q_pfaff_saalschutz_check(&a, &y, &z, n, &ctx).unwrap().is_equal(), "N = {n}");
        }
    }
}
