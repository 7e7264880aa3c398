//! Bailey pairs: the defining relation, the transform that turns a pair
//! into a series-series identity, the four transform specializations used
//! to reach products and false thetas, and the pair catalog.
//!
//! A pair lives in a base Q = q^k (k the world scale), relative to a
//! monomial parameter a. Every "replace q by q^k" is performed by building
//! the pair in the scaled world, never by substituting into a series.

pub mod catalog;

pub use catalog::{build_pair, catalog, Assignments, PairEntry};

use crate::error::{QError, QResult};
use crate::hypergeom::{div_one_minus, sum_unilateral, RatioLadder, SumPolicy};
use crate::monomial::ParamMonomial;
use crate::number::CycloRat;
use crate::qproducts::qpoch_inf;
use crate::series::{Comparison, LaurentSeries, SeriesContext};
use num::rational::Rational64;
use num::Zero;

/// Memoizing wrapper around a term-sequence closure.
pub struct SeqCache {
    f: Box<dyn FnMut(i64) -> QResult<LaurentSeries> + Send>,
    memo: Vec<Option<LaurentSeries>>,
}

impl SeqCache {
    pub fn new(f: Box<dyn FnMut(i64) -> QResult<LaurentSeries> + Send>) -> Self {
        SeqCache { f, memo: Vec::new() }
    }

    pub fn get(&mut self, n: i64) -> QResult<LaurentSeries> {
        assert!(n >= 0, "sequence index must be nonnegative");
        let idx = n as usize;
        if idx >= self.memo.len() {
            self.memo.resize(idx + 1, None);
        }
        if self.memo[idx].is_none() {
            self.memo[idx] = Some((self.f)(n)?);
        }
        Ok(self.memo[idx].clone().unwrap())
    }
}

/// A Bailey pair relative to `a` in base q^`base`: term generators for
/// alpha and beta with alpha(0) = beta(0) = 1 enforced.
pub struct BaileyPair {
    pub id: String,
    /// Relative parameter, in final coordinates.
    pub a: ParamMonomial,
    /// Base exponent: the pair lives over Q = q^base.
    pub base: Rational64,
    ctx: SeriesContext,
    alpha: SeqCache,
    beta: SeqCache,
}

impl BaileyPair {
    pub fn new(
        id: impl Into<String>,
        a: ParamMonomial,
        base: Rational64,
        ctx: &SeriesContext,
        alpha: Box<dyn FnMut(i64) -> QResult<LaurentSeries> + Send>,
        beta: Box<dyn FnMut(i64) -> QResult<LaurentSeries> + Send>,
    ) -> Self {
        BaileyPair {
            id: id.into(),
            a,
            base,
            ctx: *ctx,
            alpha: SeqCache::new(alpha),
            beta: SeqCache::new(beta),
        }
    }

    pub fn alpha(&mut self, n: i64) -> QResult<LaurentSeries> {
        if n == 0 {
            return Ok(LaurentSeries::one(&self.ctx));
        }
        self.alpha.get(n)
    }

    pub fn beta(&mut self, n: i64) -> QResult<LaurentSeries> {
        if n == 0 {
            return Ok(LaurentSeries::one(&self.ctx));
        }
        self.beta.get(n)
    }

    pub fn context(&self) -> &SeriesContext {
        &self.ctx
    }
}

/// Per-index outcome of the pair-definition check.
#[derive(Debug)]
pub struct PairCheckReport {
    pub id: String,
    pub spec: String,
    pub results: Vec<(i64, Comparison)>,
}

impl PairCheckReport {
    pub fn is_pass(&self) -> bool {
        self.results.iter().all(|(_, c)| c.is_equal())
    }

    pub fn first_failure(&self) -> Option<&(i64, Comparison)> {
        self.results.iter().find(|(_, c)| !c.is_equal())
    }
}

/// Check the defining relation
///   beta_n = sum_{j=0}^n alpha_j / ((Q;Q)_{n-j} (aQ;Q)_{n+j})
/// exactly, for 0 <= n <= n_max.
pub fn check_pair(pair: &mut BaileyPair, n_max: i64, spec: &str) -> QResult<PairCheckReport> {
    let ctx = pair.ctx;
    let q_base = ParamMonomial::q_pow(pair.base);
    let aq = pair.a.mul(&q_base);
    let mut inv_q = RatioLadder::with_base(&ctx, pair.base, vec![], vec![q_base.clone()]);
    let mut inv_aq = RatioLadder::with_base(&ctx, pair.base, vec![], vec![aq]);
    let mut results = Vec::new();
    for n in 0..=n_max {
        let mut rhs = LaurentSeries::zero(&ctx);
        for j in 0..=n {
            let t = pair.alpha(j)?.mul(&inv_q.get(n - j)?).mul(&inv_aq.get(n + j)?);
            rhs = rhs.add(&t);
        }
        let lhs = pair.beta(n)?;
        let ord = lhs.precision().min(rhs.precision());
        results.push((n, lhs.equal_up_to(&rhs, ord)?));
    }
    Ok(PairCheckReport { id: pair.id.clone(), spec: spec.to_string(), results })
}

/// One slot of the transform: a concrete monomial, or the limit form in
/// which the symbol is sent to infinity and the summand degenerates to
/// (-1)^n Q^(n(n-1)/2) in its place.
#[derive(Clone, Debug)]
pub enum TransformArg {
    Given(ParamMonomial),
    Limit,
}

/// Parameters of the transform: the two slots plus an optional cap N
/// selecting the finite form.
#[derive(Clone, Debug)]
pub struct TransformSpec {
    pub y: TransformArg,
    pub z: TransformArg,
    pub finite: Option<i64>,
}

impl TransformSpec {
    pub fn infinite(y: TransformArg, z: TransformArg) -> Self {
        TransformSpec { y, z, finite: None }
    }

    pub fn finite(y: ParamMonomial, z: ParamMonomial, n: i64) -> Self {
        TransformSpec { y: TransformArg::Given(y), z: TransformArg::Given(z), finite: Some(n) }
    }
}

fn given(arg: &TransformArg) -> Option<&ParamMonomial> {
    match arg {
        TransformArg::Given(m) => Some(m),
        TransformArg::Limit => None,
    }
}

/// The transform sides for a Bailey pair:
///   sum (y,z;Q)_n (aQ/yz)^n beta_n
///     = (aQ/y, aQ/z;Q)_inf / ((aQ, aQ/yz;Q)_inf)
///       * sum (y,z;Q)_n / ((aQ/y, aQ/z;Q)_n) (aQ/yz)^n alpha_n,
/// with each Limit slot replaced by its degenerate summand factor
/// (-1)^n Q^(n(n-1)/2), or the finite form when `finite` is set.
pub fn bailey_transform_sides(
    pair: &mut BaileyPair,
    spec: &TransformSpec,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    if let Some(cap) = spec.finite {
        let (Some(y), Some(z)) = (given(&spec.y), given(&spec.z)) else {
            return Err(QError::InvalidParameter(
                "the finite transform needs concrete y and z".into(),
            ));
        };
        return finite_transform_sides(pair, y, z, cap, ctx);
    }
    let step = pair.base;
    let q_base = ParamMonomial::q_pow(step);
    let a = pair.a.clone();
    let aq = a.mul(&q_base);

    let slot_args: Vec<Option<ParamMonomial>> =
        vec![given(&spec.y).cloned(), given(&spec.z).cloned()];

    // Left side.
    let mut lhs_ladder = RatioLadder::with_base(
        ctx,
        step,
        slot_args.iter().flatten().cloned().collect(),
        vec![],
    );
    let mut lhs_mono = aq.clone();
    let mut limit_count = 0u32;
    for s in &slot_args {
        match s {
            Some(m) => lhs_mono = lhs_mono.div(m)?,
            None => limit_count += 1,
        }
    }
    let two = Rational64::from_integer(2);
    let lhs = {
        let lhs_mono = lhs_mono.clone();
        sum_unilateral(
            |n| {
                let mut t = pair.beta(n)?.mul(&lhs_ladder.get(n)?);
                t = lhs_mono.pow(n)?.apply_to(&t)?;
                if limit_count > 0 {
                    let sign = CycloRat::from_int(ctx.cyclo_order(), if n % 2 == 0 { 1 } else { -1 });
                    let quad = step * Rational64::from_integer(n * (n - 1)) / two;
                    let extra = ParamMonomial::new(sign, quad * Rational64::from_integer(limit_count as i64))?;
                    if limit_count == 2 {
                        // (-1)^n twice is +1; exponent doubles.
                        t = ParamMonomial::q_pow(quad * two).apply_to(&t)?;
                    } else {
                        t = extra.apply_to(&t)?;
                    }
                }
                Ok(t)
            },
            policy,
            ctx,
        )?
    };

    // Right side sum.
    let mut rhs_num = Vec::new();
    let mut rhs_den = Vec::new();
    for s in slot_args.iter().flatten() {
        rhs_num.push(s.clone());
        rhs_den.push(aq.div(s)?);
    }
    let mut rhs_ladder = RatioLadder::with_base(ctx, step, rhs_num, rhs_den);
    let rhs_sum = {
        let lhs_mono = lhs_mono.clone();
        sum_unilateral(
            |n| {
                let mut t = pair.alpha(n)?.mul(&rhs_ladder.get(n)?);
                t = lhs_mono.pow(n)?.apply_to(&t)?;
                if limit_count > 0 {
                    let sign = CycloRat::from_int(ctx.cyclo_order(), if n % 2 == 0 { 1 } else { -1 });
                    let quad = step * Rational64::from_integer(n * (n - 1)) / two;
                    if limit_count == 2 {
                        t = ParamMonomial::q_pow(quad * two).apply_to(&t)?;
                    } else {
                        t = ParamMonomial::new(sign, quad)?.apply_to(&t)?;
                    }
                }
                Ok(t)
            },
            policy,
            ctx,
        )?
    };

    // Prefactor (aQ/y, aQ/z;Q)_inf / ((aQ;Q)_inf (aQ/yz;Q)_inf), with the
    // factors of absent slots degenerating to 1.
    let mut pref = LaurentSeries::one(ctx);
    for s in slot_args.iter().flatten() {
        pref = pref.mul(&qpoch_inf(&aq.div(s)?, step, ctx)?);
    }
    pref = pref.div(&qpoch_inf(&aq, step, ctx)?)?;
    if limit_count == 0 {
        pref = pref.div(&qpoch_inf(&lhs_mono, step, ctx)?)?;
    }
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// The finite form: for a nonnegative integer N,
///   sum_{n=0}^N (y,z,Q^-N;Q)_n Q^n beta_n / ((yz Q^-N / a;Q)_n)
///     = (aQ/y, aQ/z;Q)_N / ((aQ, aQ/yz;Q)_N)
///       * sum_{n=0}^N (y,z,Q^-N;Q)_n / ((aQ/y, aQ/z, aQ^(1+N);Q)_n)
///         * (-aQ^N/(yz))^n Q^(-n(n-3)/2) alpha_n.
fn finite_transform_sides(
    pair: &mut BaileyPair,
    y: &ParamMonomial,
    z: &ParamMonomial,
    cap: i64,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    assert!(cap >= 0, "the finite transform needs N >= 0");
    let step = pair.base;
    let q_base = ParamMonomial::q_pow(step);
    let a = pair.a.clone();
    let aq = a.mul(&q_base);
    let q_mn = q_base.pow(-cap)?;

    let mut lhs_ladder = RatioLadder::with_base(
        ctx,
        step,
        vec![y.clone(), z.clone(), q_mn.clone()],
        vec![y.mul(z).mul(&q_mn).div(&a)?],
    );
    let mut lhs = LaurentSeries::zero(ctx);
    for n in 0..=cap {
        let t = pair.beta(n)?.mul(&lhs_ladder.get(n)?);
        lhs = lhs.add(&q_base.pow(n)?.apply_to(&t)?);
    }

    let mut rhs_ladder = RatioLadder::with_base(
        ctx,
        step,
        vec![y.clone(), z.clone(), q_mn.clone()],
        vec![aq.div(y)?, aq.div(z)?, a.mul(&q_base.pow(1 + cap)?)],
    );
    let w = a.mul(&q_base.pow(cap)?).div(&y.mul(z))?.neg();
    let two = Rational64::from_integer(2);
    let mut rhs_sum = LaurentSeries::zero(ctx);
    for n in 0..=cap {
        let t = pair.alpha(n)?.mul(&rhs_ladder.get(n)?);
        let t = w.pow(n)?.apply_to(&t)?;
        let quad = -step * Rational64::from_integer(n * (n - 3)) / two;
        rhs_sum = rhs_sum.add(&ParamMonomial::q_pow(quad).apply_to(&t)?);
    }

    let fin = |arg: &ParamMonomial| crate::qproducts::qpoch_finite(arg, step, cap, ctx);
    let pref = fin(&aq.div(y)?)?
        .mul(&fin(&aq.div(z)?)?)
        .div(&fin(&aq)?.mul(&fin(&aq.div(&y.mul(z))?)?))?;
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// Specialization y = -sqrt(aQ), z = sqrt(aQ), in its closed form
///   sum (aQ;Q^2)_n (-1)^n beta_n
///     = [1 / ((aQ^2;Q^2)_inf (-1;Q)_inf)] * sum (-1)^n alpha_n.
pub fn transform_alternating(
    pair: &mut BaileyPair,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let step = pair.base;
    let two_step = step * Rational64::from_integer(2);
    let q_base = ParamMonomial::q_pow(step);
    let aq = pair.a.mul(&q_base);
    let m = ctx.cyclo_order();

    let mut lad = RatioLadder::with_base(ctx, two_step, vec![aq.clone()], vec![]);
    let lhs = sum_unilateral(
        |n| {
            let t = pair.beta(n)?.mul(&lad.get(n)?);
            Ok(t.scalar_mul(&CycloRat::from_int(m, if n % 2 == 0 { 1 } else { -1 })))
        },
        policy,
        ctx,
    )?;

    let rhs_sum = sum_unilateral(
        |n| {
            let t = pair.alpha(n)?;
            Ok(t.scalar_mul(&CycloRat::from_int(m, if n % 2 == 0 { 1 } else { -1 })))
        },
        policy,
        ctx,
    )?;
    let aq2 = pair.a.mul(&ParamMonomial::q_pow(two_step));
    let minus_one = ParamMonomial::constant(CycloRat::from_int(m, -1))?;
    let pref = LaurentSeries::one(ctx)
        .div(&qpoch_inf(&aq2, two_step, ctx)?)?
        .div(&qpoch_inf(&minus_one, step, ctx)?)?;
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// Specialization y = Q sqrt(a), z -> infinity:
///   sum (Q sqrt(a);Q)_n (-sqrt(a))^n Q^(n(n-1)/2) beta_n
///     = (Q sqrt(a);Q)_inf / (aQ;Q)_inf
///       * sum (1 - sqrt(a) Q^n) (-sqrt(a))^n Q^(n(n-1)/2) alpha_n.
pub fn transform_false_theta(
    pair: &mut BaileyPair,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let step = pair.base;
    let q_base = ParamMonomial::q_pow(step);
    let root = pair.a.sqrt()?;
    ctx.scale(root.exp()).map_err(|_| {
        QError::Grid(format!(
            "sqrt of the relative parameter {} is not representable on the grid",
            pair.a
        ))
    })?;
    let y = root.mul(&q_base);
    let neg_root = root.neg();
    let two = Rational64::from_integer(2);

    let mut lad = RatioLadder::with_base(ctx, step, vec![y.clone()], vec![]);
    let lhs = sum_unilateral(
        |n| {
            let t = pair.beta(n)?.mul(&lad.get(n)?);
            let t = neg_root.pow(n)?.apply_to(&t)?;
            let quad = step * Rational64::from_integer(n * (n - 1)) / two;
            ParamMonomial::q_pow(quad).apply_to(&t)
        },
        policy,
        ctx,
    )?;

    let rhs_sum = sum_unilateral(
        |n| {
            let factor = root.times_q(n, step).one_minus(ctx)?;
            let t = pair.alpha(n)?.mul(&factor);
            let t = neg_root.pow(n)?.apply_to(&t)?;
            let quad = step * Rational64::from_integer(n * (n - 1)) / two;
            ParamMonomial::q_pow(quad).apply_to(&t)
        },
        policy,
        ctx,
    )?;
    let aq = pair.a.mul(&q_base);
    let pref = qpoch_inf(&y, step, ctx)?.div(&qpoch_inf(&aq, step, ctx)?)?;
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// Specialization y, z -> infinity:
///   sum a^n Q^(n^2) beta_n = [1/(aQ;Q)_inf] sum a^n Q^(n^2) alpha_n.
pub fn transform_yz_limit(
    pair: &mut BaileyPair,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    let step = pair.base;
    let a = pair.a.clone();
    let weight = |n: i64| -> QResult<ParamMonomial> {
        Ok(a.pow(n)?.mul(&ParamMonomial::q_pow(step * Rational64::from_integer(n * n))))
    };
    let lhs = sum_unilateral(|n| weight(n)?.apply_to(&pair.beta(n)?), policy, ctx)?;
    let rhs_sum = sum_unilateral(|n| weight(n)?.apply_to(&pair.alpha(n)?), policy, ctx)?;
    let aq = pair.a.mul(&ParamMonomial::q_pow(step));
    let pref = LaurentSeries::one(ctx).div(&qpoch_inf(&aq, step, ctx)?)?;
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// Specialization z -> infinity, y = -sqrt(aQ), then a -> a^2express and
/// Q -> Q^2: for a pair built in base q^(2s) relative to a^2,
///   sum (-a q^s; q^(2s))_n a^n q^(s n^2) beta_n
///     = (-a q^s; q^(2s))_inf / (a^2 q^(2s); q^(2s))_inf
///       * sum a^n q^(s n^2) alpha_n.
/// `a` is given in final coordinates and must square to the pair's
/// relative parameter.
pub fn transform_squared_base(
    pair: &mut BaileyPair,
    a: &ParamMonomial,
    policy: &SumPolicy,
    ctx: &SeriesContext,
) -> QResult<(LaurentSeries, LaurentSeries)> {
    if a.mul(a) != pair.a {
        return Err(QError::InvalidParameter(format!(
            "squared-base transform needs a^2 = {} (the pair's relative parameter), got a = {a}",
            pair.a
        )));
    }
    let two = Rational64::from_integer(2);
    let s = pair.base / two;
    ctx.scale(s).map_err(|_| {
        QError::Grid(format!("half base exponent {s} is not representable on the grid"))
    })?;
    let neg_aqs = a.mul(&ParamMonomial::q_pow(s)).neg();
    let mut lad = RatioLadder::with_base(ctx, pair.base, vec![neg_aqs.clone()], vec![]);
    let weight = |n: i64| -> QResult<ParamMonomial> {
        Ok(a.pow(n)?.mul(&ParamMonomial::q_pow(s * Rational64::from_integer(n * n))))
    };
    let lhs = sum_unilateral(
        |n| weight(n)?.apply_to(&pair.beta(n)?.mul(&lad.get(n)?)),
        policy,
        ctx,
    )?;
    let rhs_sum = sum_unilateral(|n| weight(n)?.apply_to(&pair.alpha(n)?), policy, ctx)?;
    let a2q2 = pair.a.mul(&ParamMonomial::q_pow(pair.base));
    let pref = qpoch_inf(&neg_aqs, pair.base, ctx)?.div(&qpoch_inf(&a2q2, pair.base, ctx)?)?;
    Ok((lhs, pref.mul(&rhs_sum)))
}

/// Convenience: 1/(1 - f) as a series.
pub(crate) fn inv_one_minus(ctx: &SeriesContext, f: &ParamMonomial) -> QResult<LaurentSeries> {
    div_one_minus(&LaurentSeries::one(ctx), f, ctx)
}

#[cfg(test)]
mod tests;
