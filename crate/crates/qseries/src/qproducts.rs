//! q-Pochhammer symbols (finite, negative-index, infinite), triple-product
//! theta products, and theta / false theta partial sums.
//!
//! The base of a Pochhammer symbol is itself a monomial with positive
//! exponent, so products such as (q; -q^2)_n are first-class. Infinite
//! products multiply factors in increasing exponent order and stop as soon
//! as the next factor is 1 modulo the truncation order.

use crate::error::{QError, QResult};
use crate::monomial::ParamMonomial;
use crate::number::CycloRat;
use crate::series::{Comparison, LaurentSeries, SeriesContext};
use num::rational::Rational64;
use num::Zero;

/// Length of a Pochhammer product: (a;b)_n with n possibly negative, or
/// the infinite product (a;b)_inf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochLen {
    Finite(i64),
    Infinite,
}

/// A q-Pochhammer product specification.
#[derive(Clone, Debug)]
pub struct PochSpec {
    pub argument: ParamMonomial,
    pub base: ParamMonomial,
    pub length: PochLen,
}

impl PochSpec {
    pub fn new(argument: ParamMonomial, base: ParamMonomial, length: PochLen) -> QResult<Self> {
        if base.exp() <= Rational64::zero() {
            return Err(QError::InvalidParameter(format!(
                "Pochhammer base {base} must have positive exponent"
            )));
        }
        Ok(PochSpec { argument, base, length })
    }

    /// (a; q^k)_len with a plain power base.
    pub fn base_power(argument: ParamMonomial, k: Rational64, length: PochLen) -> QResult<Self> {
        Self::new(argument, ParamMonomial::q_pow(k), length)
    }
}

/// The j-th factor argument a * b^j of (a;b)_n.
fn factor_arg(spec: &PochSpec, j: i64) -> QResult<ParamMonomial> {
    Ok(spec.argument.mul(&spec.base.pow(j)?))
}

/// Evaluate a q-Pochhammer product as a truncated series.
///
/// Finite nonneg n: the plain product of n binomials. Negative n = -r:
/// the reciprocal 1/(a b^-r; b)_r; a vanishing factor there is a
/// zero-divisor error naming the offending factor. Infinite length: factors
/// are multiplied until they fall beyond the truncation order.
pub fn qpoch(spec: &PochSpec, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    match spec.length {
        PochLen::Finite(n) if n >= 0 => {
            let mut acc = LaurentSeries::one(ctx);
            for j in 0..n {
                let f = factor_arg(spec, j)?;
                acc = acc.mul_binomial(&f.coeff().retag(ctx.cyclo_order())?, f.exp())?;
            }
            Ok(acc)
        }
        PochLen::Finite(n) => {
            let r = -n;
            // (a;b)_{-r} = 1 / (a b^{-r}; b)_r
            let mut acc = LaurentSeries::one(ctx);
            for j in 0..r {
                let f = factor_arg(spec, j - r)?;
                if f.is_one() {
                    return Err(QError::NotAUnit(format!(
                        "vanishing factor (1 - {f}) in reciprocal Pochhammer ({}; {})_{}",
                        spec.argument, spec.base, n
                    )));
                }
                acc = acc.mul_binomial(&f.coeff().retag(ctx.cyclo_order())?, f.exp())?;
            }
            acc.invert().map_err(|_| {
                QError::NotAUnit(format!(
                    "reciprocal Pochhammer ({}; {})_{} is not a unit",
                    spec.argument, spec.base, n
                ))
            })
        }
        PochLen::Infinite => {
            let mut acc = LaurentSeries::one(ctx);
            let mut j = 0i64;
            loop {
                let f = factor_arg(spec, j)?;
                if f.exp() >= ctx.truncation_order() {
                    // Positive base exponent: all later factors are 1 modulo
                    // the truncation order.
                    break;
                }
                acc = acc.mul_binomial(&f.coeff().retag(ctx.cyclo_order())?, f.exp())?;
                j += 1;
            }
            Ok(acc)
        }
    }
}

/// Finite (a; q^k)_n for a monomial argument.
pub fn qpoch_finite(
    arg: &ParamMonomial,
    base: Rational64,
    n: i64,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    qpoch(&PochSpec::base_power(arg.clone(), base, PochLen::Finite(n))?, ctx)
}

/// Infinite (a; q^k)_inf for a monomial argument.
pub fn qpoch_inf(arg: &ParamMonomial, base: Rational64, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    qpoch(&PochSpec::base_power(arg.clone(), base, PochLen::Infinite)?, ctx)
}

/// Sign selector for theta-type sums and products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn coeff(&self, m: u32) -> CycloRat {
        match self {
            Sign::Plus => CycloRat::one(m),
            Sign::Minus => CycloRat::from_int(m, -1),
        }
    }

    pub fn pow(&self, n: i64) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => {
                if n.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn flip(&self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if matches!(self, Sign::Plus) { "+" } else { "-" })
    }
}

/// The triple product (sgn*q^s, sgn*q^(2r-s), q^(2r); q^(2r))_inf, where
/// `sign` is the literal sign carried by the first two arguments.
pub fn theta_product(s: Rational64, r: Rational64, sign: Sign, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    if r <= Rational64::zero() {
        return Err(QError::InvalidParameter("theta product needs r > 0".into()));
    }
    let two_r = r * Rational64::from_integer(2);
    let m = ctx.cyclo_order();
    let sgn = sign.coeff(m);
    let args = [
        ParamMonomial::new(sgn.clone(), s)?,
        ParamMonomial::new(sgn, two_r - s)?,
        ParamMonomial::q_pow(two_r),
    ];
    let mut acc = LaurentSeries::one(ctx);
    for a in &args {
        if a.is_one() {
            // A factor (1 - 1*q^0) kills the whole product.
            return Ok(LaurentSeries::zero(ctx));
        }
        acc = acc.mul(&qpoch_inf(a, two_r, ctx)?);
    }
    Ok(acc)
}

/// The bilateral theta sum over n in Z of sign^n * q^(r n^2 + s n),
/// truncated at the context order. Quadratic exponent growth bounds the
/// index range directly.
pub fn theta_series(r: Rational64, s: Rational64, sign: Sign, ctx: &SeriesContext) -> QResult<LaurentSeries> {
    if r <= Rational64::zero() {
        return Err(QError::NonConvergent("theta series needs r > 0".into()));
    }
    let mut acc = LaurentSeries::zero(ctx);
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { 0 } else { -1 };
        loop {
            let e = r * Rational64::from_integer(n * n) + s * Rational64::from_integer(n);
            if e >= ctx.truncation_order() && past_vertex(r, s, n, dir) {
                break;
            }
            if e < ctx.truncation_order() {
                let c = CycloRat::from_int(ctx.cyclo_order(), sign.pow(n));
                acc = acc.add(&LaurentSeries::monomial(ctx, &c, e)?);
            }
            n += dir;
        }
    }
    Ok(acc)
}

fn past_vertex(r: Rational64, s: Rational64, n: i64, dir: i64) -> bool {
    // Exponent r n^2 + s n is monotone beyond the vertex -s/(2r).
    let v = -s / (r * Rational64::from_integer(2));
    let n = Rational64::from_integer(n);
    if dir == 1 {
        n > v
    } else {
        n < v
    }
}

/// The one-sided difference
/// sum_{n>=0} sign^n q^(r n^2 + s n) - sum_{n>=1} sign^n q^(r n^2 - s n),
/// always evaluated as the two one-sided sums (the factored form degenerates
/// at r = s and is kept as a property test only).
pub fn false_theta_series(
    r: Rational64,
    s: Rational64,
    sign: Sign,
    ctx: &SeriesContext,
) -> QResult<LaurentSeries> {
    if r <= Rational64::zero() {
        return Err(QError::NonConvergent("false theta series needs r > 0".into()));
    }
    let mut acc = LaurentSeries::zero(ctx);
    for (sgn_of_part, s_part, start) in [(1i64, s, 0i64), (-1, -s, 1)] {
        let mut n = start;
        loop {
            let e = r * Rational64::from_integer(n * n) + s_part * Rational64::from_integer(n);
            if e >= ctx.truncation_order() && past_vertex(r, s_part, n, 1) {
                break;
            }
            if e < ctx.truncation_order() {
                let c = CycloRat::from_int(ctx.cyclo_order(), sign.pow(n) * sgn_of_part);
                acc = acc.add(&LaurentSeries::monomial(ctx, &c, e)?);
            }
            n += 1;
        }
    }
    Ok(acc)
}

/// Confirm the finite expansion
/// (q^-n; q)_j = (q;q)_n q^(j(j-1)/2) / ((q;q)_{n-j} (-q^n)^j)
/// as truncated series; used by the proof-step regression suite.
pub fn qpoch_ratio_identity_check(n: i64, j: i64, ctx: &SeriesContext) -> QResult<Comparison> {
    assert!((0..=n).contains(&j), "need 0 <= j <= n");
    let one = Rational64::from_integer(1);
    let lhs = qpoch_finite(&ParamMonomial::q_int(-n), one, j, ctx)?;
    let num = qpoch_finite(&ParamMonomial::q_int(1), one, n, ctx)?
        .shift(Rational64::new(j * (j - 1), 2))?;
    let den = qpoch_finite(&ParamMonomial::q_int(1), one, n - j, ctx)?;
    let pow = ParamMonomial::q_int(n).neg().pow(j)?;
    let rhs = num.div(&den.mul(&pow.series(ctx)?))?;
    lhs.equal_up_to(&rhs, lhs.precision().min(rhs.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::Rational64;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn q_mono(c: (i64, i64), e: (i64, i64)) -> ParamMonomial {
        ParamMonomial::new(CycloRat::from_ratio(1, c.0, c.1), Rational64::new(e.0, e.1)).unwrap()
    }

    #[test]
    fn empty_product_is_one() {
        let ctx = SeriesContext::plain(10);
        let s = qpoch_finite(&q_mono((2, 3), (1, 1)), r(1), 0, &ctx).unwrap();
        assert_eq!(s, LaurentSeries::one(&ctx));
    }

    #[test]
    fn finite_product_matches_hand_expansion() {
        // (q;q)_3 = 1 - q - q^2 + q^4 + q^5 - q^6
        let ctx = SeriesContext::plain(12);
        let s = qpoch_finite(&ParamMonomial::q_int(1), r(1), 3, &ctx).unwrap();
        let expect: &[(i64, i64)] = &[(0, 1), (1, -1), (2, -1), (4, 1), (5, 1), (6, -1)];
        for &(e, c) in expect {
            assert_eq!(s.coeff(r(e)).unwrap(), CycloRat::from_int(1, c), "coeff of q^{e}");
        }
        assert_eq!(s.term_count(), expect.len());
    }

    #[test]
    fn euler_product_matches_pentagonal_numbers() {
        // Oracle: sum over k of (-1)^k q^(k(3k-1)/2) + (-1)^k q^(k(3k+1)/2), k >= 0.
        let ctx = SeriesContext::plain(13);
        let s = qpoch_inf(&ParamMonomial::q_int(1), r(1), &ctx).unwrap();
        let mut oracle = LaurentSeries::one(&ctx);
        for k in 1..6i64 {
            let sign = CycloRat::from_int(1, if k % 2 == 0 { 1 } else { -1 });
            for e in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                if e < 13 {
                    oracle = oracle.add(&LaurentSeries::monomial(&ctx, &sign, r(e)).unwrap());
                }
            }
        }
        assert!(s.equal_up_to(&oracle, r(13)).unwrap().is_equal());
        // Spot check the classical expansion to order 12.
        assert_eq!(format!("{s}"), "1 - q - q^2 + q^5 + q^7 - q^12 + O(q^13)");
    }

    #[test]
    fn negative_index_is_reciprocal() {
        let ctx = SeriesContext::plain(20);
        let a = q_mono((3, 1), (2, 1));
        // (a;q)_{-r} * (a q^{-r};q)_r = 1
        for rr in 1..5i64 {
            let neg = qpoch_finite(&a, r(1), -rr, &ctx).unwrap();
            let back = qpoch_finite(&a.mul(&ParamMonomial::q_int(-rr)), r(1), rr, &ctx).unwrap();
            let prod = neg.mul(&back);
            assert!(prod.equal_up_to(&LaurentSeries::one(&ctx), prod.precision()).unwrap().is_equal());
        }
        // (q^2;q)_{-2} hits the vanishing factor 1 - q^2*q^{-2}.
        let bad = qpoch_finite(&ParamMonomial::q_int(2), r(1), -2, &ctx);
        assert!(matches!(bad, Err(QError::NotAUnit(_))));
    }

    #[test]
    fn negative_base_product() {
        // (q; -q^2)_3 = (1-q)(1+q^3)(1-q^5)
        let ctx = SeriesContext::plain(12);
        let base = ParamMonomial::new(CycloRat::from_int(1, -1), r(2)).unwrap();
        let spec = PochSpec::new(ParamMonomial::q_int(1), base, PochLen::Finite(3)).unwrap();
        let s = qpoch(&spec, &ctx).unwrap();
        let mut expect = LaurentSeries::one(&ctx);
        for (c, e) in [(1i64, 1i64), (-1, 3), (1, 5)] {
            expect = expect.mul_binomial(&CycloRat::from_int(1, c), r(e)).unwrap();
        }
        assert_eq!(s, expect);
    }

    #[test]
    fn theta_product_examples() {
        let ctx = SeriesContext::plain(20);
        // (-q^3, -q^5, q^8; q^8)_inf
        let tp = theta_product(r(3), r(4), Sign::Minus, &ctx).unwrap();
        let direct = qpoch_inf(&q_mono((-1, 1), (3, 1)), r(8), &ctx)
            .unwrap()
            .mul(&qpoch_inf(&q_mono((-1, 1), (5, 1)), r(8), &ctx).unwrap())
            .mul(&qpoch_inf(&ParamMonomial::q_int(8), r(8), &ctx).unwrap());
        assert_eq!(tp, direct);
        // A vanishing factor collapses the product to zero: s = 0 with plus
        // sign makes the first argument equal to 1.
        let z = theta_product(r(0), r(4), Sign::Plus, &ctx).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn theta_series_order_one() {
        let ctx = SeriesContext::plain(5);
        let t = theta_series(r(1), r(0), Sign::Plus, &ctx).unwrap();
        assert_eq!(format!("{t}"), "1 + 2*q + 2*q^4 + O(q^5)");
        // Truncation below the first nonconstant term keeps only 1.
        let tiny = SeriesContext::plain(1);
        let t0 = theta_series(r(1), r(0), Sign::Plus, &tiny).unwrap();
        assert_eq!(t0, LaurentSeries::one(&tiny));
        assert!(matches!(theta_series(r(-1), r(0), Sign::Plus, &ctx), Err(QError::NonConvergent(_))));
    }

    #[test]
    fn jacobi_triple_product_cross_check() {
        // sum_n sign^n q^(r n^2 + s n) = (-sign q^(r+s), -sign q^(r-s), q^(2r); q^(2r))_inf
        let ctx = SeriesContext::plain(60);
        for (rr, ss) in [(1i64, 0i64), (2, 1), (8, 2), (3, 2), (4, 1)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let lhs = theta_series(r(rr), r(ss), sign, &ctx).unwrap();
                let rhs = theta_product(r(rr + ss), r(rr), sign.flip(), &ctx).unwrap();
                assert!(
                    lhs.equal_up_to(&rhs, r(60)).unwrap().is_equal(),
                    "JTP fails for r={rr}, s={ss}, sign={sign}"
                );
            }
        }
    }

    fn factored_sum(rr: i64, ss: i64, sign: Sign, ctx: &SeriesContext) -> LaurentSeries {
        // sum_{n>=0} sign^n q^(r n^2 + s n) (1 - q^(2(r-s)n + (r-s)))
        let mut factored = LaurentSeries::zero(ctx);
        let d = rr - ss;
        for n in 0..200i64 {
            let e = rr * n * n + ss * n;
            if Rational64::from_integer(e) >= ctx.truncation_order() && e > 0 {
                break;
            }
            let c = CycloRat::from_int(1, sign.pow(n));
            let t = LaurentSeries::monomial(ctx, &c, r(e))
                .unwrap()
                .mul_binomial(&CycloRat::one(1), r(2 * d * n + d))
                .unwrap();
            factored = factored.add(&t);
        }
        factored
    }

    #[test]
    fn false_theta_factored_form_agrees_for_plus() {
        let ctx = SeriesContext::plain(40);
        for (rr, ss) in [(6i64, 2i64), (4, 1), (8, 4), (2, 1)] {
            let ft = false_theta_series(r(rr), r(ss), Sign::Plus, &ctx).unwrap();
            let factored = factored_sum(rr, ss, Sign::Plus, &ctx);
            assert!(ft.equal_up_to(&factored, r(40)).unwrap().is_equal(), "r={rr} s={ss}");
        }
    }

    #[test]
    fn factored_form_with_alternating_sign_is_a_theta_series() {
        // With sign -1 the reindexed second sum flips its sign, so the
        // factored sum telescopes to the bilateral theta sum instead.
        let ctx = SeriesContext::plain(40);
        for (rr, ss) in [(6i64, 4i64), (4, 1), (3, 2)] {
            let factored = factored_sum(rr, ss, Sign::Minus, &ctx);
            let theta = theta_series(r(rr), r(ss), Sign::Minus, &ctx).unwrap();
            assert!(factored.equal_up_to(&theta, r(40)).unwrap().is_equal(), "r={rr} s={ss}");
        }
    }

    #[test]
    fn false_theta_degenerate_r_equals_s() {
        // At r = s the factored form has a (1 - q^0) factor in every term;
        // the two-sum evaluation stays well defined. For the plus sign the
        // two sums cancel exactly; for the minus sign they add up.
        let ctx = SeriesContext::plain(30);
        let plus = false_theta_series(r(2), r(2), Sign::Plus, &ctx).unwrap();
        assert!(plus.is_zero());
        let minus = false_theta_series(r(2), r(2), Sign::Minus, &ctx).unwrap();
        let mut expect = LaurentSeries::zero(&ctx);
        for n in 0..5i64 {
            let e = 2 * n * n + 2 * n;
            if e < 30 {
                let c = CycloRat::from_int(1, 2 * Sign::Minus.pow(n));
                expect = expect.add(&LaurentSeries::monomial(&ctx, &c, r(e)).unwrap());
            }
        }
        assert!(minus.equal_up_to(&expect, r(30)).unwrap().is_equal());
    }

    #[test]
    fn ratio_identity_samples() {
        let ctx = SeriesContext::plain(30);
        for (n, j) in [(3, 0), (3, 3), (5, 2)] {
            assert!(qpoch_ratio_identity_check(n, j, &ctx).unwrap().is_equal(), "n={n} j={j}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pochhammer_splits_at_any_index(m in 0i64..8, n in 0i64..8, cn in 1i64..5, cd in 1i64..5, e in 1i64..4) {
            // (a;q)_{m+n} = (a;q)_m (a q^m;q)_n
            let ctx = SeriesContext::plain(24);
            let a = q_mono((cn, cd), (e, 1));
            let whole = qpoch_finite(&a, r(1), m + n, &ctx).unwrap();
            let left = qpoch_finite(&a, r(1), m, &ctx).unwrap();
            let right = qpoch_finite(&a.mul(&ParamMonomial::q_int(m)), r(1), n, &ctx).unwrap();
            prop_assert!(whole.equal_up_to(&left.mul(&right), r(24)).unwrap().is_equal());
        }

        #[test]
        fn infinite_product_splits(n in 0i64..10, cn in 1i64..4, e in 1i64..4) {
            // (a;q)_inf = (a;q)_n (a q^n;q)_inf
            let ctx = SeriesContext::plain(20);
            let a = q_mono((cn, 1), (e, 1));
            let whole = qpoch_inf(&a, r(1), &ctx).unwrap();
            let head = qpoch_finite(&a, r(1), n, &ctx).unwrap();
            let tail = qpoch_inf(&a.mul(&ParamMonomial::q_int(n)), r(1), &ctx).unwrap();
            prop_assert!(whole.equal_up_to(&head.mul(&tail), r(20)).unwrap().is_equal());
        }
    }
}
