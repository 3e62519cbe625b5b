//! Exact characteristic-class arithmetic for would-be projective planes: the
//! two nonzero Pontryagin degrees carry everything, so classes live in the
//! four-dimensional ring spanned by `1, P, P^2, Q` with `P^3 = PQ = Q^2 = 0`
//! (`P` in degree `4k`, `Q` in degree `8k`).
//!
//! The top pairing against the fundamental class sends `P^2 -> x^2` and
//! `Q -> y`, where `x, y` are the candidate Pontryagin numbers.  A dimension
//! admits the manifold iff the signature equation holds and two integrality
//! conditions land in `Z[1/2]`; that predicate is `check_theorem31`.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorial, odd_part};
use crate::bernoulli::BernoulliCtx;
use crate::error::{Error, Result};

/// Hirzebruch L-genus coefficients in the two relevant degrees, reduced to
/// the plane situation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LCoeffs {
    pub s_k: BigRational,
    pub s_2k: BigRational,
    pub s_kk: BigRational,
}

/// A-hat genus coefficients in the two relevant degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ACoeffs {
    pub a_k: BigRational,
    pub a_2k: BigRational,
    pub a_kk: BigRational,
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

fn sign_pow(exponent: u64) -> BigInt {
    if exponent % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn pow2(e: u64) -> BigInt {
    BigInt::from(BigUint::one() << e)
}

/// `s_j = 2^(2j) (2^(2j-1) - 1) |B_2j| / (2j)!` for `j = k, 2k`, plus the
/// mixed coefficient `s_kk = (s_k^2 - s_2k)/2`.
pub fn l_coeffs(k: u64, ctx: &mut BernoulliCtx) -> Result<LCoeffs> {
    if k == 0 {
        return Err(Error::domain("l_coeffs: k must be positive"));
    }
    let s = |j: u64, ctx: &mut BernoulliCtx| -> Result<BigRational> {
        let b = ctx.divided_bernoulli(2 * j)?;
        // |B_2j|/(2j)! = (N/D) / (2j-1)!
        let numer = pow2(2 * j) * (pow2(2 * j - 1) - BigInt::one()) * BigInt::from(b.numerator);
        let denom = BigInt::from(b.denominator) * BigInt::from(factorial(2 * j - 1));
        Ok(rat(numer, denom))
    };
    let s_k = s(k, ctx)?;
    let s_2k = s(2 * k, ctx)?;
    let s_kk = (&s_k * &s_k - &s_2k) / rat(int(2), int(1));
    Ok(LCoeffs { s_k, s_2k, s_kk })
}

/// `a_j = -|B_2j| / (2 (2j)!)` for `j = k, 2k`, plus `a_kk = (a_k^2 - a_2k)/2`.
pub fn a_coeffs(k: u64, ctx: &mut BernoulliCtx) -> Result<ACoeffs> {
    if k == 0 {
        return Err(Error::domain("a_coeffs: k must be positive"));
    }
    let a = |j: u64, ctx: &mut BernoulliCtx| -> Result<BigRational> {
        let b = ctx.divided_bernoulli(2 * j)?;
        let numer = -BigInt::from(b.numerator);
        let denom = int(2) * BigInt::from(b.denominator) * BigInt::from(factorial(2 * j - 1));
        Ok(rat(numer, denom))
    };
    let a_k = a(k, ctx)?;
    let a_2k = a(2 * k, ctx)?;
    let a_kk = (&a_k * &a_k - &a_2k) / rat(int(2), int(1));
    Ok(ACoeffs { a_k, a_2k, a_kk })
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `M_l(k) = sum_{j=0}^{l-1} (-1)^j C(2l, j) (l-j)^(2k)`; always divisible
/// by `l`.
pub fn m_value(l: u64, k: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..l {
        let term = BigInt::from(binomial(2 * l, j) * BigUint::from(l - j).pow(2 * k as u32));
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// A cohomology class with no scalar part: coefficients on `P`, `P^2`, `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalClass {
    pub c_pk: BigRational,
    pub c_pk2: BigRational,
    pub c_p2k: BigRational,
}

impl FormalClass {
    pub fn zero() -> Self {
        FormalClass {
            c_pk: BigRational::zero(),
            c_pk2: BigRational::zero(),
            c_p2k: BigRational::zero(),
        }
    }

    /// Product of two scalar-free classes: only `P * P = P^2` survives.
    pub fn mul(&self, other: &FormalClass) -> FormalClass {
        FormalClass {
            c_pk: BigRational::zero(),
            c_pk2: &self.c_pk * &other.c_pk,
            c_p2k: BigRational::zero(),
        }
    }

    /// Pair the top-degree part against the fundamental class.
    pub fn pair(&self, x: &BigInt, y: &BigInt) -> BigRational {
        &self.c_pk2 * BigRational::from_integer(x * x)
            + &self.c_p2k * BigRational::from_integer(y.clone())
    }
}

/// Leading-term coefficients of `e_l` from the closed form: the `P`
/// coefficient is `(-1)^(k+l) M_l(k) / (l (2k-1)!)` and the `Q` coefficient
/// is `(-1)^l M_l(2k) / (l (4k-1)!)`.
pub fn e_class_linear(l: u64, k: u64) -> (BigRational, BigRational) {
    let f2 = BigInt::from(factorial(2 * k - 1));
    let f4 = BigInt::from(factorial(4 * k - 1));
    let c_pk = rat(sign_pow(k + l) * m_value(l, k), BigInt::from(l) * f2);
    let c_p2k = rat(sign_pow(l) * m_value(l, 2 * k), BigInt::from(l) * f4);
    (c_pk, c_p2k)
}

/// The classes `e_1 ... e_lmax` by the recursion
/// `e_l = ((-1)^(l+1)/l) [M_l(2k) e_1 + (M_l(k) - M_l(2k)) e1_P P]
///        + (1/2) sum_i e_i e_(l-i)`.
pub fn e_classes(l_max: u64, k: u64) -> Result<Vec<FormalClass>> {
    if k == 0 || l_max == 0 {
        return Err(Error::domain("e_classes: k and l_max must be positive"));
    }
    let f2 = BigInt::from(factorial(2 * k - 1));
    let f4 = BigInt::from(factorial(4 * k - 1));
    let e1_p = rat(sign_pow(k + 1), f2);
    let e1 = FormalClass {
        c_pk: e1_p.clone(),
        c_pk2: rat(BigInt::one(), int(2) * &f4),
        c_p2k: rat(-BigInt::one(), f4),
    };
    let mut es: Vec<FormalClass> = Vec::with_capacity(l_max as usize);
    es.push(e1.clone());
    for l in 2..=l_max {
        let ml_k = m_value(l, k);
        let ml_2k = m_value(l, 2 * k);
        let lead = rat(sign_pow(l + 1), BigInt::from(l));
        let mut c_pk = &lead * (&e1.c_pk * BigRational::from_integer(ml_2k.clone())
            + BigRational::from_integer(ml_k - &ml_2k) * &e1_p);
        let mut c_pk2 = &lead * &e1.c_pk2 * BigRational::from_integer(ml_2k.clone());
        let mut c_p2k = &lead * &e1.c_p2k * BigRational::from_integer(ml_2k);
        let half = rat(BigInt::one(), int(2));
        for i in 1..l {
            let prod = es[(i - 1) as usize].mul(&es[(l - i - 1) as usize]);
            c_pk2 = c_pk2 + &half * prod.c_pk2;
        }
        // The linear parts of the recursion must agree with the closed form.
        let (cf_pk, cf_p2k) = e_class_linear(l, k);
        debug_assert_eq!(c_pk, cf_pk);
        debug_assert_eq!(c_p2k, cf_p2k);
        c_pk = cf_pk;
        c_p2k = cf_p2k;
        es.push(FormalClass {
            c_pk,
            c_pk2,
            c_p2k,
        });
    }
    Ok(es)
}

/// Largest `k` accepted by the series-expansion route and the exhaustive
/// integrality check; both are quadratic-cost validators for small cases.
pub const BRUTE_FORCE_MAX_K: u64 = 6;

/// Independent computation of `e_l` by expanding the defining power series:
/// power sums of the `T`-series are assembled from prescribed elementary
/// symmetric values via Newton-Girard, entirely inside the truncated ring.
pub fn e_class_bruteforce(l: u64, k: u64) -> Result<FormalClass> {
    if k == 0 || l == 0 {
        return Err(Error::domain("e_class_bruteforce: k and l must be positive"));
    }
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::capacity(format!(
            "e_class_bruteforce: k={k} exceeds the supported bound {BRUTE_FORCE_MAX_K}"
        )));
    }
    let deg = (2 * k) as usize;
    // f(t) = sum_{i>=1} 2 t^i / (2i)!, truncated beyond t^(2k).
    let mut f = alloc::vec![BigRational::zero(); deg + 1];
    for i in 1..=deg {
        f[i] = rat(int(2), BigInt::from(factorial(2 * i as u64)));
    }
    // Scalar-free 4-ring elements: (c0, cP, cP2, cQ).
    type Ring = [BigRational; 4];
    let ring_zero = || -> Ring {
        [
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ]
    };
    let ring_mul = |a: &Ring, b: &Ring| -> Ring {
        [
            &a[0] * &b[0],
            &a[0] * &b[1] + &a[1] * &b[0],
            &a[0] * &b[2] + &a[1] * &b[1] + &a[2] * &b[0],
            &a[0] * &b[3] + &a[3] * &b[0],
        ]
    };
    // Power sums of the underlying roots: m_k(t) and m_2k(t) are the only
    // nonzero ones up to degree 2k.
    let mk_t = {
        let mut r = ring_zero();
        r[1] = BigRational::from_integer(sign_pow(k + 1) * BigInt::from(k));
        r
    };
    let m2k_t = {
        let mut r = ring_zero();
        r[2] = BigRational::from_integer(BigInt::from(k));
        r[3] = BigRational::from_integer(int(-2) * BigInt::from(k));
        r
    };
    // m_j(T) = [t^k](f^j) m_k(t) + [t^2k](f^j) m_2k(t).
    let mut g = alloc::vec![BigRational::zero(); deg + 1];
    g[0] = BigRational::one(); // f^0
    let mut m_t_series: Vec<Ring> = Vec::new(); // m_1(T) .. m_l(T)
    for _j in 1..=l {
        // g *= f, truncated.
        let mut next = alloc::vec![BigRational::zero(); deg + 1];
        for a in 0..=deg {
            if g[a].is_zero() {
                continue;
            }
            for b in 1..=deg - a {
                if f[b].is_zero() {
                    continue;
                }
                let v = &g[a] * &f[b];
                next[a + b] = &next[a + b] + v;
            }
        }
        g = next;
        let mut mj = ring_zero();
        for (coeff, base) in [(&g[k as usize], &mk_t), (&g[deg], &m2k_t)] {
            for c in 0..4 {
                mj[c] = &mj[c] + coeff * &base[c];
            }
        }
        m_t_series.push(mj);
    }
    // Newton-Girard: e_0 = 1; e_j = (1/j) sum_{i=1}^{j} (-1)^(i-1) m_i e_(j-i).
    let mut es: Vec<Ring> = Vec::with_capacity(l as usize + 1);
    let mut e0 = ring_zero();
    e0[0] = BigRational::one();
    es.push(e0);
    for j in 1..=l {
        let mut acc = ring_zero();
        for i in 1..=j {
            let prod = ring_mul(&m_t_series[(i - 1) as usize], &es[(j - i) as usize]);
            for c in 0..4 {
                if i % 2 == 1 {
                    acc[c] = &acc[c] + &prod[c];
                } else {
                    acc[c] = &acc[c] - &prod[c];
                }
            }
        }
        let inv_j = rat(BigInt::one(), BigInt::from(j));
        for c in acc.iter_mut() {
            *c = &*c * &inv_j;
        }
        es.push(acc);
    }
    let out = &es[l as usize];
    debug_assert!(out[0].is_zero());
    Ok(FormalClass {
        c_pk: out[1].clone(),
        c_pk2: out[2].clone(),
        c_p2k: out[3].clone(),
    })
}

/// Is the odd part of the reduced denominator trivial, i.e. is `q` a
/// 2-integral rational?
pub fn in_z_half(q: &BigRational) -> bool {
    odd_part(q.denom().magnitude()).is_one()
}

/// Everything `check_theorem31` measured, kept for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem31Report {
    pub signature_holds: bool,
    pub e1_pairing: BigRational,
    pub e1_in_z_half: bool,
    pub e1e1_in_z_half: bool,
}

impl Theorem31Report {
    pub fn passed(&self) -> bool {
        self.signature_holds && self.e1_in_z_half && self.e1e1_in_z_half
    }
}

/// The existence predicate for dimension `8k` at candidate Pontryagin
/// numbers `(x, y)`:
///  (a) `s_kk x^2 + s_2k y = 1` (signature),
///  (b) `((-1)^(k+1) s_k/(2k-1)! + 1/(2 (4k-1)!)) x^2 - y/(4k-1)!` lies in
///      `Z[1/2]`,
///  (c) `x^2 / ((2k-1)!)^2` lies in `Z[1/2]`.
pub fn check_theorem31(
    k: u64,
    x: &BigInt,
    y: &BigInt,
    ctx: &mut BernoulliCtx,
) -> Result<Theorem31Report> {
    if k == 0 {
        return Err(Error::domain("check_theorem31: k must be positive"));
    }
    let lc = l_coeffs(k, ctx)?;
    let x2 = BigRational::from_integer(x * x);
    let y_rat = BigRational::from_integer(y.clone());
    let signature = &lc.s_kk * &x2 + &lc.s_2k * &y_rat;
    let f2 = BigInt::from(factorial(2 * k - 1));
    let f4 = BigInt::from(factorial(4 * k - 1));
    let e1_pairing = (BigRational::from_integer(sign_pow(k + 1)) * &lc.s_k / BigRational::from_integer(f2.clone())
        + rat(BigInt::one(), int(2) * &f4))
        * &x2
        - &y_rat / BigRational::from_integer(f4);
    let e1e1 = &x2 / BigRational::from_integer(&f2 * &f2);
    Ok(Theorem31Report {
        signature_holds: signature.is_one(),
        e1_in_z_half: in_z_half(&e1_pairing),
        e1e1_in_z_half: in_z_half(&e1e1),
        e1_pairing,
    })
}

/// The full integrality battery behind the theorem: signature plus
/// `<e_l L> in Z[1/2]` for `l <= 2k` and `<e_l e_m L> in Z[1/2]` for
/// `l + m <= 2k`.  Quadratic cost; capped at small `k` where it serves as an
/// independent oracle for `check_theorem31`.
pub fn hattori_stong_full_check(
    k: u64,
    x: &BigInt,
    y: &BigInt,
    ctx: &mut BernoulliCtx,
) -> Result<bool> {
    if k == 0 {
        return Err(Error::domain("hattori_stong_full_check: k must be positive"));
    }
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::capacity(format!(
            "hattori_stong_full_check: k={k} exceeds the supported bound {BRUTE_FORCE_MAX_K}"
        )));
    }
    let lc = l_coeffs(k, ctx)?;
    let x2 = BigRational::from_integer(x * x);
    let y_rat = BigRational::from_integer(y.clone());
    if !(&lc.s_kk * &x2 + &lc.s_2k * &y_rat).is_one() {
        return Ok(false);
    }
    let es = e_classes(2 * k, k)?;
    for (i, e) in es.iter().enumerate() {
        let l = i as u64 + 1;
        // <e_l . L, mu> = (c_pk s_k + c_pk2) x^2 + c_p2k y
        let val = (&e.c_pk * &lc.s_k + &e.c_pk2) * &x2 + &e.c_p2k * &y_rat;
        if !in_z_half(&val) {
            return Ok(false);
        }
        for (j, e2) in es.iter().enumerate() {
            let m = j as u64 + 1;
            if l + m > 2 * k || m < l {
                continue;
            }
            // <e_l e_m . L, mu> = c_pk(l) c_pk(m) x^2
            let val = &e.c_pk * &e2.c_pk * &x2;
            if !in_z_half(&val) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> BernoulliCtx {
        BernoulliCtx::new()
    }

    fn q(n: i64, d: i64) -> BigRational {
        rat(int(n), int(d))
    }

    #[test]
    fn l_coefficients_small_k() {
        let mut c = ctx();
        let lc = l_coeffs(1, &mut c).unwrap();
        assert_eq!(lc.s_k, q(1, 3));
        assert_eq!(lc.s_2k, q(7, 45));
        assert_eq!(lc.s_kk, q(-1, 45));
        // signature at the classical dimension-8 values
        let sig = &lc.s_kk * q(4, 1) + &lc.s_2k * q(7, 1);
        assert!(sig.is_one());
    }

    #[test]
    fn a_coefficients_small_k() {
        let mut c = ctx();
        let ac = a_coeffs(1, &mut c).unwrap();
        assert_eq!(ac.a_k, q(-1, 24));
        assert_eq!(ac.a_2k, q(-1, 1440));
        assert_eq!(ac.a_kk, q(7, 5760));
        // The quaternionic plane has integral A-hat genus zero:
        // 7/5760 * 4 - 1/1440 * 7 = 0.
        let ahat = &ac.a_kk * q(4, 1) + &ac.a_2k * q(7, 1);
        assert!(ahat.is_zero());
    }

    #[test]
    fn l_and_a_coefficients_are_linked() {
        // s_2k = -2^(4k+1) (2^(4k-1) - 1) a_2k
        let mut c = ctx();
        for k in 1..=8u64 {
            let lc = l_coeffs(k, &mut c).unwrap();
            let ac = a_coeffs(k, &mut c).unwrap();
            let factor = BigRational::from_integer(
                -pow2(4 * k + 1) * (pow2(4 * k - 1) - BigInt::one()),
            );
            assert_eq!(lc.s_2k, factor * ac.a_2k, "k={k}");
        }
    }

    #[test]
    fn m_values_match_known() {
        assert_eq!(m_value(1, 5), BigInt::one());
        assert_eq!(m_value(2, 3), int(60));
        assert_eq!(m_value(3, 2), BigInt::zero());
        // l | M_l(k) on a small grid (the full grid runs in integration).
        for l in 1..=16u64 {
            for k in 1..=16u64 {
                let m = m_value(l, k);
                assert!(
                    (m % BigInt::from(l)).is_zero(),
                    "l={l} does not divide M_l({k})"
                );
            }
        }
    }

    #[test]
    fn e_class_routes_agree() {
        for k in 1..=4u64 {
            let es = e_classes(2 * k, k).unwrap();
            for l in 1..=2 * k {
                let bf = e_class_bruteforce(l, k).unwrap();
                assert_eq!(es[(l - 1) as usize], bf, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn e1_matches_hand_formula() {
        let es = e_classes(1, 3).unwrap();
        let f2 = BigInt::from(factorial(5));
        let f4 = BigInt::from(factorial(11));
        assert_eq!(es[0].c_pk, rat(BigInt::one(), f2));
        assert_eq!(es[0].c_pk2, rat(BigInt::one(), int(2) * &f4));
        assert_eq!(es[0].c_p2k, rat(-BigInt::one(), f4));
    }

    #[test]
    fn brute_force_respects_cap() {
        assert!(matches!(
            e_class_bruteforce(1, BRUTE_FORCE_MAX_K + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn theorem31_on_classical_pairs() {
        let mut c = ctx();
        let r = check_theorem31(1, &int(2), &int(7), &mut c).unwrap();
        assert!(r.passed());
        assert_eq!(r.e1_pairing, q(1, 2));
        let r = check_theorem31(2, &int(6), &int(39), &mut c).unwrap();
        assert!(r.passed());
        // A pair violating the signature.
        let r = check_theorem31(1, &int(1), &int(1), &mut c).unwrap();
        assert!(!r.signature_holds && !r.passed());
    }

    #[test]
    fn full_check_equals_compressed_check_small_grid() {
        let mut c = ctx();
        for x in -6i64..=6 {
            for y in -50i64..=50 {
                let fast = check_theorem31(1, &int(x), &int(y), &mut c)
                    .unwrap()
                    .passed();
                let full = hattori_stong_full_check(1, &int(x), &int(y), &mut c).unwrap();
                assert_eq!(fast, full, "x={x} y={y}");
            }
        }
    }
}
