//! Numerator-prime obstructions: the mod-8 residue test, ascending scans
//! for small obstructing primes, verification of externally supplied large
//! prime hints, and the periodic exponent families attached to irregular
//! primes congruent to `+-3 (mod 8)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::arith::{is_prime, is_prime_u64, odd_part, primes_up_to, weight_u64};
use crate::bernoulli::BernoulliCtx;
use crate::error::{Error, Result};

/// A prime `p = +-3 (mod 8)` dividing `N_4k` rules out dimension `8k`.
/// True when the cheap mod-8 residue of `N_4k` already exhibits such a
/// prime (the residue itself is `+-3`).
pub fn mod8_obstructed(k: u64, ctx: &BernoulliCtx) -> Result<bool> {
    Ok(matches!(ctx.n_mod8(k)?, 3 | 5))
}

/// Exponent gaps `i` for which `k = 2^(a+i) + 2^a` always has
/// `N_4k = +-3 (mod 8)`.
pub const MOD8_GAPS: [u32; 5] = [1, 2, 3, 5, 7];

/// When `k = 2^(a+i) + 2^a` with `i` one of [`MOD8_GAPS`], return `(a, i)`.
pub fn mod8_gap_member(k: u64) -> Option<(u32, u32)> {
    if weight_u64(k) != 2 {
        return None;
    }
    let a = k.trailing_zeros();
    let i = (63 - k.leading_zeros()) - a;
    MOD8_GAPS.contains(&i).then_some((a, i))
}

/// Smallest prime `p <= bound` with `p = +-3 (mod 8)` dividing `N_4k`.
pub fn scan_numerator_primes(
    k: u64,
    bound: u64,
    ctx: &mut BernoulliCtx,
) -> Result<Option<u64>> {
    for p in primes_up_to(bound) {
        if p % 8 != 3 && p % 8 != 5 {
            continue;
        }
        if ctx.divides_numerator(&BigUint::from(p), 4 * k)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Check an externally supplied obstruction hint: `p` must be prime (a
/// composite hint is a data error), and the result is whether `p = +-3
/// (mod 8)` and `p | N_4k`.
pub fn verify_prime_hint(p: &BigUint, k: u64, ctx: &mut BernoulliCtx) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::data(format!("hint {p} for dimension {} is not prime", 8 * k)));
    }
    let residue = (p % BigUint::from(8u8)).to_u64().expect("fits");
    if residue != 3 && residue != 5 {
        return Ok(false);
    }
    ctx.divides_numerator(p, 4 * k)
}

/// Multiplicative order of `a` modulo `m` (coprime inputs; `m = 1` gives 1).
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("multiplicative_order: modulus must be positive"));
    }
    if m == 1 {
        return Ok(1);
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % m as u128) as u64;
    let mut cur = a % m;
    for e in 1..=m {
        if cur == 1 {
            return Ok(e);
        }
        cur = mul(cur, a);
    }
    Err(Error::domain(
        "multiplicative_order: arguments are not coprime",
    ))
}

/// The periodic structure of weight-at-most-two indices hitting an
/// irregular prime: residue pairs `(alpha, beta)` of the two `k`-exponents
/// modulo `order` such that `4k = 4(2^a + 2^b) = m (mod p-1)` for some
/// irregular index `m` whenever `a = alpha`, `b = beta (mod order)` (with
/// `a = b` meaning either equal residues or the power-of-two case
/// `k = 2^(a+1)`, which produce the same residue).  Valid for exponents at
/// least `preperiod`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KummerFamily {
    pub prime: u64,
    /// Even `m` in `[2, p-3]` with `p | N_m`, ascending.
    pub indices: Vec<u64>,
    /// Period of `e -> 2^e (mod p-1)` in its stable range: the order of 2
    /// modulo the odd part of `p-1`.
    pub order: u64,
    /// First `k`-exponent from which the shifted sequence `2^(e+2) (mod
    /// p-1)` is purely periodic (0 for all primes `= +-3 (mod 8)`).
    pub preperiod: u64,
    /// Residue pairs `alpha <= beta` modulo `order`; diagonal entries
    /// first, ascending, then off-diagonal in lexicographic order.
    pub pairs: Vec<(u64, u64)>,
}

/// Compute the obstruction family of an odd prime: its irregular indices
/// and the residue pairs of admissible exponents hitting them.
pub fn kummer_family(p: u64, ctx: &mut BernoulliCtx) -> Result<KummerFamily> {
    if p < 3 || !is_prime_u64(p) {
        return Err(Error::domain("kummer_family: p must be an odd prime"));
    }
    let mut indices = Vec::new();
    let mut m = 2;
    while m + 2 < p {
        if ctx.divided_bernoulli_mod_p(m, p)? == 0 {
            indices.push(m);
        }
        m += 2;
    }
    let modulus = p - 1;
    let t = odd_part(&BigUint::from(modulus)).to_u64().expect("fits");
    let order = multiplicative_order(2, t)?;
    // Honest preperiod detection on e -> 2^(e+2) (mod p-1): find the first
    // offset from which one full period repeats exactly.
    let horizon = (2 * order + 66) as usize;
    let mut seq = Vec::with_capacity(horizon);
    let mut cur = 4 % modulus;
    for _ in 0..horizon {
        seq.push(cur);
        cur = (cur * 2) % modulus;
    }
    let ou = order as usize;
    let preperiod = (0..=(horizon - 2 * ou))
        .find(|&rho| (rho..rho + ou).all(|e| seq[e] == seq[e + ou]))
        .ok_or_else(|| Error::capacity("kummer_family: no period within the horizon"))?
        as u64;
    // Exponent-residue contributions w(alpha) = 2^(alpha + preperiod + 2).
    let w: Vec<u64> = (0..ou).map(|a| seq[a + preperiod as usize]).collect();
    let mut diag = Vec::new();
    let mut off = Vec::new();
    for alpha in 0..ou {
        for beta in alpha..ou {
            let s = (w[alpha] + w[beta]) % modulus;
            if indices.contains(&s) {
                let pair = (alpha as u64, beta as u64);
                if alpha == beta {
                    diag.push(pair);
                } else {
                    off.push(pair);
                }
            }
        }
    }
    let mut pairs = diag;
    pairs.extend(off);
    Ok(KummerFamily {
        prime: p,
        indices,
        order,
        preperiod,
        pairs,
    })
}

/// Dimension family of a diagonal residue `alpha`: all `n = 2^(order*r+c)`,
/// with the constant normalized into `[1, order]`.
pub fn power_family_string(order: u64, alpha: u64) -> String {
    let c = ((alpha + 3) % order) + 1;
    format!("2^{{{order}r+{c}}}")
}

/// Dimension family of an off-diagonal residue pair `alpha < beta`:
/// `n = 2^(order*r+alpha+3) + 2^(order*s+beta+3)`.
pub fn sum_family_string(order: u64, alpha: u64, beta: u64) -> String {
    format!(
        "2^{{{order}r+{a}}}+2^{{{order}s+{b}}}",
        a = alpha + 3,
        b = beta + 3
    )
}

/// Render every residue pair of a family as a dimension-family string, in
/// the family's canonical pair order.
pub fn family_strings(fam: &KummerFamily) -> Vec<String> {
    fam.pairs
        .iter()
        .map(|&(a, b)| {
            if a == b {
                power_family_string(fam.order, a)
            } else {
                sum_family_string(fam.order, a, b)
            }
        })
        .collect()
}

/// The first `count` irregular primes `= +-3 (mod 8)` with their families,
/// scanning primes in ascending order.
pub fn irregular_prime_table(count: usize, ctx: &mut BernoulliCtx) -> Result<Vec<KummerFamily>> {
    let mut out = Vec::with_capacity(count);
    let mut p = 3u64;
    while out.len() < count {
        if p > 1_000_000 {
            return Err(Error::capacity(
                "irregular_prime_table: ran past the prime horizon",
            ));
        }
        if is_prime_u64(p) && (p % 8 == 3 || p % 8 == 5) {
            let fam = kummer_family(p, ctx)?;
            if !fam.indices.is_empty() {
                out.push(fam);
            }
        }
        p += 2;
    }
    Ok(out)
}
