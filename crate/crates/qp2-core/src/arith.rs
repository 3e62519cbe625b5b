//! Deterministic big-integer number theory: 2-adic profiles, Jacobi symbols,
//! primality certification, bounded factoring, square roots modulo odd prime
//! powers, and CRT recombination.
//!
//! Every routine is deterministic: the rho factoring stage seeds its own
//! generator from the input, so identical calls give identical results on
//! every platform.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The 2-adic shape of a positive integer: `value = 2^v2 * odd_part`,
/// together with the binary weight (number of one bits) of `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAdicProfile {
    pub value: BigUint,
    pub v2: u64,
    pub odd_part: BigUint,
    pub weight: u64,
}

/// Decompose `n >= 1` as `2^v2 * odd_part` and count its one bits.
pub fn two_adic_profile(n: &BigUint) -> Result<TwoAdicProfile> {
    if n.is_zero() {
        return Err(Error::domain("two_adic_profile: argument must be positive"));
    }
    let v2 = n.trailing_zeros().unwrap_or(0);
    let odd_part = n >> v2;
    let weight = n.iter_u64_digits().map(|d| u64::from(d.count_ones())).sum();
    Ok(TwoAdicProfile {
        value: n.clone(),
        v2,
        odd_part,
        weight,
    })
}

/// Binary weight of a machine word.
pub fn weight_u64(n: u64) -> u32 {
    n.count_ones()
}

/// Largest odd divisor of `n >= 1`.
pub fn odd_part(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    n >> n.trailing_zeros().unwrap_or(0)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut total = 0u64;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i32> {
    if n.sign() != Sign::Plus || n.is_even() {
        return Err(Error::domain("jacobi: modulus must be odd and positive"));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i32;
    let three = BigInt::from(3u8);
    let five = BigInt::from(5u8);
    let eight = BigInt::from(8u8);
    let four = BigInt::from(4u8);
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            let n8 = n.mod_floor(&eight);
            if n8 == three || n8 == five {
                result = -result;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { result } else { 0 })
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Witness set proving strong-pseudoprime testing correct for all `n < 2^64`.
const MR_WITNESSES_U64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &w in &MR_WITNESSES_U64 {
        let a = w % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let a = base % n;
    if a.is_zero() {
        return true;
    }
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u8), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let n_int = BigInt::from(n.clone());
    // Find D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, &n_int) {
            Ok(-1) => break,
            Ok(0) => {
                // Shares a factor with n; n > |D| means composite.
                if n_int.magnitude() != d.magnitude() {
                    return false;
                }
                return true;
            }
            _ => {}
        }
        d = if d.is_positive() {
            -(d + BigInt::from(2))
        } else {
            -(d - BigInt::from(2))
        };
    }
    let q: BigInt = (BigInt::one() - &d) / 4;
    // P = 1.  n+1 = t * 2^s with t odd.
    let n_plus_1 = n + BigUint::one();
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let t = &n_plus_1 >> s;

    let reduce = |x: &BigInt| -> BigInt { x.mod_floor(&n_int) };
    let halve = |x: &BigInt| -> BigInt {
        // Divide by 2 mod odd n.
        let x = reduce(x);
        if x.is_even() {
            x / 2
        } else {
            (x + &n_int) / 2
        }
    };

    // Compute U_t, V_t, Q^t by binary expansion of t (MSB first).
    let mut u = BigInt::one();
    let mut v = BigInt::one();
    let mut qk = reduce(&q);
    let bits = t.bits();
    for i in (0..bits - 1).rev() {
        // Double: (U, V, Q^k) -> (U*V, V^2 - 2Q^k, Q^2k).
        u = reduce(&(&u * &v));
        v = reduce(&(&v * &v - 2 * &qk));
        qk = reduce(&(&qk * &qk));
        if t.bit(i) {
            // Increment: U' = (U + V)/2, V' = (D*U + V)/2, Q^k *= Q.
            let new_u = halve(&(&u + &v));
            let new_v = halve(&(&d * &u + &v));
            u = new_u;
            v = new_v;
            qk = reduce(&(&qk * &q));
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = reduce(&(&v * &v - 2 * &qk));
        if v.is_zero() {
            return true;
        }
        qk = reduce(&(&qk * &qk));
    }
    false
}

/// Deterministic primality certification.
///
/// Below `2^64` this is a proof (fixed Miller-Rabin witness set); above, a
/// Baillie-PSW test (strong base-2 plus strong Lucas), which has no known
/// counterexample.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    // Quick trial by tiny primes for cheap exits.
    for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if (n % BigUint::from(p)).is_zero() {
            return false;
        }
    }
    if !strong_probable_prime(n, &BigUint::from(2u8)) {
        return false;
    }
    // BPSW requires ruling out perfect squares before the Lucas stage.
    let r = n.sqrt();
    if &(&r * &r) == n {
        return false;
    }
    strong_lucas_probable_prime(n)
}

/// A certified prime together with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    pub prime: BigUint,
    pub exponent: u32,
}

/// Outcome of bounded factoring: certified prime powers plus a leftover
/// cofactor (`1` when the factorization is complete, otherwise a composite
/// the budget could not split).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<PrimePower>,
    pub remainder: BigUint,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.remainder.is_one()
    }

    /// Product of all certified prime powers times the remainder.
    pub fn product(&self) -> BigUint {
        let mut acc = self.remainder.clone();
        for pp in &self.factors {
            acc *= pp.prime.pow(pp.exponent);
        }
        acc
    }
}

/// Effort caps for [`factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial-divide by every prime up to this bound.
    pub trial_limit: u64,
    /// Iteration cap per rho attempt.
    pub rho_iterations: u64,
    /// Number of independent rho attempts per stubborn cofactor.
    pub rho_restarts: u32,
    /// Leave cofactors wider than this many bits unfactored instead of
    /// attempting rho (or even a primality test) on them: per-operation
    /// cost grows quadratically with width while the chance of success
    /// within the iteration cap does not.
    pub rho_bit_limit: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 100_000,
            // 2^18 Brent iterations reliably split off prime factors up to
            // roughly 2^36 per attempt; numbers whose smallest factor is
            // beyond that are out of reach at any sane cap, so a bigger
            // budget mostly buys time spent failing on hard semiprimes.
            rho_iterations: 1 << 18,
            rho_restarts: 6,
            rho_bit_limit: 1024,
        }
    }
}

/// SplitMix64; tiny, seedable, and good enough to drive rho walks.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: &BigUint) -> BigUint {
        // Rejection-free: assemble enough words and reduce.  Bias is
        // irrelevant for rho seeding.
        let words = (bound.bits() / 64 + 2) as usize;
        let digits: Vec<u64> = (0..words).map(|_| self.next()).collect();
        BigUint::new(digits.iter().flat_map(|d| [(*d) as u32, (d >> 32) as u32]).collect()) % bound
    }
}

/// Brent-cycle rho attempt on odd composite `n`; deterministic in `seed`.
fn rho_brent(n: &BigUint, seed: u64, max_iterations: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if n.is_even() {
        return Some(two);
    }
    let mut rng = SplitMix64(seed);
    let n_minus_3 = n - BigUint::from(3u8);
    let c = rng.below(&n_minus_3) + &one;
    let mut y = rng.below(&n_minus_3) + &two;
    let step = |v: &BigUint| -> BigUint { (v * v + &c) % n };
    let m = 128u64;
    let mut g = BigUint::one();
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut used = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        used += r;
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            let span = m.min(r - k);
            for _ in 0..span {
                y = step(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            used += span;
            g = q.gcd(n);
            k += m;
        }
        if used > max_iterations {
            return None;
        }
        r *= 2;
    }
    if &g == n {
        // Backtrack one step at a time.
        loop {
            ys = step(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
            used += 1;
            if used > max_iterations {
                return None;
            }
        }
    }
    if &g == n || g.is_one() {
        None
    } else {
        Some(g)
    }
}

fn push_prime(factors: &mut Vec<PrimePower>, p: BigUint, e: u32) {
    for pp in factors.iter_mut() {
        if pp.prime == p {
            pp.exponent += e;
            return;
        }
    }
    factors.push(PrimePower {
        prime: p,
        exponent: e,
    });
}

/// Factor `n >= 1` within the given budget: trial division up to
/// `trial_limit`, then seeded Brent rho on whatever remains, recursing on
/// split parts.  Primes in the result are certified by [`is_prime`]; if the
/// budget runs out, the unfactored composite part is returned as `remainder`.
pub fn factor(n: &BigUint, budget: &FactorBudget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::domain("factor: argument must be positive"));
    }
    let mut factors: Vec<PrimePower> = Vec::new();
    let mut remainder = BigUint::one();
    let mut cur = n.clone();

    // Trial stage.
    let divide_out = |cur: &mut BigUint, p: u64, factors: &mut Vec<PrimePower>| {
        let bp = BigUint::from(p);
        let mut e = 0u32;
        while (&*cur % &bp).is_zero() {
            *cur /= &bp;
            e += 1;
        }
        if e > 0 {
            push_prime(factors, bp, e);
        }
    };
    divide_out(&mut cur, 2, &mut factors);
    divide_out(&mut cur, 3, &mut factors);
    let mut p = 5u64;
    while p <= budget.trial_limit {
        // Stop once p^2 passes the cofactor; testing the width first keeps
        // wide cofactors from paying for any comparison arithmetic.
        if cur.bits() <= 64 && p.saturating_mul(p) > cur.to_u64().expect("fits") {
            break;
        }
        divide_out(&mut cur, p, &mut factors);
        divide_out(&mut cur, p + 2, &mut factors);
        p += 6;
    }

    // Rho stage on remaining cofactors.
    let mut stack = Vec::new();
    if !cur.is_one() {
        stack.push(cur);
    }
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if c.bits() > budget.rho_bit_limit {
            remainder *= c;
            continue;
        }
        if is_prime(&c) {
            push_prime(&mut factors, c, 1);
            continue;
        }
        // Perfect powers trip up rho less often when peeled first.
        let root = c.sqrt();
        if &(&root * &root) == &c {
            stack.push(root.clone());
            stack.push(root);
            continue;
        }
        let seed_base = c.iter_u64_digits().next().unwrap_or(1);
        let mut found = None;
        for attempt in 0..budget.rho_restarts {
            let seed = seed_base ^ (0xA076_1D64_78BD_642Fu64.wrapping_mul(attempt as u64 + 1));
            if let Some(d) = rho_brent(&c, seed, budget.rho_iterations) {
                found = Some(d);
                break;
            }
        }
        match found {
            Some(d) => {
                let other = &c / &d;
                stack.push(d);
                stack.push(other);
            }
            None => remainder *= c,
        }
    }
    factors.sort();
    Ok(Factorization { factors, remainder })
}

/// Modular inverse of `a` modulo `m` (`None` when `gcd(a, m) != 1`).
pub fn inv_mod(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_zero() {
        return None;
    }
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&m_int).to_biguint().expect("non-negative"))
}

/// Square root of a unit modulo an odd prime `p` (Tonelli-Shanks), returning
/// the smaller of the two roots, or `None` for non-residues.
fn unit_sqrt_mod_p(a: &BigUint, p: &BigUint) -> Option<BigUint> {
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    let a = a % p;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let p_int = BigInt::from(p.clone());
    match jacobi(&BigInt::from(a.clone()), &p_int) {
        Ok(1) => {}
        _ => return None,
    }
    let p_minus_1 = p - &one;
    let root = if (p % BigUint::from(4u8)) == BigUint::from(3u8) {
        a.modpow(&((p + &one) / BigUint::from(4u8)), p)
    } else {
        // Tonelli-Shanks.  Deterministic non-residue search keeps runs
        // reproducible.
        let s = p_minus_1.trailing_zeros().unwrap_or(0);
        let q = &p_minus_1 >> s;
        let mut z = BigUint::from(2u8);
        while jacobi(&BigInt::from(z.clone()), &p_int) != Ok(-1) {
            z += &one;
        }
        let mut m = s;
        let mut c = z.modpow(&q, p);
        let mut t = a.modpow(&q, p);
        let mut r = a.modpow(&((&q + &one) / &two), p);
        while !t.is_one() {
            // Least i with t^(2^i) = 1.
            let mut i = 0u64;
            let mut probe = t.clone();
            while !probe.is_one() {
                probe = probe.modpow(&two, p);
                i += 1;
            }
            let exp = BigUint::one() << (m - i - 1);
            let b = c.modpow(&exp, p);
            m = i;
            c = b.modpow(&two, p);
            t = (t * &c) % p;
            r = (r * b) % p;
        }
        r
    };
    let other = p - &root;
    Some(root.min(other))
}

/// Square root of `a` modulo `p^r` for an odd prime `p`, handling non-unit
/// `a` by valuation analysis.  Returns a deterministic representative `s`
/// with `s^2 = a (mod p^r)`, or `None` when no root exists.
pub fn sqrt_mod(a: &BigInt, p: &BigUint, r: u32) -> Result<Option<BigUint>> {
    if r == 0 {
        return Err(Error::domain("sqrt_mod: exponent must be positive"));
    }
    if p.is_even() || p < &BigUint::from(3u8) {
        return Err(Error::domain("sqrt_mod: modulus base must be an odd prime"));
    }
    let modulus = p.pow(r);
    let a_red = a.mod_floor(&BigInt::from(modulus.clone()));
    let a_red = a_red.to_biguint().expect("non-negative");
    if a_red.is_zero() {
        return Ok(Some(BigUint::zero()));
    }
    // Valuation split: a = p^alpha * u with u a unit.
    let mut alpha = 0u32;
    let mut u = a_red.clone();
    while (&u % p).is_zero() {
        u /= p;
        alpha += 1;
    }
    if alpha % 2 == 1 {
        return Ok(None);
    }
    let r_unit = r - alpha;
    let target = p.pow(r_unit);
    let u = u % &target;
    let Some(mut s) = unit_sqrt_mod_p(&u, p) else {
        return Ok(None);
    };
    // Hensel lifting, doubling precision each step.
    let mut cur = p.clone();
    while cur < target {
        cur = &cur * &cur;
        let cur_int = BigInt::from(cur.clone());
        let two_s = BigUint::from(2u8) * &s;
        let inv = inv_mod(&two_s, &cur).expect("2s is a unit mod odd prime power");
        let s_int = BigInt::from(s.clone());
        let u_int = BigInt::from(u.clone());
        let corrected = (&s_int + (u_int - &s_int * &s_int) * BigInt::from(inv)).mod_floor(&cur_int);
        s = corrected.to_biguint().expect("non-negative");
    }
    s %= &target;
    let other = &target - &s;
    let s = s.min(other);
    Ok(Some(s * p.pow(alpha / 2)))
}

/// Combine congruences `x = r_i (mod m_i)` with pairwise coprime moduli.
/// Returns `(x, m)` with `m` the product modulus; the empty system yields
/// `(0, 1)`.
pub fn crt(residues: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    let mut x = BigUint::zero();
    let mut m = BigUint::one();
    for (r_i, m_i) in residues {
        if m_i.is_zero() {
            return Err(Error::domain("crt: zero modulus"));
        }
        if !m.gcd(m_i).is_one() {
            return Err(Error::domain(
                "crt: moduli must be pairwise coprime".to_string(),
            ));
        }
        let r_i = r_i % m_i;
        // x' = x + m * ((r_i - x) * m^-1 mod m_i)
        let inv = inv_mod(&(&m % m_i), m_i).expect("coprime by check above");
        let delta = (BigInt::from(r_i.clone()) - BigInt::from(x.clone()))
            .mod_floor(&BigInt::from(m_i.clone()))
            .to_biguint()
            .expect("non-negative");
        x += &m * ((delta * inv) % m_i);
        m *= m_i;
        x %= &m;
    }
    Ok((x, m))
}

/// Primes up to `bound` (inclusive) by plain sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = alloc::vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_p)| if is_p { Some(i as u64) } else { None })
        .collect()
}

/// Divisors of `n >= 1` in ascending order (intended for machine-word sizes).
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}
