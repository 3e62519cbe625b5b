//! Divided Bernoulli numbers `|B_n|/n = N_n / D_n` in lowest terms, computed
//! exactly through the tangent-number triangle, plus modular routes (Voronoi
//! congruences with Kummer reduction) for primes far beyond the exact range.
//!
//! The denominator `D_n` is always the von Staudt-Clausen product
//! `prod_{(p-1) | n} p^(v_p(n)+1)`, which gives a cheap independent check on
//! every exactly computed value.  The numerator `N_n` is odd for all even
//! `n`; note it differs in general from the numerator of `B_n` itself, so
//! results must always be fully reduced before use.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{divisors_u64, is_prime_u64, odd_part, two_adic_profile};
use crate::error::{Error, Result};

/// `|B_n|/n` in lowest terms, with the sign of `B_n` carried separately
/// (`B_n < 0` exactly when `n = 0 mod 4`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DividedBernoulli {
    pub index: u64,
    pub negative: bool,
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl DividedBernoulli {
    /// Odd part of the denominator.
    pub fn odd_denominator(&self) -> BigUint {
        odd_part(&self.denominator)
    }

    /// The signed value `B_n/n mod p` for an odd prime `p` not dividing the
    /// denominator.
    pub fn signed_mod(&self, p: u64) -> Result<u64> {
        let bp = BigUint::from(p);
        let d = (&self.denominator % &bp)
            .to_u64()
            .expect("residue fits");
        if d == 0 {
            return Err(Error::domain("signed_mod: p divides the denominator"));
        }
        let n = (&self.numerator % &bp).to_u64().expect("residue fits");
        let inv = crate::arith::inv_mod(&BigUint::from(d), &bp).expect("unit");
        let v = (n as u128 * inv.to_u64().expect("fits") as u128 % p as u128) as u64;
        Ok(if self.negative && v != 0 { p - v } else { v })
    }
}

/// Shared computation context: exact cache, modular cache, and effort limits.
///
/// Cloning is cheap relative to recomputation and gives each worker thread an
/// independent context; persistence across runs is the caller's concern.
#[derive(Debug, Clone)]
pub struct BernoulliCtx {
    /// Largest index computed exactly by the tangent triangle.
    pub exact_limit: u64,
    /// Largest prime sent down the Voronoi congruence route.
    pub voronoi_limit: u64,
    cache: BTreeMap<u64, (BigUint, BigUint)>,
    mod_cache: BTreeMap<(u64, u64), u64>,
}

impl Default for BernoulliCtx {
    fn default() -> Self {
        BernoulliCtx {
            exact_limit: 4096,
            voronoi_limit: 1 << 20,
            cache: BTreeMap::new(),
            mod_cache: BTreeMap::new(),
        }
    }
}

impl BernoulliCtx {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_even_index(n: u64) -> Result<()> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::domain(format!(
                "divided Bernoulli numbers are indexed by even n >= 2, got {n}"
            )));
        }
        Ok(())
    }

    /// The von Staudt-Clausen denominator `D_n = prod p^(v_p(n)+1)` over
    /// primes `p` with `(p-1) | n`.
    pub fn vsc_denominator(&self, n: u64) -> Result<BigUint> {
        Self::check_even_index(n)?;
        let mut d = BigUint::one();
        for div in divisors_u64(n) {
            let p = div + 1;
            if !is_prime_u64(p) {
                continue;
            }
            let mut e = 1u32;
            let mut m = n;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            d *= BigUint::from(p).pow(e);
        }
        Ok(d)
    }

    /// Odd part of `D_n`, available without any exact numerator work.
    pub fn odd_denominator(&self, n: u64) -> Result<BigUint> {
        Ok(odd_part(&self.vsc_denominator(n)?))
    }

    /// `N_{4k} mod 8` by the Carlitz congruence: the odd parts satisfy
    /// `Od[k] * N_{4k} = -OD_{4k} (mod 8)`, and every odd residue is its own
    /// inverse mod 8.
    pub fn n_mod8(&self, k: u64) -> Result<u8> {
        if k == 0 {
            return Err(Error::domain("n_mod8: k must be positive"));
        }
        let od4k = (self.odd_denominator(4 * k)? % BigUint::from(8u8))
            .to_u64()
            .expect("fits");
        let odk = {
            let mut m = k;
            while m % 2 == 0 {
                m /= 2;
            }
            m % 8
        };
        Ok((((8 - od4k) * odk) % 8) as u8)
    }

    /// Install an externally supplied exact value after validation: the
    /// denominator must match von Staudt-Clausen, the fraction must be
    /// reduced with odd numerator, and the pair must agree with the Voronoi
    /// route at two independent primes.
    pub fn preload(&mut self, n: u64, numerator: BigUint, denominator: BigUint) -> Result<()> {
        Self::check_even_index(n)?;
        let vsc = self.vsc_denominator(n)?;
        if denominator != vsc {
            return Err(Error::data(format!(
                "preload: denominator for n={n} does not match the von Staudt-Clausen product"
            )));
        }
        if numerator.is_even() || !numerator.gcd(&denominator).is_one() {
            return Err(Error::data(format!(
                "preload: numerator for n={n} must be odd and coprime to the denominator"
            )));
        }
        let candidate = DividedBernoulli {
            index: n,
            negative: n % 4 == 0,
            numerator: numerator.clone(),
            denominator: denominator.clone(),
        };
        let mut checked = 0;
        let mut p = 5u64;
        while checked < 2 {
            if is_prime_u64(p) && n % (p - 1) != 0 {
                let direct = candidate.signed_mod(p)?;
                let congruence = self.divided_bernoulli_mod_p(n % (p - 1), p)?;
                if direct != congruence {
                    return Err(Error::data(format!(
                        "preload: value for n={n} fails the Voronoi cross-check at p={p}"
                    )));
                }
                checked += 1;
            }
            p += 2;
        }
        self.cache.insert(n, (numerator, denominator));
        Ok(())
    }

    /// Exact `|B_n|/n` in lowest terms via the tangent-number triangle.
    /// Fills the cache for every even index up to `n` as a side effect.
    pub fn divided_bernoulli(&mut self, n: u64) -> Result<DividedBernoulli> {
        Self::check_even_index(n)?;
        if !self.cache.contains_key(&n) {
            // The limit caps the recurrence, not lookups of preloaded values.
            if n > self.exact_limit {
                return Err(Error::capability(format!(
                    "exact Bernoulli index {n} exceeds the configured limit {}",
                    self.exact_limit
                )));
            }
            self.fill_exact(n)?;
        }
        let (num, den) = self.cache.get(&n).expect("just filled").clone();
        Ok(DividedBernoulli {
            index: n,
            negative: n % 4 == 0,
            numerator: num,
            denominator: den,
        })
    }

    /// Run the tangent triangle out to `T_{n/2}`, reducing
    /// `|B_{2m}|/(2m) = T_m / (2^{2m} (2^{2m}-1))` at every column.
    fn fill_exact(&mut self, n: u64) -> Result<()> {
        let m_target = n / 2;
        // col[i] holds the current column's entry for row i+1.
        let mut col: Vec<BigUint> = Vec::with_capacity(m_target as usize);
        col.push(BigUint::one());
        self.store_reduced(1, BigUint::one())?;
        for j in 2..=m_target {
            // Ascending in-place update: row 1 scales, middle rows combine
            // the previous column with the freshly updated row above, and
            // the diagonal doubles the entry above it.
            col[0] *= j - 1;
            for k in 2..j {
                let idx = (k - 1) as usize;
                let from_left = &col[idx] * (j - k);
                let from_above = &col[idx - 1] * (j - k + 2);
                col[idx] = from_left + from_above;
            }
            let diag = &col[(j - 2) as usize] * 2u8;
            col.push(diag.clone());
            self.store_reduced(j, diag)?;
        }
        Ok(())
    }

    fn store_reduced(&mut self, m: u64, tangent: BigUint) -> Result<()> {
        let n = 2 * m;
        if self.cache.contains_key(&n) {
            return Ok(());
        }
        let pow = BigUint::one() << n;
        let denom_raw = &pow * (&pow - BigUint::one());
        let g = tangent.gcd(&denom_raw);
        let num = tangent / &g;
        let den = denom_raw / g;
        // Independent structural check on every stored value.
        let vsc = self.vsc_denominator(n)?;
        if den != vsc {
            return Err(Error::domain(format!(
                "internal: reduced denominator for n={n} disagrees with von Staudt-Clausen"
            )));
        }
        self.cache.insert(n, (num, den));
        Ok(())
    }

    /// Signed `B_m/m mod p` for an odd prime `p` with `(p-1)` not dividing
    /// `m`, via the Voronoi congruence
    /// `(a^m - 1) B_m/m = a^(m-1) sum_j j^(m-1) floor(ja/p)  (mod p)`,
    /// using `a = 2` when `2^m != 1 (mod p)` and the smallest workable `a`
    /// otherwise.
    pub fn divided_bernoulli_mod_p(&mut self, m: u64, p: u64) -> Result<u64> {
        if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
            return Err(Error::domain("divided_bernoulli_mod_p: p must be an odd prime"));
        }
        if m < 2 || m % 2 != 0 {
            return Err(Error::domain("divided_bernoulli_mod_p: m must be even and >= 2"));
        }
        if m % (p - 1) == 0 {
            return Err(Error::domain(
                "divided_bernoulli_mod_p: p-1 divides m (denominator prime)",
            ));
        }
        if let Some(&v) = self.mod_cache.get(&(p, m)) {
            return Ok(v);
        }
        let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let powmod = |mut b: u64, mut e: u64| {
            b %= p;
            let mut acc = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul(acc, b);
                }
                b = mul(b, b);
                e >>= 1;
            }
            acc
        };
        // Exponents reduce mod p-1 on units.
        let m_red = m % (p - 1);
        let mut a = 2u64;
        while powmod(a, m_red) == 1 {
            a += 1;
        }
        // sum over j of j^(m-1) * floor(j*a/p), tracking the floor
        // incrementally to avoid a division per step.
        let e = m_red - 1 + (p - 1); // m-1 mod p-1, kept positive
        let mut sum = 0u64;
        let mut num = 0u64; // j*a mod p
        let mut floor = 0u64; // floor(j*a/p)
        for j in 1..p {
            num += a;
            while num >= p {
                num -= p;
                floor += 1;
            }
            if floor > 0 {
                sum = (sum + mul(powmod(j, e % (p - 1)), floor % p)) % p;
            }
        }
        let lhs_coeff = (powmod(a, m_red) + p - 1) % p; // a^m - 1
        let rhs = mul(powmod(a, (m_red + p - 2) % (p - 1)), sum); // a^(m-1) * sum
        let inv = crate::arith::inv_mod(&BigUint::from(lhs_coeff), &BigUint::from(p))
            .expect("a^m != 1 by construction")
            .to_u64()
            .expect("fits");
        let v = mul(rhs, inv);
        self.mod_cache.insert((p, m), v);
        Ok(v)
    }

    /// Does the prime `p` divide `N_n`?  Kummer reduction plus Voronoi for
    /// primes up to `voronoi_limit`, exact arithmetic when `n` is within the
    /// exact range, and a capability error when neither route applies.
    pub fn divides_numerator(&mut self, p: &BigUint, n: u64) -> Result<bool> {
        Self::check_even_index(n)?;
        if p < &BigUint::from(2u8) {
            return Err(Error::domain("divides_numerator: p must be a prime"));
        }
        // Denominator primes never divide the (coprime) numerator.
        if let Some(p_small) = p.to_u64() {
            if p_small <= n + 1 && n % (p_small - 1) == 0 {
                return Ok(false);
            }
        }
        // An already-computed exact value answers with one division.
        if let Some((num, _)) = self.cache.get(&n) {
            return Ok((num % p).is_zero());
        }
        if let Some(p_small) = p.to_u64() {
            if p_small <= self.voronoi_limit {
                if p_small == 2 {
                    return Ok(false); // N_n is odd
                }
                let m = n % (p_small - 1);
                return Ok(self.divided_bernoulli_mod_p(m, p_small)? == 0);
            }
        }
        if n <= self.exact_limit {
            let exact = self.divided_bernoulli(n)?;
            return Ok((exact.numerator % p).is_zero());
        }
        Err(Error::capability(format!(
            "divides_numerator: p too large for the congruence route and n={n} beyond the exact limit"
        )))
    }

    /// Iterate over all exactly known values (for persistence layers).
    pub fn cached_values(&self) -> impl Iterator<Item = (u64, &BigUint, &BigUint)> {
        self.cache.iter().map(|(n, (num, den))| (*n, num, den))
    }
}

/// Two-adic structure of `D_n`: `v_2(D_n) = v_2(n) + 1` for even `n`.
pub fn denominator_two_adic_valuation(ctx: &BernoulliCtx, n: u64) -> Result<u64> {
    let d = ctx.vsc_denominator(n)?;
    Ok(two_adic_profile(&d)?.v2)
}
