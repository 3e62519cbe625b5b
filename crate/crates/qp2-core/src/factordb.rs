//! Curated factorization records for the large integers the decision
//! procedure needs: divided-Bernoulli numerators and Mersenne numbers.
//! Every record is verified on insertion (primality of each listed factor
//! and exact division of the target), so downstream consumers can trust
//! store contents unconditionally.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{factor, is_prime, is_prime_u64, divisors_u64, FactorBudget, Factorization, PrimePower};
use crate::bernoulli::BernoulliCtx;
use crate::error::{Error, Result};

/// What a record factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    /// `N_n`: the numerator of the reduced `|B_n|/n`.
    Numerator(u64),
    /// `2^n - 1`.
    Mersenne(u64),
    /// An explicit integer.
    Literal(BigUint),
}

/// One factorization record: a target, its known prime factors, and
/// whether they are claimed to be all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorRecord {
    pub target: Target,
    /// `(prime, exponent)` pairs.
    pub factors: Vec<(BigUint, u32)>,
    pub complete: bool,
    pub provenance: Option<String>,
}

/// Verified records, indexed by resolved target value.
#[derive(Debug, Clone, Default)]
pub struct FactorStore {
    records: Vec<FactorRecord>,
    by_value: BTreeMap<BigUint, Factorization>,
    numerators: BTreeMap<u64, BigUint>,
    mersennes: BTreeMap<u64, BigUint>,
}

/// Resolve a target to its integer value (numerators via exact
/// arithmetic, so `n` must be within the context's exact range).
pub fn resolve_target(target: &Target, ctx: &mut BernoulliCtx) -> Result<BigUint> {
    match target {
        Target::Numerator(n) => Ok(ctx.divided_bernoulli(*n)?.numerator),
        Target::Mersenne(n) => {
            if *n == 0 {
                return Err(Error::domain("resolve_target: 2^0 - 1 is not factorable"));
            }
            Ok((BigUint::one() << *n) - BigUint::one())
        }
        Target::Literal(v) => {
            if v < &BigUint::from(2u8) {
                return Err(Error::domain("resolve_target: literal must be at least 2"));
            }
            Ok(v.clone())
        }
    }
}

/// Verify a record against its resolved value: all listed factors prime
/// and distinct, their product dividing the value exactly, and a unit
/// quotient when the record claims completeness.  Returns the verified
/// factorization (quotient as the remainder).
pub fn verify_record(record: &FactorRecord, value: &BigUint) -> Result<Factorization> {
    if record.factors.is_empty() {
        return Err(Error::data("factor record lists no factors"));
    }
    let mut product = BigUint::one();
    let mut seen: BTreeMap<BigUint, u32> = BTreeMap::new();
    for (p, e) in &record.factors {
        if *e == 0 {
            return Err(Error::data("factor record has a zero exponent"));
        }
        if !is_prime(p) {
            return Err(Error::data(alloc::format!(
                "listed factor {p} is not prime"
            )));
        }
        if seen.insert(p.clone(), *e).is_some() {
            return Err(Error::data(alloc::format!(
                "factor {p} listed more than once"
            )));
        }
        product *= p.pow(*e);
    }
    let (quotient, rem) = value.div_rem(&product);
    if !rem.is_zero() {
        return Err(Error::data(
            "listed factors do not divide the target",
        ));
    }
    if record.complete && !quotient.is_one() {
        return Err(Error::data(alloc::format!(
            "record claims completeness but a cofactor {quotient} remains"
        )));
    }
    let factors = seen
        .into_iter()
        .map(|(prime, exponent)| PrimePower { prime, exponent })
        .collect();
    Ok(Factorization {
        factors,
        remainder: quotient,
    })
}

impl FactorStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Verify and index a record.  A record for an already-known value
    /// replaces the stored factorization only when it is strictly finer
    /// (smaller unfactored remainder).
    pub fn insert_record(&mut self, record: FactorRecord, ctx: &mut BernoulliCtx) -> Result<()> {
        let value = resolve_target(&record.target, ctx)?;
        let verified = verify_record(&record, &value)?;
        match &record.target {
            Target::Numerator(n) => {
                self.numerators.insert(*n, value.clone());
            }
            Target::Mersenne(n) => {
                self.mersennes.insert(*n, value.clone());
            }
            Target::Literal(_) => {}
        }
        match self.by_value.get(&value) {
            Some(old) if old.remainder <= verified.remainder => {}
            _ => {
                self.by_value.insert(value, verified);
            }
        }
        self.records.push(record);
        Ok(())
    }

    /// The verified factorization of a value, if any record covers it.
    pub fn lookup_value(&self, value: &BigUint) -> Option<&Factorization> {
        self.by_value.get(value)
    }

    /// Factorization of `N_n` when a record for it was loaded.
    pub fn lookup_numerator(&self, n: u64) -> Option<&Factorization> {
        self.numerators.get(&n).and_then(|v| self.by_value.get(v))
    }

    /// Factorization of `2^n - 1` when a record for it was loaded.
    pub fn lookup_mersenne(&self, n: u64) -> Option<&Factorization> {
        self.mersennes.get(&n).and_then(|v| self.by_value.get(v))
    }

    /// All records, in insertion order.
    pub fn records(&self) -> &[FactorRecord] {
        &self.records
    }

    /// Factor a value through the store if possible, falling back to the
    /// built-in factoring engine.
    pub fn factorization_of(&self, value: &BigUint, budget: &FactorBudget) -> Result<Factorization> {
        if let Some(f) = self.lookup_value(value) {
            return Ok(f.clone());
        }
        factor(value, budget)
    }
}

/// The factorization of the odd denominator part `OD_n`, read off from its
/// structure: one odd prime `p` with `p - 1 | n` per divisor, with
/// exponent `v_p(n) + 1`.
pub fn odd_denominator_factors(n: u64) -> Result<Factorization> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::domain("odd_denominator_factors: n must be even"));
    }
    let mut factors = Vec::new();
    for d in divisors_u64(n) {
        let p = d + 1;
        if p == 2 || !is_prime_u64(p) {
            continue;
        }
        let mut e = 1u32;
        let mut m = n;
        while m % p == 0 {
            e += 1;
            m /= p;
        }
        factors.push(PrimePower {
            prime: BigUint::from(p),
            exponent: e,
        });
    }
    Ok(Factorization {
        factors,
        remainder: BigUint::one(),
    })
}

/// Assemble the factorization of the reduced congruence modulus for
/// dimension `8k`: combine the factorizations of `2^(4k-1) - 1`, `N_4k`,
/// and `OD_2k`, then divide out the removed gcd.  Unfactored cofactors
/// survive as the remainder.
pub fn modulus_factors(
    k: u64,
    gcd_removed: &BigUint,
    store: &FactorStore,
    ctx: &mut BernoulliCtx,
    budget: &FactorBudget,
) -> Result<Factorization> {
    let mersenne = match store.lookup_mersenne(4 * k - 1) {
        Some(f) => f.clone(),
        None => {
            let value = (BigUint::one() << (4 * k - 1)) - BigUint::one();
            store.factorization_of(&value, budget)?
        }
    };
    let numerator = match store.lookup_numerator(4 * k) {
        Some(f) => f.clone(),
        None => {
            let value = ctx.divided_bernoulli(4 * k)?.numerator;
            store.factorization_of(&value, budget)?
        }
    };
    let od = odd_denominator_factors(2 * k)?;
    let mut merged: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut remainder = BigUint::one();
    for part in [&mersenne, &numerator, &od] {
        for pp in &part.factors {
            *merged.entry(pp.prime.clone()).or_insert(0) += pp.exponent;
        }
        remainder *= &part.remainder;
    }
    // Divide out the gcd that was removed from the equation.
    if !gcd_removed.is_one() {
        let g = factor(gcd_removed, budget)?;
        if !g.is_complete() {
            return Err(Error::data(
                "modulus_factors: removed gcd resists factoring",
            ));
        }
        for pp in &g.factors {
            let mut need = pp.exponent;
            if let Some(e) = merged.get_mut(&pp.prime) {
                let take = need.min(*e);
                *e -= take;
                need -= take;
                if *e == 0 {
                    merged.remove(&pp.prime);
                }
            }
            while need > 0 {
                let (q, r) = remainder.div_rem(&pp.prime);
                if !r.is_zero() {
                    return Err(Error::data(
                        "modulus_factors: removed gcd does not divide the assembled product",
                    ));
                }
                remainder = q;
                need -= 1;
            }
        }
    }
    let factors = merged
        .into_iter()
        .filter(|(_, e)| *e > 0)
        .map(|(prime, exponent)| PrimePower { prime, exponent })
        .collect();
    Ok(Factorization { factors, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrsolve::build_equation;
    use alloc::vec;

    fn big(s: &str) -> BigUint {
        s.parse().unwrap()
    }

    fn rec(target: Target, factors: Vec<(&str, u32)>, complete: bool) -> FactorRecord {
        FactorRecord {
            target,
            factors: factors.into_iter().map(|(p, e)| (big(p), e)).collect(),
            complete,
            provenance: None,
        }
    }

    fn m63_record() -> FactorRecord {
        rec(
            Target::Mersenne(63),
            vec![("7", 2), ("73", 1), ("127", 1), ("337", 1), ("92737", 1), ("649657", 1)],
            true,
        )
    }

    fn n64_record() -> FactorRecord {
        rec(
            Target::Numerator(64),
            vec![
                ("1226592271", 1),
                ("87057315354522179184989699791727", 1),
            ],
            true,
        )
    }

    fn n128_record() -> FactorRecord {
        rec(
            Target::Numerator(128),
            vec![
                ("35089", 1),
                ("5953097", 1),
                ("12349588663", 1),
                ("13349390911530343", 1),
                ("6996505560116602097773394576621473", 1),
                ("1111291616798088557784792601957076174026774057", 1),
            ],
            true,
        )
    }

    #[test]
    fn true_mersenne_record_verifies() {
        let mut ctx = BernoulliCtx::new();
        let mut store = FactorStore::new();
        store.insert_record(m63_record(), &mut ctx).unwrap();
        let f = store.lookup_mersenne(63).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.product(), (BigUint::one() << 63u32) - BigUint::one());
    }

    #[test]
    fn wrong_factor_lists_are_rejected() {
        let mut ctx = BernoulliCtx::new();
        let mut store = FactorStore::new();
        // Primes that simply do not divide 2^63 - 1.
        let bad = rec(
            Target::Mersenne(63),
            vec![("7", 2), ("73", 1), ("127", 1), ("337", 1), ("5419", 1), ("77158673929", 1)],
            true,
        );
        assert!(matches!(
            store.insert_record(bad, &mut ctx),
            Err(Error::Data(_))
        ));
        // A composite listed as a factor.
        let composite = rec(Target::Mersenne(11), vec![("2047", 1)], true);
        assert!(matches!(
            store.insert_record(composite, &mut ctx),
            Err(Error::Data(_))
        ));
        // Completeness claim with a missing cofactor.
        let incomplete = rec(Target::Mersenne(63), vec![("7", 2)], true);
        assert!(matches!(
            store.insert_record(incomplete, &mut ctx),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn partial_records_keep_their_cofactor_and_refinements_win() {
        let mut ctx = BernoulliCtx::new();
        let mut store = FactorStore::new();
        let partial = rec(Target::Numerator(128), vec![("35089", 1)], false);
        store.insert_record(partial, &mut ctx).unwrap();
        let f = store.lookup_numerator(128).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.factors.len(), 1);
        store.insert_record(n128_record(), &mut ctx).unwrap();
        let f = store.lookup_numerator(128).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.factors.len(), 6);
    }

    #[test]
    fn odd_denominator_factorizations() {
        let f = odd_denominator_factors(2).unwrap();
        assert_eq!(f.product(), BigUint::from(3u8));
        let f = odd_denominator_factors(32).unwrap();
        assert_eq!(f.product(), BigUint::from(255u8));
        // 257 - 1 = 256 divides no index below 256, so the odd part stays
        // at 3 * 5 * 17 = 255 for indices 32, 64, and 128.
        for n in [64u64, 128] {
            let f = odd_denominator_factors(n).unwrap();
            assert_eq!(f.product(), BigUint::from(255u32), "n={n}");
        }
        let f = odd_denominator_factors(256).unwrap();
        assert_eq!(f.product(), BigUint::from(65535u32));
        let f = odd_denominator_factors(12).unwrap();
        // 3^2 * 5 * 7 * 13
        assert_eq!(f.product(), BigUint::from(4095u32));
    }

    #[test]
    fn modulus_assembly_small_k_is_complete() {
        let mut ctx = BernoulliCtx::new();
        let store = FactorStore::new();
        let budget = FactorBudget::default();
        for k in [1u64, 2, 4] {
            let eq = build_equation(k, &mut ctx).unwrap();
            let f = modulus_factors(k, &eq.gcd_removed, &store, &mut ctx, &budget).unwrap();
            assert!(f.is_complete(), "k={k}");
            assert_eq!(f.product(), *eq.coef_b.magnitude(), "k={k}");
        }
    }

    #[test]
    fn modulus_assembly_dimension_128_from_records() {
        let mut ctx = BernoulliCtx::new();
        let mut store = FactorStore::new();
        store.insert_record(m63_record(), &mut ctx).unwrap();
        store.insert_record(n64_record(), &mut ctx).unwrap();
        let eq = build_equation(16, &mut ctx).unwrap();
        assert_eq!(eq.gcd_removed, BigUint::from(255u8));
        let budget = FactorBudget::default();
        let f = modulus_factors(16, &eq.gcd_removed, &store, &mut ctx, &budget).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.product(), *eq.coef_b.magnitude());
    }

    #[test]
    fn modulus_assembly_dimension_256_from_records() {
        let mut ctx = BernoulliCtx::new();
        let mut store = FactorStore::new();
        store
            .insert_record(rec(Target::Mersenne(127), vec![("170141183460469231731687303715884105727", 1)], true), &mut ctx)
            .unwrap();
        store.insert_record(n128_record(), &mut ctx).unwrap();
        let eq = build_equation(32, &mut ctx).unwrap();
        assert_eq!(eq.gcd_removed, BigUint::from(255u32));
        let budget = FactorBudget::default();
        let f = modulus_factors(32, &eq.gcd_removed, &store, &mut ctx, &budget).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.product(), *eq.coef_b.magnitude());
        assert!(f
            .factors
            .iter()
            .any(|pp| pp.prime == big("1111291616798088557784792601957076174026774057")));
    }

    #[test]
    fn empty_store_leaves_hard_numerators_unfinished() {
        let mut ctx = BernoulliCtx::new();
        let store = FactorStore::new();
        let tight = FactorBudget {
            trial_limit: 10_000,
            rho_iterations: 1 << 12,
            rho_restarts: 2,
            ..FactorBudget::default()
        };
        let eq = build_equation(32, &mut ctx).unwrap();
        let f = modulus_factors(32, &eq.gcd_removed, &store, &mut ctx, &tight).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.product(), *eq.coef_b.magnitude());
    }
}
