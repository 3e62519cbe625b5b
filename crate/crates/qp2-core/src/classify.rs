//! The decision pipeline: given a dimension, run the obstruction ladder
//! from cheap to expensive and return a verdict with the evidence that
//! produced it.  Every positive answer carries a verified certificate;
//! every "unknown" names the unfactored cofactor that blocks progress.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::arith::{weight_u64, FactorBudget};
use crate::bernoulli::BernoulliCtx;
use crate::error::{Error, Result};
use crate::factordb::{modulus_factors, FactorStore};
use crate::obstruct::{mod8_obstructed, scan_numerator_primes};
use crate::qrsolve::{
    build_equation, certificate, decide, jacobi_screen, shape_of, Certificate, Decision,
    ScreenOutcome, Shape,
};

/// Tunable limits for one classification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Scan numerator primes `= +-3 (mod 8)` up to this bound.
    pub scan_bound: u64,
    /// Largest index resolved by exact numerator arithmetic.
    pub exact_limit: u64,
    /// Largest prime sent down the congruence route.
    pub voronoi_limit: u64,
    /// Effort cap for factoring congruence moduli.
    pub factor_budget: FactorBudget,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            scan_bound: 30_000,
            exact_limit: 4096,
            voronoi_limit: 1 << 20,
            factor_budget: FactorBudget::default(),
        }
    }
}

/// Shared state across classifications: exact/modular Bernoulli caches,
/// curated factorizations, and the limits.
#[derive(Debug, Clone, Default)]
pub struct ClassifyContext {
    pub bern: BernoulliCtx,
    pub store: FactorStore,
    pub options: ClassifyOptions,
}

impl ClassifyContext {
    pub fn new() -> Self {
        Self::with(ClassifyOptions::default(), FactorStore::new())
    }

    pub fn with(options: ClassifyOptions, store: FactorStore) -> Self {
        let mut bern = BernoulliCtx::new();
        bern.exact_limit = options.exact_limit;
        bern.voronoi_limit = options.voronoi_limit;
        ClassifyContext {
            bern,
            store,
            options,
        }
    }
}

/// Where an obstructing prime came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeSource {
    /// Found by the ascending scan.
    Scan,
    /// Supplied by a loaded factorization record.
    Hint,
}

/// One retained fact from the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Dimension 4 is realized by the complex projective plane.
    ClassicalDimensionFour,
    /// The truncated polynomial algebra needs a generator in even degree,
    /// so the dimension must be a multiple of 4.
    DimensionNotMultipleOfFour { residue: u64 },
    /// Beyond dimension 4 the dimension must be a multiple of 8.
    DimensionCongruentFourModEight,
    /// The binary weight of `k` exceeds two, which the two-adic side of
    /// the signature equation forbids.
    BinaryWeightExceeded { weight: u32 },
    /// `N_4k = +-3 (mod 8)`: the numerator itself carries an obstructing
    /// prime.
    ResidueTestFired { residue: u8 },
    /// A specific prime `= +-3 (mod 8)` divides `N_4k`.
    ObstructingPrime { prime: BigUint, source: PrimeSource },
    /// The general sign differs from the fixed-sign form of the
    /// power-of-two equation (only `k = 1`); the general sign is used.
    SignFlagged,
    /// Jacobi screen on the reduced equation.
    Screen { blocked: bool, symbol: Option<i32> },
    /// The congruence has no solution modulo `prime^exponent`.
    LocallyUnsolvable { prime: BigUint, exponent: u32 },
    /// Canonical congruence root from which the certificate was expanded.
    RootFound { xbar: BigUint },
    /// Every known local factor passes but this cofactor of the modulus
    /// remains unfactored.
    UnfactoredCofactor { missing: BigUint },
    /// A computation exceeded the configured limits.
    CapabilityLimited { reason: String },
}

/// Existence witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Dimension 4: the complex projective plane.
    ClassicalComplexPlane,
    /// Dimension `8k`: a fully expanded and verified certificate.
    Certified(Certificate),
}

/// The verdict for a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Exists(Witness),
    NotExists,
    Unknown,
}

impl Status {
    pub fn exists(&self) -> bool {
        matches!(self, Status::Exists(_))
    }
    pub fn unknown(&self) -> bool {
        matches!(self, Status::Unknown)
    }
}

/// Classification result with all retained evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub dimension: u64,
    /// `n / 8` when the dimension has the `8k` shape.
    pub k: Option<u64>,
    pub shape: Option<Shape>,
    pub status: Status,
    pub evidence: Vec<Evidence>,
}

/// Largest index pre-expanded exactly so that prime scans over small
/// indices run on cached numerators instead of per-prime congruences.
const EXACT_WARM_LIMIT: u64 = 512;

/// Decide existence of a rational projective plane in dimension `n`.
pub fn classify(n: u64, cx: &mut ClassifyContext) -> Result<Verdict> {
    if n == 0 {
        return Err(Error::domain("classify: dimension must be positive"));
    }
    let mut evidence = Vec::new();
    if n == 4 {
        evidence.push(Evidence::ClassicalDimensionFour);
        return Ok(Verdict {
            dimension: n,
            k: None,
            shape: None,
            status: Status::Exists(Witness::ClassicalComplexPlane),
            evidence,
        });
    }
    if n % 4 != 0 {
        evidence.push(Evidence::DimensionNotMultipleOfFour { residue: n % 4 });
        return Ok(Verdict {
            dimension: n,
            k: None,
            shape: None,
            status: Status::NotExists,
            evidence,
        });
    }
    if n % 8 != 0 {
        evidence.push(Evidence::DimensionCongruentFourModEight);
        return Ok(Verdict {
            dimension: n,
            k: None,
            shape: None,
            status: Status::NotExists,
            evidence,
        });
    }
    let k = n / 8;
    let weight = weight_u64(k);
    if weight > 2 {
        evidence.push(Evidence::BinaryWeightExceeded { weight });
        return Ok(Verdict {
            dimension: n,
            k: Some(k),
            shape: None,
            status: Status::NotExists,
            evidence,
        });
    }
    let shape = shape_of(k);
    let verdict = |status, evidence| {
        Ok(Verdict {
            dimension: n,
            k: Some(k),
            shape,
            status,
            evidence,
        })
    };

    // Residue of N_4k mod 8, from denominators alone.
    if mod8_obstructed(k, &cx.bern)? {
        evidence.push(Evidence::ResidueTestFired {
            residue: cx.bern.n_mod8(k)?,
        });
        return verdict(Status::NotExists, evidence);
    }

    // Ascending prime scan, on the cached exact numerator when cheap.
    if 4 * k <= EXACT_WARM_LIMIT.min(cx.options.exact_limit) {
        cx.bern.divided_bernoulli(4 * k)?;
    }
    if let Some(p) = scan_numerator_primes(k, cx.options.scan_bound, &mut cx.bern)? {
        evidence.push(Evidence::ObstructingPrime {
            prime: BigUint::from(p),
            source: PrimeSource::Scan,
        });
        return verdict(Status::NotExists, evidence);
    }

    // Curated records may hold obstructing primes beyond the scan bound.
    if let Some(f) = cx.store.lookup_numerator(4 * k) {
        let eight = BigUint::from(8u8);
        for pp in &f.factors {
            let r = (&pp.prime % &eight).to_u64().expect("fits");
            if r == 3 || r == 5 {
                evidence.push(Evidence::ObstructingPrime {
                    prime: pp.prime.clone(),
                    source: PrimeSource::Hint,
                });
                return verdict(Status::NotExists, evidence);
            }
        }
    }

    // The quadratic congruence.
    let eq = match build_equation(k, &mut cx.bern) {
        Ok(eq) => eq,
        Err(Error::Capability(reason)) => {
            evidence.push(Evidence::CapabilityLimited { reason });
            return verdict(Status::Unknown, evidence);
        }
        Err(e) => return Err(e),
    };
    if eq.sign_flagged {
        evidence.push(Evidence::SignFlagged);
    }
    match jacobi_screen(&eq.coef_a, &eq.coef_b, &eq.coef_c)? {
        ScreenOutcome::Blocked => evidence.push(Evidence::Screen {
            blocked: true,
            symbol: None,
        }),
        ScreenOutcome::Symbol(s) => {
            evidence.push(Evidence::Screen {
                blocked: false,
                symbol: Some(s),
            });
            if s == -1 {
                return verdict(Status::NotExists, evidence);
            }
        }
    }
    let factors = match modulus_factors(
        k,
        &eq.gcd_removed,
        &cx.store,
        &mut cx.bern,
        &cx.options.factor_budget,
    ) {
        Ok(f) => f,
        Err(Error::Capability(reason)) => {
            evidence.push(Evidence::CapabilityLimited { reason });
            return verdict(Status::Unknown, evidence);
        }
        Err(e) => return Err(e),
    };
    match decide(&eq, &factors)? {
        Decision::Unsolvable { prime, exponent } => {
            evidence.push(Evidence::LocallyUnsolvable { prime, exponent });
            verdict(Status::NotExists, evidence)
        }
        Decision::Undecided { missing } => {
            evidence.push(Evidence::UnfactoredCofactor { missing });
            verdict(Status::Unknown, evidence)
        }
        Decision::Solvable { root } => {
            evidence.push(Evidence::RootFound { xbar: root.clone() });
            let cert = certificate(k, &root, &mut cx.bern)?;
            verdict(Status::Exists(Witness::Certified(cert)), evidence)
        }
    }
}

/// Classify every multiple of 4 in `[lo, hi]`, ascending.
pub fn classify_range(lo: u64, hi: u64, cx: &mut ClassifyContext) -> Result<Vec<Verdict>> {
    let start = lo.max(4).div_ceil(4) * 4;
    let mut out = Vec::new();
    let mut n = start;
    while n <= hi {
        out.push(classify(n, cx)?);
        n += 4;
    }
    Ok(out)
}
