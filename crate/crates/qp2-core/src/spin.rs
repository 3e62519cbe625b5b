//! The spin refinement: integrality over `Z` (instead of `Z[1/2]`) via the
//! A-hat genus forces a two-adic lower bound on the signature that rules
//! out every dimension beyond 16.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::factorial;
use crate::bernoulli::BernoulliCtx;
use crate::error::{Error, Result};
use crate::genus::{a_coeffs, l_coeffs};

/// Lower bound on `v_2(2 * signature)` in dimension `8k` when the only
/// possibly nonzero Pontryagin numbers are `p_k^2` and `p_2k`:
/// `4k - 2*v_2(k) - 5`.
pub fn spin_signature_bound(k: u64) -> i64 {
    assert!(k > 0);
    4 * k as i64 - 2 * i64::from(k.trailing_zeros()) - 5
}

/// Does the two-adic bound rule out signature 1 in dimension `8k`?
/// (`v_2(2) = 1` must reach the bound; it fails exactly for `k > 2`.)
pub fn bound_excludes_signature_one(k: u64) -> bool {
    spin_signature_bound(k) > 1
}

/// Outcome of the three spin constraints on the Pontryagin numbers
/// `xi = <p_k^2, mu>` and `y = <p_2k, mu>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinReport {
    /// `s_kk xi + s_2k y = sigma`.
    pub signature_holds: bool,
    /// `a_kk xi + a_2k y` is an integer.
    pub a_genus_integral: bool,
    /// `xi / [(2k-1)!]^2` is an integer.
    pub unit_square_integral: bool,
}

impl SpinReport {
    pub fn passed(&self) -> bool {
        self.signature_holds && self.a_genus_integral && self.unit_square_integral
    }
}

/// Evaluate the spin constraints for signature `sigma` in dimension `8k`.
pub fn spin_conditions(
    k: u64,
    xi: &BigInt,
    y: &BigInt,
    sigma: &BigInt,
    ctx: &mut BernoulliCtx,
) -> Result<SpinReport> {
    if k == 0 {
        return Err(Error::domain("spin_conditions: k must be positive"));
    }
    let lc = l_coeffs(k, ctx)?;
    let ac = a_coeffs(k, ctx)?;
    let xi_r = BigRational::from_integer(xi.clone());
    let y_r = BigRational::from_integer(y.clone());
    let signature_holds =
        &lc.s_kk * &xi_r + &lc.s_2k * &y_r == BigRational::from_integer(sigma.clone());
    let a_genus_integral = (&ac.a_kk * &xi_r + &ac.a_2k * &y_r).is_integer();
    let f = BigInt::from(factorial(2 * k - 1));
    let unit_square_integral = (xi_r / BigRational::from_integer(&f * &f)).is_integer();
    Ok(SpinReport {
        signature_holds,
        a_genus_integral,
        unit_square_integral,
    })
}

/// Why a spin rational projective plane can or cannot exist in a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinVerdict {
    /// Dimension 4: a spin 4-manifold has even intersection form, which is
    /// incompatible with the odd unimodular form of rank one.
    ImpossibleEvenForm,
    /// Dimension is neither 4 nor a multiple of 8, so no rational
    /// projective plane of any kind exists there.
    ImpossibleDimension,
    /// Realized by a classical plane in dimensions 8 and 16.
    Possible { witness: &'static str },
    /// The two-adic signature bound fails for signature 1.
    ImpossibleBound { required: i64 },
}

impl SpinVerdict {
    pub fn possible(&self) -> bool {
        matches!(self, SpinVerdict::Possible { .. })
    }
}

/// Classify dimension `n` for spin rational projective planes: possible
/// exactly when `n` is 8 or 16.
pub fn spin_classify(n: u64) -> SpinVerdict {
    if n == 4 {
        return SpinVerdict::ImpossibleEvenForm;
    }
    if n == 0 || n % 8 != 0 {
        return SpinVerdict::ImpossibleDimension;
    }
    match n / 8 {
        1 => SpinVerdict::Possible {
            witness: "quaternionic plane",
        },
        2 => SpinVerdict::Possible {
            witness: "octonionic plane",
        },
        k => SpinVerdict::ImpossibleBound {
            required: spin_signature_bound(k),
        },
    }
}

/// Exhaustive confirmation that the bound spares only `k` in `{1, 2}` up
/// to the given limit.
pub fn bound_exhaustion(limit: u64) -> bool {
    (1..=limit).all(|k| bound_excludes_signature_one(k) == (k > 2))
}
