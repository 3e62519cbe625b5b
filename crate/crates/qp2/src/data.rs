//! Factorization records bundled with the binary: the handful of
//! Mersenne/numerator factorizations the classifier needs to certify the
//! existence band completely and to obstruct dimensions whose smallest
//! useful prime lies beyond any reasonable scan bound.

use qp2_core::bernoulli::BernoulliCtx;
use qp2_core::error::{Error, Result};
use qp2_core::factordb::FactorStore;

use crate::files::load_into;

/// The bundled record file (see `data/factors.txt`).
pub const BUNDLED_FACTORS: &str = include_str!("../data/factors.txt");

/// Load the bundled records into a store, verifying each.  The bundle is
/// shipped with the binary, so any failure here is a build defect, not a
/// user error.
pub fn load_bundled(store: &mut FactorStore, ctx: &mut BernoulliCtx) -> Result<()> {
    let (_, issues) = load_into(BUNDLED_FACTORS, store, ctx);
    if let Some(first) = issues.first() {
        return Err(Error::data(format!("bundled factor data is invalid: {first}")));
    }
    Ok(())
}
