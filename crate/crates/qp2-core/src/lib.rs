//! Exact arithmetic core for deciding whether a smooth closed manifold with
//! the rational cohomology of a projective plane can exist in a given
//! dimension.
//!
//! Everything here is `no_std + alloc` and fully deterministic: big-integer
//! arithmetic, divided Bernoulli numbers, characteristic-class integrality
//! checks, quadratic-residue equation solving, congruence obstructions, spin
//! bounds, and the classification pipeline that ties them together.  IO,
//! caching, file formats and the command-line front end live in the `qp2`
//! companion crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
pub mod bernoulli;
pub mod classify;
pub mod error;
pub mod factordb;
pub mod genus;
pub mod obstruct;
pub mod projspace;
pub mod qrsolve;
pub mod spin;

pub use error::{Error, Result};
