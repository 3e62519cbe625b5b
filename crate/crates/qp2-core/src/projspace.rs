//! Rational projective spaces derived from a plane: when a plane with
//! generator degree `4k` exists in dimension `8k`, so does a rational
//! projective space with `2m` powers of a degree-`4k/m` generator, for
//! every divisor `m` of `4k` keeping the degree even.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arith::divisors_u64;
use crate::error::{Error, Result};

/// A rational projective space: cohomology a truncated polynomial algebra
/// with `exponent + 1` powers of a generator in degree `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjSpace {
    /// Truncation exponent `n` (the top power of the generator).
    pub exponent: u64,
    /// Degree `d` of the generator.
    pub degree: u64,
    /// Total dimension `n * d`.
    pub total_dim: u64,
    /// The plane itself (`m = 1`).
    pub is_plane: bool,
    /// Degree-two generator: the rational analogue of complex projective
    /// space.
    pub degree_two: bool,
}

impl ProjSpace {
    /// Render as `QP^n_d`.
    pub fn label(&self) -> String {
        format!("QP^{}_{}", self.exponent, self.degree)
    }
}

/// All rational projective spaces guaranteed by a plane in dimension `8k`:
/// one for each divisor `m` of `4k` with `4k/m` even, in ascending order
/// of `m` (so ascending exponent `2m`).
pub fn derive(k: u64) -> Result<Vec<ProjSpace>> {
    if k == 0 {
        return Err(Error::domain("derive: k must be positive"));
    }
    let gen_degree = 4 * k;
    let mut out = Vec::new();
    for m in divisors_u64(gen_degree) {
        let degree = gen_degree / m;
        if degree % 2 != 0 {
            continue;
        }
        out.push(ProjSpace {
            exponent: 2 * m,
            degree,
            total_dim: 8 * k,
            is_plane: m == 1,
            degree_two: degree == 2,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pairs(k: u64) -> Vec<(u64, u64)> {
        derive(k)
            .unwrap()
            .iter()
            .map(|s| (s.exponent, s.degree))
            .collect()
    }

    #[test]
    fn derived_spaces_for_the_three_large_planes() {
        assert_eq!(pairs(4), vec![(2, 16), (4, 8), (8, 4), (16, 2)]);
        assert_eq!(
            pairs(16),
            vec![(2, 64), (4, 32), (8, 16), (16, 8), (32, 4), (64, 2)]
        );
        assert_eq!(
            pairs(32),
            vec![
                (2, 128),
                (4, 64),
                (8, 32),
                (16, 16),
                (32, 8),
                (64, 4),
                (128, 2)
            ]
        );
    }

    #[test]
    fn annotations_and_dimensions() {
        let spaces = derive(4).unwrap();
        assert!(spaces[0].is_plane);
        assert!(spaces.iter().skip(1).all(|s| !s.is_plane));
        assert!(spaces.last().unwrap().degree_two);
        for s in &spaces {
            assert_eq!(s.exponent * s.degree, s.total_dim);
            assert_eq!(s.total_dim, 32);
        }
        assert_eq!(spaces[1].label(), "QP^4_8");
    }

    #[test]
    fn odd_degrees_are_skipped() {
        // 4k = 4: m = 4 would give degree 1.
        assert_eq!(pairs(1), vec![(2, 4), (4, 2)]);
    }
}
