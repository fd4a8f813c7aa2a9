//! Box counting on carpets.
//!
//! Level-`l` cylinders are `n^-l` wide and `m^-l` tall. Grouping the
//! cylinders by their level-`k` column ancestor, `k = floor(l * beta)`,
//! turns them into approximate squares: height `m^-l`, width `n^-k`, which is
//! within a factor `n` of the height. Counting distinct approximate squares
//! is exact integer work; counting occupied cells of a square grid from
//! chaos-game samples is the empirical counterpart.

mod counts;
mod entropy;
mod fit;

pub use counts::{exact_box_counts, sampled_box_counts, CountEntry, CountSeries, Provenance};
pub use entropy::{partition_entropy_series, EntropyLevel, EntropySeries};
pub use fit::{
    compare_with_hausdorff, counting_exponent, fit_dimension_slope, fit_level_range,
    DimensionComparison, SlopeFit,
};

use thiserror::Error;

use crate::carpet::{CarpetSpec, DepthError};

/// Default cap on the number of words enumerated per level.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Lowest level included in default slope fits.
pub const DEFAULT_FIT_MIN_LEVEL: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("level {level}: {words} words exceed the enumeration budget of {budget}")]
    Budget {
        level: u32,
        words: String,
        budget: u64,
    },
    #[error(transparent)]
    Depth(#[from] DepthError),
    #[error("invalid level range {lo}..={hi}")]
    Levels { lo: u32, hi: u32 },
    #[error("level {level} is too fine for sampled coordinates (max {max})")]
    SampleResolution { level: u32, max: u32 },
    #[error("slope fit needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
    #[error("weights do not match the carpet: {0}")]
    Weights(String),
}

/// Truncation `k = floor(l * log m / log n)`, computed exactly as the
/// largest `k` with `n^k <= m^l`.
pub fn truncation(n: u32, m: u32, level: u32) -> u32 {
    let target = u128::from(m)
        .checked_pow(level)
        .expect("level within exact capacity");
    let n = u128::from(n);
    let mut k = 0;
    let mut p: u128 = 1;
    while let Some(next) = p.checked_mul(n) {
        if next > target {
            break;
        }
        p = next;
        k += 1;
    }
    k
}

/// Names the region `[x n^-k, (x+1) n^-k] x [y m^-l, (y+1) m^-l]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApproxSquareKey {
    pub level: u32,
    pub trunc: u32,
    pub x: u128,
    pub y: u128,
}

/// The approximate square containing the cylinder of `word`.
pub fn approx_square_key(spec: &CarpetSpec, word: &[usize]) -> Result<ApproxSquareKey, BoxError> {
    let level = word.len() as u32;
    if level == 0 {
        return Err(BoxError::Levels { lo: 0, hi: 0 });
    }
    let cyl = spec.cylinder_of_word(word)?;
    let trunc = truncation(spec.n(), spec.m(), level);
    Ok(ApproxSquareKey {
        level,
        trunc,
        x: cyl.x.ancestor_index(trunc),
        y: cyl.y.index,
    })
}

/// Validates a level range against depth capacity and the word budget.
pub(crate) fn check_levels(
    spec: &CarpetSpec,
    lo: u32,
    hi: u32,
    budget: u64,
) -> Result<(), BoxError> {
    if lo == 0 || lo > hi {
        return Err(BoxError::Levels { lo, hi });
    }
    let max = spec.max_depth();
    if hi > max {
        return Err(DepthError {
            base: spec.n(),
            level: hi,
            max,
        }
        .into());
    }
    let d = spec.len() as u64;
    for level in lo..=hi {
        match d.checked_pow(level) {
            Some(words) if words <= budget => {}
            Some(words) => {
                return Err(BoxError::Budget {
                    level,
                    words: words.to_string(),
                    budget,
                })
            }
            None => {
                return Err(BoxError::Budget {
                    level,
                    words: format!("{d}^{level}"),
                    budget,
                })
            }
        }
    }
    Ok(())
}

/// Per-level constants for turning a cylinder into its key.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LevelPlan {
    pub level: u32,
    pub trunc: u32,
    /// `n^(level - trunc)`.
    pub x_div: u128,
}

pub(crate) fn level_plans(spec: &CarpetSpec, lo: u32, hi: u32) -> Vec<LevelPlan> {
    (lo..=hi)
        .map(|level| {
            let trunc = truncation(spec.n(), spec.m(), level);
            LevelPlan {
                level,
                trunc,
                x_div: u128::from(spec.n()).pow(level - trunc),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::reference_carpet;

    #[test]
    fn truncation_is_exact_floor() {
        // beta = 1/2 exactly: float products can land just below integers
        for l in 0..40 {
            assert_eq!(truncation(4, 2, l), l / 2);
        }
        assert_eq!(truncation(9, 3, 7), 3);
        // 4^3 = 64 <= 81 = 3^4 < 4^4
        assert_eq!(truncation(4, 3, 4), 3);
        assert_eq!(truncation(4, 3, 5), 3);
        assert_eq!(truncation(4, 3, 1), 0);
    }

    #[test]
    fn level_one_key_is_the_row() {
        let spec = reference_carpet();
        for d in 0..spec.len() {
            let key = approx_square_key(&spec, &[d]).unwrap();
            assert_eq!(key.trunc, 0);
            assert_eq!(key.x, 0);
            assert_eq!(key.y, u128::from(spec.digit(d).j));
        }
    }

    #[test]
    fn two_letter_key() {
        let spec = reference_carpet();
        let key = approx_square_key(&spec, &[3, 0]).unwrap();
        assert_eq!((key.level, key.trunc, key.x, key.y), (2, 1, 0, 8));
    }

    #[test]
    fn corner_word_key_is_origin() {
        let spec = reference_carpet();
        for l in 1..12 {
            let key = approx_square_key(&spec, &vec![0; l]).unwrap();
            assert_eq!((key.x, key.y), (0, 0));
        }
    }

    #[test]
    fn budget_and_range_errors() {
        let spec = reference_carpet();
        assert!(matches!(
            check_levels(&spec, 1, 10, DEFAULT_BUDGET),
            Err(BoxError::Budget { level: 9, .. })
        ));
        assert!(matches!(
            check_levels(&spec, 3, 2, DEFAULT_BUDGET),
            Err(BoxError::Levels { .. })
        ));
        assert!(matches!(
            check_levels(&spec, 1, 70, u64::MAX),
            Err(BoxError::Depth(_))
        ));
        assert!(check_levels(&spec, 1, 8, DEFAULT_BUDGET).is_ok());
    }
}
