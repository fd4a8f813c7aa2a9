//! Reflection-invariance experiment: redraw the signatures of a fixed cell
//! set and compare the dimension and the exact box counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::doc::SpecDocument;
use crate::boxlab::{exact_box_counts, fit_level_range, BoxError};
use crate::carpet::{CarpetSpec, Sign};
use crate::dimension::{hausdorff_dimension, row_profile};

/// Levels used for the per-trial slope.
pub const INVARIANCE_LEVELS: (u32, u32) = (4, 8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    /// `(sx, sy)` per digit.
    pub signatures: Vec<(i8, i8)>,
    pub hausdorff: f64,
    pub slope: f64,
    /// Exact counts for levels 1 through the top fit level.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub base: SpecDocument,
    pub trials: usize,
    pub seed: Option<u64>,
    pub levels: (u32, u32),
    pub results: Vec<TrialResult>,
    pub max_slope_deviation: f64,
    pub dimensions_identical: bool,
    /// Whether any two trials produced different exact counts at some level.
    pub counts_differ: bool,
}

/// Uniformly random signature assignments, one per trial.
pub fn random_assignments(spec: &CarpetSpec, trials: usize, seed: u64) -> Vec<Vec<(Sign, Sign)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flip = move || {
        if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    };
    (0..trials)
        .map(|_| (0..spec.len()).map(|_| (flip(), flip())).collect())
        .collect()
}

pub fn invariance_report(
    spec: &CarpetSpec,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<InvarianceReport, BoxError> {
    let assignments = random_assignments(spec, trials, seed);
    let mut report = invariance_report_for(spec, &assignments, budget)?;
    report.seed = Some(seed);
    Ok(report)
}

/// Runs the experiment on explicit assignments.
pub fn invariance_report_for(
    spec: &CarpetSpec,
    assignments: &[Vec<(Sign, Sign)>],
    budget: u64,
) -> Result<InvarianceReport, BoxError> {
    let (lo, hi) = INVARIANCE_LEVELS;
    let mut results = Vec::with_capacity(assignments.len());
    for signs in assignments {
        let variant = spec.with_signatures(signs);
        let series = exact_box_counts(&variant, 1, hi, budget)?;
        let fit = fit_level_range(&series, variant.m(), lo, hi)?;
        results.push(TrialResult {
            signatures: signs.iter().map(|(a, b)| (a.as_i8(), b.as_i8())).collect(),
            hausdorff: hausdorff_dimension(&row_profile(&variant)),
            slope: fit.slope,
            counts: series.counts(),
        });
    }
    let mut max_dev: f64 = 0.0;
    for (a, ra) in results.iter().enumerate() {
        for rb in &results[a + 1..] {
            max_dev = max_dev.max((ra.slope - rb.slope).abs());
        }
    }
    let dimensions_identical = results
        .windows(2)
        .all(|w| w[0].hausdorff.to_bits() == w[1].hausdorff.to_bits());
    let counts_differ = results.windows(2).any(|w| w[0].counts != w[1].counts);
    Ok(InvarianceReport {
        base: SpecDocument::from_spec(spec),
        trials: assignments.len(),
        seed: None,
        levels: (lo, hi),
        results,
        max_slope_deviation: max_dev,
        dimensions_identical,
        counts_differ,
    })
}
