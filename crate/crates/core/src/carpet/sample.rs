//! Chaos-game sampling of the push-forward of a Bernoulli measure.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::CarpetSpec;
use crate::dimension::Weights;

/// Default truncation depth of the coding map.
pub const DEFAULT_DEPTH: usize = 40;

/// Points per random substream. Block `b` draws from stream `b` of the
/// seeded generator, so output does not depend on the worker count.
pub const SAMPLE_BLOCK: usize = 1 << 14;

const START: (f64, f64) = (0.5, 0.5);

type Block = (Vec<(f64, f64)>, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("weights cover {got} digits but the carpet has {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("truncation depth must be at least 1")]
    ZeroDepth,
    #[error("weights cannot drive the sampler: {0}")]
    Weights(String),
}

/// Approximate samples of the measure `nu` on the carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<(f64, f64)>,
    /// Outermost digit `w1` of each point's word.
    pub first_digits: Vec<usize>,
    pub weights: Vec<f64>,
    pub depth: usize,
    pub seed: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Empirical law of the row of the first digit.
    pub fn first_row_frequencies(&self, spec: &CarpetSpec) -> Vec<f64> {
        let mut counts = vec![0usize; spec.m() as usize];
        for &d in &self.first_digits {
            counts[spec.digit(d).j as usize] += 1;
        }
        let total = self.first_digits.len().max(1) as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }
}

/// Draws `count` points `phi_{w1} o ... o phi_{wT}(1/2, 1/2)` with the
/// word letters i.i.d. according to `weights`.
pub fn sample_points(
    spec: &CarpetSpec,
    weights: &Weights,
    count: usize,
    depth: usize,
    seed: u64,
) -> Result<SampleSet, SampleError> {
    if weights.p().len() != spec.len() {
        return Err(SampleError::WeightCount {
            expected: spec.len(),
            got: weights.p().len(),
        });
    }
    if depth == 0 {
        return Err(SampleError::ZeroDepth);
    }
    let law = WeightedIndex::new(weights.p()).map_err(|e| SampleError::Weights(e.to_string()))?;
    let maps: Vec<_> = (0..spec.len()).map(|d| spec.digit_axis_maps(d)).collect();

    let blocks = count.div_ceil(SAMPLE_BLOCK);
    let per_block: Vec<Block> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut word = vec![0usize; depth];
            let mut pts = Vec::with_capacity(len);
            let mut firsts = Vec::with_capacity(len);
            for _ in 0..len {
                for w in word.iter_mut() {
                    *w = law.sample(&mut rng);
                }
                let (mut x, mut y) = START;
                for &d in word.iter().rev() {
                    let (fx, fy) = &maps[d];
                    x = fx.apply(x);
                    y = fy.apply(y);
                }
                pts.push((x, y));
                firsts.push(word[0]);
            }
            (pts, firsts)
        })
        .collect();

    let mut points = Vec::with_capacity(count);
    let mut first_digits = Vec::with_capacity(count);
    for (p, f) in per_block {
        points.extend(p);
        first_digits.extend(f);
    }
    Ok(SampleSet {
        points,
        first_digits,
        weights: weights.p().to_vec(),
        depth,
        seed,
    })
}
