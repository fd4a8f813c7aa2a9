use std::collections::HashSet;

use rayon::prelude::*;

use super::{check_levels, level_plans, BoxError, LevelPlan};
use crate::carpet::{AxisCell, CarpetSpec, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountEntry {
    pub level: u32,
    /// Cell height `m^-l`.
    pub side: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Exact,
    Sampled {
        points: usize,
        depth: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    pub entries: Vec<CountEntry>,
    pub provenance: Provenance,
}

impl CountSeries {
    pub fn count_at(&self, level: u32) -> Option<u64> {
        self.entries
            .iter()
            .find(|e| e.level == level)
            .map(|e| e.count)
    }

    pub fn counts(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.count).collect()
    }
}

fn side(m: u32, level: u32) -> f64 {
    f64::from(m).powi(-(level as i32))
}

type KeySet = HashSet<(u128, u128)>;

struct Walk<'a> {
    spec: &'a CarpetSpec,
    plans: &'a [LevelPlan],
    lo: u32,
    hi: u32,
}

impl Walk<'_> {
    fn descend(&self, level: u32, x: AxisCell, y: AxisCell, sets: &mut [KeySet]) {
        if level >= self.lo {
            let plan = &self.plans[(level - self.lo) as usize];
            sets[(level - self.lo) as usize].insert((x.index / plan.x_div, y.index));
        }
        if level == self.hi {
            return;
        }
        for d in self.spec.digits() {
            let cx = x.extend(d.i, d.sx).expect("depth checked");
            let cy = y.extend(d.j, d.sy).expect("depth checked");
            self.descend(level + 1, cx, cy, sets);
        }
    }
}

/// Number of distinct approximate squares met by the level-`l` cylinders,
/// for each `l` in `lo..=hi`, by enumerating every word.
///
/// The words are partitioned by their first digit; partial key sets are
/// merged by union, so the result does not depend on scheduling.
pub fn exact_box_counts(
    spec: &CarpetSpec,
    lo: u32,
    hi: u32,
    budget: u64,
) -> Result<CountSeries, BoxError> {
    check_levels(spec, lo, hi, budget)?;
    let plans = level_plans(spec, lo, hi);
    let walk = Walk {
        spec,
        plans: &plans,
        lo,
        hi,
    };
    let width = (hi - lo + 1) as usize;
    let partials: Vec<Vec<KeySet>> = spec
        .digits()
        .par_iter()
        .map(|d| {
            let mut sets = vec![KeySet::new(); width];
            let x = AxisCell::unit(spec.n())
                .extend(d.i, d.sx)
                .expect("depth checked");
            let y = AxisCell::unit(spec.m())
                .extend(d.j, d.sy)
                .expect("depth checked");
            walk.descend(1, x, y, &mut sets);
            sets
        })
        .collect();

    let mut merged = vec![KeySet::new(); width];
    for part in partials {
        for (into, from) in merged.iter_mut().zip(part) {
            if into.is_empty() {
                *into = from;
            } else {
                into.extend(from);
            }
        }
    }
    let entries = plans
        .iter()
        .zip(&merged)
        .map(|(plan, set)| CountEntry {
            level: plan.level,
            side: side(spec.m(), plan.level),
            count: set.len() as u64,
        })
        .collect();
    Ok(CountSeries {
        entries,
        provenance: Provenance::Exact,
    })
}

/// Finest level whose grid index stays exactly representable from a double.
pub fn max_sample_level(m: u32) -> u32 {
    let mut level = 0;
    let mut cells: u64 = 1;
    while let Some(next) = cells.checked_mul(u64::from(m)) {
        if next > 1 << 52 {
            break;
        }
        cells = next;
        level += 1;
    }
    level
}

/// Distinct occupied cells of the square grid of side `m^-l`. Coordinates
/// equal to 1 are clamped into the last cell.
pub fn sampled_box_counts(
    points: &SampleSet,
    lo: u32,
    hi: u32,
    m: u32,
) -> Result<CountSeries, BoxError> {
    if lo == 0 || lo > hi {
        return Err(BoxError::Levels { lo, hi });
    }
    let max = max_sample_level(m);
    if hi > max {
        return Err(BoxError::SampleResolution { level: hi, max });
    }
    let entries = (lo..=hi)
        .map(|level| {
            let cells = u64::from(m).pow(level);
            let scale = cells as f64;
            let cell = |t: f64| -> u64 {
                let c = (t * scale).floor();
                if c <= 0.0 {
                    0
                } else {
                    (c as u64).min(cells - 1)
                }
            };
            let occupied: HashSet<(u64, u64)> = points
                .points
                .iter()
                .map(|&(x, y)| (cell(x), cell(y)))
                .collect();
            CountEntry {
                level,
                side: side(m, level),
                count: occupied.len() as u64,
            }
        })
        .collect();
    Ok(CountSeries {
        entries,
        provenance: Provenance::Sampled {
            points: points.len(),
            depth: points.depth,
            seed: points.seed,
        },
    })
}
