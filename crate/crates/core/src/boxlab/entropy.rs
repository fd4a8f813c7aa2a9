use std::collections::HashMap;

use rayon::prelude::*;

use super::{check_levels, level_plans, BoxError, LevelPlan};
use crate::carpet::{AxisCell, CarpetSpec};
use crate::dimension::Weights;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyLevel {
    pub level: u32,
    pub trunc: u32,
    /// Shannon entropy (nats) of the approximate-square partition.
    pub entropy: f64,
    /// `entropy / (level log m)`.
    pub estimate: f64,
    /// Keys that received mass from more than one reduced word.
    pub collisions: u64,
    pub keys: u64,
    pub total_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub levels: Vec<EntropyLevel>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    mass: f64,
    /// First reduced word seen for this key.
    reduced: u128,
    merged: bool,
}

type MassMap = HashMap<(u128, u128), Cell>;

fn absorb(map: &mut MassMap, key: (u128, u128), mass: f64, reduced: u128) {
    map.entry(key)
        .and_modify(|c| {
            c.mass += mass;
            if c.reduced != reduced {
                c.merged = true;
            }
        })
        .or_insert(Cell {
            mass,
            reduced,
            merged: false,
        });
}

struct Walk<'a> {
    spec: &'a CarpetSpec,
    p: &'a [f64],
    plans: &'a [LevelPlan],
    lo: u32,
    hi: u32,
}

impl Walk<'_> {
    /// Reduced word: the first `trunc` digits, then only the rows.
    fn reduced_id(&self, word: &[usize], trunc: u32) -> u128 {
        let d = self.spec.len() as u128;
        let m = u128::from(self.spec.m());
        word.iter().enumerate().fold(0u128, |acc, (pos, &w)| {
            if (pos as u32) < trunc {
                acc * d + w as u128
            } else {
                acc * m + u128::from(self.spec.digit(w).j)
            }
        })
    }

    fn descend(
        &self,
        word: &mut Vec<usize>,
        mass: f64,
        x: AxisCell,
        y: AxisCell,
        maps: &mut [MassMap],
    ) {
        let level = word.len() as u32;
        if level >= self.lo {
            let idx = (level - self.lo) as usize;
            let plan = &self.plans[idx];
            let reduced = self.reduced_id(word, plan.trunc);
            absorb(
                &mut maps[idx],
                (x.index / plan.x_div, y.index),
                mass,
                reduced,
            );
        }
        if level == self.hi {
            return;
        }
        for (d, digit) in self.spec.digits().iter().enumerate() {
            let w = self.p[d];
            if w == 0.0 {
                continue;
            }
            let cx = x.extend(digit.i, digit.sx).expect("depth checked");
            let cy = y.extend(digit.j, digit.sy).expect("depth checked");
            word.push(d);
            self.descend(word, mass * w, cx, cy, maps);
            word.pop();
        }
    }
}

/// Entropy of the measure's approximate-square partition at each level.
///
/// Every word contributes its cylinder mass to its key. Summed over the
/// words that share a prefix and a row sequence this is
/// `p(w1..wk) q(j_{k+1}) ... q(j_l)`; when reflections send different
/// reduced words to the same key their masses are merged and counted as a
/// collision.
pub fn partition_entropy_series(
    spec: &CarpetSpec,
    weights: &Weights,
    lo: u32,
    hi: u32,
    budget: u64,
) -> Result<EntropySeries, BoxError> {
    if weights.p().len() != spec.len() {
        return Err(BoxError::Weights(format!(
            "{} weights for {} digits",
            weights.p().len(),
            spec.len()
        )));
    }
    check_levels(spec, lo, hi, budget)?;
    let plans = level_plans(spec, lo, hi);
    let walk = Walk {
        spec,
        p: weights.p(),
        plans: &plans,
        lo,
        hi,
    };
    let width = (hi - lo + 1) as usize;
    let partials: Vec<Vec<MassMap>> = (0..spec.len())
        .into_par_iter()
        .map(|d| {
            let mut maps = vec![MassMap::new(); width];
            let w = walk.p[d];
            if w > 0.0 {
                let digit = spec.digit(d);
                let x = AxisCell::unit(spec.n())
                    .extend(digit.i, digit.sx)
                    .expect("depth checked");
                let y = AxisCell::unit(spec.m())
                    .extend(digit.j, digit.sy)
                    .expect("depth checked");
                let mut word = vec![d];
                walk.descend(&mut word, w, x, y, &mut maps);
            }
            maps
        })
        .collect();

    // merge in first-digit order so per-key sums are reproducible
    let mut merged = vec![MassMap::new(); width];
    for part in partials {
        for (into, from) in merged.iter_mut().zip(part) {
            for (key, cell) in from {
                into.entry(key)
                    .and_modify(|c| {
                        c.mass += cell.mass;
                        c.merged |= cell.merged || c.reduced != cell.reduced;
                    })
                    .or_insert(cell);
            }
        }
    }

    let log_m = f64::from(spec.m()).ln();
    let levels = plans
        .iter()
        .zip(merged)
        .map(|(plan, map)| {
            let mut cells: Vec<((u128, u128), Cell)> = map.into_iter().collect();
            cells.sort_unstable_by_key(|(k, _)| *k);
            let total_mass: f64 = cells.iter().map(|(_, c)| c.mass).sum();
            let entropy = -cells
                .iter()
                .filter(|(_, c)| c.mass > 0.0)
                .map(|(_, c)| c.mass * c.mass.ln())
                .sum::<f64>();
            EntropyLevel {
                level: plan.level,
                trunc: plan.trunc,
                entropy,
                estimate: entropy / (f64::from(plan.level) * log_m),
                collisions: cells.iter().filter(|(_, c)| c.merged).count() as u64,
                keys: cells.len() as u64,
                total_mass,
            }
        })
        .collect();
    Ok(EntropySeries { levels })
}
