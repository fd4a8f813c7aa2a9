//! Numerical maximisation of the Ledrappier-Young dimension over the
//! probability simplex by exponentiated-gradient ascent.
//!
//! The objective `f(p) = H(q)/log m + (H(p) - H(q))/log n` is strictly
//! concave in `p`, so the closed-form optimum from [`crate::dimension`] is
//! the unique maximiser; this module reaches it without using that formula.

use thiserror::Error;

use crate::dimension::{entropy, RowProfile, Weights};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumoptError {
    #[error("weight {index} is zero; gradient is singular there")]
    ZeroWeight { index: usize },
    #[error("weights were built for a different digit layout")]
    Layout,
    #[error("invalid ascent configuration: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub max_iter: usize,
    /// Initial step size.
    pub eta: f64,
    /// Stop once an iteration changes the objective by less than this.
    pub tol: f64,
    /// Step-size multiplier applied when a step would decrease the objective.
    pub backtrack: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            max_iter: 10_000,
            eta: 0.5,
            tol: 1e-14,
            backtrack: 0.5,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<(), NumoptError> {
        if self.max_iter == 0 {
            return Err(NumoptError::Config("max_iter must be positive"));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(NumoptError::Config("eta must be positive"));
        }
        if !(self.tol.is_finite() && self.tol >= f64::EPSILON) {
            return Err(NumoptError::Config("tol must be at least machine epsilon"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(NumoptError::Config("backtrack must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentTrace {
    /// Objective at the initial point followed by one value per iteration.
    pub objective: Vec<f64>,
    pub weights: Weights,
    pub iterations: usize,
    pub converged: bool,
    /// Number of step-size reductions.
    pub backtracks: usize,
    pub final_eta: f64,
}

impl AscentTrace {
    pub fn final_objective(&self) -> f64 {
        *self
            .objective
            .last()
            .expect("trace holds the initial objective")
    }
}

fn row_marginal(profile: &RowProfile, p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; profile.m as usize];
    for (&w, &j) in p.iter().zip(&profile.digit_rows) {
        q[j] += w;
    }
    q
}

/// The dimension objective evaluated on a raw weight vector.
pub fn objective(profile: &RowProfile, p: &[f64]) -> f64 {
    let q = row_marginal(profile, p);
    let hq = entropy(&q);
    hq / profile.log_m + (entropy(p) - hq) / profile.log_n
}

fn gradient_raw(profile: &RowProfile, p: &[f64]) -> Vec<f64> {
    let q = row_marginal(profile, p);
    let row_coef = 1.0 / profile.log_m - 1.0 / profile.log_n;
    p.iter()
        .zip(&profile.digit_rows)
        .map(|(&w, &j)| -(q[j].ln() + 1.0) * row_coef - (w.ln() + 1.0) / profile.log_n)
        .collect()
}

/// Unconstrained partial derivatives of the objective with respect to each
/// digit weight.
pub fn objective_gradient(profile: &RowProfile, w: &Weights) -> Result<Vec<f64>, NumoptError> {
    if w.rows() != profile.digit_rows.as_slice() {
        return Err(NumoptError::Layout);
    }
    if let Some(index) = w.p().iter().position(|&x| x <= 0.0) {
        return Err(NumoptError::ZeroWeight { index });
    }
    Ok(gradient_raw(profile, w.p()))
}

fn multiplicative_step(p: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut next: Vec<f64> = p
        .iter()
        .zip(g)
        .map(|(&w, &gi)| w * (eta * (gi - gmax)).exp())
        .collect();
    let sum: f64 = next.iter().sum();
    for w in next.iter_mut() {
        *w /= sum;
    }
    next
}

/// Smallest step size tried before the ascent gives up.
const MIN_ETA: f64 = 1e-300;

/// Exponentiated-gradient ascent `p <- normalize(p * exp(eta * grad))` with
/// backtracking. Returns the trace even when `max_iter` is hit first.
pub fn maximize_dimension(
    profile: &RowProfile,
    init: &Weights,
    cfg: &AscentConfig,
) -> Result<AscentTrace, NumoptError> {
    cfg.validate()?;
    objective_gradient(profile, init)?;

    let mut p = init.p().to_vec();
    let mut f = objective(profile, &p);
    let mut values = vec![f];
    let mut eta = cfg.eta;
    let mut backtracks = 0;
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < cfg.max_iter {
        iterations += 1;
        let g = gradient_raw(profile, &p);
        loop {
            let cand = multiplicative_step(&p, &g, eta);
            let fc = objective(profile, &cand);
            let change = fc - f;
            if change >= 0.0 {
                p = cand;
                f = fc;
                values.push(f);
                if change < cfg.tol {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            if -change < cfg.tol {
                // the step only loses rounding noise: stationary
                values.push(f);
                converged = true;
                break 'outer;
            }
            eta *= cfg.backtrack;
            backtracks += 1;
            if eta < MIN_ETA {
                values.push(f);
                break 'outer;
            }
        }
    }

    debug_assert!(p.iter().all(|&w| w > 0.0));
    let weights = Weights::for_profile(profile, p).expect("ascent keeps weights on the simplex");
    Ok(AscentTrace {
        objective: values,
        weights,
        iterations,
        converged,
        backtracks,
        final_eta: eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::{reference_carpet, CarpetSpec, Digit};
    use crate::dimension::{hausdorff_dimension, ly_dimension, optimal_weights, row_profile};

    fn max_dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Central differences along `e_a - e_b`, which stays on the simplex.
    fn fd_directional(profile: &RowProfile, p: &[f64], a: usize, b: usize, h: f64) -> f64 {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[a] += h;
        plus[b] -= h;
        minus[a] -= h;
        minus[b] += h;
        (objective(profile, &plus) - objective(profile, &minus)) / (2.0 * h)
    }

    #[test]
    fn objective_matches_ly_dimension() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        let w = Weights::uniform(&spec);
        assert!((objective(&prof, w.p()) - ly_dimension(&prof, &w).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn gradient_is_flat_at_optimum() {
        let prof = row_profile(&reference_carpet());
        let g = objective_gradient(&prof, &optimal_weights(&prof)).unwrap();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        for gi in g {
            assert!((gi - mean).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_symmetric_on_full_grid() {
        let spec = CarpetSpec::full_grid(4, 3).unwrap();
        let prof = row_profile(&spec);
        let g = objective_gradient(&prof, &Weights::uniform(&spec)).unwrap();
        for gi in &g {
            assert!((gi - g[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        let w = Weights::uniform(&spec);
        let g = objective_gradient(&prof, &w).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                if a == b {
                    continue;
                }
                let fd = fd_directional(&prof, w.p(), a, b, 1e-6);
                let an = g[a] - g[b];
                let rel = (fd - an).abs() / an.abs().max(1e-3);
                assert!(rel <= 1e-6, "pair ({a},{b}): fd={fd} analytic={an}");
            }
        }
    }

    #[test]
    fn zero_weight_is_rejected() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        let w = Weights::limit(&spec, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            objective_gradient(&prof, &w),
            Err(NumoptError::ZeroWeight { index: 2 })
        );
    }

    #[test]
    fn ascent_reaches_closed_form() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        let trace =
            maximize_dimension(&prof, &Weights::uniform(&spec), &AscentConfig::default()).unwrap();
        assert!(trace.converged);
        let opt = optimal_weights(&prof);
        assert!(max_dist(trace.weights.p(), opt.p()) <= 1e-6);
        assert!((trace.final_objective() - hausdorff_dimension(&prof)).abs() <= 1e-9);
        for pair in trace.objective.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
    }

    #[test]
    fn starting_at_optimum_stops_at_once() {
        let prof = row_profile(&reference_carpet());
        let trace =
            maximize_dimension(&prof, &optimal_weights(&prof), &AscentConfig::default()).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn single_row_goes_uniform() {
        let spec = CarpetSpec::new(
            5,
            3,
            vec![Digit::plain(0, 1), Digit::plain(2, 1), Digit::plain(4, 1)],
        )
        .unwrap();
        let prof = row_profile(&spec);
        let init = Weights::new(&spec, vec![0.7, 0.2, 0.1]).unwrap();
        let trace = maximize_dimension(&prof, &init, &AscentConfig::default()).unwrap();
        for &w in trace.weights.p() {
            assert!((w - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn non_convergence_is_not_an_error() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        let cfg = AscentConfig {
            max_iter: 2,
            ..AscentConfig::default()
        };
        let trace = maximize_dimension(&prof, &Weights::uniform(&spec), &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations, 2);
    }

    #[test]
    fn bad_config_is_rejected() {
        let spec = reference_carpet();
        let prof = row_profile(&spec);
        for cfg in [
            AscentConfig {
                eta: 0.0,
                ..Default::default()
            },
            AscentConfig {
                tol: 0.0,
                ..Default::default()
            },
            AscentConfig {
                backtrack: 1.0,
                ..Default::default()
            },
            AscentConfig {
                max_iter: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                maximize_dimension(&prof, &Weights::uniform(&spec), &cfg),
                Err(NumoptError::Config(_))
            ));
        }
    }
}
