//! Row statistics, entropies and the two dimension formulas.
//!
//! With `t_j` the number of digits in row `j` and `beta = log m / log n`,
//! the carpet has Hausdorff dimension
//!
//! ```text
//! dim_H K = log(sum_j t_j^beta) / log m
//! ```
//!
//! and the projection of the Bernoulli measure with digit weights `p`
//! (row marginal `q`) has dimension
//!
//! ```text
//! dim nu = H(q) / log m + (H(p) - H(q)) / log n.
//! ```
//!
//! Neither quantity sees the reflection signatures: everything here is a
//! function of the row of each digit only. All logarithms are natural.

use thiserror::Error;

use crate::carpet::CarpetSpec;

/// Normalisation tolerance for probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightsError {
    #[error("expected {expected} weights, got {got}")]
    Length { expected: usize, got: usize },
    #[error("weight {index} = {value} is not a finite number")]
    NotFinite { index: usize, value: f64 },
    #[error("weight {index} = {value} must be strictly positive")]
    NonPositive { index: usize, value: f64 },
    #[error("weight {index} = {value} is negative")]
    Negative { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1 (tolerance 1e-12)")]
    Normalization { sum: f64 },
    #[error("weights were built for a different digit layout")]
    Layout,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("entry {index} = {value} is negative or not finite")]
    BadEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, not 1 (tolerance 1e-12)")]
    Normalization { sum: f64 },
}

/// Row counts and the scaling constants of a carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct RowProfile {
    pub n: u32,
    pub m: u32,
    /// `t[j]`: number of digits in row `j`.
    pub t: Vec<u32>,
    /// Row of each digit, in canonical digit order.
    pub digit_rows: Vec<usize>,
    /// Number of non-empty rows.
    pub r: usize,
    /// Total number of digits.
    pub total: usize,
    pub beta: f64,
    pub log_m: f64,
    pub log_n: f64,
    /// Lyapunov exponent of the weakly contracted (vertical) direction.
    pub lambda1: f64,
    /// Lyapunov exponent of the strongly contracted (horizontal) direction.
    pub lambda2: f64,
}

pub fn row_profile(spec: &CarpetSpec) -> RowProfile {
    let m = spec.m();
    let n = spec.n();
    let mut t = vec![0u32; m as usize];
    let digit_rows: Vec<usize> = spec.digits().iter().map(|d| d.j as usize).collect();
    for &j in &digit_rows {
        t[j] += 1;
    }
    let log_m = f64::from(m).ln();
    let log_n = f64::from(n).ln();
    RowProfile {
        n,
        m,
        r: t.iter().filter(|&&c| c > 0).count(),
        total: digit_rows.len(),
        t,
        digit_rows,
        beta: log_m / log_n,
        log_m,
        log_n,
        lambda1: -log_m,
        lambda2: -log_n,
    }
}

impl RowProfile {
    /// `S = sum over non-empty rows of t_j^beta`.
    pub fn row_sum(&self) -> f64 {
        self.t
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| f64::from(c).powf(self.beta))
            .sum()
    }
}

/// A Bernoulli weight vector over the digits with its row marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    p: Vec<f64>,
    q: Vec<f64>,
    rows: Vec<usize>,
}

impl Weights {
    /// Strictly positive weights over the digits of `spec`.
    pub fn new(spec: &CarpetSpec, p: Vec<f64>) -> Result<Self, WeightsError> {
        Weights::build(&row_profile(spec), p, true)
    }

    /// Like [`Weights::new`] but accepts zero entries. Boundary measures
    /// are only meaningful through the `0 log 0 = 0` convention; the
    /// optimiser rejects them.
    pub fn limit(spec: &CarpetSpec, p: Vec<f64>) -> Result<Self, WeightsError> {
        Weights::build(&row_profile(spec), p, false)
    }

    /// Strictly positive weights laid out for `profile`.
    pub fn for_profile(profile: &RowProfile, p: Vec<f64>) -> Result<Self, WeightsError> {
        Weights::build(profile, p, true)
    }

    pub fn uniform(spec: &CarpetSpec) -> Self {
        Weights::uniform_for(&row_profile(spec))
    }

    pub fn uniform_for(profile: &RowProfile) -> Self {
        let k = profile.total;
        Weights::build(profile, vec![1.0 / k as f64; k], true).expect("uniform weights are valid")
    }

    fn build(profile: &RowProfile, p: Vec<f64>, strict: bool) -> Result<Self, WeightsError> {
        if p.len() != profile.total {
            return Err(WeightsError::Length {
                expected: profile.total,
                got: p.len(),
            });
        }
        for (index, &value) in p.iter().enumerate() {
            if !value.is_finite() {
                return Err(WeightsError::NotFinite { index, value });
            }
            if strict && value <= 0.0 {
                return Err(WeightsError::NonPositive { index, value });
            }
            if value < 0.0 {
                return Err(WeightsError::Negative { index, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(WeightsError::Normalization { sum });
        }
        let mut q = vec![0.0; profile.m as usize];
        for (&w, &j) in p.iter().zip(&profile.digit_rows) {
            q[j] += w;
        }
        Ok(Weights {
            p,
            q,
            rows: profile.digit_rows.clone(),
        })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn into_p(self) -> Vec<f64> {
        self.p
    }

    fn check_layout(&self, profile: &RowProfile) -> Result<(), WeightsError> {
        if self.rows != profile.digit_rows || self.q.len() != profile.m as usize {
            return Err(WeightsError::Layout);
        }
        Ok(())
    }

    /// `H(p | q) = -sum_d p_d log(p_d / q_row(d))`.
    pub fn conditional_entropy(&self) -> f64 {
        -self
            .p
            .iter()
            .zip(&self.rows)
            .filter(|(&w, _)| w > 0.0)
            .map(|(&w, &j)| w * (w / self.q[j]).ln())
            .sum::<f64>()
    }
}

/// Shannon entropy in nats with `0 log 0 = 0`.
pub fn shannon_entropy(v: &[f64]) -> Result<f64, EntropyError> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(EntropyError::BadEntry { index, value });
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(EntropyError::Normalization { sum });
    }
    Ok(entropy(v))
}

/// Entropy of an entry-wise valid vector; no normalisation check.
pub(crate) fn entropy(v: &[f64]) -> f64 {
    -v.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Closed-form Hausdorff dimension of the carpet.
pub fn hausdorff_dimension(profile: &RowProfile) -> f64 {
    profile.row_sum().ln() / profile.log_m
}

/// Ledrappier-Young dimension of the projected Bernoulli measure.
pub fn ly_dimension(profile: &RowProfile, w: &Weights) -> Result<f64, WeightsError> {
    w.check_layout(profile)?;
    let hp = entropy(&w.p);
    let hq = entropy(&w.q);
    Ok(hq / profile.log_m + (hp - hq) / profile.log_n)
}

/// The same dimension through the conditional-entropy expansion
/// `(H(q) + beta * H(p | q)) / log m`.
pub fn ly_dimension_conditional(profile: &RowProfile, w: &Weights) -> Result<f64, WeightsError> {
    w.check_layout(profile)?;
    Ok((entropy(&w.q) + profile.beta * w.conditional_entropy()) / profile.log_m)
}

/// Dimension-maximising weights: rows weighted by `t_j^beta / S`, uniform
/// within each row.
pub fn optimal_weights(profile: &RowProfile) -> Weights {
    let s = profile.row_sum();
    let q: Vec<f64> = profile
        .t
        .iter()
        .map(|&c| {
            if c == 0 {
                0.0
            } else {
                f64::from(c).powf(profile.beta) / s
            }
        })
        .collect();
    let p: Vec<f64> = profile
        .digit_rows
        .iter()
        .map(|&j| q[j] / f64::from(profile.t[j]))
        .collect();
    let mut row_q = vec![0.0; profile.m as usize];
    for (&w, &j) in p.iter().zip(&profile.digit_rows) {
        row_q[j] += w;
    }
    Weights {
        p,
        q: row_q,
        rows: profile.digit_rows.clone(),
    }
}

/// Summary of the closed-form results for one carpet.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub hausdorff: f64,
    pub row_sum: f64,
    pub beta: f64,
    pub t: Vec<u32>,
    /// Optimal row weights `t_j^beta / S`.
    pub optimal_q: Vec<f64>,
    pub optimal: Weights,
    pub entropy_p: f64,
    pub entropy_q: f64,
}

pub fn dimension_report(profile: &RowProfile) -> DimensionReport {
    let optimal = optimal_weights(profile);
    let s = profile.row_sum();
    DimensionReport {
        hausdorff: s.ln() / profile.log_m,
        row_sum: s,
        beta: profile.beta,
        t: profile.t.clone(),
        optimal_q: optimal.q.clone(),
        entropy_p: entropy(&optimal.p),
        entropy_q: entropy(&optimal.q),
        optimal,
    }
}
