use super::{BoxError, CountSeries};
use crate::dimension::{hausdorff_dimension, RowProfile};

/// Least-squares fit of `log N_l` against `l log m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    pub residuals: Vec<f64>,
    pub levels: (u32, u32),
}

pub fn fit_dimension_slope(series: &CountSeries, m: u32) -> Result<SlopeFit, BoxError> {
    let pts = &series.entries;
    if pts.len() < 3 {
        return Err(BoxError::TooFewLevels(pts.len()));
    }
    let log_m = f64::from(m).ln();
    let xs: Vec<f64> = pts.iter().map(|e| f64::from(e.level) * log_m).collect();
    let ys: Vec<f64> = pts.iter().map(|e| (e.count as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let std_error = (ssr / (k - 2.0) / sxx).sqrt();
    let levels = (
        pts.iter().map(|e| e.level).min().unwrap_or(0),
        pts.iter().map(|e| e.level).max().unwrap_or(0),
    );
    Ok(SlopeFit {
        slope,
        intercept,
        std_error,
        residuals,
        levels,
    })
}

/// Fit restricted to levels `lo..=hi` of a longer series.
pub fn fit_level_range(
    series: &CountSeries,
    m: u32,
    lo: u32,
    hi: u32,
) -> Result<SlopeFit, BoxError> {
    let sub = CountSeries {
        entries: series
            .entries
            .iter()
            .filter(|e| (lo..=hi).contains(&e.level))
            .copied()
            .collect(),
        provenance: series.provenance.clone(),
    };
    fit_dimension_slope(&sub, m)
}

/// Growth exponent of `|D|^k r^(l-k)` with `k = l beta`:
/// `(beta log |D| + (1 - beta) log r) / log m`.
pub fn counting_exponent(profile: &RowProfile) -> f64 {
    let b = profile.beta;
    (b * (profile.total as f64).ln() + (1.0 - b) * (profile.r as f64).ln()) / profile.log_m
}

/// The fitted box-counting slope next to the closed-form Hausdorff value.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionComparison {
    pub hausdorff: f64,
    pub slope: f64,
    pub counting_exponent: f64,
    /// `slope - hausdorff`.
    pub gap: f64,
    /// True when the counting exponent and the Hausdorff value differ,
    /// which happens exactly when the non-empty rows have unequal counts.
    pub discrepancy: bool,
}

pub fn compare_with_hausdorff(profile: &RowProfile, fit: &SlopeFit) -> DimensionComparison {
    let hausdorff = hausdorff_dimension(profile);
    let counting = counting_exponent(profile);
    DimensionComparison {
        hausdorff,
        slope: fit.slope,
        counting_exponent: counting,
        gap: fit.slope - hausdorff,
        discrepancy: (counting - hausdorff).abs() > 1e-9,
    }
}
