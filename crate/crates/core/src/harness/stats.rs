use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::BenchmarkReport;
use crate::error::{InpaintError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnovaResult {
    pub f_stat: f64,
    pub p_value: f64,
    pub df_between: usize,
    pub df_within: usize,
}

/// Classic one-way ANOVA: `F = (SSB / (k - 1)) / (SSW / (N - k))`, with the
/// p-value from the F distribution's survival function.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<AnovaResult> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(InpaintError::invalid("ANOVA needs at least 2 groups of at least 2 values"));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(InpaintError::invalid("ANOVA values must be finite"));
    }
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (mean - grand).powi(2);
        ssw += g.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    }
    let (df_between, df_within) = (k - 1, n - k);
    let (f_stat, p_value) = if ssb == 0.0 {
        (0.0, 1.0)
    } else if ssw == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ssb / df_between as f64) / (ssw / df_within as f64);
        let dist = FisherSnedecor::new(df_between as f64, df_within as f64)
            .map_err(|e| InpaintError::invalid(e.to_string()))?;
        (f, dist.sf(f).clamp(0.0, 1.0))
    };
    Ok(AnovaResult {
        f_stat,
        p_value,
        df_between,
        df_within,
    })
}

/// `100 * (max - min) / min`.
pub fn percent_spread(values: &[f64]) -> Result<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !(min > 0.0) {
        return Err(InpaintError::invalid("percent spread needs values with a positive minimum"));
    }
    Ok(100.0 * (max - min) / min)
}

/// Winner flags for one report row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BestMarks {
    pub psnr: bool,
    pub ssim: bool,
    pub mse: bool,
}

/// Flag, per (image, corruption) group, the rows with the highest PSNR,
/// highest SSIM and lowest MSE; equal values share the flag. Error rows are
/// never flagged. The result is aligned with `report.rows`.
pub fn mark_best(report: &BenchmarkReport) -> Vec<BestMarks> {
    let mut groups: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, r) in report.rows.iter().enumerate() {
        if r.result.is_ok() {
            groups.entry((&r.image, &r.corruption)).or_default().push(i);
        }
    }
    let mut marks = vec![BestMarks::default(); report.rows.len()];
    for idx in groups.values() {
        let s = |i: usize| *report.rows[i].result.as_ref().expect("only ok rows are grouped");
        let best_psnr = idx.iter().map(|&i| s(i).psnr).fold(f64::NEG_INFINITY, f64::max);
        let best_ssim = idx.iter().map(|&i| s(i).ssim).fold(f64::NEG_INFINITY, f64::max);
        let best_mse = idx.iter().map(|&i| s(i).mse).fold(f64::INFINITY, f64::min);
        for &i in idx {
            marks[i] = BestMarks {
                psnr: s(i).psnr == best_psnr,
                ssim: s(i).ssim == best_ssim,
                mse: s(i).mse == best_mse,
            };
        }
    }
    marks
}
