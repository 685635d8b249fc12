//! Empirical semivariograms and bounded weighted least-squares model fits.

use std::fmt;
use std::str::FromStr;

use crate::error::{InpaintError, Result};

/// Lower bound on the structured sill so models never go flat.
pub const MIN_SILL: f64 = 1e-6;
const RANGE_GRID: usize = 64;
const GOLDEN_ITERS: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum VariogramFamily {
    #[default]
    Spherical,
    Exponential,
    Gaussian,
}

impl VariogramFamily {
    /// Normalized shape at `t = h / range`: 0 at the origin, approaching 1.
    /// Exponential and Gaussian use the practical range (95% of the sill).
    fn shape(self, t: f64) -> f64 {
        match self {
            VariogramFamily::Spherical => {
                if t >= 1.0 {
                    1.0
                } else {
                    1.5 * t - 0.5 * t * t * t
                }
            }
            VariogramFamily::Exponential => 1.0 - (-3.0 * t).exp(),
            VariogramFamily::Gaussian => 1.0 - (-3.0 * t * t).exp(),
        }
    }
}

impl fmt::Display for VariogramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariogramFamily::Spherical => "spherical",
            VariogramFamily::Exponential => "exponential",
            VariogramFamily::Gaussian => "gaussian",
        })
    }
}

impl FromStr for VariogramFamily {
    type Err = InpaintError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spherical" => Ok(VariogramFamily::Spherical),
            "exponential" => Ok(VariogramFamily::Exponential),
            "gaussian" => Ok(VariogramFamily::Gaussian),
            other => Err(InpaintError::invalid(format!("unknown variogram family `{other}`"))),
        }
    }
}

/// `gamma(0) = 0`; `gamma(h) = nugget + sill * shape(h / range)` for `h > 0`.
/// `sill` is the structured part above the nugget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariogramModel {
    pub family: VariogramFamily,
    pub nugget: f64,
    pub sill: f64,
    pub range: f64,
}

impl VariogramModel {
    pub fn gamma(&self, h: f64) -> f64 {
        if h <= 0.0 {
            0.0
        } else {
            self.nugget + self.sill * self.family.shape(h / self.range)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagBin {
    /// Mean separation of the pairs in the bin.
    pub lag: f64,
    pub gamma: f64,
    pub pairs: usize,
}

/// Isotropic semivariance: pairs at distance `d` in `((k-1) w, k w]` with
/// `w = max_lag / n_bins` land in bin `k`; `gamma = sum (dz)^2 / (2 n)`.
/// Pairs beyond `max_lag` and empty bins are dropped.
pub fn empirical_variogram(points: &[(f64, f64, f64)], max_lag: f64, n_bins: usize) -> Result<Vec<LagBin>> {
    if points.len() < 2 {
        return Err(InpaintError::TooFewKnown {
            needed: 2,
            found: points.len(),
        });
    }
    if !(max_lag > 0.0) || n_bins == 0 {
        return Err(InpaintError::invalid("variogram needs max_lag > 0 and at least one bin"));
    }
    let width = max_lag / n_bins as f64;
    let mut sum_sq = vec![0.0; n_bins];
    let mut sum_d = vec![0.0; n_bins];
    let mut count = vec![0usize; n_bins];
    for (i, &(xi, yi, zi)) in points.iter().enumerate() {
        for &(xj, yj, zj) in &points[i + 1..] {
            let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
            if d <= 0.0 || d > max_lag {
                continue;
            }
            let k = ((d / width).ceil() as usize).clamp(1, n_bins) - 1;
            sum_sq[k] += (zi - zj).powi(2);
            sum_d[k] += d;
            count[k] += 1;
        }
    }
    Ok((0..n_bins)
        .filter(|&k| count[k] > 0)
        .map(|k| LagBin {
            lag: sum_d[k] / count[k] as f64,
            gamma: sum_sq[k] / (2.0 * count[k] as f64),
            pairs: count[k],
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FittedVariogram {
    pub model: VariogramModel,
    /// All empirical semivariances were zero; `model` is a flat placeholder.
    pub degenerate: bool,
    /// Pair-count weighted sum of squared residuals.
    pub residual: f64,
}

/// Weighted (by pair count) squared residual of `model` against `bins`.
pub fn fit_residual(bins: &[LagBin], model: &VariogramModel) -> f64 {
    bins.iter()
        .map(|b| b.pairs as f64 * (model.gamma(b.lag) - b.gamma).powi(2))
        .sum()
}

/// Best `(nugget, sill)` for a fixed range, by exhaustive search over the
/// interior optimum and the two constraint edges of the convex problem.
fn best_linear(bins: &[LagBin], family: VariogramFamily, range: f64) -> (f64, f64, f64) {
    let s: Vec<f64> = bins.iter().map(|b| family.shape(b.lag / range)).collect();
    let w: Vec<f64> = bins.iter().map(|b| b.pairs as f64).collect();
    let g: Vec<f64> = bins.iter().map(|b| b.gamma).collect();
    let dot = |a: &dyn Fn(usize) -> f64| (0..bins.len()).map(|k| w[k] * a(k)).sum::<f64>();
    let sw = dot(&|_| 1.0);
    let ss = dot(&|k| s[k]);
    let sss = dot(&|k| s[k] * s[k]);
    let sg = dot(&|k| g[k]);
    let ssg = dot(&|k| s[k] * g[k]);

    let residual = |a: f64, b: f64| (0..bins.len()).map(|k| w[k] * (a + b * s[k] - g[k]).powi(2)).sum::<f64>();
    let mut candidates = Vec::with_capacity(3);
    let det = sw * sss - ss * ss;
    if det.abs() > 1e-12 * sw * sss.max(1e-300) {
        let a = (sg * sss - ss * ssg) / det;
        let b = (sw * ssg - ss * sg) / det;
        if a >= 0.0 && b >= MIN_SILL {
            candidates.push((a, b));
        }
    }
    if sss > 0.0 {
        candidates.push((0.0, (ssg / sss).max(MIN_SILL)));
    }
    candidates.push((((sg - MIN_SILL * ss) / sw).max(0.0), MIN_SILL));
    candidates
        .into_iter()
        .map(|(a, b)| (a, b, residual(a, b)))
        .fold((0.0, MIN_SILL, f64::INFINITY), |best, c| if c.2 < best.2 { c } else { best })
}

/// Bounded WLS fit: `nugget >= 0`, `sill >= MIN_SILL`,
/// `range in [1, 4 * max_lag]` where `max_lag` is the largest bin lag. The
/// range is located on a log-spaced grid and refined by golden-section
/// search; nugget and sill are solved exactly for each trial range.
pub fn fit_variogram_model(bins: &[LagBin], family: VariogramFamily) -> Result<FittedVariogram> {
    if bins.len() < 3 {
        return Err(InpaintError::Degenerate(format!(
            "variogram fit needs at least 3 non-empty bins, got {}",
            bins.len()
        )));
    }
    let max_lag = bins.iter().map(|b| b.lag).fold(0.0, f64::max);
    if bins.iter().all(|b| b.gamma == 0.0) {
        let model = VariogramModel {
            family,
            nugget: 0.0,
            sill: MIN_SILL,
            range: max_lag.max(1.0),
        };
        return Ok(FittedVariogram {
            model,
            degenerate: true,
            residual: fit_residual(bins, &model),
        });
    }

    let (lo, hi) = (1.0f64, (4.0 * max_lag).max(1.0));
    let grid: Vec<f64> = (0..RANGE_GRID)
        .map(|i| lo * (hi / lo).powf(i as f64 / (RANGE_GRID - 1) as f64))
        .collect();
    let eval = |r: f64| best_linear(bins, family, r).2;
    let (best_i, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| (i, eval(r)))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });

    let (mut a, mut b) = (grid[best_i.saturating_sub(1)], grid[(best_i + 1).min(RANGE_GRID - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
        }
    }
    let mut range = if fc <= fd { c } else { d };
    if eval(grid[best_i]) < eval(range) {
        range = grid[best_i];
    }
    let (nugget, sill, residual) = best_linear(bins, family, range);
    Ok(FittedVariogram {
        model: VariogramModel {
            family,
            nugget,
            sill,
            range,
        },
        degenerate: false,
        residual,
    })
}
