//! Ordinary kriging: each unknown pixel is a weighted sum of known pixels,
//! with weights from the variogram system bordered by the unbiasedness
//! constraint.

mod variogram;

pub use variogram::{
    empirical_variogram, fit_residual, fit_variogram_model, FittedVariogram, LagBin, VariogramFamily,
    VariogramModel, MIN_SILL,
};

use crate::error::Result;
use crate::linalg::{check_distinct, factor_with_ridge, Lu, Matrix};
use crate::neighbors::NeighborSearch;
use crate::plane::{PixelMask, Plane, TileRect};
use crate::tiling::{tiled_reconstruct, TileData, TilingPolicy};

pub const N_BINS: usize = 8;
/// Variograms of larger windows are estimated from an even subsample.
pub const VARIOGRAM_MAX_POINTS: usize = 4096;
const SEARCH_RADIUS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct KrigingWeights {
    pub lambdas: Vec<f64>,
    pub lagrange_mult: f64,
}

/// Factored `[G 1; 1^T 0]` for a fixed set of known points, reusable for
/// every target that draws on the same points.
#[derive(Clone, Debug)]
pub struct KrigingSystem {
    points: Vec<(f64, f64)>,
    model: VariogramModel,
    lu: Lu,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl KrigingSystem {
    pub fn new(points: &[(f64, f64)], model: &VariogramModel) -> Result<Self> {
        if points.is_empty() {
            return Err(crate::error::InpaintError::TooFewKnown { needed: 1, found: 0 });
        }
        check_distinct(points.iter().copied())?;
        let n = points.len();
        let mut a = Matrix::zeros(n + 1);
        for i in 0..n {
            for j in i + 1..n {
                let g = model.gamma(dist(points[i], points[j]));
                a.set(i, j, g);
                a.set(j, i, g);
            }
            a.set(i, n, 1.0);
            a.set(n, i, 1.0);
        }
        let c = factor_with_ridge(&a, n, "kriging")?;
        Ok(KrigingSystem {
            points: points.to_vec(),
            model: *model,
            lu: c.lu,
        })
    }

    pub fn weights(&self, target: (f64, f64)) -> KrigingWeights {
        let mut rhs: Vec<f64> = self.points.iter().map(|&p| self.model.gamma(dist(p, target))).collect();
        rhs.push(1.0);
        let mut sol = self.lu.solve(&rhs);
        let lagrange_mult = sol.pop().unwrap_or(0.0);
        KrigingWeights {
            lambdas: sol,
            lagrange_mult,
        }
    }
}

pub fn kriging_weights(known: &[(f64, f64)], target: (f64, f64), model: &VariogramModel) -> Result<KrigingWeights> {
    Ok(KrigingSystem::new(known, model)?.weights(target))
}

/// Variogram for one data window: `max_lag` is half the window diagonal and
/// [`N_BINS`] bins are used. When fewer than three bins are populated the
/// model falls back to no nugget, the sample variance as sill and
/// `max_lag` as range.
pub fn fit_window_variogram(known: &[(f64, f64, f64)], window: TileRect, family: VariogramFamily) -> VariogramModel {
    let max_lag = ((window.w * window.w + window.h * window.h) as f64).sqrt() / 2.0;
    let stride = known.len().div_ceil(VARIOGRAM_MAX_POINTS).max(1);
    let sample: Vec<(f64, f64, f64)> = known.iter().step_by(stride).copied().collect();
    let fitted = empirical_variogram(&sample, max_lag, N_BINS)
        .and_then(|bins| fit_variogram_model(&bins, family));
    match fitted {
        Ok(f) => f.model,
        Err(_) => {
            let n = known.len().max(1) as f64;
            let mean = known.iter().map(|k| k.2).sum::<f64>() / n;
            let var = known.iter().map(|k| (k.2 - mean).powi(2)).sum::<f64>() / n;
            VariogramModel {
                family,
                nugget: 0.0,
                sill: var.max(MIN_SILL),
                range: max_lag.max(1.0),
            }
        }
    }
}

fn estimate(weights: &KrigingWeights, values: impl Iterator<Item = f64>) -> f64 {
    weights.lambdas.iter().zip(values).map(|(l, v)| l * v).sum()
}

/// Kriging with the default (spherical) variogram family.
pub fn kriging_inpaint(p: &Plane, m: &PixelMask, policy: &TilingPolicy) -> Result<Plane> {
    kriging_inpaint_with(p, m, policy, VariogramFamily::default())
}

pub fn kriging_inpaint_with(p: &Plane, m: &PixelMask, policy: &TilingPolicy, family: VariogramFamily) -> Result<Plane> {
    let search = NeighborSearch::new(SEARCH_RADIUS);
    tiled_reconstruct(p, m, policy, |tile: &TileData| {
        if let Some(c) = tile.constant() {
            return Ok(vec![c; tile.targets.len()]);
        }
        let model = fit_window_variogram(&tile.known, tile.job.window, family);
        if tile.known.len() <= policy.max_points {
            let pts: Vec<(f64, f64)> = tile.known.iter().map(|k| (k.0, k.1)).collect();
            let sys = KrigingSystem::new(&pts, &model)?;
            return Ok(tile
                .targets
                .iter()
                .map(|&(x, y)| estimate(&sys.weights((x as f64, y as f64)), tile.known.iter().map(|k| k.2)))
                .collect());
        }
        tile.targets
            .iter()
            .map(|&(x, y)| {
                let nb = search.nearest(m, tile.job.window, x, y, policy.neighbors);
                let pts: Vec<(f64, f64)> = nb.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
                let w = kriging_weights(&pts, (x as f64, y as f64), &model)?;
                Ok(estimate(&w, nb.iter().map(|&(a, b)| p.get(a, b))))
            })
            .collect()
    })
}
