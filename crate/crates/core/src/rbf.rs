//! Radial basis function interpolation with affine augmentation.

use std::fmt;
use std::str::FromStr;

use crate::error::{InpaintError, Result};
use crate::linalg::{check_distinct, factor_with_ridge, Matrix};
use crate::neighbors::NeighborSearch;
use crate::plane::{PixelMask, Plane};
use crate::tiling::{tiled_reconstruct, TileData, TilingPolicy};

const SEARCH_RADIUS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RbfKernel {
    /// `r^2 ln r`, zero at the origin.
    ThinPlate,
    /// `exp(-(r / eps)^2)`.
    Gaussian(f64),
    /// `sqrt(r^2 + eps^2)`.
    Multiquadric(f64),
}

impl RbfKernel {
    pub fn phi(&self, r: f64) -> f64 {
        match *self {
            RbfKernel::ThinPlate => {
                if r <= 0.0 {
                    0.0
                } else {
                    r * r * r.ln()
                }
            }
            RbfKernel::Gaussian(eps) => (-(r / eps).powi(2)).exp(),
            RbfKernel::Multiquadric(eps) => (r * r + eps * eps).sqrt(),
        }
    }
}

/// Kernel family as named in configuration; the shape parameter is
/// resolved per fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum KernelKind {
    #[default]
    ThinPlate,
    Gaussian,
    Multiquadric,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::ThinPlate => "thin_plate",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Multiquadric => "multiquadric",
        })
    }
}

impl FromStr for KernelKind {
    type Err = InpaintError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "thin_plate" | "thinplate" | "tps" => Ok(KernelKind::ThinPlate),
            "gaussian" => Ok(KernelKind::Gaussian),
            "multiquadric" | "mq" => Ok(KernelKind::Multiquadric),
            other => Err(InpaintError::invalid(format!("unknown RBF kernel `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RbfParams {
    pub kind: KernelKind,
    /// Shape parameter; defaults to the mean nearest-neighbour spacing of
    /// the centers. Ignored by the thin-plate kernel.
    pub epsilon: Option<f64>,
}

impl RbfParams {
    pub fn resolve(&self, centers: &[(f64, f64)]) -> Result<RbfKernel> {
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(InpaintError::invalid(format!("RBF epsilon must be positive, got {eps}")));
            }
        }
        let eps = || self.epsilon.unwrap_or_else(|| mean_spacing(centers));
        Ok(match self.kind {
            KernelKind::ThinPlate => RbfKernel::ThinPlate,
            KernelKind::Gaussian => RbfKernel::Gaussian(eps()),
            KernelKind::Multiquadric => RbfKernel::Multiquadric(eps()),
        })
    }
}

/// Mean distance from each center to its nearest other center (1 for a
/// single center).
pub fn mean_spacing(centers: &[(f64, f64)]) -> f64 {
    if centers.len() < 2 {
        return 1.0;
    }
    let total: f64 = centers
        .iter()
        .enumerate()
        .map(|(i, a)| {
            centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| dist(*a, *b))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / centers.len() as f64
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RbfModel {
    pub kernel: RbfKernel,
    pub centers: Vec<(f64, f64)>,
    pub coeffs: Vec<f64>,
    /// `c0 + c1 x + c2 y` in absolute coordinates.
    pub poly_coeffs: [f64; 3],
}

/// Solve `[Phi P; P^T 0] [c; d] = [v; 0]` with `P = [1, x, y]`. The affine
/// block is assembled in centroid-shifted coordinates for conditioning.
pub fn fit_rbf(points: &[(f64, f64, f64)], kernel: RbfKernel) -> Result<RbfModel> {
    let n = points.len();
    if n < 3 {
        return Err(InpaintError::TooFewKnown { needed: 3, found: n });
    }
    check_distinct(points.iter().map(|p| (p.0, p.1)))?;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.0 - cx, p.1 - cy);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx * syy - sxy * sxy <= 1e-12 * (sxx + syy).powi(2) {
        return Err(InpaintError::Degenerate("RBF centers are collinear".into()));
    }

    let mut a = Matrix::zeros(n + 3);
    for i in 0..n {
        let pi = (points[i].0, points[i].1);
        a.set(i, i, kernel.phi(0.0));
        for j in i + 1..n {
            let v = kernel.phi(dist(pi, (points[j].0, points[j].1)));
            a.set(i, j, v);
            a.set(j, i, v);
        }
        for (k, v) in [1.0, pi.0 - cx, pi.1 - cy].into_iter().enumerate() {
            a.set(i, n + k, v);
            a.set(n + k, i, v);
        }
    }
    let mut rhs: Vec<f64> = points.iter().map(|p| p.2).collect();
    rhs.extend([0.0; 3]);
    let sol = factor_with_ridge(&a, n, "rbf")?.lu.solve(&rhs);
    let (d0, d1, d2) = (sol[n], sol[n + 1], sol[n + 2]);
    Ok(RbfModel {
        kernel,
        centers: points.iter().map(|p| (p.0, p.1)).collect(),
        coeffs: sol[..n].to_vec(),
        poly_coeffs: [d0 - d1 * cx - d2 * cy, d1, d2],
    })
}

pub fn eval_rbf(model: &RbfModel, x: f64, y: f64) -> f64 {
    let [c0, c1, c2] = model.poly_coeffs;
    let radial: f64 = model
        .centers
        .iter()
        .zip(&model.coeffs)
        .map(|(&c, &w)| w * model.kernel.phi(dist(c, (x, y))))
        .sum();
    radial + c0 + c1 * x + c2 * y
}

/// Thin-plate RBF reconstruction.
pub fn rbf_inpaint(p: &Plane, m: &PixelMask, policy: &TilingPolicy) -> Result<Plane> {
    rbf_inpaint_with(p, m, policy, &RbfParams::default())
}

pub fn rbf_inpaint_with(p: &Plane, m: &PixelMask, policy: &TilingPolicy, params: &RbfParams) -> Result<Plane> {
    let search = NeighborSearch::new(SEARCH_RADIUS);
    let fit = |pts: &[(f64, f64, f64)]| -> Result<RbfModel> {
        let centers: Vec<(f64, f64)> = pts.iter().map(|k| (k.0, k.1)).collect();
        fit_rbf(pts, params.resolve(&centers)?)
    };
    tiled_reconstruct(p, m, policy, |tile: &TileData| {
        if let Some(c) = tile.constant() {
            return Ok(vec![c; tile.targets.len()]);
        }
        if tile.known.len() <= policy.max_points {
            let model = fit(&tile.known)?;
            return Ok(tile
                .targets
                .iter()
                .map(|&(x, y)| eval_rbf(&model, x as f64, y as f64))
                .collect());
        }
        tile.targets
            .iter()
            .map(|&(x, y)| {
                let pts: Vec<(f64, f64, f64)> = search
                    .nearest(m, tile.job.window, x, y, policy.neighbors)
                    .into_iter()
                    .map(|(a, b)| (a as f64, b as f64, p.get(a, b)))
                    .collect();
                Ok(eval_rbf(&fit(&pts)?, x as f64, y as f64))
            })
            .collect()
    })
}
