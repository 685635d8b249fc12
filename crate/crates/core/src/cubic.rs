//! Bicubic patches and scattered local-cubic inpainting.
//!
//! A patch is `p(x, y) = sum_{i,j=0..3} a_ij x^i y^j` on the unit square,
//! determined by values and the derivatives `f_x`, `f_y`, `f_xy` at the four
//! corners. Inpainting fits the same tensor-cubic basis by least squares to
//! the nearest known pixels of each unknown pixel.

use crate::error::{InpaintError, Result};
use crate::linalg::{Lu, Matrix};
use crate::neighbors::NeighborSearch;
use crate::plane::{PixelMask, Plane, TileRect};

/// Corner order used by every corner-indexed array: (0,0), (1,0), (0,1), (1,1).
pub const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];

pub const NEIGHBORS: usize = 24;
/// Neighbourhood tried when the nearest `NEIGHBORS` surround the target but
/// cannot determine a cubic.
pub const WIDE_NEIGHBORS: usize = 48;
pub const MIN_KNOWN: usize = 16;
/// Normal systems above this condition estimate drop to a lower degree.
pub const MAX_CONDITION: f64 = 1e10;
const SEARCH_RADIUS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BicubicPatch {
    /// `coeffs[i][j]` multiplies `x^i y^j`.
    pub coeffs: [[f64; 4]; 4],
}

/// `d^dx/dx d^dy/dy` of `x^i y^j` evaluated at `(x, y)`.
fn monomial_derivative(i: usize, j: usize, dx: usize, dy: usize, x: f64, y: f64) -> f64 {
    let falling = |p: usize, d: usize| -> f64 { (0..d).map(|k| p.saturating_sub(k) as f64).product() };
    if dx > i || dy > j {
        return 0.0;
    }
    falling(i, dx) * falling(j, dy) * x.powi((i - dx) as i32) * y.powi((j - dy) as i32)
}

pub fn fit_bicubic_patch(
    f: [f64; 4],
    fx: [f64; 4],
    fy: [f64; 4],
    fxy: [f64; 4],
) -> Result<BicubicPatch> {
    let rhs: Vec<f64> = f.iter().chain(&fx).chain(&fy).chain(&fxy).copied().collect();
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(InpaintError::invalid("non-finite bicubic patch input"));
    }
    let mut m = Matrix::zeros(16);
    for (block, (dx, dy)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        for (c, &(x, y)) in CORNERS.iter().enumerate() {
            let row = block * 4 + c;
            for i in 0..4 {
                for j in 0..4 {
                    m.set(row, i * 4 + j, monomial_derivative(i, j, dx, dy, x, y));
                }
            }
        }
    }
    let lu = Lu::factor(&m).expect("the bicubic constraint matrix is invertible");
    let a = lu.solve(&rhs);
    let mut coeffs = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            coeffs[i][j] = a[i * 4 + j];
        }
    }
    Ok(BicubicPatch { coeffs })
}

/// Horner evaluation in both variables.
pub fn eval_bicubic(p: &BicubicPatch, x: f64, y: f64) -> f64 {
    p.coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, row| acc * x + row.iter().rev().fold(0.0, |r, &a| r * y + a))
}

impl BicubicPatch {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        eval_bicubic(self, x, y)
    }

    pub fn eval_derivative(&self, dx: usize, dy: usize, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.coeffs[i][j] * monomial_derivative(i, j, dx, dy, x, y);
            }
        }
        s
    }
}

/// Finite-difference derivative along one axis: central inside, one-sided at
/// the borders.
fn diff(p: &Plane, x: usize, y: usize, along_x: bool) -> f64 {
    let (pos, len) = if along_x { (x, p.width()) } else { (y, p.height()) };
    let at = |q: usize| if along_x { p.get(q, y) } else { p.get(x, q) };
    if len < 2 {
        0.0
    } else if pos == 0 {
        at(1) - at(0)
    } else if pos == len - 1 {
        at(pos) - at(pos - 1)
    } else {
        (at(pos + 1) - at(pos - 1)) / 2.0
    }
}

fn diff_xy(p: &Plane, x: usize, y: usize) -> f64 {
    let (w, h) = (p.width(), p.height());
    if w < 2 || h < 2 {
        return 0.0;
    }
    let (xa, xb) = (x.saturating_sub(1), (x + 1).min(w - 1));
    let (ya, yb) = (y.saturating_sub(1), (y + 1).min(h - 1));
    (p.get(xb, yb) - p.get(xa, yb) - p.get(xb, ya) + p.get(xa, ya))
        / ((xb - xa) as f64 * (yb - ya) as f64)
}

/// Patch over the grid cell whose top-left pixel is `(x, y)`, with corner
/// derivatives estimated by finite differences.
pub fn grid_patch(p: &Plane, x: usize, y: usize) -> Result<BicubicPatch> {
    if x + 1 >= p.width() || y + 1 >= p.height() {
        return Err(InpaintError::OutOfBounds {
            rect: TileRect::new(x, y, 2, 2).to_string(),
            width: p.width(),
            height: p.height(),
        });
    }
    let pts = CORNERS.map(|(cx, cy)| (x + cx as usize, y + cy as usize));
    fit_bicubic_patch(
        pts.map(|(a, b)| p.get(a, b)),
        pts.map(|(a, b)| diff(p, a, b, true)),
        pts.map(|(a, b)| diff(p, a, b, false)),
        pts.map(|(a, b)| diff_xy(p, a, b)),
    )
}

/// Least-squares tensor polynomial of degree `degree` through the samples
/// (coordinates relative to the target), evaluated at the target. `None`
/// when the normal system is rank-deficient.
fn local_poly_at_origin(samples: &[(f64, f64, f64)], degree: usize) -> Option<f64> {
    let m = (degree + 1) * (degree + 1);
    if samples.len() < m {
        return None;
    }
    let scale = samples
        .iter()
        .map(|&(u, v, _)| u.abs().max(v.abs()))
        .fold(1.0, f64::max);
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|&(u, v, _)| {
            let (u, v) = (u / scale, v / scale);
            let mut r = Vec::with_capacity(m);
            let mut ui = 1.0;
            for _ in 0..=degree {
                let mut vj = 1.0;
                for _ in 0..=degree {
                    r.push(ui * vj);
                    vj *= v;
                }
                ui *= u;
            }
            r
        })
        .collect();
    let col_norm: Vec<f64> = (0..m)
        .map(|k| rows.iter().map(|r| r[k] * r[k]).sum::<f64>().sqrt())
        .collect();
    if col_norm.iter().any(|&c| c == 0.0) {
        return None;
    }
    let mut normal = Matrix::zeros(m);
    let mut rhs = vec![0.0; m];
    for (r, &(_, _, f)) in rows.iter().zip(samples) {
        for a in 0..m {
            let ra = r[a] / col_norm[a];
            rhs[a] += ra * f;
            for b in a..m {
                normal.set(a, b, normal.get(a, b) + ra * r[b] / col_norm[b]);
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            normal.set(a, b, normal.get(b, a));
        }
    }
    let lu = Lu::factor(&normal)?;
    if lu.condition_estimate(normal.norm1()) > MAX_CONDITION {
        return None;
    }
    Some(lu.solve(&rhs)[0] / col_norm[0])
}

/// Least-squares fit of the given degree to `known` around `(x, y)`,
/// evaluated at `(x, y)`.
fn local_fit(p: &Plane, known: &[(usize, usize)], x: usize, y: usize, degree: usize) -> Option<f64> {
    let mean = known.iter().map(|&(a, b)| p.get(a, b)).sum::<f64>() / known.len() as f64;
    let samples: Vec<(f64, f64, f64)> = known
        .iter()
        .map(|&(a, b)| (a as f64 - x as f64, b as f64 - y as f64, p.get(a, b) - mean))
        .collect();
    local_poly_at_origin(&samples, degree).map(|v| mean + v)
}

/// Whether the bounding box of `known` contains `(x, y)`.
fn surrounds(known: &[(usize, usize)], x: usize, y: usize) -> bool {
    let (lo_x, hi_x) = known.iter().fold((usize::MAX, 0), |(lo, hi), &(a, _)| (lo.min(a), hi.max(a)));
    let (lo_y, hi_y) = known.iter().fold((usize::MAX, 0), |(lo, hi), &(_, b)| (lo.min(b), hi.max(b)));
    (lo_x..=hi_x).contains(&x) && (lo_y..=hi_y).contains(&y)
}

/// Replace every unknown pixel with a local cubic fit over its nearest known
/// pixels. Only original known pixels are ever used as data.
pub fn cubic_inpaint(p: &Plane, m: &PixelMask) -> Result<Plane> {
    p.check_mask(m)?;
    let known = m.count_known();
    if known < MIN_KNOWN {
        return Err(InpaintError::TooFewKnown {
            needed: MIN_KNOWN,
            found: known,
        });
    }
    let k = NEIGHBORS.min(known);
    let search = NeighborSearch::new(SEARCH_RADIUS);
    let window = TileRect::full(p.width(), p.height());
    let mut out = p.clone();
    for y in 0..p.height() {
        for x in 0..p.width() {
            if m.is_unknown(x, y) {
                let nb = search.nearest(m, window, x, y, k);
                // Degree 3 first widens the neighbourhood when the target is
                // surrounded, then the degree drops to 2, 1 and finally the
                // nearest neighbour.
                let v = local_fit(p, &nb, x, y, 3)
                    .or_else(|| {
                        (known > k && surrounds(&nb, x, y))
                            .then(|| search.nearest(m, window, x, y, WIDE_NEIGHBORS.min(known)))
                            .and_then(|wide| local_fit(p, &wide, x, y, 3))
                    })
                    .or_else(|| local_fit(p, &nb, x, y, 2))
                    .or_else(|| local_fit(p, &nb, x, y, 1))
                    .unwrap_or_else(|| p.get(nb[0].0, nb[0].1));
                out.set(x, y, v);
            }
        }
    }
    out.ensure_finite()
}
