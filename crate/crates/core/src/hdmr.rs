//! High dimensional model representation of a plane.
//!
//! The plane is treated as a function of (row, column, n) where the third
//! axis holds two identical copies of the image. The expansion up to
//! two-variable terms is
//!
//! `f = f0 + f_x(r) + f_y(c) + f_n(k) + f_xy(r, c) + f_xn(r, k) + f_yn(c, k)`
//!
//! and every term involving `n` vanishes because the copies are equal, so
//! [`hdmr_decompose`] computes them analytically as zero. Means are taken
//! over known pixels only. [`hdmr_decompose_stacked`] evaluates the general
//! two-slice expansion directly.

use crate::cubic::cubic_inpaint;
use crate::error::{InpaintError, Result};
use crate::plane::{merge_channels, split_channels, Image, PixelMask, Plane};

#[derive(Clone, Debug, PartialEq)]
pub struct HdmrExpansion {
    pub width: usize,
    pub height: usize,
    pub f0: f64,
    /// One entry per row.
    pub f_x: Vec<f64>,
    /// One entry per column.
    pub f_y: Vec<f64>,
    /// One entry per copy.
    pub f_n: [f64; 2],
    /// Row-major; meaningful where `xy_known` is set, zero elsewhere.
    pub f_xy: Vec<f64>,
    /// Row-major `height x 2`.
    pub f_xn: Vec<f64>,
    /// Row-major `width x 2`.
    pub f_yn: Vec<f64>,
    /// Rows with at least one known pixel.
    pub row_known: Vec<bool>,
    /// Columns with at least one known pixel.
    pub col_known: Vec<bool>,
    pub xy_known: Vec<bool>,
}

impl HdmrExpansion {
    /// `f0 + f_x + f_y + f_xy` at a pixel (the `n` terms are zero).
    pub fn reconstruct_at(&self, x: usize, y: usize) -> f64 {
        self.f0 + self.f_x[y] + self.f_y[x] + self.f_xy[y * self.width + x]
    }
}

fn masked_means(p: &Plane, m: &PixelMask) -> Result<(f64, Vec<(f64, usize)>, Vec<(f64, usize)>)> {
    p.check_mask(m)?;
    let (w, h) = (p.width(), p.height());
    let mut rows = vec![(0.0, 0usize); h];
    let mut cols = vec![(0.0, 0usize); w];
    let (mut total, mut n) = (0.0, 0usize);
    for y in 0..h {
        for x in 0..w {
            if !m.is_unknown(x, y) {
                let v = p.get(x, y);
                rows[y].0 += v;
                rows[y].1 += 1;
                cols[x].0 += v;
                cols[x].1 += 1;
                total += v;
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(InpaintError::TooFewKnown { needed: 1, found: 0 });
    }
    Ok((total / n as f64, rows, cols))
}

const BACKFIT_ITERS: usize = 500;
const BACKFIT_TOL: f64 = 1e-10;

/// Mask-aware decomposition. The univariate terms are means of known
/// values, iterated so each is the mean of what the other leaves behind:
/// the first pass is the plain row/column mean minus `f0`, and on complete
/// data nothing changes after it. With a mask the iteration removes the
/// bias of averaging over different subsets per row and column. Both terms
/// are then re-centered into `f0`. Rows or columns without known pixels get
/// a zero entry and a cleared flag in `row_known` / `col_known`.
pub fn hdmr_decompose(p: &Plane, m: &PixelMask) -> Result<HdmrExpansion> {
    let (mut f0, rows, cols) = masked_means(p, m)?;
    let (w, h) = (p.width(), p.height());
    let row_known: Vec<bool> = rows.iter().map(|r| r.1 > 0).collect();
    let col_known: Vec<bool> = cols.iter().map(|c| c.1 > 0).collect();
    let mut f_x: Vec<f64> = rows
        .iter()
        .map(|&(s, n)| if n > 0 { s / n as f64 - f0 } else { 0.0 })
        .collect();
    let mut f_y = vec![0.0; w];
    for iter in 0..BACKFIT_ITERS {
        let mut change = 0.0f64;
        if iter > 0 {
            for y in 0..h {
                if row_known[y] {
                    let (mut s, mut n) = (0.0, 0usize);
                    for x in (0..w).filter(|&x| !m.is_unknown(x, y)) {
                        s += p.get(x, y) - f0 - f_y[x];
                        n += 1;
                    }
                    let v = s / n as f64;
                    change = change.max((v - f_x[y]).abs());
                    f_x[y] = v;
                }
            }
        }
        let mut col_sum = vec![(0.0, 0usize); w];
        for y in 0..h {
            for x in (0..w).filter(|&x| !m.is_unknown(x, y)) {
                col_sum[x].0 += p.get(x, y) - f0 - f_x[y];
                col_sum[x].1 += 1;
            }
        }
        for (x, &(s, n)) in col_sum.iter().enumerate() {
            if n > 0 {
                let v = s / n as f64;
                change = change.max((v - f_y[x]).abs());
                f_y[x] = v;
            }
        }
        if iter > 0 && change <= BACKFIT_TOL {
            break;
        }
    }
    for (f, known) in [(&mut f_x, &row_known), (&mut f_y, &col_known)] {
        let n = known.iter().filter(|&&k| k).count() as f64;
        let shift = f.iter().zip(known.iter()).filter(|(_, &k)| k).map(|(v, _)| v).sum::<f64>() / n;
        if shift != 0.0 {
            f0 += shift;
            f.iter_mut().zip(known.iter()).filter(|(_, &k)| k).for_each(|(v, _)| *v -= shift);
        }
    }
    let mut f_xy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            if !m.is_unknown(x, y) {
                f_xy[y * w + x] = p.get(x, y) - f0 - f_x[y] - f_y[x];
            }
        }
    }
    Ok(HdmrExpansion {
        width: w,
        height: h,
        f0,
        f_x,
        f_y,
        f_n: [0.0; 2],
        f_xy,
        f_xn: vec![0.0; 2 * h],
        f_yn: vec![0.0; 2 * w],
        row_known,
        col_known,
        xy_known: m.flags().iter().map(|&u| !u).collect(),
    })
}

/// Two-slice expansion computed from the data of both slices with
/// single-pass known-value means, without assuming the slices are equal.
/// `f_xy` averages the two slices.
pub fn hdmr_decompose_stacked(slices: [&Plane; 2], masks: [&PixelMask; 2]) -> Result<HdmrExpansion> {
    let (w, h) = (slices[0].width(), slices[0].height());
    for k in 0..2 {
        slices[k].check_mask(masks[k])?;
        if slices[k].width() != w || slices[k].height() != h {
            return Err(InpaintError::dims(
                format!("{w}x{h} slice"),
                format!("{}x{} slice", slices[k].width(), slices[k].height()),
            ));
        }
    }
    let known = |k: usize, x: usize, y: usize| !masks[k].is_unknown(x, y);
    let mean = |sel: &dyn Fn(usize, usize, usize) -> bool| -> Option<f64> {
        let (mut s, mut n) = (0.0, 0usize);
        for k in 0..2 {
            for y in 0..h {
                for x in 0..w {
                    if known(k, x, y) && sel(k, x, y) {
                        s += slices[k].get(x, y);
                        n += 1;
                    }
                }
            }
        }
        (n > 0).then(|| s / n as f64)
    };
    let f0 = mean(&|_, _, _| true).ok_or(InpaintError::TooFewKnown { needed: 1, found: 0 })?;
    let f_x: Vec<Option<f64>> = (0..h).map(|r| mean(&|_, _, y| y == r).map(|v| v - f0)).collect();
    let f_y: Vec<Option<f64>> = (0..w).map(|c| mean(&|_, x, _| x == c).map(|v| v - f0)).collect();
    let mut f_n = [0.0; 2];
    for (n, slot) in f_n.iter_mut().enumerate() {
        *slot = mean(&|k, _, _| k == n).map_or(0.0, |v| v - f0);
    }
    let fx = |r: usize| f_x[r].unwrap_or(0.0);
    let fy = |c: usize| f_y[c].unwrap_or(0.0);
    let mut f_xy = vec![0.0; w * h];
    let mut xy_known = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let vals: Vec<f64> = (0..2).filter(|&k| known(k, x, y)).map(|k| slices[k].get(x, y)).collect();
            if !vals.is_empty() {
                let v = vals.iter().sum::<f64>() / vals.len() as f64;
                f_xy[y * w + x] = v - f0 - fx(y) - fy(x);
                xy_known[y * w + x] = true;
            }
        }
    }
    let mut f_xn = vec![0.0; 2 * h];
    for r in 0..h {
        for n in 0..2 {
            if let Some(v) = mean(&|k, _, y| k == n && y == r) {
                f_xn[r * 2 + n] = v - f0 - fx(r) - f_n[n];
            }
        }
    }
    let mut f_yn = vec![0.0; 2 * w];
    for c in 0..w {
        for n in 0..2 {
            if let Some(v) = mean(&|k, x, _| k == n && x == c) {
                f_yn[c * 2 + n] = v - f0 - fy(c) - f_n[n];
            }
        }
    }
    Ok(HdmrExpansion {
        width: w,
        height: h,
        f0,
        f_x: (0..h).map(fx).collect(),
        f_y: (0..w).map(fy).collect(),
        f_n,
        f_xy,
        f_xn,
        f_yn,
        row_known: f_x.iter().map(Option::is_some).collect(),
        col_known: f_y.iter().map(Option::is_some).collect(),
        xy_known,
    })
}

/// Natural cubic spline through `(t_i, v_i)` (strictly increasing `t`),
/// extended linearly beyond the end knots. One knot gives a constant.
#[derive(Clone, Debug)]
pub struct NaturalSpline {
    t: Vec<f64>,
    v: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(t: &[f64], v: &[f64]) -> Result<Self> {
        let n = t.len();
        if n == 0 || v.len() != n {
            return Err(InpaintError::invalid("spline needs matching, non-empty knots and values"));
        }
        if t.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(InpaintError::invalid("spline knots must be strictly increasing"));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 1..n - 1 {
                let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = t[i + 1] - t[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                rhs[i] -= f * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(NaturalSpline {
            t: t.to_vec(),
            v: v.to_vec(),
            m,
        })
    }

    fn slope(&self, i: usize, at_right: bool) -> f64 {
        let h = self.t[i + 1] - self.t[i];
        let secant = (self.v[i + 1] - self.v[i]) / h;
        if at_right {
            secant + h * (self.m[i] + 2.0 * self.m[i + 1]) / 6.0
        } else {
            secant - h * (2.0 * self.m[i] + self.m[i + 1]) / 6.0
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.t.len();
        if n == 1 {
            return self.v[0];
        }
        if s <= self.t[0] {
            return self.v[0] + self.slope(0, false) * (s - self.t[0]);
        }
        if s >= self.t[n - 1] {
            return self.v[n - 1] + self.slope(n - 2, true) * (s - self.t[n - 1]);
        }
        let i = self.t.partition_point(|&k| k <= s).saturating_sub(1).min(n - 2);
        let h = self.t[i + 1] - self.t[i];
        let (a, b) = ((self.t[i + 1] - s) / h, (s - self.t[i]) / h);
        a * self.v[i]
            + b * self.v[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

fn fill_missing(values: &mut [f64], known: &[bool]) -> Result<()> {
    if known.iter().all(|&k| k) {
        return Ok(());
    }
    let (t, v): (Vec<f64>, Vec<f64>) = values
        .iter()
        .zip(known)
        .enumerate()
        .filter(|(_, (_, &k))| k)
        .map(|(i, (&v, _))| (i as f64, v))
        .unzip();
    let spline = NaturalSpline::new(&t, &v)?;
    for (i, slot) in values.iter_mut().enumerate() {
        if !known[i] {
            *slot = spline.eval(i as f64);
        }
    }
    Ok(())
}

/// Fill missing univariate entries with natural splines and missing `f_xy`
/// cells with the local cubic routine, then reconstruct unknown pixels.
pub fn hdmr_inpaint(p: &Plane, m: &PixelMask) -> Result<Plane> {
    if m.is_empty() {
        p.check_mask(m)?;
        return Ok(p.clone());
    }
    let mut e = hdmr_decompose(p, m)?;
    fill_missing(&mut e.f_x, &e.row_known)?;
    fill_missing(&mut e.f_y, &e.col_known)?;
    let xy = Plane::new(e.width, e.height, e.f_xy.clone())?;
    e.f_xy = cubic_inpaint(&xy, m)?.values().to_vec();
    let mut out = p.clone();
    for y in 0..p.height() {
        for x in 0..p.width() {
            if m.is_unknown(x, y) {
                out.set(x, y, e.reconstruct_at(x, y));
            }
        }
    }
    out.ensure_finite()
}

/// [`hdmr_inpaint`] on each channel, then quantized.
pub fn hdmr_inpaint_colour(img: &Image, m: &PixelMask) -> Result<Image> {
    img.check_mask(m)?;
    let planes = split_channels(img)
        .iter()
        .map(|p| hdmr_inpaint(p, m))
        .collect::<Result<Vec<_>>>()?;
    merge_channels(&planes)
}
