//! Pixel containers shared by every stage of the pipeline.
//!
//! All grids are row-major with the origin at the top-left corner. `x` is the
//! column index and `y` the row index, so the sample at `(x, y)` lives at
//! offset `y * width + x` (times the channel count for [`Image`]).

use std::fmt;

use crate::error::{InpaintError, Result};

/// An 8-bit raster with one (gray) or three (RGB) interleaved channels.
#[derive(Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(InpaintError::invalid(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(InpaintError::dims(
                format!("{} samples", width * height * channels),
                format!("{} samples", data.len()),
            ));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Image::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Image::new(width, height, channels, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn set(&mut self, x: usize, y: usize, c: usize, v: u8) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    pub fn same_shape(&self, other: &Image) -> Result<()> {
        if self.width != other.width
            || self.height != other.height
            || self.channels != other.channels
        {
            return Err(InpaintError::dims(self.shape_string(), other.shape_string()));
        }
        Ok(())
    }

    pub fn check_mask(&self, mask: &PixelMask) -> Result<()> {
        if mask.width() != self.width || mask.height() != self.height {
            return Err(InpaintError::dims(
                format!("{}x{} mask", self.width, self.height),
                format!("{}x{} mask", mask.width(), mask.height()),
            ));
        }
        Ok(())
    }

    fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.width, self.height, self.channels)
    }
}

/// A single real-valued channel. Interpolators work on planes so that
/// quantization happens once, in [`merge_channels`].
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(InpaintError::dims(
                format!("{} values", width * height),
                format!("{} values", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(InpaintError::invalid(format!(
                "non-finite value at ({}, {})",
                i % width.max(1),
                i / width.max(1)
            )));
        }
        Ok(Plane {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    pub fn check_mask(&self, mask: &PixelMask) -> Result<()> {
        if mask.width() != self.width || mask.height() != self.height {
            return Err(InpaintError::dims(
                format!("{}x{} mask", self.width, self.height),
                format!("{}x{} mask", mask.width(), mask.height()),
            ));
        }
        Ok(())
    }

    /// Fails if any value is NaN or infinite.
    pub(crate) fn ensure_finite(self) -> Result<Self> {
        Plane::new(self.width, self.height, self.values)
    }
}

/// Marks the pixels that must be reconstructed (`true` = unknown).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    unknown: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize, unknown: Vec<bool>) -> Result<Self> {
        if unknown.len() != width * height {
            return Err(InpaintError::dims(
                format!("{} flags", width * height),
                format!("{} flags", unknown.len()),
            ));
        }
        Ok(PixelMask {
            width,
            height,
            unknown,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        PixelMask {
            width,
            height,
            unknown: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        PixelMask {
            width,
            height,
            unknown: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut unknown = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                unknown.push(f(x, y));
            }
        }
        PixelMask {
            width,
            height,
            unknown,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.unknown
    }

    pub fn is_unknown(&self, x: usize, y: usize) -> bool {
        self.unknown[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, unknown: bool) {
        self.unknown[y * self.width + x] = unknown;
    }

    pub fn count_unknown(&self) -> usize {
        self.unknown.iter().filter(|&&u| u).count()
    }

    pub fn count_known(&self) -> usize {
        self.unknown.len() - self.count_unknown()
    }

    pub fn is_empty(&self) -> bool {
        !self.unknown.iter().any(|&u| u)
    }

    /// Smallest rectangle containing every unknown pixel.
    pub fn unknown_bounds(&self) -> Option<TileRect> {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.is_unknown(x, y) {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        (x0 != usize::MAX).then(|| TileRect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
    }
}

/// Axis-aligned pixel rectangle `[x0, x0 + w) x [y0, y0 + h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TileRect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl fmt::Display for TileRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}@({},{})", self.w, self.h, self.x0, self.y0)
    }
}

impl TileRect {
    pub const fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        TileRect { x0, y0, w, h }
    }

    pub fn full(width: usize, height: usize) -> Self {
        TileRect::new(0, 0, width, height)
    }

    pub fn x1(&self) -> usize {
        self.x0 + self.w
    }

    pub fn y1(&self) -> usize {
        self.y0 + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1() && y >= self.y0 && y < self.y1()
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.w > 0 && self.h > 0 && self.x1() <= width && self.y1() <= height
    }

    /// Grow by `by` pixels on every side, clamped to the plane.
    pub fn grow(&self, by: usize, width: usize, height: usize) -> TileRect {
        let x0 = self.x0.saturating_sub(by);
        let y0 = self.y0.saturating_sub(by);
        let x1 = (self.x1() + by).min(width);
        let y1 = (self.y1() + by).min(height);
        TileRect::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// A `w x h` rectangle centered on `(cx, cy)` and shifted to lie inside the plane.
    pub fn centered(cx: usize, cy: usize, w: usize, h: usize, width: usize, height: usize) -> Self {
        let w = w.min(width);
        let h = h.min(height);
        let x0 = cx.saturating_sub(w / 2).min(width - w);
        let y0 = cy.saturating_sub(h / 2).min(height - h);
        TileRect::new(x0, y0, w, h)
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        if !self.fits(width, height) {
            return Err(InpaintError::OutOfBounds {
                rect: self.to_string(),
                width,
                height,
            });
        }
        Ok(())
    }
}

/// Split an image into one plane per channel.
pub fn split_channels(img: &Image) -> Vec<Plane> {
    let (w, h, nc) = (img.width, img.height, img.channels);
    (0..nc)
        .map(|c| Plane {
            width: w,
            height: h,
            values: img.data.iter().skip(c).step_by(nc).map(|&v| v as f64).collect(),
        })
        .collect()
}

/// Round half away from zero, then clamp to `[0, 255]`.
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Interleave 1 or 3 planes into an 8-bit image.
pub fn merge_channels(planes: &[Plane]) -> Result<Image> {
    let nc = planes.len();
    if nc != 1 && nc != 3 {
        return Err(InpaintError::invalid(format!(
            "expected 1 or 3 planes, got {nc}"
        )));
    }
    let (w, h) = (planes[0].width, planes[0].height);
    if let Some(p) = planes.iter().find(|p| p.width != w || p.height != h) {
        return Err(InpaintError::dims(
            format!("{w}x{h} plane"),
            format!("{}x{} plane", p.width, p.height),
        ));
    }
    let mut data = Vec::with_capacity(w * h * nc);
    for i in 0..w * h {
        for p in planes {
            data.push(quantize(p.values[i]));
        }
    }
    Image::new(w, h, nc, data)
}

/// Copy the sub-region `r` of a plane and its mask.
pub fn extract_tile(p: &Plane, m: &PixelMask, r: TileRect) -> Result<(Plane, PixelMask)> {
    p.check_mask(m)?;
    r.check(p.width, p.height)?;
    let mut values = Vec::with_capacity(r.area());
    let mut unknown = Vec::with_capacity(r.area());
    for y in r.y0..r.y1() {
        let row = y * p.width;
        values.extend_from_slice(&p.values[row + r.x0..row + r.x1()]);
        unknown.extend_from_slice(&m.unknown[row + r.x0..row + r.x1()]);
    }
    Ok((
        Plane {
            width: r.w,
            height: r.h,
            values,
        },
        PixelMask {
            width: r.w,
            height: r.h,
            unknown,
        },
    ))
}

/// Copy `tile` into `dst` at `r`, but only where the tile mask is unknown.
pub fn write_back_unknown(dst: &Plane, tile: &Plane, m: &PixelMask, r: TileRect) -> Result<Plane> {
    r.check(dst.width, dst.height)?;
    if tile.width != r.w || tile.height != r.h {
        return Err(InpaintError::dims(
            format!("{}x{} tile", r.w, r.h),
            format!("{}x{} tile", tile.width, tile.height),
        ));
    }
    tile.check_mask(m)?;
    let mut out = dst.clone();
    for ty in 0..r.h {
        for tx in 0..r.w {
            if m.is_unknown(tx, ty) {
                out.set(r.x0 + tx, r.y0 + ty, tile.get(tx, ty));
            }
        }
    }
    Ok(out)
}
