//! Procedural damage masks and their application to images.
//!
//! Five structural masks (a curve, sparse and dense text, scratches and a
//! centered square frame) plus salt-and-pepper noise at a chosen density.
//! Every generator is a pure function of `(spec, width, height)`; randomness
//! comes from [`Xorshift64Star`] streams keyed by the spec seed.

use std::fmt;
use std::str::FromStr;

use crate::error::{InpaintError, Result};
use crate::font;
use crate::plane::{Image, PixelMask};
use crate::rng::Xorshift64Star;

pub const MIN_STRUCTURAL_SIZE: usize = 64;
pub const DEFAULT_FRAME_SIZE: usize = 40;
pub const DEFAULT_STROKE_WIDTH: usize = 4;
pub const NOISE_LEVELS: [f64; 5] = [0.10, 0.30, 0.50, 0.70, 0.90];

/// Value written into pixels covered by a structural mask.
pub const STRUCTURAL_FILL: u8 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorruptionKind {
    Curve,
    SparseText,
    DenseText,
    Scratches,
    Frame,
    SaltPepper,
}

impl CorruptionKind {
    pub fn is_structural(self) -> bool {
        self != CorruptionKind::SaltPepper
    }

    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::Curve => "curve",
            CorruptionKind::SparseText => "sparse_text",
            CorruptionKind::DenseText => "dense_text",
            CorruptionKind::Scratches => "scratches",
            CorruptionKind::Frame => "frame",
            CorruptionKind::SaltPepper => "salt_pepper",
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorruptionKind {
    type Err = InpaintError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "curve" => CorruptionKind::Curve,
            "sparse_text" => CorruptionKind::SparseText,
            "dense_text" => CorruptionKind::DenseText,
            "scratches" => CorruptionKind::Scratches,
            "frame" => CorruptionKind::Frame,
            "salt_pepper" | "noise" => CorruptionKind::SaltPepper,
            other => return Err(InpaintError::invalid(format!("unknown corruption kind `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    /// Fraction of pixels hit; only read for [`CorruptionKind::SaltPepper`].
    pub density: f64,
    pub frame_size: usize,
    pub stroke_width: usize,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind) -> Self {
        CorruptionSpec {
            kind,
            density: 0.0,
            frame_size: DEFAULT_FRAME_SIZE,
            stroke_width: DEFAULT_STROKE_WIDTH,
            seed: 0,
        }
    }

    pub fn salt_pepper(density: f64) -> Self {
        CorruptionSpec {
            density,
            ..CorruptionSpec::new(CorruptionKind::SaltPepper)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The benchmark presets `mask1..mask5` and `noise1..noise5`.
    pub fn preset(name: &str) -> Option<Self> {
        let name = name.trim().to_ascii_lowercase();
        let kind = match name.as_str() {
            "mask1" => CorruptionKind::Curve,
            "mask2" => CorruptionKind::SparseText,
            "mask3" => CorruptionKind::DenseText,
            "mask4" => CorruptionKind::Scratches,
            "mask5" => CorruptionKind::Frame,
            _ => {
                let level: usize = name.strip_prefix("noise")?.parse().ok()?;
                return NOISE_LEVELS
                    .get(level.checked_sub(1)?)
                    .map(|&d| CorruptionSpec::salt_pepper(d));
            }
        };
        Some(CorruptionSpec::new(kind))
    }

    /// Preset name when the spec matches one, otherwise a descriptive label.
    pub fn label(&self) -> String {
        let default_stroke = self.stroke_width == DEFAULT_STROKE_WIDTH;
        match self.kind {
            CorruptionKind::SaltPepper => match NOISE_LEVELS.iter().position(|&d| d == self.density) {
                Some(i) => format!("noise{}", i + 1),
                None => format!("salt_pepper_{}", self.density),
            },
            CorruptionKind::Curve if default_stroke => "mask1".into(),
            CorruptionKind::SparseText => "mask2".into(),
            CorruptionKind::DenseText => "mask3".into(),
            CorruptionKind::Scratches if default_stroke => "mask4".into(),
            CorruptionKind::Frame if self.frame_size == DEFAULT_FRAME_SIZE => "mask5".into(),
            CorruptionKind::Frame => format!("frame_{}", self.frame_size),
            kind => format!("{}_w{}", kind, self.stroke_width),
        }
    }

    fn validate(&self, width: usize, height: usize) -> Result<()> {
        match self.kind {
            CorruptionKind::SaltPepper => {
                if !(self.density > 0.0 && self.density < 1.0) {
                    return Err(InpaintError::invalid(format!(
                        "noise density {} outside (0, 1)",
                        self.density
                    )));
                }
                if width == 0 || height == 0 {
                    return Err(InpaintError::invalid("empty image"));
                }
            }
            _ => {
                if width < MIN_STRUCTURAL_SIZE || height < MIN_STRUCTURAL_SIZE {
                    return Err(InpaintError::invalid(format!(
                        "structural masks need at least {MIN_STRUCTURAL_SIZE}x{MIN_STRUCTURAL_SIZE} pixels, got {width}x{height}"
                    )));
                }
                if self.kind == CorruptionKind::Frame
                    && (self.frame_size == 0 || self.frame_size >= width.min(height))
                {
                    return Err(InpaintError::invalid(format!(
                        "frame size {} must be in 1..{}",
                        self.frame_size,
                        width.min(height)
                    )));
                }
                if self.stroke_width == 0 {
                    return Err(InpaintError::invalid("stroke width must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Generate the unknown-pixel mask described by `spec`.
pub fn gen_mask(spec: &CorruptionSpec, width: usize, height: usize) -> Result<PixelMask> {
    spec.validate(width, height)?;
    let mut canvas = Canvas::new(width, height);
    match spec.kind {
        CorruptionKind::SaltPepper => return Ok(salt_pepper_mask(spec, width, height)),
        CorruptionKind::Frame => {
            let fs = spec.frame_size;
            let (x0, y0) = ((width - fs) / 2, (height - fs) / 2);
            for y in y0..y0 + fs {
                for x in x0..x0 + fs {
                    canvas.mark(x as i64, y as i64);
                }
            }
        }
        CorruptionKind::Curve => draw_curve(spec, &mut canvas),
        CorruptionKind::Scratches => draw_scratches(spec, &mut canvas),
        CorruptionKind::SparseText => draw_sparse_text(spec, &mut canvas),
        CorruptionKind::DenseText => draw_dense_text(spec, &mut canvas),
    }
    Ok(canvas.into_mask())
}

fn salt_pepper_mask(spec: &CorruptionSpec, width: usize, height: usize) -> PixelMask {
    let n = width * height;
    let k = (spec.density * n as f64).round() as usize;
    let mut rng = Xorshift64Star::stream(spec.seed, "salt-pepper-mask");
    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
    let mut idx: Vec<u32> = (0..n as u32).collect();
    for i in 0..k {
        let j = i + rng.below((n - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut flags = vec![false; n];
    for &i in &idx[..k] {
        flags[i as usize] = true;
    }
    PixelMask::new(width, height, flags).expect("flag count matches dimensions")
}

struct Canvas {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Canvas {
            width,
            height,
            flags: vec![false; width * height],
        }
    }

    fn mark(&mut self, x: i64, y: i64) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.flags[y as usize * self.width + x as usize] = true;
        }
    }

    /// Pixels whose centers lie within `stroke / 2` of `(px, py)`.
    fn dab(&mut self, px: f64, py: f64, stroke: usize) {
        let r = stroke as f64 / 2.0;
        let (xa, xb) = ((px - r - 1.0).floor() as i64, (px + r).ceil() as i64);
        let (ya, yb) = ((py - r - 1.0).floor() as i64, (py + r).ceil() as i64);
        for y in ya..=yb {
            for x in xa..=xb {
                let dx = x as f64 + 0.5 - px;
                let dy = y as f64 + 0.5 - py;
                if dx * dx + dy * dy <= r * r {
                    self.mark(x, y);
                }
            }
        }
    }

    fn segment(&mut self, a: (f64, f64), b: (f64, f64), stroke: usize) {
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let steps = (len * 4.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            self.dab(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1), stroke);
        }
    }

    fn into_mask(self) -> PixelMask {
        PixelMask::new(self.width, self.height, self.flags).expect("flag count matches dimensions")
    }
}

fn draw_curve(spec: &CorruptionSpec, canvas: &mut Canvas) {
    let (w, h) = (canvas.width as f64, canvas.height as f64);
    let mut rng = Xorshift64Star::stream(spec.seed, "curve");
    let p0 = (0.0, h * rng.range_f64(0.2, 0.8));
    let p1 = (w * rng.range_f64(0.2, 0.45), h * rng.range_f64(0.0, 1.0));
    let p2 = (w * rng.range_f64(0.55, 0.8), h * rng.range_f64(0.0, 1.0));
    let p3 = (w, h * rng.range_f64(0.2, 0.8));
    let steps = 4 * (canvas.width + canvas.height) * 2;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let u = 1.0 - t;
        let b0 = u * u * u;
        let b1 = 3.0 * u * u * t;
        let b2 = 3.0 * u * t * t;
        let b3 = t * t * t;
        let x = b0 * p0.0 + b1 * p1.0 + b2 * p2.0 + b3 * p3.0;
        let y = b0 * p0.1 + b1 * p1.1 + b2 * p2.1 + b3 * p3.1;
        canvas.dab(x, y, spec.stroke_width);
    }
}

fn draw_scratches(spec: &CorruptionSpec, canvas: &mut Canvas) {
    const PER_ORIENTATION: usize = 5;
    let (w, h) = (canvas.width as f64, canvas.height as f64);
    let mut rng = Xorshift64Star::stream(spec.seed, "scratches");
    for _ in 0..PER_ORIENTATION {
        let y = h * rng.range_f64(0.05, 0.95);
        let xa = w * rng.range_f64(0.0, 0.4);
        let xb = w * rng.range_f64(0.6, 1.0);
        canvas.segment((xa, y), (xb, y), spec.stroke_width);
    }
    for _ in 0..PER_ORIENTATION {
        let x = w * rng.range_f64(0.05, 0.95);
        let ya = h * rng.range_f64(0.0, 0.4);
        let yb = h * rng.range_f64(0.6, 1.0);
        canvas.segment((x, ya), (x, yb), spec.stroke_width);
    }
    for _ in 0..PER_ORIENTATION {
        let a = (w * rng.range_f64(0.0, 0.4), h * rng.range_f64(0.0, 1.0));
        let b = (w * rng.range_f64(0.6, 1.0), h * rng.range_f64(0.0, 1.0));
        canvas.segment(a, b, spec.stroke_width);
    }
}

fn random_text(rng: &mut Xorshift64Star, len: usize) -> Vec<char> {
    let mut out = Vec::with_capacity(len);
    let mut word = 0;
    while out.len() < len {
        if word >= 3 && rng.below(5) == 0 {
            out.push(' ');
            word = 0;
        } else {
            out.push((b'A' + rng.below(26) as u8) as char);
            word += 1;
        }
    }
    out
}

fn draw_line_of_text(canvas: &mut Canvas, text: &[char], x0: i64, y0: i64, height: usize) {
    let advance = (font::scaled_width(height) + (height / 6).max(1)) as i64;
    let mut x = x0;
    for &ch in text {
        if x >= canvas.width as i64 {
            break;
        }
        font::stamp(ch, x, y0, height, |px, py| canvas.mark(px, py));
        x += advance;
    }
}

fn draw_sparse_text(spec: &CorruptionSpec, canvas: &mut Canvas) {
    const LINES: usize = 5;
    let mut rng = Xorshift64Star::stream(spec.seed, "sparse-text");
    let pitch = canvas.height / LINES;
    for line in 0..LINES {
        let height = 12 + rng.below(8) as usize;
        let slack = pitch.saturating_sub(height).max(1);
        let y0 = (line * pitch) as i64 + rng.below(slack as u64) as i64;
        let x0 = 2 + rng.below(16) as i64;
        let text = random_text(&mut rng, canvas.width / 4);
        draw_line_of_text(canvas, &text, x0, y0, height);
    }
}

fn draw_dense_text(spec: &CorruptionSpec, canvas: &mut Canvas) {
    const HEIGHT: usize = 12;
    const PITCH: usize = 18;
    let mut rng = Xorshift64Star::stream(spec.seed, "dense-text");
    let mut y0 = 3;
    while y0 + HEIGHT <= canvas.height {
        let text = random_text(&mut rng, canvas.width / 4);
        draw_line_of_text(canvas, &text, 2, y0 as i64, HEIGHT);
        y0 += PITCH;
    }
}

/// Overwrite the masked pixels: noise draws 0 or 255 per pixel (same value in
/// every channel), structural masks paint [`STRUCTURAL_FILL`].
pub fn apply_corruption(img: &Image, m: &PixelMask, spec: &CorruptionSpec) -> Result<Image> {
    img.check_mask(m)?;
    let mut out = img.clone();
    let mut rng = Xorshift64Star::stream(spec.seed, "salt-pepper-values");
    for y in 0..img.height() {
        for x in 0..img.width() {
            if !m.is_unknown(x, y) {
                continue;
            }
            let v = match spec.kind {
                CorruptionKind::SaltPepper => {
                    if rng.coin() {
                        255
                    } else {
                        0
                    }
                }
                _ => STRUCTURAL_FILL,
            };
            for c in 0..img.channels() {
                out.set(x, y, c, v);
            }
        }
    }
    Ok(out)
}

/// A pixel is unknown iff any channel differs between the two images.
pub fn detect_unknown(original: &Image, corrupted: &Image) -> Result<PixelMask> {
    original.same_shape(corrupted)?;
    let nc = original.channels();
    let flags = original
        .data()
        .chunks(nc)
        .zip(corrupted.data().chunks(nc))
        .map(|(a, b)| a != b)
        .collect();
    PixelMask::new(original.width(), original.height(), flags)
}
