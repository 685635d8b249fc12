//! Subimage regimes shared by the kriging and RBF reconstructions.
//!
//! The plane is either cut into fixed tiles or handled as a single crop
//! around the damage. Every tile is reconstructed from the known pixels of
//! its data window, which starts as the tile plus a `halo` margin and grows
//! by [`GROW_STEP`] pixels per side until it holds `min_known` known pixels.

use std::fmt;
use std::str::FromStr;

use crate::corruption::{CorruptionKind, CorruptionSpec};
use crate::error::{InpaintError, Result};
use crate::plane::{PixelMask, Plane, TileRect};

pub const GROW_STEP: usize = 4;
pub const DEFAULT_TILE: usize = 16;
pub const NOISE_TILE: usize = 8;
pub const DEFAULT_MIN_KNOWN: usize = 8;
pub const DEFAULT_CROP: usize = 90;
pub const DEFAULT_MAX_POINTS: usize = 256;
pub const DEFAULT_NEIGHBORS: usize = 128;
pub const DEFAULT_HALO: usize = 4;
/// Noise densities above this use the large tiles.
pub const SMALL_TILE_MAX_DENSITY: f64 = 0.7;
const DENSE_MASK_FRACTION: f64 = 0.8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TilingRegime {
    /// Pick fixed tiles or a crop from the corruption (or from the mask).
    #[default]
    Auto,
    Fixed,
    CenterCrop,
}

impl fmt::Display for TilingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TilingRegime::Auto => "auto",
            TilingRegime::Fixed => "fixed",
            TilingRegime::CenterCrop => "center_crop",
        })
    }
}

impl FromStr for TilingRegime {
    type Err = InpaintError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(TilingRegime::Auto),
            "fixed" => Ok(TilingRegime::Fixed),
            "center_crop" | "crop" => Ok(TilingRegime::CenterCrop),
            other => Err(InpaintError::invalid(format!("unknown tiling regime `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TilingPolicy {
    pub tile_w: usize,
    pub tile_h: usize,
    pub min_known: usize,
    pub regime: TilingRegime,
    pub crop_size: usize,
    /// Known pixels this far outside a tile also feed its reconstruction.
    pub halo: usize,
    /// Windows with at most this many known pixels are solved as one system;
    /// larger ones use the `neighbors` nearest known pixels per target.
    pub max_points: usize,
    pub neighbors: usize,
}

impl Default for TilingPolicy {
    fn default() -> Self {
        TilingPolicy {
            tile_w: DEFAULT_TILE,
            tile_h: DEFAULT_TILE,
            min_known: DEFAULT_MIN_KNOWN,
            regime: TilingRegime::Auto,
            crop_size: DEFAULT_CROP,
            halo: DEFAULT_HALO,
            max_points: DEFAULT_MAX_POINTS,
            neighbors: DEFAULT_NEIGHBORS,
        }
    }
}

/// One unit of work: estimate the unknown pixels of `tile` from the known
/// pixels of `window` (which contains `tile`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileJob {
    pub tile: TileRect,
    pub window: TileRect,
}

impl TilingPolicy {
    pub fn fixed(tile: usize) -> Self {
        TilingPolicy {
            tile_w: tile,
            tile_h: tile,
            regime: TilingRegime::Fixed,
            ..TilingPolicy::default()
        }
    }

    pub fn center_crop(size: usize) -> Self {
        TilingPolicy {
            crop_size: size,
            regime: TilingRegime::CenterCrop,
            ..TilingPolicy::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tile_w == 0 || self.tile_h == 0 || self.crop_size == 0 {
            return Err(InpaintError::invalid("tile and crop sizes must be positive"));
        }
        if self.min_known == 0 || self.max_points == 0 || self.neighbors == 0 {
            return Err(InpaintError::invalid("min_known, max_points and neighbors must be positive"));
        }
        Ok(())
    }

    /// Resolve `Auto` for a known corruption: structural masks use 16x16
    /// tiles, the frame a centered crop, noise up to 70% 8x8 tiles and
    /// denser noise 16x16 tiles. Explicit regimes are returned unchanged.
    pub fn for_corruption(&self, spec: &CorruptionSpec) -> TilingPolicy {
        if self.regime != TilingRegime::Auto {
            return *self;
        }
        match spec.kind {
            CorruptionKind::Frame => TilingPolicy {
                regime: TilingRegime::CenterCrop,
                ..*self
            },
            CorruptionKind::SaltPepper if spec.density <= SMALL_TILE_MAX_DENSITY => TilingPolicy {
                regime: TilingRegime::Fixed,
                tile_w: NOISE_TILE,
                tile_h: NOISE_TILE,
                ..*self
            },
            _ => TilingPolicy {
                regime: TilingRegime::Fixed,
                tile_w: DEFAULT_TILE,
                tile_h: DEFAULT_TILE,
                ..*self
            },
        }
    }

    /// Resolve `Auto` from the mask alone: a solid rectangle is a frame;
    /// mostly-unknown or clumped damage gets 16x16 tiles; sparse isolated
    /// damage 8x8 tiles.
    pub fn for_mask(&self, m: &PixelMask) -> TilingPolicy {
        if self.regime != TilingRegime::Auto {
            return *self;
        }
        let fixed = |t: usize| TilingPolicy {
            regime: TilingRegime::Fixed,
            tile_w: t,
            tile_h: t,
            ..*self
        };
        let Some(bounds) = m.unknown_bounds() else {
            return fixed(DEFAULT_TILE);
        };
        let unknown = m.count_unknown();
        let total = m.width() * m.height();
        if unknown == bounds.area() && unknown < total {
            return TilingPolicy {
                regime: TilingRegime::CenterCrop,
                ..*self
            };
        }
        if unknown as f64 > DENSE_MASK_FRACTION * total as f64 {
            return fixed(DEFAULT_TILE);
        }
        if mean_unknown_neighbours(m) >= 3.0 {
            fixed(DEFAULT_TILE)
        } else {
            fixed(NOISE_TILE)
        }
    }

    /// Tiles that contain unknown pixels, in raster order, each with its
    /// grown data window. `Auto` is resolved with [`TilingPolicy::for_mask`].
    pub fn plan(&self, m: &PixelMask) -> Result<Vec<TileJob>> {
        self.validate()?;
        let policy = self.for_mask(m);
        let (w, h) = (m.width(), m.height());
        let counts = KnownCounts::new(m);
        let tiles: Vec<TileRect> = match policy.regime {
            TilingRegime::CenterCrop => match m.unknown_bounds() {
                None => Vec::new(),
                Some(b) => {
                    let cw = policy.crop_size.max(b.w + 2 * GROW_STEP);
                    let ch = policy.crop_size.max(b.h + 2 * GROW_STEP);
                    vec![TileRect::centered(b.x0 + b.w / 2, b.y0 + b.h / 2, cw, ch, w, h)]
                }
            },
            _ => {
                let mut v = Vec::new();
                for y0 in (0..h).step_by(policy.tile_h) {
                    for x0 in (0..w).step_by(policy.tile_w) {
                        let r = TileRect::new(x0, y0, policy.tile_w.min(w - x0), policy.tile_h.min(h - y0));
                        if counts.known(r) < r.area() {
                            v.push(r);
                        }
                    }
                }
                v
            }
        };
        tiles
            .into_iter()
            .map(|tile| {
                let mut window = tile.grow(policy.halo, w, h);
                loop {
                    let found = counts.known(window);
                    if found >= policy.min_known {
                        return Ok(TileJob { tile, window });
                    }
                    if window.area() == w * h {
                        return Err(InpaintError::TooFewKnown {
                            needed: policy.min_known,
                            found,
                        });
                    }
                    window = window.grow(GROW_STEP, w, h);
                }
            })
            .collect()
    }
}

fn mean_unknown_neighbours(m: &PixelMask) -> f64 {
    let (w, h) = (m.width(), m.height());
    let (mut sum, mut n) = (0usize, 0usize);
    for y in 0..h {
        for x in 0..w {
            if !m.is_unknown(x, y) {
                continue;
            }
            n += 1;
            sum += [(0, 1), (2, 1), (1, 0), (1, 2)]
                .iter()
                .filter(|&&(dx, dy)| {
                    let (nx, ny) = ((x + dx).wrapping_sub(1), (y + dy).wrapping_sub(1));
                    nx < w && ny < h && m.is_unknown(nx, ny)
                })
                .count();
        }
    }
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

/// Summed-area table of known pixels.
struct KnownCounts {
    w: usize,
    sat: Vec<usize>,
}

impl KnownCounts {
    fn new(m: &PixelMask) -> Self {
        let (w, h) = (m.width(), m.height());
        let mut sat = vec![0usize; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0;
            for x in 0..w {
                row += usize::from(!m.is_unknown(x, y));
                sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
            }
        }
        KnownCounts { w, sat }
    }

    fn known(&self, r: TileRect) -> usize {
        let s = |x: usize, y: usize| self.sat[y * (self.w + 1) + x];
        s(r.x1(), r.y1()) + s(r.x0, r.y0) - s(r.x0, r.y1()) - s(r.x1(), r.y0)
    }
}

/// Known samples and targets of one [`TileJob`].
#[derive(Clone, Debug)]
pub struct TileData {
    pub job: TileJob,
    /// Known pixels of the window as `(x, y, value)`, raster order.
    pub known: Vec<(f64, f64, f64)>,
    /// Unknown pixels of the tile, raster order.
    pub targets: Vec<(usize, usize)>,
}

impl TileData {
    /// The shared value when every known sample is equal.
    pub fn constant(&self) -> Option<f64> {
        let first = self.known.first()?.2;
        self.known.iter().all(|k| k.2 == first).then_some(first)
    }
}

/// Run `estimate` on every tile of the plan and write its outputs (one per
/// target) into a copy of `p`. Known pixels are never touched.
pub fn tiled_reconstruct(
    p: &Plane,
    m: &PixelMask,
    policy: &TilingPolicy,
    mut estimate: impl FnMut(&TileData) -> Result<Vec<f64>>,
) -> Result<Plane> {
    p.check_mask(m)?;
    let mut out = p.clone();
    for job in policy.plan(m)? {
        let w = job.window;
        let mut known = Vec::new();
        for y in w.y0..w.y1() {
            for x in w.x0..w.x1() {
                if !m.is_unknown(x, y) {
                    known.push((x as f64, y as f64, p.get(x, y)));
                }
            }
        }
        let t = job.tile;
        let targets: Vec<(usize, usize)> = (t.y0..t.y1())
            .flat_map(|y| (t.x0..t.x1()).map(move |x| (x, y)))
            .filter(|&(x, y)| m.is_unknown(x, y))
            .collect();
        let data = TileData { job, known, targets };
        let values = estimate(&data).map_err(|e| InpaintError::Case {
            case: format!("tile {}", job.tile),
            source: Box::new(e),
        })?;
        debug_assert_eq!(values.len(), data.targets.len());
        for (&(x, y), v) in data.targets.iter().zip(values) {
            out.set(x, y, v);
        }
    }
    out.ensure_finite()
}
