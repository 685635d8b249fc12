//! Flat `key = value` suite configuration.
//!
//! ```text
//! # comments start with '#'
//! images = images/a.png, images/b.png
//! corruptions = mask1, mask5, noise3, salt_pepper:0.25, frame:30
//! methods = cubic, kriging, rbf, hdmr
//! seed = 7
//! timing = false
//! kriging.family = spherical
//! kriging.tile_size = 16
//! rbf.kernel = gaussian
//! rbf.epsilon = 1.5
//! ```
//!
//! Tiling keys (`regime`, `tile_size`, `tile_w`, `tile_h`, `min_known`,
//! `crop_size`, `halo`, `max_points`, `neighbors`) are accepted under both
//! the `kriging.` and `rbf.` prefixes. Giving a tile size without a regime
//! selects the fixed regime. Relative image paths resolve against the config
//! file's directory; an image's id is its file stem.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{Method, MethodOptions};
use crate::corruption::{CorruptionKind, CorruptionSpec, NOISE_LEVELS};
use crate::error::{InpaintError, Result};
use crate::plane::Image;
use crate::raster::read_raster;
use crate::tiling::{TilingPolicy, TilingRegime};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub images: Vec<PathBuf>,
    pub corruptions: Vec<CorruptionSpec>,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub timing: bool,
    pub options: MethodOptions,
}

fn all_presets() -> Vec<CorruptionSpec> {
    (1..=5)
        .map(|i| format!("mask{i}"))
        .chain((1..=NOISE_LEVELS.len()).map(|i| format!("noise{i}")))
        .filter_map(|n| CorruptionSpec::preset(&n))
        .collect()
}

/// A preset name (`mask1`..`mask5`, `noise1`..`noise5`), `salt_pepper:<d>`,
/// or a structural kind with an optional `:<stroke width>` (`:<size>` for
/// `frame`).
pub fn parse_corruption(s: &str) -> Result<CorruptionSpec> {
    let s = s.trim();
    if let Some(p) = CorruptionSpec::preset(s) {
        return Ok(p);
    }
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a.trim())),
        None => (s, None),
    };
    let kind = CorruptionKind::from_str(kind)?;
    let bad = || InpaintError::invalid(format!("bad corruption parameter in `{s}`"));
    let mut spec = CorruptionSpec::new(kind);
    match (kind, arg) {
        (CorruptionKind::SaltPepper, Some(a)) => spec.density = a.parse().map_err(|_| bad())?,
        (CorruptionKind::SaltPepper, None) => {
            return Err(InpaintError::invalid("salt_pepper needs a density, e.g. salt_pepper:0.3"))
        }
        (CorruptionKind::Frame, Some(a)) => spec.frame_size = a.parse().map_err(|_| bad())?,
        (_, Some(a)) => spec.stroke_width = a.parse().map_err(|_| bad())?,
        (_, None) => {}
    }
    Ok(spec)
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn set_tiling(policy: &mut TilingPolicy, key: &str, value: &str) -> std::result::Result<bool, String> {
    let num = || value.parse::<usize>().map_err(|_| format!("`{value}` is not a non-negative integer"));
    match key {
        "regime" => policy.regime = value.parse().map_err(|e: InpaintError| e.to_string())?,
        "tile_size" => {
            policy.tile_w = num()?;
            policy.tile_h = policy.tile_w;
        }
        "tile_w" => policy.tile_w = num()?,
        "tile_h" => policy.tile_h = num()?,
        "min_known" => policy.min_known = num()?,
        "crop_size" => policy.crop_size = num()?,
        "halo" => policy.halo = num()?,
        "max_points" => policy.max_points = num()?,
        "neighbors" => policy.neighbors = num()?,
        _ => return Ok(false),
    }
    Ok(true)
}

impl SuiteConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<SuiteConfig> {
        let mut cfg = SuiteConfig {
            images: Vec::new(),
            corruptions: all_presets(),
            methods: Method::ALL.to_vec(),
            seed: 0,
            timing: false,
            options: MethodOptions::default(),
        };
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |reason: String| InpaintError::Config { line, reason };
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            if !seen.insert(key.clone()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let wrap = |e: InpaintError| err(e.to_string());
            match key.as_str() {
                "images" => {
                    cfg.images = list(value)
                        .map(|p| {
                            let p = PathBuf::from(p);
                            if p.is_relative() {
                                base_dir.join(p)
                            } else {
                                p
                            }
                        })
                        .collect()
                }
                "corruptions" => cfg.corruptions = list(value).map(parse_corruption).collect::<Result<_>>().map_err(wrap)?,
                "methods" => cfg.methods = list(value).map(Method::from_str).collect::<Result<_>>().map_err(wrap)?,
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("seed `{value}` is not an unsigned integer")))?,
                "timing" => cfg.timing = value.parse().map_err(|_| err(format!("timing must be true or false, got `{value}`")))?,
                "kriging.family" => cfg.options.family = value.parse().map_err(wrap)?,
                "rbf.kernel" => cfg.options.rbf.kind = value.parse().map_err(wrap)?,
                "rbf.epsilon" => {
                    let eps: f64 = value.parse().map_err(|_| err(format!("epsilon `{value}` is not a number")))?;
                    if !(eps > 0.0 && eps.is_finite()) {
                        return Err(err(format!("epsilon must be positive, got {value}")));
                    }
                    cfg.options.rbf.epsilon = Some(eps);
                }
                other => {
                    let handled = match other.split_once('.') {
                        Some(("kriging", k)) => set_tiling(&mut cfg.options.kriging_policy, k, value).map_err(err)?,
                        Some(("rbf", k)) => set_tiling(&mut cfg.options.rbf_policy, k, value).map_err(err)?,
                        _ => false,
                    };
                    if !handled {
                        return Err(err(format!("unknown key `{other}`")));
                    }
                }
            }
        }
        for (prefix, policy) in [("kriging", &mut cfg.options.kriging_policy), ("rbf", &mut cfg.options.rbf_policy)] {
            let sized = ["tile_size", "tile_w", "tile_h"].iter().any(|k| seen.contains(&format!("{prefix}.{k}")));
            if sized && !seen.contains(&format!("{prefix}.regime")) {
                policy.regime = TilingRegime::Fixed;
            }
        }
        if cfg.images.is_empty() {
            return Err(InpaintError::Config {
                line: 0,
                reason: "no images listed".into(),
            });
        }
        if cfg.corruptions.is_empty() || cfg.methods.is_empty() {
            return Err(InpaintError::Config {
                line: 0,
                reason: "corruption and method lists must not be empty".into(),
            });
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SuiteConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        SuiteConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// Read every configured image, keyed by file stem.
pub fn load_images(cfg: &SuiteConfig) -> Result<Vec<(String, Image)>> {
    let mut ids = HashSet::new();
    cfg.images
        .iter()
        .map(|p| {
            let id = p
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| InpaintError::invalid(format!("cannot derive an image id from {}", p.display())))?
                .to_string();
            if !ids.insert(id.clone()) {
                return Err(InpaintError::invalid(format!("duplicate image id `{id}`")));
            }
            Ok((id, read_raster(p)?))
        })
        .collect()
}
