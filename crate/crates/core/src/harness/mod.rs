//! Corrupt, reconstruct and score whole suites of cases, then compare the
//! methods statistically and emit reports.

mod config;
mod report;
mod stats;

pub use config::{load_images, parse_corruption, SuiteConfig};
pub use report::{read_csv, write_csv, write_markdown, CSV_HEADER};
pub use stats::{mark_best, one_way_anova, percent_spread, AnovaResult, BestMarks};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::corruption::{apply_corruption, gen_mask, CorruptionSpec};
use crate::cubic::cubic_inpaint;
use crate::error::{InpaintError, Result};
use crate::hdmr::hdmr_inpaint;
use crate::kriging::{kriging_inpaint_with, VariogramFamily};
use crate::metrics::{score, ScoreTriple};
use crate::plane::{merge_channels, split_channels, Image, PixelMask, Plane};
use crate::rbf::{rbf_inpaint_with, RbfParams};
use crate::rng::derive_seed;
use crate::tiling::TilingPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Cubic,
    Kriging,
    Rbf,
    Hdmr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cubic, Method::Kriging, Method::Rbf, Method::Hdmr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cubic => "cubic",
            Method::Kriging => "kriging",
            Method::Rbf => "rbf",
            Method::Hdmr => "hdmr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = InpaintError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cubic" => Ok(Method::Cubic),
            "kriging" => Ok(Method::Kriging),
            "rbf" => Ok(Method::Rbf),
            "hdmr" => Ok(Method::Hdmr),
            other => Err(InpaintError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Per-method settings. Cubic and HDMR always work on the whole plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MethodOptions {
    pub kriging_policy: TilingPolicy,
    pub family: VariogramFamily,
    pub rbf_policy: TilingPolicy,
    pub rbf: RbfParams,
}

impl MethodOptions {
    /// The tiling policy `method` uses, resolved for `corruption` when known.
    pub fn policy_for(&self, method: Method, corruption: Option<&CorruptionSpec>) -> TilingPolicy {
        let base = match method {
            Method::Rbf => self.rbf_policy,
            _ => self.kriging_policy,
        };
        corruption.map_or(base, |c| base.for_corruption(c))
    }
}

/// Reconstruct the unknown pixels of one plane.
pub fn inpaint_plane(p: &Plane, m: &PixelMask, method: Method, policy: &TilingPolicy, options: &MethodOptions) -> Result<Plane> {
    match method {
        Method::Cubic => cubic_inpaint(p, m),
        Method::Kriging => kriging_inpaint_with(p, m, policy, options.family),
        Method::Rbf => rbf_inpaint_with(p, m, policy, &options.rbf),
        Method::Hdmr => hdmr_inpaint(p, m),
    }
}

/// Reconstruct every channel of an image, then quantize once.
pub fn inpaint_image(img: &Image, m: &PixelMask, method: Method, policy: &TilingPolicy, options: &MethodOptions) -> Result<Image> {
    img.check_mask(m)?;
    if m.is_empty() {
        return Ok(img.clone());
    }
    let planes = split_channels(img)
        .iter()
        .map(|p| inpaint_plane(p, m, method, policy, options))
        .collect::<Result<Vec<_>>>()?;
    merge_channels(&planes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchCase {
    pub image_id: String,
    /// Carries the mask seed.
    pub corruption: CorruptionSpec,
    pub method: Method,
    pub policy: TilingPolicy,
    pub options: MethodOptions,
    pub seed: u64,
}

impl BenchCase {
    pub fn name(&self) -> String {
        format!("{}/{}/{}", self.image_id, self.corruption.label(), self.method)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRecord {
    pub case: BenchCase,
    pub scores: ScoreTriple,
    /// Seconds spent reconstructing and scoring.
    pub wall_time: f64,
}

/// Seed for one (image, corruption) pair; independent of the method so every
/// method sees the same mask.
pub fn case_seed(suite_seed: u64, image_id: &str, corruption: &CorruptionSpec) -> u64 {
    derive_seed(
        suite_seed,
        &format!("{image_id}|{}|{}", corruption.kind, corruption.density),
    )
}

pub fn run_case(original: &Image, case: &BenchCase) -> Result<ScoreRecord> {
    let start = Instant::now();
    let wrap = |e: InpaintError| InpaintError::Case {
        case: case.name(),
        source: Box::new(e),
    };
    let spec = case.corruption.with_seed(case.seed);
    let mask = gen_mask(&spec, original.width(), original.height()).map_err(wrap)?;
    let corrupted = apply_corruption(original, &mask, &spec).map_err(wrap)?;
    let repaired = inpaint_image(&corrupted, &mask, case.method, &case.policy, &case.options).map_err(wrap)?;
    let scores = score(original, &repaired).map_err(wrap)?;
    Ok(ScoreRecord {
        case: case.clone(),
        scores,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// One line of a report: a score triple or the error that prevented it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub image: String,
    pub corruption: String,
    pub method: String,
    pub result: std::result::Result<ScoreTriple, String>,
    pub wall_time: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_err()).count()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    pub methods: MethodOptions,
    /// Record wall times in the report; off keeps reports byte-stable.
    pub timing: bool,
}

/// Every (image, corruption, method) combination in input order. A failing
/// case becomes an error row and the suite carries on.
pub fn run_suite(images: &[(String, Image)], specs: &[CorruptionSpec], methods: &[Method], options: &SuiteOptions) -> Result<BenchmarkReport> {
    if images.is_empty() || specs.is_empty() || methods.is_empty() {
        return Err(InpaintError::invalid("suite needs at least one image, corruption and method"));
    }
    let mut rows = Vec::with_capacity(images.len() * specs.len() * methods.len());
    for (id, img) in images {
        for spec in specs {
            let seed = case_seed(options.seed, id, spec);
            for &method in methods {
                let case = BenchCase {
                    image_id: id.clone(),
                    corruption: *spec,
                    method,
                    policy: options.methods.policy_for(method, Some(spec)),
                    options: options.methods,
                    seed,
                };
                let outcome = run_case(img, &case);
                rows.push(ReportRow {
                    image: id.clone(),
                    corruption: spec.label(),
                    method: method.to_string(),
                    wall_time: match (&outcome, options.timing) {
                        (Ok(r), true) => Some(r.wall_time),
                        _ => None,
                    },
                    result: outcome.map(|r| r.scores).map_err(|e| e.to_string()),
                });
            }
        }
    }
    Ok(BenchmarkReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corruption::CorruptionKind;

    fn smooth(w: usize, h: usize, nc: usize) -> Image {
        Image::from_fn(w, h, nc, |x, y, c| (80.0 + 40.0 * ((x as f64) / 11.0 + c as f64).sin() + y as f64 * 0.5) as u8).unwrap()
    }

    fn case(method: Method, spec: CorruptionSpec) -> BenchCase {
        let options = MethodOptions::default();
        BenchCase {
            image_id: "t".into(),
            corruption: spec,
            method,
            policy: options.policy_for(method, Some(&spec)),
            options,
            seed: 9,
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bicubic".parse::<Method>().is_err());
    }

    #[test]
    fn constant_image_is_exact_for_every_method() {
        let img = Image::filled(64, 64, 1, 131).unwrap();
        for m in Method::ALL {
            let r = run_case(&img, &case(m, CorruptionSpec::salt_pepper(0.1))).unwrap();
            assert!(r.scores.mse <= 0.25, "{m}: {}", r.scores.mse);
        }
    }

    #[test]
    fn deterministic_and_context_on_error() {
        let img = smooth(64, 64, 3);
        let c = case(Method::Rbf, CorruptionSpec::salt_pepper(0.3));
        let a = run_case(&img, &c).unwrap();
        let b = run_case(&img, &c).unwrap();
        assert_eq!(a.scores, b.scores);
        // Structural masks need 64x64; a smaller image fails with context.
        let small = smooth(32, 32, 1);
        let err = run_case(&small, &case(Method::Cubic, CorruptionSpec::new(CorruptionKind::Curve))).unwrap_err();
        assert!(err.to_string().starts_with("case t/mask1/cubic"), "{err}");
    }

    #[test]
    fn suite_cardinality_order_and_errors() {
        let images = vec![("a".to_string(), smooth(64, 64, 1)), ("b".to_string(), smooth(32, 32, 1))];
        let specs = [CorruptionSpec::salt_pepper(0.1), CorruptionSpec::preset("mask5").unwrap()];
        let report = run_suite(&images, &specs, &Method::ALL, &SuiteOptions::default()).unwrap();
        assert_eq!(report.rows.len(), 16);
        let keys: Vec<_> = report.rows.iter().map(|r| (r.image.as_str(), r.corruption.as_str(), r.method.as_str())).collect();
        assert_eq!(keys[0], ("a", "noise1", "cubic"));
        assert_eq!(keys[3], ("a", "noise1", "hdmr"));
        assert_eq!(keys[4], ("a", "mask5", "cubic"));
        // The frame does not fit a 32x32 image: error rows, suite continues.
        assert_eq!(report.failures(), 4);
        assert!(report.rows[12..].iter().all(|r| r.result.is_err()));
        assert!(report.rows.iter().all(|r| r.wall_time.is_none()));
        assert!(run_suite(&[], &specs, &Method::ALL, &SuiteOptions::default()).is_err());
    }

    #[test]
    fn seeds_ignore_method_but_not_image() {
        let s = CorruptionSpec::salt_pepper(0.5);
        assert_eq!(case_seed(1, "a", &s), case_seed(1, "a", &s));
        assert_ne!(case_seed(1, "a", &s), case_seed(1, "b", &s));
        assert_ne!(case_seed(1, "a", &s), case_seed(1, "a", &CorruptionSpec::salt_pepper(0.7)));
        assert_ne!(case_seed(1, "a", &s), case_seed(2, "a", &s));
    }

    #[test]
    fn empty_mask_identity() {
        let img = smooth(32, 32, 1);
        let out = inpaint_image(&img, &PixelMask::empty(32, 32), Method::Cubic, &TilingPolicy::default(), &MethodOptions::default()).unwrap();
        let s = score(&img, &out).unwrap();
        assert_eq!((s.mse, s.psnr, s.ssim), (0.0, f64::INFINITY, 1.0));
    }
}
