//! Shared fixtures for the criterion benchmarks.

use inpaint_core::{gen_mask, CorruptionSpec, PixelMask, Plane};

/// A smooth synthetic scene with some texture, `size x size`.
pub fn scene(size: usize) -> Plane {
    let s = size as f64;
    Plane::from_fn(size, size, |x, y| {
        let (u, v) = (x as f64 / s, y as f64 / s);
        128.0 + 60.0 * (6.0 * u).sin() * (4.0 * v).cos() + 30.0 * (25.0 * (u + v)).sin()
    })
}

pub fn mask(preset: &str, size: usize) -> PixelMask {
    let spec = CorruptionSpec::preset(preset).expect("known preset").with_seed(1);
    gen_mask(&spec, size, size).expect("valid preset dimensions")
}
