//! Full-reference quality metrics for 8-bit images.
//!
//! SSIM follows the usual reference formulation: an 11x11 Gaussian window
//! (sigma 1.5) evaluated only where it fits inside the image, K1 = 0.01,
//! K2 = 0.03, L = 255, averaged over the SSIM map. Colour SSIM is the
//! unweighted mean of the per-channel values; colour MSE divides by
//! `width * height * channels`.

use crate::error::{InpaintError, Result};
use crate::plane::Image;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const PEAK: f64 = 255.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreTriple {
    /// dB; `f64::INFINITY` when the images are identical.
    pub psnr: f64,
    pub ssim: f64,
    pub mse: f64,
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    a.same_shape(b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.data().len() as f64)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (PEAK / mse.sqrt()).log10()
    }
}

pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    mse(a, b).map(psnr_from_mse)
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable "valid" filtering of a `w x h` grid.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..SSIM_WINDOW).map(|i| k[i] * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

fn ssim_channel(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    let k = gaussian_kernel();
    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mu_a = filter_valid(a, w, h, &k);
    let mu_b = filter_valid(b, w, h, &k);
    let e_aa = filter_valid(&aa, w, h, &k);
    let e_bb = filter_valid(&bb, w, h, &k);
    let e_ab = filter_valid(&ab, w, h, &k);
    let n = mu_a.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = e_aa[i] - ma * ma;
            let vb = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    total / n as f64
}

pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    a.same_shape(b)?;
    let (w, h, nc) = (a.width(), a.height(), a.channels());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(InpaintError::invalid(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let channel = |img: &Image, c: usize| -> Vec<f64> {
        img.data().iter().skip(c).step_by(nc).map(|&v| v as f64).collect()
    };
    let sum: f64 = (0..nc)
        .map(|c| ssim_channel(&channel(a, c), &channel(b, c), w, h))
        .sum();
    Ok(sum / nc as f64)
}

pub fn score(a: &Image, b: &Image) -> Result<ScoreTriple> {
    let mse = mse(a, b)?;
    Ok(ScoreTriple {
        psnr: psnr_from_mse(mse),
        ssim: ssim(a, b)?,
        mse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xorshift64Star;

    fn noise_image(w: usize, h: usize, nc: usize, seed: u64) -> Image {
        let mut r = Xorshift64Star::stream(seed, "test");
        Image::from_fn(w, h, nc, |_, _, _| r.below(256) as u8).unwrap()
    }

    #[test]
    fn mse_cases() {
        let a = Image::filled(256, 256, 1, 0).unwrap();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.set(17, 200, 0, 255);
        assert!((mse(&a, &b).unwrap() - 65025.0 / 65536.0).abs() < 1e-12);
        let white = Image::filled(256, 256, 1, 255).unwrap();
        assert_eq!(mse(&a, &white).unwrap(), 65025.0);
        assert!(mse(&a, &Image::filled(256, 255, 1, 0).unwrap()).is_err());
    }

    #[test]
    fn colour_mse_averages_over_channels() {
        let a = Image::filled(2, 2, 3, 0).unwrap();
        let mut b = a.clone();
        b.set(0, 0, 1, 12);
        assert_eq!(mse(&a, &b).unwrap(), 144.0 / 12.0);
    }

    #[test]
    fn psnr_cases() {
        assert!((psnr_from_mse(18.45) - 35.471).abs() < 0.01);
        let a = Image::filled(256, 256, 1, 0).unwrap();
        let white = Image::filled(256, 256, 1, 255).unwrap();
        assert_eq!(psnr(&a, &white).unwrap(), 0.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ssim_identical_is_exactly_one() {
        for nc in [1, 3] {
            let a = noise_image(40, 33, nc, nc as u64);
            assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        }
    }

    /// Direct evaluation of the SSIM closed form on a single window; for
    /// constant images every window is identical so this is the whole map.
    fn constant_ssim_oracle(va: f64, vb: f64) -> f64 {
        let c1 = (0.01f64 * 255.0).powi(2);
        let c2 = (0.03f64 * 255.0).powi(2);
        let n = 121.0;
        let mu_a = va * n / n;
        let mu_b = vb * n / n;
        let var_a = (0..121).map(|_| (va - mu_a).powi(2)).sum::<f64>() / n;
        let var_b = (0..121).map(|_| (vb - mu_b).powi(2)).sum::<f64>() / n;
        let cov = (0..121).map(|_| (va - mu_a) * (vb - mu_b)).sum::<f64>() / n;
        ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
            / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
    }

    #[test]
    fn ssim_constant_pair_matches_closed_form() {
        let a = Image::filled(256, 256, 1, 64).unwrap();
        let b = Image::filled(256, 256, 1, 192).unwrap();
        let expected = constant_ssim_oracle(64.0, 192.0);
        // Frozen from the oracle: (2*64*192 + C1) / (64^2 + 192^2 + C1).
        assert!((expected - 0.600_063_490_897).abs() < 1e-9, "{expected}");
        assert!((ssim(&a, &b).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn ssim_is_symmetric() {
        for seed in 0..5 {
            let a = noise_image(32, 24, 3, seed);
            let b = noise_image(32, 24, 3, seed + 100);
            assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        }
    }

    #[test]
    fn ssim_rejects_small_or_mismatched() {
        let a = Image::filled(10, 40, 1, 0).unwrap();
        assert!(ssim(&a, &a).is_err());
        let b = Image::filled(20, 20, 1, 0).unwrap();
        let c = Image::filled(20, 20, 3, 0).unwrap();
        assert!(ssim(&b, &c).is_err());
    }

    #[test]
    fn ssim_drops_under_corruption() {
        let a = Image::from_fn(64, 64, 1, |x, y, _| ((x * 3 + y * 2) % 256) as u8).unwrap();
        let mut b = a.clone();
        for i in 0..200 {
            b.set((i * 7) % 64, (i * 13) % 64, 0, 255);
        }
        let s = ssim(&a, &b).unwrap();
        assert!(s > 0.0 && s < 1.0);
    }
}
