use std::path::PathBuf;

use inpaint_core::harness::{inpaint_image, Method, MethodOptions};
use inpaint_core::{
    apply_corruption, detect_unknown, gen_mask, read_mask, read_raster, score, write_mask, write_raster, CorruptionSpec,
    Image,
};

fn fixture(name: &str) -> Image {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/images").join(name);
    read_raster(&p).unwrap()
}

/// A 96x96 crop keeps the four methods fast.
fn crop(img: &Image, x0: usize, y0: usize, size: usize) -> Image {
    Image::from_fn(size, size, img.channels(), |x, y, c| img.get(x0 + x, y0 + y, c)).unwrap()
}

#[test]
fn every_method_repairs_colour_damage() {
    let original = crop(&fixture("coffee_rgb.png"), 80, 80, 96);
    assert_eq!(original.channels(), 3);
    let options = MethodOptions::default();
    for preset in ["noise2", "mask1", "mask5"] {
        let spec = CorruptionSpec::preset(preset).unwrap().with_seed(17);
        let m = gen_mask(&spec, 96, 96).unwrap();
        let damaged = apply_corruption(&original, &m, &spec).unwrap();
        let baseline = score(&original, &damaged).unwrap();
        for method in Method::ALL {
            let repaired = inpaint_image(&damaged, &m, method, &options.policy_for(method, Some(&spec)), &options).unwrap();
            let s = score(&original, &repaired).unwrap();
            assert!(s.psnr > baseline.psnr + 3.0, "{preset}/{method}: {} vs damaged {}", s.psnr, baseline.psnr);
            assert!(s.ssim > baseline.ssim, "{preset}/{method}");
            for y in 0..96 {
                for x in 0..96 {
                    if !m.is_unknown(x, y) {
                        for c in 0..3 {
                            assert_eq!(repaired.get(x, y, c), damaged.get(x, y, c));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn gray_channels_of_rgb_stay_identical() {
    let gray = crop(&fixture("rocket_gray.png"), 100, 60, 64);
    let rgb = Image::from_fn(64, 64, 3, |x, y, _| gray.get(x, y, 0)).unwrap();
    let spec = CorruptionSpec::preset("mask4").unwrap().with_seed(3);
    let m = gen_mask(&spec, 64, 64).unwrap();
    let options = MethodOptions::default();
    for method in [Method::Hdmr, Method::Rbf] {
        let policy = options.policy_for(method, Some(&spec));
        let g = inpaint_image(&gray, &m, method, &policy, &options).unwrap();
        let c = inpaint_image(&rgb, &m, method, &policy, &options).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let v = g.get(x, y, 0);
                assert!((0..3).all(|k| c.get(x, y, k) == v), "{method} at ({x}, {y})");
            }
        }
    }
}

#[test]
fn rasters_and_masks_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let img = crop(&fixture("chelsea_rgb.png"), 0, 0, 48);
    for name in ["a.png", "a.ppm"] {
        let p = dir.path().join(name);
        write_raster(&img, &p).unwrap();
        assert_eq!(read_raster(&p).unwrap(), img);
    }
    let gray = crop(&fixture("chelsea_gray.png"), 0, 0, 48);
    let p = dir.path().join("g.pgm");
    write_raster(&gray, &p).unwrap();
    assert!(std::fs::read(&p).unwrap().starts_with(b"P5"));
    assert_eq!(read_raster(&p).unwrap(), gray);

    let spec = CorruptionSpec::salt_pepper(0.4).with_seed(8);
    let m = gen_mask(&spec, 48, 48).unwrap();
    let mp = dir.path().join("m.png");
    write_mask(&m, &mp).unwrap();
    assert_eq!(read_mask(&mp).unwrap(), m);
    // Diff detection finds no more than the mask itself.
    let damaged = apply_corruption(&gray, &m, &spec).unwrap();
    let found = detect_unknown(&gray, &damaged).unwrap();
    for y in 0..48 {
        for x in 0..48 {
            assert!(!found.is_unknown(x, y) || m.is_unknown(x, y));
        }
    }
}
