//! Lossless 8-bit raster I/O (PNG, PGM/PPM binary).

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ImageEncoder, ImageFormat, ImageReader};

use crate::error::{InpaintError, Result};
use crate::plane::{Image, PixelMask};

pub fn read_raster(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let malformed = |reason: String| InpaintError::Malformed {
        path: path.to_path_buf(),
        reason,
    };
    let reader = ImageReader::open(path)?
        .with_guessed_format()
        .map_err(|e| malformed(e.to_string()))?;
    let decoded = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) => InpaintError::Io(io),
        other => malformed(other.to_string()),
    })?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => Image::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => Image::new(w, h, 3, buf.into_raw()),
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_)
        | DynamicImage::ImageRgb32F(_)
        | DynamicImage::ImageRgba32F(_) => Err(InpaintError::UnsupportedBitDepth(format!(
            "{} ({:?})",
            path.display(),
            decoded.color()
        ))),
        other => Err(malformed(format!(
            "unsupported channel layout {:?}",
            other.color()
        ))),
    }
}

/// Write as PNG or binary PNM, chosen from the file extension.
pub fn write_raster(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let color = if img.channels() == 1 {
        image::ExtendedColorType::L8
    } else {
        image::ExtendedColorType::Rgb8
    };
    let (w, h) = (img.width() as u32, img.height() as u32);
    let encoded = match ext.as_str() {
        "png" => image::save_buffer_with_format(path, img.data(), w, h, color, ImageFormat::Png),
        "pgm" | "ppm" | "pnm" => {
            let subtype = if img.channels() == 1 {
                PnmSubtype::Graymap(SampleEncoding::Binary)
            } else {
                PnmSubtype::Pixmap(SampleEncoding::Binary)
            };
            let file = BufWriter::new(File::create(path)?);
            PnmEncoder::new(file)
                .with_subtype(subtype)
                .write_image(img.data(), w, h, color)
        }
        _ => {
            return Err(InpaintError::invalid(format!(
                "unsupported output extension for {}",
                path.display()
            )))
        }
    };
    encoded.map_err(|e| match e {
        image::ImageError::IoError(io) => InpaintError::Io(io),
        other => InpaintError::invalid(other.to_string()),
    })
}

/// Masks are stored as 8-bit gray: 0 = known, 255 = unknown.
pub fn mask_to_image(m: &PixelMask) -> Image {
    let data = m.flags().iter().map(|&u| if u { 255 } else { 0 }).collect();
    Image::new(m.width(), m.height(), 1, data).expect("mask dimensions are consistent")
}

/// Any nonzero sample in any channel marks the pixel unknown.
pub fn mask_from_image(img: &Image) -> PixelMask {
    let nc = img.channels();
    let flags = img.data().chunks(nc).map(|px| px.iter().any(|&v| v != 0)).collect();
    PixelMask::new(img.width(), img.height(), flags).expect("image dimensions are consistent")
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<PixelMask> {
    read_raster(path).map(|img| mask_from_image(&img))
}

pub fn write_mask(m: &PixelMask, path: impl AsRef<Path>) -> Result<()> {
    write_raster(&mask_to_image(m), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(nc: usize) -> Image {
        Image::from_fn(256, 256, nc, |x, y, c| ((x * 7 + y * 13 + c * 101) % 256) as u8).unwrap()
    }

    #[test]
    fn round_trips_are_lossless() {
        let dir = tempfile::tempdir().unwrap();
        for (nc, name) in [(1, "g.png"), (3, "c.png"), (1, "g.pgm"), (3, "c.ppm")] {
            let img = pattern(nc);
            let path = dir.path().join(name);
            write_raster(&img, &path).unwrap();
            assert_eq!(read_raster(&path).unwrap(), img, "{name}");
        }
    }

    #[test]
    fn pnm_headers_are_binary() {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("a.pgm");
        let c = dir.path().join("a.ppm");
        write_raster(&pattern(1), &g).unwrap();
        write_raster(&pattern(3), &c).unwrap();
        assert_eq!(&std::fs::read(g).unwrap()[..2], b"P5");
        assert_eq!(&std::fs::read(c).unwrap()[..2], b"P6");
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let buf = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_pixel(4, 4, image::Luma([1000]));
        buf.save(&path).unwrap();
        let err = read_raster(&path).unwrap_err();
        assert!(err.to_string().contains("unsupported bit depth"), "{err}");
    }

    #[test]
    fn malformed_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        std::fs::write(&path, b"\x89PNG\r\n\x1a\nnot really").unwrap();
        assert!(matches!(read_raster(&path), Err(InpaintError::Malformed { .. })));
    }

    #[test]
    fn mask_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let m = PixelMask::from_fn(70, 64, |x, y| (x * y) % 7 == 1);
        write_mask(&m, &path).unwrap();
        let img = read_raster(&path).unwrap();
        assert!(img.data().iter().all(|&v| v == 0 || v == 255));
        assert_eq!(read_mask(&path).unwrap(), m);
    }
}
