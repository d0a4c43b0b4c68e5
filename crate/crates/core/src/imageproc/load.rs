use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader, RgbImage};

use super::ImageBuffer;
use crate::error::{Error, Result};

/// Reads an 8-bit PNG, PPM/PGM or BMP file and scales it to `[0, 1]`.
///
/// RGBA and gray+alpha inputs drop their alpha channel. Higher bit depths
/// are rejected.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let decoded = reader.decode().map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    from_dynamic(decoded)
}

pub(crate) fn from_dynamic(img: DynamicImage) -> Result<ImageBuffer> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, raw) = match img {
        DynamicImage::ImageLuma8(buf) => (1, buf.into_raw()),
        DynamicImage::ImageLumaA8(_) => (1, img.to_luma8().into_raw()),
        DynamicImage::ImageRgb8(buf) => (3, buf.into_raw()),
        DynamicImage::ImageRgba8(_) => (3, img.to_rgb8().into_raw()),
        other => {
            return Err(Error::UnsupportedImage(format!(
                "color type {:?} (only 8-bit gray or RGB are accepted)",
                other.color()
            )))
        }
    };
    let data = raw.into_iter().map(|v| f64::from(v) / 255.0).collect();
    ImageBuffer::new(h, w, channels, data)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes a `[0, 1]` image as 8-bit RGB (gray inputs are replicated).
pub fn save_rgb_png(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut raw = Vec::with_capacity(img.n_pixels() * 3);
    for i in 0..img.n_pixels() {
        let px = img.pixel(i);
        for c in 0..3 {
            raw.push(quantize(px[c.min(img.channels() - 1)]));
        }
    }
    let buf =
        RgbImage::from_raw(img.width() as u32, img.height() as u32, raw).expect("buffer length matches dimensions");
    buf.save(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a boolean mask as an 8-bit gray PNG (true = 255).
pub fn save_gray_png(mask: &[bool], height: usize, width: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if mask.len() != height * width {
        return Err(Error::Shape(format!(
            "mask has {} entries for {height}x{width}",
            mask.len()
        )));
    }
    let raw = mask.iter().map(|&m| if m { 255 } else { 0 }).collect();
    let buf = GrayImage::from_raw(width as u32, height as u32, raw).expect("buffer length matches dimensions");
    buf.save(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{ImageBuffer as RawBuffer, Luma, Rgb};

    fn write_png<P, C>(dir: &Path, name: &str, img: RawBuffer<P, C>) -> std::path::PathBuf
    where
        P: image::PixelWithColorType,
        [P::Subpixel]: image::EncodableLayout,
        C: std::ops::Deref<Target = [P::Subpixel]>,
    {
        let path = dir.join(name);
        img.save(&path).unwrap();
        path
    }

    #[test]
    fn white_png_loads_as_ones() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_png(dir.path(), "w.png", RgbImage::from_pixel(2, 2, Rgb([255, 255, 255])));
        let img = load_image(&p).unwrap();
        assert_eq!((img.height(), img.width(), img.channels()), (2, 2, 3));
        assert!(img.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn black_png_loads_as_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_png(dir.path(), "b.png", GrayImage::from_pixel(2, 2, Luma([0])));
        let img = load_image(&p).unwrap();
        assert_eq!(img.channels(), 1);
        assert!(img.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mid_gray_scales_linearly() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_png(dir.path(), "g.png", GrayImage::from_pixel(1, 1, Luma([128])));
        let img = load_image(&p).unwrap();
        assert!((img.data()[0] - 128.0 / 255.0).abs() < 1e-15);
        assert!((img.data()[0] - 0.50196).abs() < 1e-5);
    }

    #[test]
    fn ppm_and_bmp_are_supported() {
        let dir = tempfile::tempdir().unwrap();
        let src = RgbImage::from_fn(3, 2, |x, y| Rgb([(x * 80) as u8, (y * 100) as u8, 7]));
        for name in ["a.ppm", "a.bmp"] {
            let p = write_png(dir.path(), name, src.clone());
            let img = load_image(&p).unwrap();
            assert_eq!((img.height(), img.width()), (2, 3));
            assert!((img.get(1, 2, 0) - 160.0 / 255.0).abs() < 1e-12);
            assert!((img.get(1, 2, 1) - 100.0 / 255.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("deep.png");
        RawBuffer::<Luma<u16>, Vec<u16>>::from_pixel(2, 2, Luma([1000]))
            .save(&p)
            .unwrap();
        assert!(matches!(load_image(&p), Err(Error::UnsupportedImage(_))));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(load_image("/definitely/not/here.png"), Err(Error::Io { .. })));
    }
}
