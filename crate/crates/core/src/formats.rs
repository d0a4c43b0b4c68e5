//! Binary label maps (`.lbl`) and feature matrices (`.spf`), plus PNG
//! exports of label maps and region boundaries.
//!
//! `.lbl`: `"SPLB"`, then little-endian `u32` version (1), height, width,
//! region count and `height * width` labels, row-major.
//!
//! `.spf`: `"SPFT"`, then little-endian `u32` version (1), `N`, `D`, a `u8`
//! gradient flag and `N * D` little-endian `f32` values, row-major.

use std::fs;
use std::path::Path;

use image::{ImageBuffer as RawImage, Luma, RgbImage};

use crate::error::{Error, Result};
use crate::features::TokenFeatures;
use crate::imageproc::ImageBuffer;
use crate::tokenizer::PartitionLevel;

const LBL_MAGIC: &[u8; 4] = b"SPLB";
const SPF_MAGIC: &[u8; 4] = b"SPFT";
const VERSION: u32 = 1;

struct Cursor<'a> {
    kind: &'static str,
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::format(self.kind, "unexpected end of data"));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::format(self.kind, "bad magic bytes"));
        }
        let v = self.u32()?;
        if v != VERSION {
            return Err(Error::format(self.kind, format!("unsupported version {v}")));
        }
        Ok(())
    }
}

fn to_u32(kind: &'static str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::format(kind, format!("{v} does not fit in 32 bits")))
}

pub fn encode_label_map(p: &PartitionLevel) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(20 + 4 * p.labels().len());
    out.extend_from_slice(LBL_MAGIC);
    for v in [
        VERSION,
        to_u32("label map", p.height())?,
        to_u32("label map", p.width())?,
        to_u32("label map", p.n_regions())?,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &l in p.labels() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    Ok(out)
}

/// Parses a label map. The hierarchy level is not stored and comes back as 0.
pub fn decode_label_map(bytes: &[u8]) -> Result<PartitionLevel> {
    let mut c = Cursor {
        kind: "label map",
        bytes,
    };
    c.header(LBL_MAGIC)?;
    let (h, w, n) = (c.u32()? as usize, c.u32()? as usize, c.u32()? as usize);
    let count = h
        .checked_mul(w)
        .filter(|&k| k.checked_mul(4) == Some(c.bytes.len()))
        .ok_or_else(|| Error::format("label map", format!("payload does not hold {h}x{w} labels")))?;
    let labels: Vec<u32> = c
        .take(count * 4)?
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let p = PartitionLevel::new(0, h, w, labels)?;
    if p.n_regions() != n {
        return Err(Error::format(
            "label map",
            format!("header says {n} regions, labels use {}", p.n_regions()),
        ));
    }
    Ok(p)
}

pub fn write_label_map(p: &PartitionLevel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_label_map(p)?).map_err(|e| Error::io(path, e))
}

pub fn read_label_map(path: impl AsRef<Path>) -> Result<PartitionLevel> {
    let path = path.as_ref();
    decode_label_map(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn encode_features(f: &TokenFeatures) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(17 + 4 * f.data().len());
    out.extend_from_slice(SPF_MAGIC);
    for v in [
        VERSION,
        to_u32("feature matrix", f.n_tokens())?,
        to_u32("feature matrix", f.dim())?,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(u8::from(f.has_gradients()));
    for &v in f.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_features(bytes: &[u8]) -> Result<TokenFeatures> {
    let mut c = Cursor {
        kind: "feature matrix",
        bytes,
    };
    c.header(SPF_MAGIC)?;
    let (n, d) = (c.u32()? as usize, c.u32()? as usize);
    let has_gradients = match c.take(1)?[0] {
        0 => false,
        1 => true,
        v => return Err(Error::format("feature matrix", format!("bad gradient flag {v}"))),
    };
    let count = n
        .checked_mul(d)
        .filter(|&k| k.checked_mul(4) == Some(c.bytes.len()))
        .ok_or_else(|| Error::format("feature matrix", format!("payload does not hold {n}x{d} values")))?;
    let data = c
        .take(count * 4)?
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    TokenFeatures::from_dim(n, d, has_gradients, data)
}

pub fn write_features(f: &TokenFeatures, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_features(f)?).map_err(|e| Error::io(path, e))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<TokenFeatures> {
    let path = path.as_ref();
    decode_features(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// 16-bit gray PNG with one gray level per region id.
pub fn save_label_png(p: &PartitionLevel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if p.n_regions() > usize::from(u16::MAX) + 1 {
        return Err(Error::format(
            "label png",
            format!("{} regions do not fit in 16 bits", p.n_regions()),
        ));
    }
    let raw: Vec<u16> = p.labels().iter().map(|&l| l as u16).collect();
    let buf: RawImage<Luma<u16>, Vec<u16>> =
        RawImage::from_raw(p.width() as u32, p.height() as u32, raw).expect("buffer length matches dimensions");
    buf.save(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// Pixels whose right or lower neighbor belongs to another region.
pub fn boundary_mask(p: &PartitionLevel) -> Vec<bool> {
    let (h, w, l) = (p.height(), p.width(), p.labels());
    (0..h * w)
        .map(|i| {
            let (y, x) = (i / w, i % w);
            (x + 1 < w && l[i] != l[i + 1]) || (y + 1 < h && l[i] != l[i + w])
        })
        .collect()
}

/// Writes `img` as RGB with region boundaries painted in `color`.
pub fn save_boundary_overlay(
    img: &ImageBuffer,
    p: &PartitionLevel,
    color: [u8; 3],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if img.height() != p.height() || img.width() != p.width() {
        return Err(Error::Shape(format!(
            "image is {}x{}, partition is {}x{}",
            img.height(),
            img.width(),
            p.height(),
            p.width()
        )));
    }
    let edges = boundary_mask(p);
    let mut raw = Vec::with_capacity(img.n_pixels() * 3);
    for (i, &edge) in edges.iter().enumerate() {
        let px = img.pixel(i);
        for c in 0..3 {
            raw.push(if edge {
                color[c]
            } else {
                (px[c.min(img.channels() - 1)].clamp(0.0, 1.0) * 255.0).round() as u8
            });
        }
    }
    let buf = RgbImage::from_raw(p.width() as u32, p.height() as u32, raw).expect("buffer length matches dimensions");
    buf.save(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}
