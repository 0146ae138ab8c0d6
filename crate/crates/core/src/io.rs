//! Image and raster file formats.
//!
//! Luminance maps linearly between `[0, 1]` and `[0, 255]`, rounding half up.
//! Grayscale files are binary PGM (`P5`) or PNG, picked by extension.
//! Response maps can also be dumped losslessly as little-endian `f32`:
//!
//! ```text
//! b"DOGR" | height: u32 | width: u32 | scale: f32 | height*width f32 values
//! ```

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use image::{ImageFormat, Luma, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::raster::{BinaryMap, GrayImage, ResponseMap};

pub const RAW_MAGIC: &[u8; 4] = b"DOGR";

pub fn lum_to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

pub fn u8_to_lum(v: u8) -> f64 {
    v as f64 / 255.0
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => Ok(ImageFormat::Png),
        Some("pgm") | Some("pnm") => Ok(ImageFormat::Pnm),
        other => Err(Error::Format(format!(
            "unsupported image extension {:?} (expected .png or .pgm)",
            other.unwrap_or("")
        ))),
    }
}

fn write_luma(buf: image::GrayImage, path: &Path) -> Result<()> {
    match format_for(path)? {
        ImageFormat::Pnm => {
            let mut out = BufWriter::new(File::create(path)?);
            write!(out, "P5\n{} {}\n255\n", buf.width(), buf.height())?;
            out.write_all(buf.as_raw())?;
            out.flush()?;
            Ok(())
        }
        fmt => Ok(buf.save_with_format(path, fmt)?),
    }
}

fn to_luma8(img: &GrayImage) -> image::GrayImage {
    image::GrayImage::from_fn(img.width() as u32, img.height() as u32, |x, y| {
        Luma([lum_to_u8(img.get(y as usize, x as usize))])
    })
}

pub fn write_gray(img: &GrayImage, path: &Path) -> Result<()> {
    write_luma(to_luma8(img), path)
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let decoded = image::ImageReader::open(path)?.with_guessed_format()?.decode()?.to_luma8();
    let (w, h) = decoded.dimensions();
    GrayImage::new(h as usize, w as usize, decoded.as_raw().iter().map(|&v| u8_to_lum(v)).collect())
}

pub fn write_binary(bm: &BinaryMap, path: &Path) -> Result<()> {
    let buf = image::GrayImage::from_fn(bm.width() as u32, bm.height() as u32, |x, y| {
        Luma([if bm.get(y as usize, x as usize) { 255 } else { 0 }])
    });
    write_luma(buf, path)
}

pub fn write_raw_response(r: &ResponseMap, scale: f64, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(RAW_MAGIC)?;
    out.write_all(&(r.height() as u32).to_le_bytes())?;
    out.write_all(&(r.width() as u32).to_le_bytes())?;
    out.write_all(&(scale as f32).to_le_bytes())?;
    for v in r.values() {
        out.write_all(&(*v as f32).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Returns the map and its recorded scale.
pub fn read_raw_response(path: &Path) -> Result<(ResponseMap, f64)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != RAW_MAGIC {
        return Err(Error::Format(format!("{} is not a raw response file", path.display())));
    }
    let word = |i: usize| -> [u8; 4] { bytes[i..i + 4].try_into().expect("4-byte slice") };
    let h = u32::from_le_bytes(word(4)) as usize;
    let w = u32::from_le_bytes(word(8)) as usize;
    let scale = f32::from_le_bytes(word(12)) as f64;
    if bytes.len() != 16 + 4 * h * w {
        return Err(Error::Format(format!(
            "raw response {}x{} needs {} bytes, file has {}",
            h,
            w,
            16 + 4 * h * w,
            bytes.len()
        )));
    }
    let values = bytes[16..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")) as f64)
        .collect();
    Ok((ResponseMap::new(h, w, values)?, scale))
}

/// Diverging blue-white-red ramp with a white midpoint, `t` in `[-1, 1]`.
pub fn jetwhite(t: f64) -> Rgb<u8> {
    const STOPS: [(f64, [f64; 3]); 7] = [
        (-1.0, [0.0, 0.0, 0.5]),
        (-0.7, [0.0, 0.0, 1.0]),
        (-0.35, [0.0, 1.0, 1.0]),
        (0.0, [1.0, 1.0, 1.0]),
        (0.35, [1.0, 1.0, 0.0]),
        (0.7, [1.0, 0.0, 0.0]),
        (1.0, [0.5, 0.0, 0.0]),
    ];
    let t = t.clamp(-1.0, 1.0);
    let i = STOPS.windows(2).position(|w| t <= w[1].0).unwrap_or(STOPS.len() - 2);
    let ((t0, c0), (t1, c1)) = (STOPS[i], STOPS[i + 1]);
    let f = (t - t0) / (t1 - t0);
    let mix = |k: usize| ((c0[k] + f * (c1[k] - c0[k])) * 255.0).round() as u8;
    Rgb([mix(0), mix(1), mix(2)])
}

/// False-colour rendering, symmetric around zero.
pub fn response_to_rgb(r: &ResponseMap) -> RgbImage {
    let peak = r.max_abs();
    let norm = if peak > 0.0 { peak } else { 1.0 };
    RgbImage::from_fn(r.width() as u32, r.height() as u32, |x, y| {
        jetwhite(r.get(y as usize, x as usize) / norm)
    })
}

pub fn write_response_png(r: &ResponseMap, path: &Path) -> Result<()> {
    Ok(response_to_rgb(r).save_with_format(path, ImageFormat::Png)?)
}
