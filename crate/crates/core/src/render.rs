//! Debug and figure renderings: segment overlays and accumulator heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};

use crate::error::Result;
use crate::hough::{HoughAccumulator, LineSegment};
use crate::raster::BinaryMap;

pub const SEGMENT_COLOR: Rgb<u8> = Rgb([0, 200, 0]);
pub const LONGEST_COLOR: Rgb<u8> = Rgb([0, 64, 255]);

fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, color);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Edge map in gray with segments drawn on top; the longest one stands out.
pub fn overlay(bm: &BinaryMap, segments: &[LineSegment]) -> RgbImage {
    let mut img = RgbImage::from_fn(bm.width() as u32, bm.height() as u32, |x, y| {
        if bm.get(y as usize, x as usize) { Rgb([150, 150, 150]) } else { Rgb([0, 0, 0]) }
    });
    let longest = segments
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.length_px.total_cmp(&b.1.length_px).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    for (i, s) in segments.iter().enumerate() {
        let color = if Some(i) == longest { LONGEST_COLOR } else { SEGMENT_COLOR };
        for w in -1i64..=1 {
            draw_line(
                &mut img,
                (s.p1.x as i64, s.p1.y as i64 + w),
                (s.p2.x as i64, s.p2.y as i64 + w),
                color,
            );
        }
    }
    img
}

pub fn write_overlay(bm: &BinaryMap, segments: &[LineSegment], path: &Path) -> Result<()> {
    Ok(overlay(bm, segments).save_with_format(path, ImageFormat::Png)?)
}

/// Votes as a heatmap: theta along x, rho along y, brightness ~ sqrt(votes).
pub fn accumulator_heatmap(acc: &HoughAccumulator) -> RgbImage {
    let peak = (acc.max_votes().max(1) as f64).sqrt();
    RgbImage::from_fn(acc.n_theta() as u32, acc.n_rho() as u32, |t, r| {
        let v = (acc.votes(r as usize, t as usize) as f64).sqrt() / peak;
        let b = (v * 255.0).round() as u8;
        Rgb([b, b, (b as f64 * 0.6) as u8])
    })
}

/// `rhoBin,thetaBin,votes` for every non-empty bin.
pub fn accumulator_csv(acc: &HoughAccumulator) -> String {
    let mut out = String::from("rhoBin,thetaBin,votes\n");
    for (r, t, v) in acc.nonzero_bins() {
        let _ = writeln!(out, "{r},{t},{v}");
    }
    out
}
