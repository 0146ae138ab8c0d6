//! Orientation bucketing and per-scale tilt statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::hough::LineSegment;

pub const HALF_WIDTH_DEG: f64 = 22.5;

/// Reference orientations. Angles are in image coordinates (y down), so D1
/// at 45 degrees runs from top-left to bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bucket {
    H,
    V,
    D1,
    D2,
}

impl Bucket {
    pub const ALL: [Bucket; 4] = [Bucket::H, Bucket::V, Bucket::D1, Bucket::D2];

    pub fn reference_deg(self) -> f64 {
        match self {
            Bucket::H => 0.0,
            Bucket::V => 90.0,
            Bucket::D1 => 45.0,
            Bucket::D2 => 135.0,
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Bucket::D1 | Bucket::D2)
    }

    pub fn mirrored(self) -> Bucket {
        match self {
            Bucket::D1 => Bucket::D2,
            Bucket::D2 => Bucket::D1,
            b => b,
        }
    }

    /// Axis label used when diagonals are tabulated together.
    pub fn axis(self) -> &'static str {
        match self {
            Bucket::H => "H",
            Bucket::V => "V",
            Bucket::D1 | Bucket::D2 => "D",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bucket::H => "H",
            Bucket::V => "V",
            Bucket::D1 => "D1",
            Bucket::D2 => "D2",
        };
        f.write_str(s)
    }
}

impl FromStr for Bucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(Bucket::H),
            "V" => Ok(Bucket::V),
            "D1" => Ok(Bucket::D1),
            "D2" => Ok(Bucket::D2),
            _ => Err(param_err!("unknown bucket '{s}'")),
        }
    }
}

/// Direction of `p1 -> p2` in `[0, 180)` degrees.
pub fn segment_angle(seg: &LineSegment) -> Result<f64> {
    let dx = seg.p2.x as f64 - seg.p1.x as f64;
    let dy = seg.p2.y as f64 - seg.p1.y as f64;
    if dx == 0.0 && dy == 0.0 {
        return Err(param_err!("zero-length segment at ({}, {})", seg.p1.x, seg.p1.y));
    }
    let a = dy.atan2(dx).to_degrees().rem_euclid(180.0);
    // rem_euclid can round up to exactly 180 for tiny negative inputs
    Ok(if a >= 180.0 { 0.0 } else { a })
}

/// Bucket and signed deviation in `[-22.5, 22.5)`. Intervals are half-open
/// on the right, so 157.5 belongs to H (as -22.5).
pub fn bucket_of(angle_deg: f64) -> (Bucket, f64) {
    let a = angle_deg.rem_euclid(180.0);
    if a < 22.5 {
        (Bucket::H, a)
    } else if a < 67.5 {
        (Bucket::D1, a - 45.0)
    } else if a < 112.5 {
        (Bucket::V, a - 90.0)
    } else if a < 157.5 {
        (Bucket::D2, a - 135.0)
    } else {
        (Bucket::H, a - 180.0)
    }
}

/// Summary for one (scale, bucket) cell. Statistics are `None` when the
/// bucket is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltStats {
    pub scale: f64,
    pub bucket: Bucket,
    pub count: usize,
    pub mean_abs_dev: Option<f64>,
    pub std_dev: Option<f64>,
    pub std_err: Option<f64>,
    pub deviations: Vec<f64>,
}

impl TiltStats {
    pub fn from_deviations(scale: f64, bucket: Bucket, deviations: Vec<f64>) -> Self {
        let n = deviations.len();
        let (mean, std, se) = if n == 0 {
            (None, None, None)
        } else {
            let abs: Vec<f64> = deviations.iter().map(|d| d.abs()).collect();
            let mean = abs.iter().sum::<f64>() / n as f64;
            let var = abs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            (Some(mean), Some(std), Some(std / (n as f64).sqrt()))
        };
        Self { scale, bucket, count: n, mean_abs_dev: mean, std_dev: std, std_err: se, deviations }
    }
}

/// Segments detected at one DoG scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSegments {
    pub scale: f64,
    pub segments: Vec<LineSegment>,
}

fn classified(seg: &LineSegment) -> Result<(Bucket, f64)> {
    segment_angle(seg).map(bucket_of)
}

/// Four rows per scale, in input scale order then H, V, D1, D2.
pub fn aggregate(per_scale: &[ScaleSegments]) -> Result<Vec<TiltStats>> {
    let mut rows = Vec::with_capacity(per_scale.len() * 4);
    for ss in per_scale {
        let mut devs: [Vec<f64>; 4] = Default::default();
        for seg in &ss.segments {
            let (b, d) = classified(seg)?;
            devs[b as usize].push(d);
        }
        for (b, d) in Bucket::ALL.into_iter().zip(devs) {
            rows.push(TiltStats::from_deviations(ss.scale, b, d));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub scale: f64,
    pub bucket: Bucket,
    pub signed_dev_deg: f64,
    pub length_px: f64,
}

/// One row per segment.
pub fn distribution_table(per_scale: &[ScaleSegments]) -> Result<Vec<DistributionRow>> {
    let mut rows = Vec::new();
    for ss in per_scale {
        for seg in &ss.segments {
            let (bucket, signed_dev_deg) = classified(seg)?;
            rows.push(DistributionRow { scale: ss.scale, bucket, signed_dev_deg, length_px: seg.length_px });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hough::PixelPos;
    use approx::assert_abs_diff_eq;

    fn seg(x1: u32, y1: u32, x2: u32, y2: u32) -> LineSegment {
        let (dx, dy) = (x2 as f64 - x1 as f64, y2 as f64 - y1 as f64);
        LineSegment {
            p1: PixelPos::new(x1, y1),
            p2: PixelPos::new(x2, y2),
            rho_bin: 0,
            theta_bin: 0,
            theta_deg: 0.0,
            rho: 0.0,
            length_px: dx.hypot(dy),
        }
    }

    /// Segment from the origin at `deg` degrees, long enough that the
    /// integer endpoint rounds to within a hundredth of a degree.
    fn at_angle(deg: f64) -> LineSegment {
        let r = 100_000.0;
        let (s, c) = deg.to_radians().sin_cos();
        let (x0, y0) = (200_000.0, 200_000.0);
        seg(x0 as u32, y0 as u32, (x0 + r * c).round() as u32, (y0 + r * s).round() as u32)
    }

    #[test]
    fn angles_of_axis_segments() {
        assert_eq!(segment_angle(&seg(0, 0, 10, 0)).unwrap(), 0.0);
        assert_eq!(segment_angle(&seg(0, 0, 0, 10)).unwrap(), 90.0);
        assert_abs_diff_eq!(segment_angle(&seg(0, 0, 10, 10)).unwrap(), 45.0, epsilon = 1e-12);
        assert_abs_diff_eq!(segment_angle(&seg(10, 10, 0, 0)).unwrap(), 45.0, epsilon = 1e-12);
        assert!(segment_angle(&seg(3, 3, 3, 3)).is_err());
    }

    #[test]
    fn bucket_examples() {
        assert_eq!(bucket_of(7.0), (Bucket::H, 7.0));
        assert_eq!(bucket_of(95.0), (Bucket::V, 5.0));
        assert_eq!(bucket_of(157.5), (Bucket::H, -22.5));
        assert_eq!(bucket_of(177.0).0, Bucket::H);
        assert_abs_diff_eq!(bucket_of(177.0).1, -3.0, epsilon = 1e-12);
        assert_eq!(bucket_of(22.5), (Bucket::D1, -22.5));
        assert_eq!(bucket_of(112.5), (Bucket::D2, -22.5));
    }

    #[test]
    fn aggregate_single_and_pair() {
        let rows = aggregate(&[ScaleSegments { scale: 8.0, segments: vec![at_angle(7.0)] }]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].bucket, rows[0].count), (Bucket::H, 1));
        assert_abs_diff_eq!(rows[0].mean_abs_dev.unwrap(), 7.0, epsilon = 1e-3);
        assert_eq!(rows[0].std_dev, Some(0.0));
        assert_eq!(rows[1].count, 0);
        assert!(rows[1].mean_abs_dev.is_none());

        let rows = aggregate(&[ScaleSegments { scale: 4.0, segments: vec![at_angle(5.0), at_angle(9.0)] }]).unwrap();
        assert_abs_diff_eq!(rows[0].mean_abs_dev.unwrap(), 7.0, epsilon = 1e-3);
        assert_abs_diff_eq!(rows[0].std_dev.unwrap(), 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(rows[0].std_err.unwrap(), 2.0 / 2f64.sqrt(), epsilon = 1e-3);
    }

    #[test]
    fn empty_input_rows_are_flagged() {
        let rows = aggregate(&[ScaleSegments { scale: 4.0, segments: vec![] }]).unwrap();
        assert!(rows.iter().all(|r| r.count == 0 && r.mean_abs_dev.is_none()));
        assert!(aggregate(&[]).unwrap().is_empty());
        assert!(distribution_table(&[]).unwrap().is_empty());
    }

    #[test]
    fn distribution_mirrors_swap_diagonals() {
        let segs = vec![at_angle(40.0), at_angle(3.0)];
        let width = 1_000_000;
        let mirrored: Vec<_> = segs
            .iter()
            .map(|s| seg(width - s.p1.x, s.p1.y, width - s.p2.x, s.p2.y))
            .collect();
        let a = distribution_table(&[ScaleSegments { scale: 8.0, segments: segs }]).unwrap();
        let b = distribution_table(&[ScaleSegments { scale: 8.0, segments: mirrored }]).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.bucket.mirrored(), y.bucket);
            assert_abs_diff_eq!(x.signed_dev_deg, -y.signed_dev_deg, epsilon = 1e-9);
        }
        assert_eq!(a[0].bucket.axis(), "D");
    }
}
