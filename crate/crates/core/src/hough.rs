//! Straight-line Hough transform over binary edge maps, with iterative peak
//! suppression and gap-bridged segment extraction.
//!
//! Coordinates: `x` is the column, `y` the row (growing downward), origin at
//! the top-left pixel centre. A bin `(rho, theta)` collects pixels with
//! `x cos(theta) + y sin(theta)` inside `[rho - step/2, rho + step/2)`,
//! `theta` in `[0, 180)` degrees.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::raster::BinaryMap;

#[derive(Debug, Clone, PartialEq)]
pub struct HoughAccumulator {
    rho_step: f64,
    theta_step_deg: f64,
    /// Bin index of `rho = 0`; the rho axis spans `-q..=q` steps.
    q: usize,
    n_theta: usize,
    cos_sin: Vec<(f64, f64)>,
    /// Theta-major: `votes[t * n_rho + r]`.
    votes: Vec<u32>,
}

impl HoughAccumulator {
    fn with_geometry(height: usize, width: usize, rho_step: f64, theta_step_deg: f64) -> Result<Self> {
        if !(rho_step > 0.0) {
            return Err(param_err!("rho step must be positive, got {rho_step}"));
        }
        let bins = 180.0 / theta_step_deg;
        if !(theta_step_deg > 0.0) || (bins - bins.round()).abs() > 1e-9 {
            return Err(param_err!("theta step {theta_step_deg} must divide 180 degrees"));
        }
        let n_theta = bins.round() as usize;
        let diag = (((height - 1).pow(2) + (width - 1).pow(2)) as f64).sqrt();
        let q = (diag / rho_step).ceil() as usize;
        let cos_sin = (0..n_theta)
            .map(|t| {
                let (s, c) = (t as f64 * theta_step_deg).to_radians().sin_cos();
                (c, s)
            })
            .collect();
        Ok(Self {
            rho_step,
            theta_step_deg,
            q,
            n_theta,
            cos_sin,
            votes: vec![0; (2 * q + 1) * n_theta],
        })
    }

    pub fn n_rho(&self) -> usize {
        2 * self.q + 1
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn rho_step(&self) -> f64 {
        self.rho_step
    }

    pub fn theta_step_deg(&self) -> f64 {
        self.theta_step_deg
    }

    pub fn rho_min(&self) -> f64 {
        -(self.q as f64) * self.rho_step
    }

    pub fn rho_max(&self) -> f64 {
        self.q as f64 * self.rho_step
    }

    pub fn rho_of(&self, rho_bin: usize) -> f64 {
        (rho_bin as f64 - self.q as f64) * self.rho_step
    }

    pub fn theta_deg(&self, theta_bin: usize) -> f64 {
        theta_bin as f64 * self.theta_step_deg
    }

    /// Cosine and sine of the bin's normal angle.
    pub fn cos_sin(&self, theta_bin: usize) -> (f64, f64) {
        self.cos_sin[theta_bin]
    }

    /// `(cos/step, sin/step, q + 1/2)` for `theta_bin`.
    #[inline]
    fn scaled(&self, theta_bin: usize) -> (f64, f64, f64) {
        let (c, s) = self.cos_sin[theta_bin];
        (c / self.rho_step, s / self.rho_step, self.q as f64 + 0.5)
    }

    /// Rho bin hit by pixel `(x, y)` at `theta_bin`: `rho / step + q + 1/2`,
    /// truncated. The sum is never negative, so truncation rounds half up.
    #[inline]
    pub fn rho_bin(&self, x: f64, y: f64, theta_bin: usize) -> usize {
        let (cx, sy, offset) = self.scaled(theta_bin);
        (x * cx + (y * sy + offset)) as i64 as usize
    }

    pub fn votes(&self, rho_bin: usize, theta_bin: usize) -> u32 {
        self.votes[theta_bin * self.n_rho() + rho_bin]
    }

    pub fn total_votes(&self) -> u64 {
        self.votes.iter().map(|&v| v as u64).sum()
    }

    pub fn max_votes(&self) -> u32 {
        self.votes.iter().copied().max().unwrap_or(0)
    }

    /// Non-zero bins as `(rho_bin, theta_bin, votes)`, theta-major.
    pub fn nonzero_bins(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let n_rho = self.n_rho();
        self.votes
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(move |(i, &v)| (i % n_rho, i / n_rho, v))
    }
}

/// Votes every set pixel into every theta bin.
pub fn hough_transform(bm: &BinaryMap, rho_step: f64, theta_step_deg: f64) -> Result<HoughAccumulator> {
    if bm.height() == 0 || bm.width() == 0 {
        return Err(param_err!("edge map is empty"));
    }
    let mut acc = HoughAccumulator::with_geometry(bm.height(), bm.width(), rho_step, theta_step_deg)?;
    // set pixels grouped by row: (y, xs)
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for y in 0..bm.height() {
        let xs: Vec<f64> = (0..bm.width()).filter(|&x| bm.get(y, x)).map(|x| x as f64).collect();
        if !xs.is_empty() {
            rows.push((y as f64, xs));
        }
    }
    let n_rho = acc.n_rho();
    for t in 0..acc.n_theta {
        let (cx, sy, offset) = acc.scaled(t);
        let column = &mut acc.votes[t * n_rho..(t + 1) * n_rho];
        for (y, xs) in &rows {
            let base = y * sy + offset;
            for &x in xs {
                column[(x * cx + base) as i64 as usize] += 1;
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    pub rho_bin: usize,
    pub theta_bin: usize,
    pub votes: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoughParams {
    pub num_peaks: usize,
    pub threshold: u32,
    /// `(rho bins, theta bins)` suppression window; `None` derives it from
    /// the accumulator size.
    pub nhood: Option<(usize, usize)>,
    pub fill_gap: f64,
    pub min_length: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self { num_peaks: 100, threshold: 3, nhood: None, fill_gap: 40.0, min_length: 450.0 }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        if let Some((r, t)) = self.nhood {
            if r.is_multiple_of(2) || t.is_multiple_of(2) {
                return Err(param_err!("neighbourhood size must be odd, got {r}x{t}"));
            }
        }
        if !(self.fill_gap >= 0.0) || !(self.min_length >= 0.0) {
            return Err(param_err!("fill gap and min length must be non-negative"));
        }
        Ok(())
    }

    pub fn nhood_for(&self, acc: &HoughAccumulator) -> (usize, usize) {
        self.nhood.unwrap_or_else(|| default_nhood(acc))
    }
}

/// Smallest odd size at or above one fiftieth of each accumulator dimension.
pub fn default_nhood(acc: &HoughAccumulator) -> (usize, usize) {
    let odd = |n: usize| {
        let half = (n as f64 / 50.0 / 2.0).ceil() as usize;
        (2 * half + 1).max(1)
    };
    (odd(acc.n_rho()), odd(acc.n_theta()))
}

/// Repeatedly takes the strongest bin, then zeroes its neighbourhood. The
/// theta axis wraps: stepping past 180 degrees lands on the mirrored rho bin.
pub fn find_peaks(acc: &HoughAccumulator, p: &HoughParams) -> Result<Vec<Peak>> {
    p.validate()?;
    let (nh_rho, nh_theta) = p.nhood_for(acc);
    let (hr, ht) = ((nh_rho / 2) as isize, (nh_theta / 2) as isize);
    let n_rho = acc.n_rho() as isize;
    let n_theta = acc.n_theta as isize;
    let mut work = acc.votes.clone();
    let n = acc.n_rho();
    // first maximum of each theta column
    let column_best = |work: &[u32], t: usize| -> (u32, usize) {
        let col = &work[t * n..(t + 1) * n];
        col.iter()
            .enumerate()
            .fold((0, 0), |best, (r, &v)| if v > best.0 { (v, r) } else { best })
    };
    let mut best: Vec<(u32, usize)> = (0..acc.n_theta).map(|t| column_best(&work, t)).collect();
    let mut peaks = Vec::new();
    let floor = p.threshold.max(1);
    while peaks.len() < p.num_peaks {
        // ties go to smaller theta, then smaller rho
        let (t0, &(votes, r0)) = best
            .iter()
            .enumerate()
            .fold((0, &best[0]), |acc_best, cur| if cur.1 .0 > acc_best.1 .0 { cur } else { acc_best });
        if votes < floor {
            break;
        }
        peaks.push(Peak { rho_bin: r0, theta_bin: t0, votes });
        let (r0, t0) = (r0 as isize, t0 as isize);
        for dt in -ht..=ht {
            let mut touched = None;
            for dr in -hr..=hr {
                let mut r = r0 + dr;
                if r < 0 || r >= n_rho {
                    continue;
                }
                let mut t = t0 + dt;
                if t < 0 || t >= n_theta {
                    t = t.rem_euclid(n_theta);
                    r = n_rho - 1 - r;
                }
                work[(t * n_rho + r) as usize] = 0;
                touched = Some(t as usize);
            }
            if let Some(t) = touched {
                best[t] = column_best(&work, t);
            }
        }
    }
    Ok(peaks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PixelPos {
    pub x: u32,
    pub y: u32,
}

impl PixelPos {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub p1: PixelPos,
    pub p2: PixelPos,
    pub rho_bin: usize,
    pub theta_bin: usize,
    pub theta_deg: f64,
    pub rho: f64,
    pub length_px: f64,
}

impl LineSegment {
    pub fn midpoint(&self) -> (f64, f64) {
        (
            (self.p1.x as f64 + self.p2.x as f64) / 2.0,
            (self.p1.y as f64 + self.p2.y as f64) / 2.0,
        )
    }
}

fn distance(a: PixelPos, b: PixelPos) -> f64 {
    let dx = a.x as f64 - b.x as f64;
    let dy = a.y as f64 - b.y as f64;
    dx.hypot(dy)
}

/// Turns each peak into the runs of its member pixels. Pixels are ordered by
/// their position along the line; a jump larger than `fill_gap` starts a new
/// run, and runs shorter than `min_length` (endpoint distance) are dropped.
pub fn extract_segments(
    bm: &BinaryMap,
    acc: &HoughAccumulator,
    peaks: &[Peak],
    p: &HoughParams,
) -> Result<Vec<LineSegment>> {
    p.validate()?;
    let pixels = bm.set_pixels();
    let n_rho = acc.n_rho();
    let mut members: Vec<Vec<PixelPos>> = vec![Vec::new(); peaks.len()];

    let mut theta_bins: Vec<usize> = peaks.iter().map(|pk| pk.theta_bin).collect();
    theta_bins.sort_unstable();
    theta_bins.dedup();
    let mut lookup: Vec<Option<usize>> = vec![None; n_rho];
    for &t in &theta_bins {
        for (i, pk) in peaks.iter().enumerate().filter(|(_, pk)| pk.theta_bin == t) {
            if pk.rho_bin >= n_rho || t >= acc.n_theta {
                return Err(param_err!("peak ({}, {}) outside accumulator", pk.rho_bin, t));
            }
            lookup[pk.rho_bin] = Some(i);
        }
        for &(x, y) in &pixels {
            if let Some(i) = lookup[acc.rho_bin(x as f64, y as f64, t)] {
                members[i].push(PixelPos::new(x, y));
            }
        }
        for pk in peaks.iter().filter(|pk| pk.theta_bin == t) {
            lookup[pk.rho_bin] = None;
        }
    }

    let mut segments = Vec::new();
    for (pk, mut pts) in peaks.iter().zip(members) {
        if pts.is_empty() {
            continue;
        }
        let (c, s) = acc.cos_sin(pk.theta_bin);
        // direction along the line: (sin, -cos)
        let along = |pp: &PixelPos| pp.x as f64 * s - pp.y as f64 * c;
        pts.sort_by(|a, b| along(a).total_cmp(&along(b)).then(a.cmp(b)));
        let mut start = 0;
        for i in 1..=pts.len() {
            let split = i == pts.len() || along(&pts[i]) - along(&pts[i - 1]) > p.fill_gap;
            if !split {
                continue;
            }
            let (a, b) = (pts[start], pts[i - 1]);
            let length_px = distance(a, b);
            if length_px >= p.min_length {
                segments.push(LineSegment {
                    p1: a,
                    p2: b,
                    rho_bin: pk.rho_bin,
                    theta_bin: pk.theta_bin,
                    theta_deg: acc.theta_deg(pk.theta_bin),
                    rho: acc.rho_of(pk.rho_bin),
                    length_px,
                });
            }
            start = i;
        }
    }
    Ok(segments)
}

/// Accumulator, peak search and segment extraction with 1 px / 1 degree bins.
pub fn detect_segments(bm: &BinaryMap, p: &HoughParams) -> Result<Vec<LineSegment>> {
    let acc = hough_transform(bm, 1.0, 1.0)?;
    let peaks = find_peaks(&acc, p)?;
    extract_segments(bm, &acc, &peaks, p)
}
