//! Independent oracles shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cafewall::BinaryMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SegmentKey = (u32, u32, u32, u32, usize, usize);

/// Kernel built straight from the Gaussian formula, independent of the
/// library's 1-D factorisation.
pub fn oracle_kernel(sigma_c: f64, s: f64, h: f64) -> (usize, Vec<f64>) {
    let mut size = (h * sigma_c).round() as usize + 1;
    if size.is_multiple_of(2) {
        size += 1;
    }
    let r = (size / 2) as f64;
    let gauss = |sigma: f64| {
        let mut g: Vec<f64> = (0..size * size)
            .map(|i| {
                let (y, x) = ((i / size) as f64 - r, (i % size) as f64 - r);
                (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let total: f64 = g.iter().sum();
        g.iter_mut().for_each(|v| *v /= total);
        g
    };
    let (c, sur) = (gauss(sigma_c), gauss(s * sigma_c));
    (size, c.iter().zip(&sur).map(|(a, b)| a - b).collect())
}

/// Vote table and segment list computed by exhaustive enumeration of every
/// (rho, theta) cell with 1 px / 1 degree bins.
pub struct Oracle {
    pub n_rho: usize,
    pub votes: Vec<u32>, // theta-major
    pub segments: BTreeSet<SegmentKey>,
}

pub fn oracle(bm: &BinaryMap, fill_gap: f64, min_length: f64) -> Oracle {
    let (h, w) = (bm.height(), bm.width());
    let diag = (((h - 1) * (h - 1) + (w - 1) * (w - 1)) as f64).sqrt();
    let q = diag.ceil() as usize;
    let n_rho = 2 * q + 1;
    let mut on = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if bm.get(y, x) {
                on.push((x as u32, y as u32));
            }
        }
    }
    let trig: Vec<(f64, f64)> = (0..180).map(|t| {
        let r = (t as f64).to_radians();
        (r.cos(), r.sin())
    }).collect();
    let bin = |x: u32, y: u32, t: usize| {
        let (c, s) = trig[t];
        (x as f64 * c + (y as f64 * s + q as f64 + 0.5)) as usize
    };
    let mut votes = vec![0u32; 180 * n_rho];
    let mut cells: Vec<Vec<Vec<(u32, u32)>>> = vec![vec![Vec::new(); n_rho]; 180];
    for &(x, y) in &on {
        for t in 0..180 {
            let r = bin(x, y, t);
            votes[t * n_rho + r] += 1;
            cells[t][r].push((x, y));
        }
    }
    let mut segments = BTreeSet::new();
    for (t, row) in cells.iter_mut().enumerate() {
        let (c, s) = trig[t];
        for (r, pts) in row.iter_mut().enumerate() {
            if pts.is_empty() {
                continue;
            }
            let along = |p: &(u32, u32)| p.0 as f64 * s - p.1 as f64 * c;
            pts.sort_by(|a, b| along(a).total_cmp(&along(b)).then(a.cmp(b)));
            let mut runs: Vec<Vec<(u32, u32)>> = vec![vec![pts[0]]];
            for win in pts.windows(2) {
                if along(&win[1]) - along(&win[0]) > fill_gap {
                    runs.push(Vec::new());
                }
                runs.last_mut().unwrap().push(win[1]);
            }
            for run in runs {
                let (a, b) = (run[0], *run.last().unwrap());
                let len = (a.0 as f64 - b.0 as f64).hypot(a.1 as f64 - b.1 as f64);
                if len >= min_length {
                    segments.insert((a.0, a.1, b.0, b.1, r, t));
                }
            }
        }
    }
    Oracle { n_rho, votes, segments }
}

pub fn random_map(seed: u64, h: usize, w: usize) -> BinaryMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = rng.random_range(0.02..0.3);
    let mut bm = BinaryMap::from_fn(h, w, |_, _| rng.random_bool(density));
    // a few straight strokes so long segments exist
    for _ in 0..rng.random_range(0..4) {
        let (x0, y0) = (rng.random_range(0..w) as f64, rng.random_range(0..h) as f64);
        let ang = rng.random_range(0.0..std::f64::consts::PI);
        for k in 0..40 {
            let (x, y) = (x0 + k as f64 * ang.cos(), y0 + k as f64 * ang.sin());
            if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                bm.set(y as usize, x as usize, true);
            }
        }
    }
    bm
}
