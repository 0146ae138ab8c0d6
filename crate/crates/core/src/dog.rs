//! Difference-of-Gaussians retinal model.
//!
//! Each truncated Gaussian is renormalised to unit mass over its square
//! window before differencing, so every DoG kernel is zero-sum and uniform
//! regions respond with exactly zero. Responses are ON-centre; negate with
//! [`off_center`] for the OFF-centre polarity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::raster::{BinaryMap, GrayImage, ResponseMap};

/// Round-off floor for filter outputs, relative to the input's peak magnitude.
/// Sums over a uniform window land within a few ulps of zero; anything below
/// this is flushed so that a strict `> 0` binarisation stays clean.
const ROUNDOFF_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DogParams {
    /// Centre Gaussian sigma in pixels.
    pub sigma_c: f64,
    /// Surround-to-centre sigma ratio `s`.
    pub surround_ratio: f64,
    /// Window ratio `h`; the kernel spans `h * sigma_c + 1` pixels.
    pub window_ratio: f64,
}

impl Default for DogParams {
    fn default() -> Self {
        Self { sigma_c: 8.0, surround_ratio: 2.0, window_ratio: 8.0 }
    }
}

impl DogParams {
    pub fn new(sigma_c: f64, surround_ratio: f64, window_ratio: f64) -> Result<Self> {
        let p = Self { sigma_c, surround_ratio, window_ratio };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_c.is_finite() && self.sigma_c > 0.0) {
            return Err(param_err!("sigma_c must be positive, got {}", self.sigma_c));
        }
        if !(self.surround_ratio.is_finite() && self.surround_ratio > 1.0) {
            return Err(param_err!(
                "surround ratio must exceed 1, got {}",
                self.surround_ratio
            ));
        }
        if !(self.window_ratio.is_finite() && self.window_ratio >= 2.0 * self.surround_ratio) {
            return Err(param_err!(
                "window ratio {} must be at least twice the surround ratio {}",
                self.window_ratio,
                self.surround_ratio
            ));
        }
        Ok(())
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_c * self.surround_ratio
    }
}

/// `round(h * sigma_c) + 1`, bumped to the next odd number if needed.
pub fn window_size(p: &DogParams) -> usize {
    let w = (p.window_ratio * p.sigma_c).round() as usize + 1;
    if w.is_multiple_of(2) {
        w + 1
    } else {
        w
    }
}

/// Centre sigmas from `0.5 M` to `3.5 M` in steps of `0.5 M`.
pub fn sigma_stack(mortar_size: usize) -> Vec<f64> {
    (1..=7).map(|k| 0.5 * k as f64 * mortar_size as f64).collect()
}

/// Unnormalised isotropic Gaussian `1/(2 pi s^2) exp(-(x^2+y^2)/(2 s^2))`.
pub fn gaussian_weight(sigma: f64, x: f64, y: f64) -> f64 {
    let two_var = 2.0 * sigma * sigma;
    (-(x * x + y * y) / two_var).exp() / (std::f64::consts::PI * two_var)
}

/// Square, odd-sized filter kernel stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(param_err!("kernel size must be odd, got {size}"));
        }
        if weights.len() != size * size {
            return Err(param_err!("kernel needs {} weights, got {}", size * size, weights.len()));
        }
        Ok(Self { size, weights })
    }

    pub fn identity() -> Self {
        Self { size: 1, weights: vec![1.0] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at row/column offset from the centre.
    pub fn at(&self, dy: isize, dx: isize) -> f64 {
        let r = self.radius() as isize;
        self.weights[((dy + r) * self.size as isize + dx + r) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// 1-D Gaussian sampled at integer offsets and normalised to unit sum.
pub fn gaussian_1d(sigma: f64, size: usize) -> Result<Vec<f64>> {
    if size.is_multiple_of(2) {
        return Err(param_err!("kernel size must be odd, got {size}"));
    }
    if !(sigma > 0.0) {
        return Err(param_err!("sigma must be positive, got {sigma}"));
    }
    let r = (size / 2) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// 2-D Gaussian point-sampled over a `size` x `size` window, unit sum.
pub fn gaussian_kernel(sigma: f64, size: usize) -> Result<Kernel> {
    if size.is_multiple_of(2) {
        return Err(param_err!("kernel size must be odd, got {size}"));
    }
    if !(sigma > 0.0) {
        return Err(param_err!("sigma must be positive, got {sigma}"));
    }
    let r = (size / 2) as isize;
    let mut weights = Vec::with_capacity(size * size);
    for y in -r..=r {
        for x in -r..=r {
            weights.push(gaussian_weight(sigma, x as f64, y as f64));
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Kernel::new(size, weights)
}

pub fn dog_kernel(p: &DogParams) -> Result<Kernel> {
    p.validate()?;
    let size = window_size(p);
    let center = gaussian_kernel(p.sigma_c, size)?;
    let surround = gaussian_kernel(p.sigma_s(), size)?;
    let weights = center
        .weights
        .iter()
        .zip(&surround.weights)
        .map(|(c, s)| c - s)
        .collect();
    Kernel::new(size, weights)
}

/// Padding policy for samples that fall outside the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BorderMode {
    #[default]
    Replicate,
    Zero,
    /// Half-sample symmetric reflection (`-1 -> 0`, `n -> n-1`).
    Mirror,
}

impl BorderMode {
    /// Maps a possibly out-of-range coordinate to a source index; `None` means zero.
    #[inline]
    pub fn resolve(self, i: isize, n: usize) -> Option<usize> {
        let n_i = n as isize;
        if (0..n_i).contains(&i) {
            return Some(i as usize);
        }
        match self {
            BorderMode::Replicate => Some(i.clamp(0, n_i - 1) as usize),
            BorderMode::Zero => None,
            BorderMode::Mirror => {
                let period = 2 * n_i;
                let m = i.rem_euclid(period);
                Some(if m < n_i { m } else { period - 1 - m } as usize)
            }
        }
    }
}

impl fmt::Display for BorderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BorderMode::Replicate => "replicate",
            BorderMode::Zero => "zero",
            BorderMode::Mirror => "mirror",
        })
    }
}

impl FromStr for BorderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicate" => Ok(BorderMode::Replicate),
            "zero" => Ok(BorderMode::Zero),
            "mirror" => Ok(BorderMode::Mirror),
            other => Err(param_err!("unknown border mode '{other}'")),
        }
    }
}

fn flush_roundoff(values: &mut [f64], tol: f64) {
    for v in values.iter_mut() {
        if v.abs() <= tol {
            *v = 0.0;
        }
    }
}

fn peak_abs(img: &GrayImage) -> f64 {
    img.pixels().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Direct 2-D correlation with an arbitrary kernel. Output has the input's size.
pub fn convolve(img: &GrayImage, k: &Kernel, border: BorderMode) -> ResponseMap {
    let (h, w) = (img.height(), img.width());
    let r = k.radius() as isize;
    let mut out = vec![0.0; h * w];
    let col_src: Vec<Vec<Option<usize>>> = (0..w as isize)
        .map(|x| (-r..=r).map(|dx| border.resolve(x + dx, w)).collect())
        .collect();
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ky, dy) in (-r..=r).enumerate() {
                let Some(sy) = border.resolve(y as isize + dy, h) else { continue };
                let row = img.row(sy);
                let krow = &k.weights[ky * k.size..(ky + 1) * k.size];
                for (kw, sx) in krow.iter().zip(&col_src[x]) {
                    if let Some(sx) = sx {
                        acc += kw * row[*sx];
                    }
                }
            }
            out[y * w + x] = acc;
        }
    }
    let abs_sum: f64 = k.weights.iter().map(|v| v.abs()).sum();
    flush_roundoff(&mut out, ROUNDOFF_FLOOR * abs_sum * peak_abs(img));
    ResponseMap::from_parts(h, w, out)
}

/// Horizontal pass of a symmetric 1-D kernel. Rows equal to their predecessor
/// reuse its output.
fn filter_rows(img: &GrayImage, taps: &[f64], border: BorderMode) -> Vec<f64> {
    let (h, w) = (img.height(), img.width());
    let r = taps.len() / 2;
    let mut out = vec![0.0; h * w];
    let mut padded = vec![0.0; w + 2 * r];
    for y in 0..h {
        let row = img.row(y);
        if y > 0 && row == img.row(y - 1) {
            out.copy_within((y - 1) * w..y * w, y * w);
            continue;
        }
        for (i, p) in padded.iter_mut().enumerate() {
            *p = border.resolve(i as isize - r as isize, w).map_or(0.0, |sx| row[sx]);
        }
        let acc = &mut out[y * w..(y + 1) * w];
        let mid = taps[r];
        for (a, p) in acc.iter_mut().zip(&padded[r..r + w]) {
            *a = mid * p;
        }
        for k in 1..=r {
            let g = taps[r + k];
            let left = &padded[r - k..r - k + w];
            let right = &padded[r + k..r + k + w];
            for ((a, l), rr) in acc.iter_mut().zip(left).zip(right) {
                *a += g * (l + rr);
            }
        }
    }
    out
}

/// Vertical pass of a symmetric 1-D kernel, accumulated into `out` with `sign`.
fn filter_cols_into(
    src: &[f64],
    h: usize,
    w: usize,
    taps: &[f64],
    border: BorderMode,
    sign: f64,
    out: &mut [f64],
) {
    let r = taps.len() / 2;
    let zeros = vec![0.0; w];
    let row = |i: isize| -> &[f64] {
        match border.resolve(i, h) {
            Some(sy) => &src[sy * w..(sy + 1) * w],
            None => &zeros,
        }
    };
    for y in 0..h {
        let acc = &mut out[y * w..(y + 1) * w];
        let mid = sign * taps[r];
        for (a, v) in acc.iter_mut().zip(row(y as isize)) {
            *a += mid * v;
        }
        for k in 1..=r {
            let g = sign * taps[r + k];
            let up = row(y as isize - k as isize);
            let down = row(y as isize + k as isize);
            for ((a, u), d) in acc.iter_mut().zip(up).zip(down) {
                *a += g * (u + d);
            }
        }
    }
}

/// DoG response via two separable Gaussian blurs, then their difference.
/// Matches `convolve(img, &dog_kernel(p)?, border)` up to round-off.
pub fn dog_response(img: &GrayImage, p: &DogParams, border: BorderMode) -> Result<ResponseMap> {
    p.validate()?;
    let size = window_size(p);
    let center = gaussian_1d(p.sigma_c, size)?;
    let surround = gaussian_1d(p.sigma_s(), size)?;
    let (h, w) = (img.height(), img.width());
    let mut out = vec![0.0; h * w];
    let tmp = filter_rows(img, &center, border);
    filter_cols_into(&tmp, h, w, &center, border, 1.0, &mut out);
    let tmp = filter_rows(img, &surround, border);
    filter_cols_into(&tmp, h, w, &surround, border, -1.0, &mut out);
    flush_roundoff(&mut out, 2.0 * ROUNDOFF_FLOOR * peak_abs(img));
    Ok(ResponseMap::from_parts(h, w, out))
}

/// One ON-centre response per centre sigma.
pub fn apply_dog_stack(
    img: &GrayImage,
    sigmas: &[f64],
    surround_ratio: f64,
    window_ratio: f64,
    border: BorderMode,
) -> Result<Vec<ResponseMap>> {
    if sigmas.is_empty() {
        return Err(param_err!("sigma stack is empty"));
    }
    if sigmas.windows(2).any(|p| p[1] <= p[0]) {
        return Err(param_err!("sigma stack must be strictly ascending"));
    }
    sigmas
        .iter()
        .map(|&s| dog_response(img, &DogParams::new(s, surround_ratio, window_ratio)?, border))
        .collect()
}

pub fn off_center(r: &ResponseMap) -> ResponseMap {
    let values = r.values().iter().map(|v| -v).collect();
    ResponseMap::from_parts(r.height(), r.width(), values)
}

/// `1` where the response strictly exceeds `threshold`.
pub fn binarize(r: &ResponseMap, threshold: f64) -> BinaryMap {
    BinaryMap::new(
        r.height(),
        r.width(),
        r.values().iter().map(|&v| v > threshold).collect(),
    )
    .expect("dimensions carried over from response map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(sigma_c: f64) -> DogParams {
        DogParams::new(sigma_c, 2.0, 8.0).unwrap()
    }

    #[test]
    fn window_sizes() {
        assert_eq!(window_size(&p(4.0)), 33);
        assert_eq!(window_size(&p(3.0)), 25);
        assert_eq!(window_size(&p(28.0)), 225);
        // 8 * 1.25 + 1 = 11 is odd already; 8 * 1.5 + 1 = 13
        assert_eq!(window_size(&p(1.25)), 11);
        let odd = DogParams::new(2.5, 2.0, 5.0).unwrap();
        // round(12.5) + 1 = 14 -> 15
        assert_eq!(window_size(&odd), 15);
    }

    #[test]
    fn stacks_follow_mortar() {
        assert_eq!(sigma_stack(8), vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0]);
        assert_eq!(sigma_stack(2), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn invalid_params() {
        assert!(DogParams::new(0.0, 2.0, 8.0).is_err());
        assert!(DogParams::new(4.0, 1.0, 8.0).is_err());
        assert!(DogParams::new(4.0, 2.0, 3.9).is_err());
        assert!(gaussian_kernel(1.0, 4).is_err());
        assert!(Kernel::new(2, vec![0.0; 4]).is_err());
    }

    #[test]
    fn gaussian_centre_coefficient() {
        assert_abs_diff_eq!(gaussian_weight(4.0, 0.0, 0.0), 0.009947, epsilon = 1e-6);
        let k = gaussian_kernel(3.0, 1).unwrap();
        assert_eq!(k.weights(), &[1.0]);
    }

    #[test]
    fn dog_signs() {
        let k = dog_kernel(&p(4.0)).unwrap();
        let r = k.radius() as isize;
        assert!(k.at(0, 0) > 0.0);
        assert!(k.at(r, r) < 0.0);
        assert_abs_diff_eq!(k.sum(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn border_resolution() {
        assert_eq!(BorderMode::Replicate.resolve(-3, 5), Some(0));
        assert_eq!(BorderMode::Replicate.resolve(7, 5), Some(4));
        assert_eq!(BorderMode::Zero.resolve(-1, 5), None);
        assert_eq!(BorderMode::Mirror.resolve(-1, 5), Some(0));
        assert_eq!(BorderMode::Mirror.resolve(-2, 5), Some(1));
        assert_eq!(BorderMode::Mirror.resolve(5, 5), Some(4));
        assert_eq!(BorderMode::Mirror.resolve(11, 5), Some(1));
        assert_eq!("mirror".parse::<BorderMode>().unwrap(), BorderMode::Mirror);
        assert!("wrap".parse::<BorderMode>().is_err());
    }

    #[test]
    fn constant_image_gives_zero_response() {
        let img = GrayImage::filled(40, 50, 0.7).unwrap();
        let k = dog_kernel(&p(2.0)).unwrap();
        for border in [BorderMode::Replicate, BorderMode::Mirror] {
            assert!(convolve(&img, &k, border).values().iter().all(|&v| v.abs() < 1e-6));
        }
        let r = dog_response(&img, &p(8.0), BorderMode::Replicate).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
        assert_eq!(binarize(&r, 0.0).count_ones(), 0);
    }

    #[test]
    fn identity_kernel_is_noop() {
        let img = GrayImage::from_fn(7, 9, |y, x| ((y * 3 + x * 5) % 7) as f64 / 7.0).unwrap();
        let r = convolve(&img, &Kernel::identity(), BorderMode::Zero);
        assert_eq!(r.values(), img.pixels());
    }

    #[test]
    fn impulse_response_reproduces_kernel() {
        let k = dog_kernel(&p(1.0)).unwrap();
        let n = 21;
        let c = n / 2;
        let img = GrayImage::from_fn(n, n, |y, x| if y == c && x == c { 1.0 } else { 0.0 }).unwrap();
        let r = convolve(&img, &k, BorderMode::Zero);
        let rad = k.radius() as isize;
        for dy in -rad..=rad {
            for dx in -rad..=rad {
                let v = r.get((c as isize + dy) as usize, (c as isize + dx) as usize);
                assert_abs_diff_eq!(v, k.at(dy, dx), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn separable_matches_direct() {
        let img = GrayImage::from_fn(37, 45, |y, x| {
            if (x / 9 + y / 11) % 2 == 0 { 0.0 } else if y % 11 == 10 { 0.5 } else { 1.0 }
        })
        .unwrap();
        for border in [BorderMode::Replicate, BorderMode::Zero, BorderMode::Mirror] {
            let params = p(2.0);
            let direct = convolve(&img, &dog_kernel(&params).unwrap(), border);
            let fast = dog_response(&img, &params, border).unwrap();
            for (a, b) in direct.values().iter().zip(fast.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn off_center_flips_binarization() {
        let img = GrayImage::from_fn(30, 30, |y, x| if x < 15 { 0.2 } else if y < 10 { 0.9 } else { 0.5 }).unwrap();
        let on = dog_response(&img, &p(1.5), BorderMode::Replicate).unwrap();
        let off = off_center(&on);
        assert_eq!(off_center(&off), on);
        let (b_on, b_off) = (binarize(&on, 0.0), binarize(&off, 0.0));
        for (i, v) in on.values().iter().enumerate() {
            if *v != 0.0 {
                assert_ne!(b_on.bits()[i], b_off.bits()[i]);
            }
        }
    }

    #[test]
    fn binarize_is_strict() {
        let neg = ResponseMap::new(2, 2, vec![-1.0, -0.5, -1e-3, -2.0]).unwrap();
        assert_eq!(binarize(&neg, 0.0).count_ones(), 0);
        let zero = ResponseMap::new(2, 2, vec![0.0; 4]).unwrap();
        assert_eq!(binarize(&zero, 0.0).count_ones(), 0);
    }

    #[test]
    fn stack_validation() {
        let img = GrayImage::filled(10, 10, 0.0).unwrap();
        assert!(apply_dog_stack(&img, &[], 2.0, 8.0, BorderMode::Replicate).is_err());
        assert!(apply_dog_stack(&img, &[2.0, 1.0], 2.0, 8.0, BorderMode::Replicate).is_err());
        let one = apply_dog_stack(&img, &[1.0], 2.0, 8.0, BorderMode::Replicate).unwrap();
        assert_eq!(one.len(), 1);
    }
}
