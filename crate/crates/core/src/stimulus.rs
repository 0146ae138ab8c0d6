//! Parametric Cafe Wall patterns and "foveal" crop sampling.
//!
//! Layout: `rows` bands of square tiles separated by horizontal mortar
//! strips. There is no border mortar and no vertical mortar, so the image is
//! `rows*T + (rows-1)*M` pixels high and `cols*T` wide. Every band starts
//! with a dark tile at its own phase; odd bands are displaced by `row_shift`
//! pixels, giving the classic back-and-forth staggering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::raster::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub rows: usize,
    pub cols: usize,
    pub tile_size: usize,
    pub mortar_size: usize,
    pub row_shift: usize,
    pub mortar_lum: f64,
    pub dark_lum: f64,
    pub light_lum: f64,
}

impl Default for StimulusSpec {
    /// Cafe Wall 9x14, 200 px tiles, 8 px mortar, half-tile shift.
    fn default() -> Self {
        Self::with_geometry(9, 14, 200, 8)
    }
}

impl StimulusSpec {
    /// Geometry with default luminances (0 / 0.5 / 1) and a half-tile shift.
    pub fn with_geometry(rows: usize, cols: usize, tile_size: usize, mortar_size: usize) -> Self {
        Self {
            rows,
            cols,
            tile_size,
            mortar_size,
            row_shift: tile_size / 2,
            mortar_lum: 0.5,
            dark_lum: 0.0,
            light_lum: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.tile_size == 0 {
            return Err(param_err!(
                "rows, cols and tile size must be >= 1 (got {}x{} T{})",
                self.rows,
                self.cols,
                self.tile_size
            ));
        }
        if self.row_shift >= self.tile_size {
            return Err(param_err!(
                "row shift {} must be smaller than tile size {}",
                self.row_shift,
                self.tile_size
            ));
        }
        let lums = [self.dark_lum, self.mortar_lum, self.light_lum];
        if lums.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(param_err!("luminances must lie in [0, 1]"));
        }
        if !(self.dark_lum < self.mortar_lum && self.mortar_lum < self.light_lum) {
            return Err(param_err!(
                "need dark < mortar < light luminance (got {} / {} / {})",
                self.dark_lum,
                self.mortar_lum,
                self.light_lum
            ));
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.rows * self.tile_size + self.rows.saturating_sub(1) * self.mortar_size
    }

    pub fn width(&self) -> usize {
        self.cols * self.tile_size
    }

    /// `cafewall_{rows}x{cols}_T{tile}_M{mortar}`
    pub fn name(&self) -> String {
        format!(
            "cafewall_{}x{}_T{}_M{}",
            self.rows, self.cols, self.tile_size, self.mortar_size
        )
    }

    /// Pixel window covering `tile_rows` x `tile_cols` tiles, interior mortar included.
    pub fn window_px(&self, tile_rows: usize, tile_cols: usize) -> (usize, usize) {
        (
            tile_rows * self.tile_size + tile_rows.saturating_sub(1) * self.mortar_size,
            tile_cols * self.tile_size,
        )
    }

    /// Horizontal phase of tile band `row`.
    fn band_offset(&self, row: usize) -> usize {
        if row % 2 == 1 {
            self.row_shift
        } else {
            0
        }
    }
}

pub fn generate_cafe_wall(spec: &StimulusSpec) -> Result<GrayImage> {
    spec.validate()?;
    let period = spec.tile_size + spec.mortar_size;
    let width = spec.width();
    let mut pixels = Vec::with_capacity(spec.height() * width);
    for y in 0..spec.height() {
        let band = y / period;
        if y % period >= spec.tile_size {
            pixels.extend(std::iter::repeat_n(spec.mortar_lum, width));
            continue;
        }
        let offset = spec.band_offset(band) as isize;
        let t = spec.tile_size as isize;
        pixels.extend((0..width).map(|x| {
            // Tiles displaced past the left edge wrap around.
            let tile = (x as isize - offset).div_euclid(t);
            if tile.rem_euclid(2) == 0 {
                spec.dark_lum
            } else {
                spec.light_lum
            }
        }));
    }
    GrayImage::new(spec.height(), width, pixels)
}

pub fn crop(img: &GrayImage, top: usize, left: usize, height: usize, width: usize) -> Result<GrayImage> {
    img.crop(top, left, height, width)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropSpec {
    pub crop_rows: usize,
    pub crop_cols: usize,
    pub sample_count: usize,
    pub offset_px: usize,
    pub seed: u64,
}

impl CropSpec {
    /// 50 samples shifted by 4 px, as used for every foveal crop size.
    pub fn foveal(crop_rows: usize, crop_cols: usize, seed: u64) -> Self {
        Self { crop_rows, crop_cols, sample_count: 50, offset_px: 4, seed }
    }

    /// `4x5` style label.
    pub fn label(&self) -> String {
        format!("{}x{}", self.crop_rows, self.crop_cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CropSample {
    pub index: usize,
    pub top: usize,
    pub left: usize,
    pub image: GrayImage,
}

/// Draws one random top-left corner and slides the window right by
/// `offset_px` for each further sample.
pub fn sample_crops(img: &GrayImage, spec: &StimulusSpec, cs: &CropSpec) -> Result<Vec<CropSample>> {
    spec.validate()?;
    if cs.crop_rows == 0 || cs.crop_cols == 0 || cs.sample_count == 0 {
        return Err(param_err!("crop size and sample count must be >= 1"));
    }
    if cs.sample_count > 1 && cs.offset_px == 0 {
        return Err(param_err!("offset must be positive when taking several samples"));
    }
    if (cs.sample_count - 1) * cs.offset_px > spec.tile_size {
        return Err(param_err!(
            "{} samples at {} px travel more than one tile ({} px)",
            cs.sample_count,
            cs.offset_px,
            spec.tile_size
        ));
    }
    let (h, w) = spec.window_px(cs.crop_rows, cs.crop_cols);
    let travel = (cs.sample_count - 1) * cs.offset_px;
    if h > img.height() || w + travel > img.width() {
        return Err(param_err!(
            "crop window {h}x{w} plus {travel} px travel exceeds image {}x{}",
            img.height(),
            img.width()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cs.seed);
    let top = rng.random_range(0..=img.height() - h);
    let left0 = rng.random_range(0..=img.width() - w - travel);
    (0..cs.sample_count)
        .map(|k| {
            let left = left0 + k * cs.offset_px;
            Ok(CropSample { index: k, top, left, image: img.crop(top, left, h, w)? })
        })
        .collect()
}
