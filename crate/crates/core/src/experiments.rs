//! End-to-end runs: foveal crop samples (experiment 1) and the whole
//! pattern (experiment 2), plus their on-disk outputs.
//!
//! Output layout under the chosen root:
//!
//! ```text
//! exp1/{crop}/stats.csv         per-sample, per-scale bucket statistics
//! exp1/{crop}/distribution.csv  one row per detected segment
//! exp1/{crop}/overlays/*.png    first sample of each set, on request
//! exp2/stats.csv                whole-pattern statistics
//! exp2/distribution.csv
//! exp2/segments.csv
//! exp2/overlays/*.png
//! manifest.json                 resolved config, seed, version, checksums
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{self, Bucket, DistributionRow, ScaleSegments, TiltStats};
use crate::dog::{self, BorderMode, DogParams};
use crate::error::{param_err, Error, Result};
use crate::hough::{self, HoughParams, LineSegment};
use crate::raster::{BinaryMap, GrayImage};
use crate::render;
use crate::stimulus::{self, CropSpec, StimulusSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub stimulus: StimulusSpec,
    /// Explicit centre sigmas; `None` uses `0.5 M ..= 3.5 M`.
    pub sigmas: Option<Vec<f64>>,
    pub surround_ratio: f64,
    pub window_ratio: f64,
    pub border: BorderMode,
    pub binarize_threshold: f64,
    pub off_center: bool,
    pub hough: HoughParams,
    /// Crop windows in tiles, `(rows, cols)`.
    pub crops: Vec<(usize, usize)>,
    pub samples: usize,
    pub offset_px: usize,
    pub seed: u64,
    /// Grow `num_peaks` with image area relative to a 4x5-tile window.
    pub scale_numpeaks_by_area: bool,
    /// Worker threads; `None` uses all available cores. Does not affect results.
    pub jobs: Option<usize>,
    pub overlay: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            stimulus: StimulusSpec::default(),
            sigmas: None,
            surround_ratio: 2.0,
            window_ratio: 8.0,
            border: BorderMode::Replicate,
            binarize_threshold: 0.0,
            off_center: false,
            hough: HoughParams::default(),
            crops: vec![(4, 5), (5, 5), (5, 6)],
            samples: 50,
            offset_px: 4,
            seed: 0,
            scale_numpeaks_by_area: false,
            jobs: None,
            overlay: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.stimulus.validate()?;
        self.hough.validate()?;
        let sigmas = self.sigma_stack();
        if sigmas.is_empty() {
            return Err(param_err!("sigma stack is empty"));
        }
        if sigmas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param_err!("sigmas must be strictly ascending"));
        }
        for &s in &sigmas {
            self.dog_params(s)?;
        }
        if self.jobs == Some(0) {
            return Err(param_err!("jobs must be at least 1"));
        }
        Ok(())
    }

    pub fn sigma_stack(&self) -> Vec<f64> {
        self.sigmas
            .clone()
            .unwrap_or_else(|| dog::sigma_stack(self.stimulus.mortar_size))
    }

    pub fn dog_params(&self, sigma_c: f64) -> Result<DogParams> {
        DogParams::new(sigma_c, self.surround_ratio, self.window_ratio)
    }

    /// Peak budget for an image of the given size.
    pub fn num_peaks_for(&self, height: usize, width: usize) -> usize {
        if !self.scale_numpeaks_by_area {
            return self.hough.num_peaks;
        }
        let (rh, rw) = self.stimulus.window_px(4, 5);
        let ratio = (height * width) as f64 / (rh * rw) as f64;
        (self.hough.num_peaks as f64 * ratio).ceil().max(1.0) as usize
    }

    /// One crop spec per window size, each with its own derived seed.
    pub fn crop_specs(&self) -> Vec<CropSpec> {
        self.crops
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| CropSpec {
                crop_rows: r,
                crop_cols: c,
                sample_count: self.samples,
                offset_px: self.offset_px,
                seed: derive_seed(self.seed, i as u64),
            })
            .collect()
    }

    /// SHA-256 over the canonical JSON form, ignoring `jobs`.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig { jobs: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// SplitMix64 step over `seed ^ stream`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything one scale produced for one image.
#[derive(Debug, Clone)]
pub struct ScaleOutcome {
    pub scale: f64,
    pub segments: Vec<LineSegment>,
    pub edges: Option<BinaryMap>,
}

pub fn edge_map(img: &GrayImage, cfg: &ExperimentConfig, sigma_c: f64) -> Result<BinaryMap> {
    let mut response = dog::dog_response(img, &cfg.dog_params(sigma_c)?, cfg.border)?;
    if cfg.off_center {
        response = dog::off_center(&response);
    }
    Ok(dog::binarize(&response, cfg.binarize_threshold))
}

/// DoG, binarisation and Hough at every scale of the configured stack.
pub fn analyze_image(img: &GrayImage, cfg: &ExperimentConfig, keep_edges: bool) -> Result<Vec<ScaleOutcome>> {
    let hough_params = HoughParams {
        num_peaks: cfg.num_peaks_for(img.height(), img.width()),
        ..cfg.hough
    };
    cfg.sigma_stack()
        .into_iter()
        .map(|scale| {
            let edges = edge_map(img, cfg, scale)?;
            let segments = hough::detect_segments(&edges, &hough_params)?;
            Ok(ScaleOutcome { scale, segments, edges: keep_edges.then_some(edges) })
        })
        .collect()
}

fn scale_segments(outcomes: &[ScaleOutcome]) -> Vec<ScaleSegments> {
    outcomes
        .iter()
        .map(|o| ScaleSegments { scale: o.scale, segments: o.segments.clone() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
}

impl Provenance {
    fn of(cfg: &ExperimentConfig) -> Self {
        Self { config_hash: cfg.hash(), seed: cfg.seed, tool_version: TOOL_VERSION.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct SampleResult {
    pub index: usize,
    pub top: usize,
    pub left: usize,
    pub stats: Vec<TiltStats>,
    pub distribution: Vec<DistributionRow>,
    /// Set when the pipeline failed for this sample; the run carries on.
    pub error: Option<String>,
    /// Per-scale edge maps and segments, kept for the first sample when
    /// overlays are requested.
    pub overlays: Option<Vec<ScaleOutcome>>,
}

impl SampleResult {
    pub fn stat(&self, scale: f64, bucket: Bucket) -> Option<&TiltStats> {
        self.stats.iter().find(|s| s.scale == scale && s.bucket == bucket)
    }
}

#[derive(Debug, Clone)]
pub struct CropSetResult {
    pub crop: CropSpec,
    pub window_px: (usize, usize),
    pub samples: Vec<SampleResult>,
}

impl CropSetResult {
    pub fn label(&self) -> String {
        self.crop.label()
    }
}

#[derive(Debug, Clone)]
pub struct Experiment1Result {
    pub sets: Vec<CropSetResult>,
    pub scales: Vec<f64>,
    pub provenance: Provenance,
}

impl Experiment1Result {
    pub fn all_samples(&self) -> impl Iterator<Item = &SampleResult> {
        self.sets.iter().flat_map(|s| s.samples.iter())
    }
}

#[derive(Debug, Clone)]
pub struct Experiment2Result {
    pub stats: Vec<TiltStats>,
    pub distribution: Vec<DistributionRow>,
    pub outcomes: Vec<ScaleOutcome>,
    pub provenance: Provenance,
}

impl Experiment2Result {
    pub fn stat(&self, scale: f64, bucket: Bucket) -> Option<&TiltStats> {
        self.stats.iter().find(|s| s.scale == scale && s.bucket == bucket)
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| param_err!("cannot start worker pool: {e}"))?;
    Ok(pool.install(f))
}

fn analyze_sample(sample: &stimulus::CropSample, cfg: &ExperimentConfig) -> SampleResult {
    let keep = cfg.overlay && sample.index == 0;
    let outcome = analyze_image(&sample.image, cfg, keep).and_then(|outcomes| {
        let per_scale = scale_segments(&outcomes);
        Ok((analysis::aggregate(&per_scale)?, analysis::distribution_table(&per_scale)?, outcomes))
    });
    let (stats, distribution, error, overlays) = match outcome {
        Ok((stats, dist, outcomes)) => (stats, dist, None, keep.then_some(outcomes)),
        Err(e) => (Vec::new(), Vec::new(), Some(e.to_string()), None),
    };
    SampleResult { index: sample.index, top: sample.top, left: sample.left, stats, distribution, error, overlays }
}

/// Foveal crop study: every crop size, every sample, every scale.
pub fn run_experiment1(cfg: &ExperimentConfig, progress: Option<&(dyn Fn(&str) + Sync)>) -> Result<Experiment1Result> {
    cfg.validate()?;
    let image = stimulus::generate_cafe_wall(&cfg.stimulus)?;
    let mut sets = Vec::new();
    for cs in cfg.crop_specs() {
        let samples = stimulus::sample_crops(&image, &cfg.stimulus, &cs)?;
        let label = cs.label();
        let results = with_pool(cfg.jobs, || {
            samples
                .par_iter()
                .map(|s| {
                    let r = analyze_sample(s, cfg);
                    if let Some(tick) = progress {
                        tick(&format!("exp1 crop {label} sample {}", s.index));
                    }
                    r
                })
                .collect::<Vec<_>>()
        })?;
        sets.push(CropSetResult {
            crop: cs,
            window_px: cfg.stimulus.window_px(cs.crop_rows, cs.crop_cols),
            samples: results,
        });
    }
    Ok(Experiment1Result { sets, scales: cfg.sigma_stack(), provenance: Provenance::of(cfg) })
}

/// Whole-pattern study at every scale.
pub fn run_experiment2(cfg: &ExperimentConfig, progress: Option<&(dyn Fn(&str) + Sync)>) -> Result<Experiment2Result> {
    cfg.validate()?;
    let image = stimulus::generate_cafe_wall(&cfg.stimulus)?;
    let outcomes = with_pool(cfg.jobs, || {
        let hough_params = HoughParams {
            num_peaks: cfg.num_peaks_for(image.height(), image.width()),
            ..cfg.hough
        };
        cfg.sigma_stack()
            .into_par_iter()
            .map(|scale| {
                let edges = edge_map(&image, cfg, scale)?;
                let segments = hough::detect_segments(&edges, &hough_params)?;
                if let Some(tick) = progress {
                    tick(&format!("exp2 scale {scale}"));
                }
                Ok(ScaleOutcome { scale, segments, edges: cfg.overlay.then_some(edges) })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let per_scale = scale_segments(&outcomes);
    Ok(Experiment2Result {
        stats: analysis::aggregate(&per_scale)?,
        distribution: analysis::distribution_table(&per_scale)?,
        outcomes,
        provenance: Provenance::of(cfg),
    })
}

/// Mean signed H deviation of the segments lying on each mortar line, top
/// to bottom. `None` where a line has no H segment.
pub fn mortar_line_tilts(spec: &StimulusSpec, segments: &[LineSegment]) -> Vec<Option<f64>> {
    let period = (spec.tile_size + spec.mortar_size) as f64;
    let lines = spec.rows.saturating_sub(1);
    let centre = |j: usize| (j + 1) as f64 * period - spec.mortar_size as f64 / 2.0 - 0.5;
    let mut sums = vec![(0.0, 0usize); lines];
    for seg in segments {
        let Ok(angle) = analysis::segment_angle(seg) else { continue };
        let (bucket, dev) = analysis::bucket_of(angle);
        if bucket != Bucket::H {
            continue;
        }
        let (_, y) = seg.midpoint();
        let nearest = (0..lines).min_by(|&a, &b| (centre(a) - y).abs().total_cmp(&(centre(b) - y).abs()));
        if let Some(j) = nearest.filter(|&j| (centre(j) - y).abs() <= period / 2.0) {
            sums[j].0 += dev;
            sums[j].1 += 1;
        }
    }
    sums.into_iter().map(|(s, n)| (n > 0).then(|| s / n as f64)).collect()
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_default()
}

/// Scale as used in file names: `8`, `2.5`.
fn scale_tag(s: f64) -> String {
    if s.fract() == 0.0 { format!("{}", s as i64) } else { format!("{s}") }
}

pub const STATS_HEADER: &str = "scale,bucket,count,meanAbsDev,stdDev,stdErr";
pub const SAMPLE_STATS_HEADER: &str = "sampleId,top,left,scale,bucket,count,meanAbsDev,stdDev,stdErr,error";
pub const DISTRIBUTION_HEADER: &str = "scale,bucket,signedDeviationDeg,lengthPx,sampleId";
pub const SEGMENTS_HEADER: &str = "scale,x1,y1,x2,y2,thetaDeg,rho,lengthPx";

fn stats_fields(s: &TiltStats) -> String {
    format!(
        "{},{},{},{},{},{}",
        fmt4(s.scale),
        s.bucket,
        s.count,
        fmt_opt(s.mean_abs_dev),
        fmt_opt(s.std_dev),
        fmt_opt(s.std_err)
    )
}

pub fn stats_csv(stats: &[TiltStats]) -> String {
    let mut out = format!("{STATS_HEADER}\n");
    for s in stats {
        let _ = writeln!(out, "{}", stats_fields(s));
    }
    out
}

pub fn sample_stats_csv(samples: &[SampleResult]) -> String {
    let mut out = format!("{SAMPLE_STATS_HEADER}\n");
    for s in samples {
        if let Some(err) = &s.error {
            let _ = writeln!(out, "{},{},{},,,,,,,{}", s.index, s.top, s.left, err.replace([',', '\n'], ";"));
            continue;
        }
        for st in &s.stats {
            let _ = writeln!(out, "{},{},{},{},", s.index, s.top, s.left, stats_fields(st));
        }
    }
    out
}

pub fn distribution_csv<'a>(rows: impl IntoIterator<Item = (usize, &'a DistributionRow)>) -> String {
    let mut out = format!("{DISTRIBUTION_HEADER}\n");
    for (sample, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt4(r.scale),
            r.bucket,
            fmt4(r.signed_dev_deg),
            fmt4(r.length_px),
            sample
        );
    }
    out
}

pub fn segments_csv(per_scale: &[ScaleSegments]) -> String {
    let mut out = format!("{SEGMENTS_HEADER}\n");
    for ss in per_scale {
        for s in &ss.segments {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt4(ss.scale),
                s.p1.x,
                s.p1.y,
                s.p2.x,
                s.p2.y,
                fmt4(s.theta_deg),
                fmt4(s.rho),
                fmt4(s.length_px)
            );
        }
    }
    out
}

fn write_file(path: &Path, contents: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    written.push(path.to_path_buf());
    Ok(())
}

fn write_overlays(dir: &Path, prefix: &str, outcomes: &[ScaleOutcome], written: &mut Vec<PathBuf>) -> Result<()> {
    for o in outcomes {
        let Some(edges) = &o.edges else { continue };
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{prefix}_dog{}.png", scale_tag(o.scale)));
        render::write_overlay(edges, &o.segments, &path)?;
        written.push(path);
    }
    Ok(())
}

pub fn write_experiment1(res: &Experiment1Result, root: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for set in &res.sets {
        let dir = root.join("exp1").join(set.label());
        write_file(&dir.join("stats.csv"), sample_stats_csv(&set.samples).as_bytes(), &mut written)?;
        let rows = set
            .samples
            .iter()
            .flat_map(|s| s.distribution.iter().map(move |r| (s.index, r)));
        write_file(&dir.join("distribution.csv"), distribution_csv(rows).as_bytes(), &mut written)?;
        for s in &set.samples {
            if let Some(outcomes) = &s.overlays {
                write_overlays(&dir.join("overlays"), &format!("sample{}", s.index), outcomes, &mut written)?;
            }
        }
    }
    Ok(written)
}

pub fn write_experiment2(res: &Experiment2Result, root: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let dir = root.join("exp2");
    write_file(&dir.join("stats.csv"), stats_csv(&res.stats).as_bytes(), &mut written)?;
    write_file(
        &dir.join("distribution.csv"),
        distribution_csv(res.distribution.iter().map(|r| (0, r))).as_bytes(),
        &mut written,
    )?;
    write_file(&dir.join("segments.csv"), segments_csv(&scale_segments(&res.outcomes)).as_bytes(), &mut written)?;
    write_overlays(&dir.join("overlays"), "whole", &res.outcomes, &mut written)?;
    Ok(written)
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Records (or replaces) the `run` section of `root/manifest.json`.
pub fn update_manifest(root: &Path, run: &str, cfg: &ExperimentConfig, files: &[PathBuf]) -> Result<PathBuf> {
    let path = root.join("manifest.json");
    let mut manifest: serde_json::Map<String, serde_json::Value> = match fs::read(&path) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?,
        Err(_) => serde_json::Map::new(),
    };
    let mut checksums = BTreeMap::new();
    for f in files {
        let rel = f.strip_prefix(root).unwrap_or(f).to_string_lossy().replace('\\', "/");
        checksums.insert(rel, sha256_file(f)?);
    }
    let mut nhood = serde_json::Value::Null;
    if cfg.hough.nhood.is_none() {
        nhood = serde_json::Value::String("derived: odd >= accumulator size / 50".into());
    }
    manifest.insert("tool_version".into(), TOOL_VERSION.into());
    manifest.insert(
        run.into(),
        serde_json::json!({
            "config": ExperimentConfig { jobs: None, ..cfg.clone() },
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
            "sigmas": cfg.sigma_stack(),
            "nhood_rule": nhood,
            "files": checksums,
        }),
    );
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::create_dir_all(root)?;
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            stimulus: StimulusSpec::with_geometry(4, 6, 40, 2),
            hough: HoughParams { fill_gap: 8.0, min_length: 90.0, ..HoughParams::default() },
            crops: vec![(2, 3)],
            samples: 3,
            offset_px: 4,
            sigmas: Some(vec![1.0, 2.0]),
            jobs: Some(1),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn defaults_match_published_setup() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.sigma_stack(), vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0]);
        assert_eq!(cfg.hough.num_peaks, 100);
        assert_eq!(cfg.hough.threshold, 3);
        assert_eq!(cfg.hough.fill_gap, 40.0);
        assert_eq!(cfg.hough.min_length, 450.0);
        let analysis_cells: usize = cfg.crops.len() * cfg.samples * cfg.sigma_stack().len();
        assert_eq!(analysis_cells, 1050);
        cfg.validate().unwrap();
    }

    #[test]
    fn numpeaks_scaling() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.num_peaks_for(1864, 2800), 100);
        cfg.scale_numpeaks_by_area = true;
        assert_eq!(cfg.num_peaks_for(824, 1000), 100);
        assert_eq!(cfg.num_peaks_for(1864, 2800), 634);
    }

    #[test]
    fn seeds_differ_per_crop_set() {
        let specs = ExperimentConfig::default().crop_specs();
        assert_eq!(specs.len(), 3);
        assert_ne!(specs[0].seed, specs[1].seed);
        assert_eq!(specs[2].label(), "5x6");
    }

    #[test]
    fn config_hash_ignores_jobs() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { jobs: Some(3), ..a.clone() };
        let c = ExperimentConfig { seed: 9, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = ExperimentConfig { sigmas: Some(vec![2.0, 1.0]), ..small_cfg() };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { surround_ratio: 0.5, ..small_cfg() };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { jobs: Some(0), ..small_cfg() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_experiment_shapes() {
        let cfg = small_cfg();
        let res = run_experiment1(&cfg, None).unwrap();
        assert_eq!(res.sets.len(), 1);
        assert_eq!(res.sets[0].samples.len(), 3);
        for s in &res.sets[0].samples {
            assert!(s.error.is_none());
            assert_eq!(s.stats.len(), 2 * 4);
        }
        let res2 = run_experiment2(&cfg, None).unwrap();
        assert_eq!(res2.stats.len(), 8);
    }

    #[test]
    fn mortar_line_assignment() {
        use crate::hough::PixelPos;
        let spec = StimulusSpec::with_geometry(3, 4, 20, 2);
        let seg = |y1: u32, y2: u32| LineSegment {
            p1: PixelPos::new(0, y1),
            p2: PixelPos::new(60, y2),
            rho_bin: 0,
            theta_bin: 0,
            theta_deg: 0.0,
            rho: 0.0,
            length_px: 60.0,
        };
        // first mortar line spans rows 20..22, second 42..44
        let tilts = mortar_line_tilts(&spec, &[seg(18, 24), seg(46, 40)]);
        assert_eq!(tilts.len(), 2);
        assert!(tilts[0].unwrap() > 0.0);
        assert!(tilts[1].unwrap() < 0.0);
        assert_eq!(mortar_line_tilts(&spec, &[]), vec![None, None]);
    }

    #[test]
    fn csv_formatting() {
        let st = TiltStats::from_deviations(8.0, Bucket::H, vec![5.0, -9.0]);
        let csv = stats_csv(&[st, TiltStats::from_deviations(8.0, Bucket::V, vec![])]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], STATS_HEADER);
        assert_eq!(lines[1], "8.0000,H,2,7.0000,2.0000,1.4142");
        assert_eq!(lines[2], "8.0000,V,0,,,");
    }
}
