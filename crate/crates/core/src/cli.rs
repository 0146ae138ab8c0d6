//! Command-line front end. Every pipeline flag can also come from a flat
//! `key = value` config file (`#` starts a comment); flags win over the file,
//! the file wins over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{self, ScaleSegments};
use crate::dog::{self, BorderMode};
use crate::error::{param_err, Error, Result};
use crate::experiments::{self, ExperimentConfig};
use crate::hough::HoughParams;
use crate::io;
use crate::raster::GrayImage;
use crate::render;
use crate::stimulus::{self, StimulusSpec};

#[derive(Debug, Parser)]
#[command(name = "cafewall", version, about = "Quantify tilt in Cafe Wall patterns with a multiscale DoG + Hough pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a Cafe Wall stimulus to PNG or PGM.
    Generate(CommonArgs),
    /// Write DoG responses (or binary edge maps) for every scale.
    Dogmap {
        #[command(flatten)]
        common: CommonArgs,
        /// Write two-level PGM edge maps instead of false-colour responses.
        #[arg(long)]
        binary: bool,
        /// Also dump raw f32 responses.
        #[arg(long)]
        raw: bool,
    },
    /// Detect segments and tilt statistics on one image.
    Analyze(CommonArgs),
    /// Foveal crop-sample experiment.
    Exp1(CommonArgs),
    /// Whole-pattern experiment.
    Exp2(CommonArgs),
}

/// Pipeline flags shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Tile rows [default: 9]
    #[arg(long)]
    pub rows: Option<usize>,
    /// Tile columns [default: 14]
    #[arg(long)]
    pub cols: Option<usize>,
    /// Tile size in px [default: 200]
    #[arg(long)]
    pub tile: Option<usize>,
    /// Mortar thickness in px [default: 8]
    #[arg(long)]
    pub mortar: Option<usize>,
    /// Horizontal shift of odd tile rows in px [default: tile/2]
    #[arg(long = "row-shift")]
    pub row_shift: Option<usize>,
    /// Mortar luminance in (0, 1) [default: 0.5]
    #[arg(long = "mortar-lum")]
    pub mortar_lum: Option<f64>,
    /// Comma-separated centre sigmas [default: 0.5M..3.5M step 0.5M]
    #[arg(long)]
    pub sigmas: Option<String>,
    /// Surround/centre sigma ratio s [default: 2]
    #[arg(long = "surround-ratio")]
    pub surround_ratio: Option<f64>,
    /// Window ratio h, window = h*sigma_c + 1 [default: 8]
    #[arg(long = "window-ratio")]
    pub window_ratio: Option<f64>,
    /// Border padding: replicate, zero or mirror [default: replicate]
    #[arg(long)]
    pub border: Option<String>,
    /// Binarisation threshold on the response [default: 0]
    #[arg(long = "threshold-binarize")]
    pub threshold_binarize: Option<f64>,
    /// Maximum Hough peaks per scale [default: 100]
    #[arg(long)]
    pub numpeaks: Option<usize>,
    /// Minimum votes for a Hough peak [default: 3]
    #[arg(long)]
    pub threshold: Option<u32>,
    /// Peak suppression window RHOxTHETA, odd [default: accumulator size / 50, odd]
    #[arg(long)]
    pub nhood: Option<String>,
    /// Largest gap bridged along a line, px [default: 40]
    #[arg(long)]
    pub fillgap: Option<f64>,
    /// Shortest segment kept, px [default: 450]
    #[arg(long)]
    pub minlength: Option<f64>,
    /// Crop windows in tiles, e.g. 4x5,5x5 [default: 4x5,5x5,5x6]
    #[arg(long)]
    pub crop: Option<String>,
    /// Samples per crop size [default: 50]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Horizontal step between samples, px [default: 4]
    #[arg(long)]
    pub offset: Option<usize>,
    /// RNG seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Render segment overlays [default: off]
    #[arg(long)]
    pub overlay: bool,
    /// Use the OFF-centre (sign-flipped) response [default: off]
    #[arg(long = "off-center")]
    pub off_center: bool,
    /// Scale the peak budget with image area [default: off]
    #[arg(long = "scale-numpeaks-by-area")]
    pub scale_numpeaks_by_area: bool,
    /// Input image (PNG or PGM) [default: generated stimulus]
    #[arg(short = 'i', long = "input")]
    pub input: Option<PathBuf>,
    /// Output file or directory [default depends on subcommand]
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Config file with key = value lines [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| param_err!("bad value '{value}' for {key}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(param_err!("bad boolean '{value}' for {key}")),
    }
}

impl CommonArgs {
    /// Fills fields still unset from `key = value` text.
    pub fn merge_config_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| param_err!("config line {}: expected key = value", lineno + 1))?;
            self.merge_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn merge_key(&mut self, key: &str, v: &str) -> Result<()> {
        fn fill<T>(slot: &mut Option<T>, value: Result<T>) -> Result<()> {
            if slot.is_none() {
                *slot = Some(value?);
            }
            Ok(())
        }
        match key {
            "rows" => fill(&mut self.rows, parse_value(key, v)),
            "cols" => fill(&mut self.cols, parse_value(key, v)),
            "tile" => fill(&mut self.tile, parse_value(key, v)),
            "mortar" => fill(&mut self.mortar, parse_value(key, v)),
            "row-shift" => fill(&mut self.row_shift, parse_value(key, v)),
            "mortar-lum" => fill(&mut self.mortar_lum, parse_value(key, v)),
            "sigmas" => fill(&mut self.sigmas, Ok(v.to_string())),
            "surround-ratio" => fill(&mut self.surround_ratio, parse_value(key, v)),
            "window-ratio" => fill(&mut self.window_ratio, parse_value(key, v)),
            "border" => fill(&mut self.border, Ok(v.to_string())),
            "threshold-binarize" => fill(&mut self.threshold_binarize, parse_value(key, v)),
            "numpeaks" => fill(&mut self.numpeaks, parse_value(key, v)),
            "threshold" => fill(&mut self.threshold, parse_value(key, v)),
            "nhood" => fill(&mut self.nhood, Ok(v.to_string())),
            "fillgap" => fill(&mut self.fillgap, parse_value(key, v)),
            "minlength" => fill(&mut self.minlength, parse_value(key, v)),
            "crop" => fill(&mut self.crop, Ok(v.to_string())),
            "samples" => fill(&mut self.samples, parse_value(key, v)),
            "offset" => fill(&mut self.offset, parse_value(key, v)),
            "seed" => fill(&mut self.seed, parse_value(key, v)),
            "jobs" => fill(&mut self.jobs, parse_value(key, v)),
            "overlay" => {
                self.overlay |= parse_bool(key, v)?;
                Ok(())
            }
            "off-center" => {
                self.off_center |= parse_bool(key, v)?;
                Ok(())
            }
            "scale-numpeaks-by-area" => {
                self.scale_numpeaks_by_area |= parse_bool(key, v)?;
                Ok(())
            }
            other => Err(param_err!("unknown config key '{other}'")),
        }
    }

    /// Flags, then the config file (if any), then defaults.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| param_err!("cannot read config {}: {e}", path.display()))?;
            merged.merge_config_text(&text)?;
        }
        merged.to_config()
    }

    fn to_config(&self) -> Result<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let mut stimulus = StimulusSpec::with_geometry(
            self.rows.unwrap_or(d.stimulus.rows),
            self.cols.unwrap_or(d.stimulus.cols),
            self.tile.unwrap_or(d.stimulus.tile_size),
            self.mortar.unwrap_or(d.stimulus.mortar_size),
        );
        if let Some(shift) = self.row_shift {
            stimulus.row_shift = shift;
        }
        if let Some(lum) = self.mortar_lum {
            stimulus.mortar_lum = lum;
        }
        let sigmas = self.sigmas.as_deref().map(parse_list::<f64>).transpose()?;
        let nhood = self.nhood.as_deref().map(parse_pair).transpose()?;
        let crops = match self.crop.as_deref() {
            Some(text) => text.split(',').map(|c| parse_pair(c.trim())).collect::<Result<Vec<_>>>()?,
            None => d.crops.clone(),
        };
        let cfg = ExperimentConfig {
            stimulus,
            sigmas,
            surround_ratio: self.surround_ratio.unwrap_or(d.surround_ratio),
            window_ratio: self.window_ratio.unwrap_or(d.window_ratio),
            border: self.border.as_deref().map(str::parse::<BorderMode>).transpose()?.unwrap_or(d.border),
            binarize_threshold: self.threshold_binarize.unwrap_or(d.binarize_threshold),
            off_center: self.off_center,
            hough: HoughParams {
                num_peaks: self.numpeaks.unwrap_or(d.hough.num_peaks),
                threshold: self.threshold.unwrap_or(d.hough.threshold),
                nhood,
                fill_gap: self.fillgap.unwrap_or(d.hough.fill_gap),
                min_length: self.minlength.unwrap_or(d.hough.min_length),
            },
            crops,
            samples: self.samples.unwrap_or(d.samples),
            offset_px: self.offset.unwrap_or(d.offset_px),
            seed: self.seed.unwrap_or(d.seed),
            scale_numpeaks_by_area: self.scale_numpeaks_by_area,
            jobs: self.jobs,
            overlay: self.overlay,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',').map(|v| parse_value("list", v)).collect()
}

/// `AxB` or `A,B`.
fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X', ','])
        .ok_or_else(|| param_err!("expected AxB, got '{text}'"))?;
    Ok((parse_value("pair", a)?, parse_value("pair", b)?))
}

fn progress(msg: &str) {
    eprintln!("{msg}");
}

fn input_image(args: &CommonArgs, cfg: &ExperimentConfig) -> Result<(GrayImage, String)> {
    match &args.input {
        Some(path) => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into());
            Ok((io::read_gray(path)?, stem))
        }
        None => Ok((stimulus::generate_cafe_wall(&cfg.stimulus)?, cfg.stimulus.name())),
    }
}

fn scale_tag(s: f64) -> String {
    if s.fract() == 0.0 { format!("{}", s as i64) } else { format!("{s}") }
}

pub fn cmd_generate(args: &CommonArgs) -> Result<PathBuf> {
    let cfg = args.resolve()?;
    let img = stimulus::generate_cafe_wall(&cfg.stimulus)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.png", cfg.stimulus.name())));
    io::write_gray(&img, &path)?;
    Ok(path)
}

pub fn cmd_dogmap(args: &CommonArgs, binary: bool, raw: bool) -> Result<Vec<PathBuf>> {
    let cfg = args.resolve()?;
    let (img, stem) = input_image(args, &cfg)?;
    let dir = args.output.clone().unwrap_or_else(|| PathBuf::from("out/dogmap"));
    fs::create_dir_all(&dir)?;
    let polarity = if cfg.off_center { "off" } else { "on" };
    let mut written = Vec::new();
    for sigma in cfg.sigma_stack() {
        let mut response = dog::dog_response(&img, &cfg.dog_params(sigma)?, cfg.border)?;
        if cfg.off_center {
            response = dog::off_center(&response);
        }
        let base = format!("{stem}_{polarity}_dog{}", scale_tag(sigma));
        let path = if binary {
            let p = dir.join(format!("{base}.pgm"));
            io::write_binary(&dog::binarize(&response, cfg.binarize_threshold), &p)?;
            p
        } else {
            let p = dir.join(format!("{base}.png"));
            io::write_response_png(&response, &p)?;
            p
        };
        written.push(path);
        if raw {
            let p = dir.join(format!("{base}.f32"));
            io::write_raw_response(&response, sigma, &p)?;
            written.push(p);
        }
    }
    Ok(written)
}

pub fn cmd_analyze(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = args.resolve()?;
    let (img, _) = input_image(args, &cfg)?;
    let dir = args.output.clone().unwrap_or_else(|| PathBuf::from("out/analyze"));
    fs::create_dir_all(&dir)?;
    let outcomes = experiments::analyze_image(&img, &cfg, cfg.overlay)?;
    let per_scale: Vec<ScaleSegments> = outcomes
        .iter()
        .map(|o| ScaleSegments { scale: o.scale, segments: o.segments.clone() })
        .collect();
    let mut written = vec![dir.join("segments.csv"), dir.join("stats.csv")];
    fs::write(&written[0], experiments::segments_csv(&per_scale))?;
    fs::write(&written[1], experiments::stats_csv(&analysis::aggregate(&per_scale)?))?;
    for o in &outcomes {
        if let Some(edges) = &o.edges {
            let p = dir.join(format!("overlay_dog{}.png", scale_tag(o.scale)));
            render::write_overlay(edges, &o.segments, &p)?;
            written.push(p);
        }
    }
    Ok(written)
}

pub fn cmd_exp1(args: &CommonArgs) -> Result<PathBuf> {
    let cfg = args.resolve()?;
    let root = args.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    let res = experiments::run_experiment1(&cfg, Some(&progress))?;
    let files = experiments::write_experiment1(&res, &root)?;
    experiments::update_manifest(&root, "exp1", &cfg, &files)
}

pub fn cmd_exp2(args: &CommonArgs) -> Result<PathBuf> {
    let cfg = args.resolve()?;
    let root = args.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    let res = experiments::run_experiment2(&cfg, Some(&progress))?;
    let files = experiments::write_experiment2(&res, &root)?;
    experiments::update_manifest(&root, "exp2", &cfg, &files)
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => print_paths(&[cmd_generate(a)?]),
        Command::Dogmap { common, binary, raw } => print_paths(&cmd_dogmap(common, *binary, *raw)?),
        Command::Analyze(a) => print_paths(&cmd_analyze(a)?),
        Command::Exp1(a) => print_paths(&[cmd_exp1(a)?]),
        Command::Exp2(a) => print_paths(&[cmd_exp2(a)?]),
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return 2;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e @ Error::Param(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn default_output_name(spec: &StimulusSpec) -> PathBuf {
    Path::new(&format!("{}.png", spec.name())).to_path_buf()
}
