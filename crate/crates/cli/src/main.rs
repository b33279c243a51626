//! Batch CLI for the textspot detector.
//!
//! Exit codes: 0 on success (including zero detected regions), 1 on I/O or
//! format errors, 2 on invalid flags or usage.

use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use textspot::cluster::ClusterParams;
use textspot::haar::forward_haar;
use textspot::pipeline::{run_pipeline_full, PipelineConfig};
use textspot::raster::{load_image, pad_to_even, save_gray, save_mask};

#[derive(Parser)]
#[command(
    name = "textspot",
    version,
    about = "Detect text regions in natural-scene images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run text detection on an image and emit a JSON report.
    Detect(DetectArgs),
    /// Decompose an image into its four wavelet sub-bands as PGM dumps.
    Dwt(DwtArgs),
    /// Print tool name and version.
    Version,
}

#[derive(Args)]
struct DetectArgs {
    /// Input image (binary PGM or PNG).
    input: PathBuf,
    /// Directory for region and character crops.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report destination; "-" or omitted writes to stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Sub-band threshold multiplier (must be positive).
    #[arg(long, value_parser = parse_positive)]
    sigma: Option<f64>,
    /// Dilation passes per detail band.
    #[arg(long)]
    dilate_iters: Option<u32>,
    /// Row survival threshold as a fraction of image width, in (0, 1].
    #[arg(long, value_parser = parse_fraction)]
    row_frac: Option<f64>,
    /// Absolute floor for the row survival threshold (at least 1).
    #[arg(long, value_parser = parse_at_least_one)]
    row_min: Option<u32>,
    /// Cluster vicinity radius in pixels (default: a tenth of the diagonal).
    #[arg(long, value_parser = parse_positive)]
    cluster_radius: Option<f64>,
    /// Pixels added to each box side per growth iteration (at least 1).
    #[arg(long, value_parser = parse_at_least_one)]
    grow_step: Option<u32>,
    /// Growth stop threshold in percent, in (0, 100).
    #[arg(long, value_parser = parse_stop_percent)]
    stop_percent: Option<f64>,
    /// Minimum merged box size, e.g. 8x8.
    #[arg(long, value_name = "WxH", value_parser = parse_box_size)]
    min_box: Option<(u32, u32)>,
    /// Minimum character component area in pixels.
    #[arg(long)]
    min_char_area: Option<u32>,
    /// Dump every intermediate raster into this directory.
    #[arg(long, value_name = "DIR")]
    debug_dump: Option<PathBuf>,
}

#[derive(Args)]
struct DwtArgs {
    /// Input image (binary PGM or PNG).
    input: PathBuf,
    /// Output directory for the sub-band PGMs (default: current directory).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be in (0, 1]"))
    }
}

fn parse_stop_percent(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 100.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be in (0, 100)"))
    }
}

fn parse_at_least_one(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be at least 1"))
    }
}

fn parse_box_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}` is not of the form WxH"))?;
    let w = parse_at_least_one(w)?;
    let h = parse_at_least_one(h)?;
    Ok((w, h))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => run_detect(args),
        Command::Dwt(args) => run_dwt(args),
        Command::Version => {
            println!("textspot {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Box<dyn Error>> {
    fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn make_dir(path: &Path) -> Result<(), Box<dyn Error>> {
    fs::create_dir_all(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn run_detect(args: DetectArgs) -> Result<(), Box<dyn Error>> {
    let img = load_image(&args.input)?;
    let mut cfg = PipelineConfig::for_image(img.width(), img.height());
    if let Some(v) = args.sigma {
        cfg.edge.sigma = v;
    }
    if let Some(v) = args.dilate_iters {
        cfg.edge.dilate_iters = v;
    }
    if let Some(v) = args.row_frac {
        cfg.edge.row_frac = v;
    }
    if let Some(v) = args.row_min {
        cfg.edge.row_min = v;
    }
    if let Some(v) = args.cluster_radius {
        cfg.cluster = ClusterParams::with_radius(v);
    }
    if let Some(v) = args.grow_step {
        cfg.grow.grow_step = v;
    }
    if let Some(v) = args.stop_percent {
        cfg.grow.stop_percent = v;
    }
    if let Some((w, h)) = args.min_box {
        cfg.grow.min_box_w = w;
        cfg.grow.min_box_h = h;
    }
    if let Some(v) = args.min_char_area {
        cfg.min_char_area = v;
    }
    cfg.debug_dir = args.debug_dump.clone();

    let source = args.input.display().to_string();
    let detection = run_pipeline_full(&img, &cfg, &source)?;

    let mut json = serde_json::to_string_pretty(&detection.report)?;
    json.push('\n');
    match args.json.as_deref() {
        Some(path) if path.as_os_str() != "-" => write_file(path, json.as_bytes())?,
        _ => std::io::stdout().write_all(json.as_bytes())?,
    }

    if let Some(dir) = &args.out {
        make_dir(dir)?;
        let regions = detection.report.regions.iter().zip(&detection.regions);
        for (index, (region, artifacts)) in regions.enumerate() {
            let b = region.bbox;
            let crop = img.crop(b.x0, b.y0, b.x1, b.y1);
            save_gray(&crop, dir.join(format!("region{index}.pgm")))?;
            for (k, ch) in artifacts.characters.iter().enumerate() {
                save_mask(&ch.mask, dir.join(format!("region{index}_char{k}.pgm")))?;
            }
        }
    }
    Ok(())
}

fn run_dwt(args: DwtArgs) -> Result<(), Box<dyn Error>> {
    let img = load_image(&args.input)?;
    let padded = pad_to_even(&img);
    let bands = forward_haar(&padded)?;
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    make_dir(&dir)?;
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    for (name, band) in [
        ("ll", &bands.ll),
        ("lh", &bands.lh),
        ("hl", &bands.hl),
        ("hh", &bands.hh),
    ] {
        save_gray(
            &band.to_gray_normalized(),
            dir.join(format!("{stem}_{name}.pgm")),
        )?;
    }
    Ok(())
}
