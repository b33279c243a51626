//! Full detection chain and the JSON-serializable report.
//!
//! Stage order: pad to even dimensions, Haar decomposition, detail-band
//! binarization + dilation + AND fusion, upsample to source resolution,
//! row-concentration filter, subtractive clustering of the surviving pixel
//! coordinates, per-centroid region growth, shrink-wrap and box merging,
//! then per region: Otsu threshold, polarity normalization and character
//! extraction. With `debug_dir` set every intermediate is dumped to disk.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::binarize::{apply_threshold, histogram, otsu_threshold};
use crate::charseg::{
    detect_polarity, extract_characters, normalize_polarity, Component, Polarity,
};
use crate::cluster::{subsample, subtractive_cluster, ClusterParams, Point};
use crate::edgemap::{binarize_subband, dilate, fuse_and, row_filter, upsample2x, EdgeParams};
use crate::grow::{grow_region, merge_boxes, shrink_wrap, BBox, GrowParams};
use crate::haar::forward_haar;
use crate::raster::{pad_to_even, save_gray, save_mask, BinaryMask, GrayImage};
use crate::{Error, Result};

/// Every tunable of the detection chain in one place.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub edge: EdgeParams,
    pub cluster: ClusterParams,
    pub grow: GrowParams,
    /// Components smaller than this many pixels are dropped as noise.
    pub min_char_area: u32,
    /// Directory for intermediate dumps; `None` disables them.
    pub debug_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Defaults for an image of the given dimensions (the cluster radius
    /// scales with the image diagonal).
    pub fn for_image(width: u32, height: u32) -> Self {
        let diagonal = (width as f64).hypot(height as f64);
        Self {
            edge: EdgeParams::default(),
            cluster: ClusterParams::for_diagonal(diagonal),
            grow: GrowParams::default(),
            min_char_area: 4,
            debug_dir: None,
        }
    }
}

/// Character entry of the report; the bbox is region-local.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterReport {
    pub bbox: BBox,
    pub area: u32,
}

/// One detected text region.
#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub bbox: BBox,
    pub otsu_threshold: u8,
    pub polarity: Polarity,
    pub characters: Vec<CharacterReport>,
}

/// Detection result for one image.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub source: String,
    pub width: u32,
    pub height: u32,
    pub config: PipelineConfig,
    pub regions: Vec<RegionReport>,
}

/// Per-region rasters that back the report, for callers that write crops.
#[derive(Debug, Clone)]
pub struct RegionArtifacts {
    /// Otsu output for the region crop.
    pub binarized: BinaryMask,
    /// Polarity-normalized mask (characters are true pixels).
    pub normalized: BinaryMask,
    /// Extracted characters in reading order.
    pub characters: Vec<Component>,
}

/// Report plus the rasters behind it; `regions` parallels `report.regions`.
#[derive(Debug, Clone)]
pub struct Detection {
    pub report: DetectionReport,
    pub regions: Vec<RegionArtifacts>,
}

struct DebugSink<'a> {
    dir: Option<&'a Path>,
}

impl DebugSink<'_> {
    fn active(&self) -> bool {
        self.dir.is_some()
    }

    fn gray(&self, stage: &'static str, name: &str, img: &GrayImage) -> Result<()> {
        if let Some(dir) = self.dir {
            save_gray(img, dir.join(name)).map_err(|e| e.in_stage(stage))?;
        }
        Ok(())
    }

    fn mask(&self, stage: &'static str, name: &str, mask: &BinaryMask) -> Result<()> {
        if let Some(dir) = self.dir {
            save_mask(mask, dir.join(name)).map_err(|e| e.in_stage(stage))?;
        }
        Ok(())
    }
}

/// Runs the full chain and returns the report together with the per-region
/// rasters. `source` is echoed into the report verbatim.
pub fn run_pipeline_full(img: &GrayImage, cfg: &PipelineConfig, source: &str) -> Result<Detection> {
    if img.width() < 2 || img.height() < 2 {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    let debug = DebugSink {
        dir: cfg.debug_dir.as_deref(),
    };
    if let Some(dir) = cfg.debug_dir.as_deref() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    debug.gray("raster", "00_gray.pgm", img)?;

    let padded = pad_to_even(img);
    debug.gray("raster", "01_padded.pgm", &padded)?;

    let bands = forward_haar(&padded).map_err(|e| e.in_stage("haar"))?;
    if debug.active() {
        debug.gray("haar", "02_ll.pgm", &bands.ll.to_gray_normalized())?;
        debug.gray("haar", "03_lh.pgm", &bands.lh.to_gray_normalized())?;
        debug.gray("haar", "04_hl.pgm", &bands.hl.to_gray_normalized())?;
        debug.gray("haar", "05_hh.pgm", &bands.hh.to_gray_normalized())?;
    }

    let lh = binarize_subband(&bands.lh, cfg.edge.sigma);
    let hl = binarize_subband(&bands.hl, cfg.edge.sigma);
    let hh = binarize_subband(&bands.hh, cfg.edge.sigma);
    debug.mask("edgemap", "06_lh_mask.pgm", &lh)?;
    debug.mask("edgemap", "07_hl_mask.pgm", &hl)?;
    debug.mask("edgemap", "08_hh_mask.pgm", &hh)?;

    let lh = dilate(&lh, cfg.edge.dilate_iters);
    let hl = dilate(&hl, cfg.edge.dilate_iters);
    let hh = dilate(&hh, cfg.edge.dilate_iters);
    debug.mask("edgemap", "09_lh_dilated.pgm", &lh)?;
    debug.mask("edgemap", "10_hl_dilated.pgm", &hl)?;
    debug.mask("edgemap", "11_hh_dilated.pgm", &hh)?;

    let fused = fuse_and(&lh, &hl, &hh).map_err(|e| e.in_stage("edgemap"))?;
    debug.mask("edgemap", "12_fused.pgm", &fused)?;

    let upsampled = upsample2x(&fused, img.width(), img.height());
    debug.mask("edgemap", "13_upsampled.pgm", &upsampled)?;

    let candidates = row_filter(&upsampled, cfg.edge.row_frac, cfg.edge.row_min);
    debug.mask("edgemap", "14_candidates.pgm", &candidates)?;

    let mut points = Vec::with_capacity(candidates.count_true());
    for y in 0..candidates.height() {
        for x in 0..candidates.width() {
            if candidates.get(x, y) {
                points.push(Point::new(x, y));
            }
        }
    }
    let points = subsample(&points, cfg.cluster.max_points);
    let centers = subtractive_cluster(&points, &cfg.cluster);
    if let Some(dir) = cfg.debug_dir.as_deref() {
        let pairs: Vec<[u32; 2]> = centers.iter().map(|c| [c.x, c.y]).collect();
        let json = serde_json::to_string(&pairs).expect("serializing points cannot fail");
        std::fs::write(dir.join("15_centers.json"), json).map_err(|source| {
            Error::Io {
                path: dir.join("15_centers.json"),
                source,
            }
            .in_stage("cluster")
        })?;
    }

    let mut grown = Vec::new();
    for center in &centers {
        if let Some(bbox) = grow_region(&candidates, *center, &cfg.grow) {
            if let Some(tight) = shrink_wrap(&candidates, &bbox) {
                grown.push(tight);
            }
        }
    }
    let boxes = merge_boxes(&grown, &cfg.grow);

    let mut regions = Vec::new();
    let mut artifacts = Vec::new();
    for (index, bbox) in boxes.iter().enumerate() {
        let hist = histogram(img, bbox);
        let threshold = otsu_threshold(&hist).map_err(|e| e.in_stage("binarize"))?;
        let binarized = apply_threshold(img, bbox, threshold);
        let polarity = detect_polarity(&binarized);
        let normalized = normalize_polarity(&binarized, polarity);
        debug.mask(
            "binarize",
            &format!("region{index}_binarized.pgm"),
            &binarized,
        )?;
        debug.mask(
            "charseg",
            &format!("region{index}_normalized.pgm"),
            &normalized,
        )?;
        if normalized.count_true() == 0 {
            // degenerate crop: thresholding left no foreground
            continue;
        }
        let characters = extract_characters(&normalized, cfg.min_char_area);
        regions.push(RegionReport {
            bbox: *bbox,
            otsu_threshold: threshold,
            polarity,
            characters: characters
                .iter()
                .map(|c| CharacterReport {
                    bbox: c.bbox,
                    area: c.area,
                })
                .collect(),
        });
        artifacts.push(RegionArtifacts {
            binarized,
            normalized,
            characters,
        });
    }

    Ok(Detection {
        report: DetectionReport {
            source: source.to_string(),
            width: img.width(),
            height: img.height(),
            config: cfg.clone(),
            regions,
        },
        regions: artifacts,
    })
}

/// Runs the full chain and returns just the report.
pub fn run_pipeline(
    img: &GrayImage,
    cfg: &PipelineConfig,
    source: &str,
) -> Result<DetectionReport> {
    run_pipeline_full(img, cfg, source).map(|d| d.report)
}
