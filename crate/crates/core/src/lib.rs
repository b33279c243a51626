//! Scene-text detection for natural-scene photographs.
//!
//! The detector locates text in images with complex backgrounds by fusing
//! wavelet detail sub-bands instead of running oriented edge filters:
//!
//! 1. [`raster`] — load the photograph, convert to grayscale, pad to even
//!    dimensions.
//! 2. [`haar`] — single-level 2-D Haar transform into LL/LH/HL/HH planes.
//! 3. [`edgemap`] — threshold the three detail planes, dilate, AND-fuse them
//!    (text is where horizontal, vertical and diagonal edges coexist), then
//!    prune rows with too few candidate pixels.
//! 4. [`cluster`] — subtractive clustering of the surviving pixel coordinates
//!    into region seed centroids.
//! 5. [`grow`] — grow a rectangle around each centroid until the relative gain
//!    in captured pixels stalls, shrink-wrap, and merge overlapping boxes.
//! 6. [`binarize`] — per-region Otsu threshold of the grayscale crop.
//! 7. [`charseg`] — normalize polarity so characters are white-on-black and
//!    split them into 4-connected components for OCR handoff.
//!
//! [`pipeline::run_pipeline`] chains the stages and produces a serializable
//! [`pipeline::DetectionReport`].

pub mod binarize;
pub mod charseg;
pub mod cluster;
pub mod edgemap;
pub mod grow;
pub mod haar;
pub mod pipeline;
pub mod raster;

use std::path::PathBuf;

pub use binarize::{apply_threshold, histogram, otsu_threshold, Histogram256};
pub use charseg::{
    detect_polarity, extract_characters, label_components, normalize_polarity, Component, Polarity,
};
pub use cluster::{potentials, subsample, subtractive_cluster, ClusterParams, Point};
pub use edgemap::{
    binarize_subband, candidate_mask, dilate, fuse_and, row_filter, upsample2x, EdgeParams,
};
pub use grow::{grow_region, merge_boxes, shrink_wrap, BBox, GrowParams};
pub use haar::{forward_haar, inverse_haar, Band, SubbandSet};
pub use pipeline::{run_pipeline, run_pipeline_full, Detection, DetectionReport, PipelineConfig};
pub use raster::{load_image, pad_to_even, save_gray, save_mask, to_gray, BinaryMask, GrayImage};

/// Errors produced by the detection library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("image dimensions {width}x{height} are not even")]
    OddDimensions { width: u32, height: u32 },
    #[error("mask dimensions differ: {}x{} vs {}x{}", expected.0, expected.1, actual.0, actual.1)]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },
    #[error("cannot threshold an empty histogram")]
    EmptyHistogram,
    #[error("image {width}x{height} is too small, need at least 2x2")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Tag an error with the pipeline stage it came from.
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
