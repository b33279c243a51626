//! Per-region Otsu thresholding.
//!
//! The threshold maximizes the between-class variance
//! `w0 * w1 * (mu0 - mu1)^2` (equivalent to minimizing intra-class variance)
//! over all 256 candidate cut points, with class 0 holding intensities `<= t`.
//! Ties resolve to the smallest maximizing `t`. Class sums are kept as exact
//! integers so the scan and any independent recomputation agree bit-for-bit.

use crate::grow::BBox;
use crate::raster::{BinaryMask, GrayImage};
use crate::{Error, Result};

/// 256-bin intensity histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u32; 256],
    total: u64,
}

impl Histogram256 {
    pub fn from_counts(counts: [u32; 256]) -> Self {
        let total = counts.iter().map(|&c| c as u64).sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u32; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Intensity histogram of the pixels inside `bbox`.
pub fn histogram(img: &GrayImage, bbox: &BBox) -> Histogram256 {
    assert!(
        bbox.x1 < img.width() && bbox.y1 < img.height(),
        "box out of bounds"
    );
    let mut counts = [0u32; 256];
    for y in bbox.y0..=bbox.y1 {
        for x in bbox.x0..=bbox.x1 {
            counts[img.get(x, y) as usize] += 1;
        }
    }
    Histogram256::from_counts(counts)
}

/// Between-class variance scaled by `total^2` (the scale does not move the
/// argmax): `(s0*n1 - s1*n0)^2 / (n0*n1)` with exact integer numerator.
fn between_class_score(n0: u64, s0: u64, total_n: u64, total_s: u64) -> f64 {
    let n1 = total_n - n0;
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let s1 = total_s - s0;
    let d = (s0 as i128 * n1 as i128 - s1 as i128 * n0 as i128) as f64;
    d * d / (n0 as f64 * n1 as f64)
}

/// Otsu's threshold for a non-empty histogram; smallest maximizer on ties.
pub fn otsu_threshold(hist: &Histogram256) -> Result<u8> {
    if hist.total() == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total_n = hist.total();
    let total_s: u64 = hist
        .counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u64 * c as u64)
        .sum();
    let mut n0 = 0u64;
    let mut s0 = 0u64;
    let mut best_t = 0u8;
    let mut best = -1.0f64;
    for t in 0..=255u8 {
        let c = hist.counts()[t as usize] as u64;
        n0 += c;
        s0 += t as u64 * c;
        let score = between_class_score(n0, s0, total_n, total_s);
        if score > best {
            best = score;
            best_t = t;
        }
    }
    Ok(best_t)
}

/// Binarizes the crop at `bbox`: true where intensity is strictly above `t`.
/// The mask has the box's dimensions.
pub fn apply_threshold(img: &GrayImage, bbox: &BBox, t: u8) -> BinaryMask {
    assert!(
        bbox.x1 < img.width() && bbox.y1 < img.height(),
        "box out of bounds"
    );
    let mut mask = BinaryMask::new(bbox.width(), bbox.height());
    for y in 0..bbox.height() {
        for x in 0..bbox.width() {
            mask.set(x, y, img.get(bbox.x0 + x, bbox.y0 + y) > t);
        }
    }
    mask
}
