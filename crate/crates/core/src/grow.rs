//! Rectangle growth around cluster centroids and box merging.
//!
//! A 2x2 seed rectangle is placed on the centroid and every side expands
//! outward by `grow_step` pixels per iteration. Growth stops once the
//! relative gain in captured candidate pixels drops below `stop_percent`
//! (or the box covers the whole image). The grown boxes are shrink-wrapped
//! to the pixels they actually contain and overlapping or touching boxes are
//! merged, one box per text block.

use serde::Serialize;

use crate::cluster::Point;
use crate::raster::BinaryMask;

/// Axis-aligned rectangle with inclusive corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BBox {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "invalid box corners");
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> u32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn contains_point(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    fn overlap_1d(a0: u32, a1: u32, b0: u32, b1: u32) -> i64 {
        (a1.min(b1) as i64) - (a0.max(b0) as i64)
    }

    /// Shared pixels exist.
    pub fn intersects(&self, other: &BBox) -> bool {
        Self::overlap_1d(self.x0, self.x1, other.x0, other.x1) >= 0
            && Self::overlap_1d(self.y0, self.y1, other.y0, other.y1) >= 0
    }

    /// Intersecting or edge-adjacent (corner-only contact does not count).
    pub fn touches_or_intersects(&self, other: &BBox) -> bool {
        let ox = Self::overlap_1d(self.x0, self.x1, other.x0, other.x1);
        let oy = Self::overlap_1d(self.y0, self.y1, other.y0, other.y1);
        ox >= -1 && oy >= -1 && (ox >= 0 || oy >= 0)
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        if self.intersects(other) {
            Some(BBox::new(
                self.x0.max(other.x0),
                self.y0.max(other.y0),
                self.x1.min(other.x1),
                self.y1.min(other.y1),
            ))
        } else {
            None
        }
    }

    /// Intersection over union.
    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection(other).map_or(0, |b| b.area());
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }
}

/// Tunables for region growth and box merging.
#[derive(Debug, Clone, Serialize)]
pub struct GrowParams {
    /// Pixels added to every side per iteration.
    pub grow_step: u32,
    /// Growth stops when the percentage increase in captured pixels falls
    /// below this value.
    pub stop_percent: f64,
    /// Merged boxes narrower than this are dropped.
    pub min_box_w: u32,
    /// Merged boxes shorter than this are dropped.
    pub min_box_h: u32,
}

impl Default for GrowParams {
    fn default() -> Self {
        Self {
            grow_step: 2,
            stop_percent: 5.0,
            min_box_w: 8,
            min_box_h: 8,
        }
    }
}

fn count_in(mask: &BinaryMask, bbox: &BBox) -> u64 {
    let mut count = 0;
    for y in bbox.y0..=bbox.y1 {
        for x in bbox.x0..=bbox.x1 {
            if mask.get(x, y) {
                count += 1;
            }
        }
    }
    count
}

fn expand(bbox: &BBox, step: u32, width: u32, height: u32) -> BBox {
    BBox::new(
        bbox.x0.saturating_sub(step),
        bbox.y0.saturating_sub(step),
        (bbox.x1 + step).min(width - 1),
        (bbox.y1 + step).min(height - 1),
    )
}

/// [`grow_region`] plus the number of expansion iterations performed.
pub fn grow_region_with_iterations(
    mask: &BinaryMask,
    centroid: Point,
    params: &GrowParams,
) -> Option<(BBox, u32)> {
    let (w, h) = (mask.width(), mask.height());
    assert!(centroid.x < w && centroid.y < h, "centroid out of bounds");
    let seed = BBox::new(
        centroid.x,
        centroid.y,
        (centroid.x + 1).min(w - 1),
        (centroid.y + 1).min(h - 1),
    );
    let mut old = count_in(mask, &seed);
    let mut bbox = seed;
    let mut iterations = 0;
    loop {
        bbox = expand(&bbox, params.grow_step, w, h);
        iterations += 1;
        let new = count_in(mask, &bbox);
        if new == 0 {
            // degenerate seed: the percentage formula would divide by zero
            return None;
        }
        let percent_increase = (new - old) as f64 * 100.0 / new as f64;
        if percent_increase < params.stop_percent {
            return Some((bbox, iterations));
        }
        if bbox.x0 == 0 && bbox.y0 == 0 && bbox.x1 == w - 1 && bbox.y1 == h - 1 {
            return Some((bbox, iterations));
        }
        old = new;
    }
}

/// Grows a rectangle around `centroid` until the relative pixel gain stalls.
/// Returns `None` when the rectangle captures no candidate pixels at all.
pub fn grow_region(mask: &BinaryMask, centroid: Point, params: &GrowParams) -> Option<BBox> {
    grow_region_with_iterations(mask, centroid, params).map(|(bbox, _)| bbox)
}

/// Tight bounding box of the true pixels inside `bbox`, or `None` if there
/// are none.
pub fn shrink_wrap(mask: &BinaryMask, bbox: &BBox) -> Option<BBox> {
    assert!(
        bbox.x1 < mask.width() && bbox.y1 < mask.height(),
        "box out of bounds"
    );
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    let mut any = false;
    for y in bbox.y0..=bbox.y1 {
        for x in bbox.x0..=bbox.x1 {
            if mask.get(x, y) {
                any = true;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    any.then(|| BBox::new(x0, y0, x1, y1))
}

/// Merges intersecting or touching boxes into their unions until a fixpoint,
/// drops merged boxes smaller than `min_box_w` x `min_box_h`, and sorts the
/// rest by (y0, x0).
pub fn merge_boxes(boxes: &[BBox], params: &GrowParams) -> Vec<BBox> {
    let mut items: Vec<BBox> = boxes.to_vec();
    'merge: loop {
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                if items[i].touches_or_intersects(&items[j]) {
                    let union = items[i].union(&items[j]);
                    items.swap_remove(j);
                    items[i] = union;
                    continue 'merge;
                }
            }
        }
        break;
    }
    items.retain(|b| b.width() >= params.min_box_w && b.height() >= params.min_box_h);
    items.sort_by_key(|b| (b.y0, b.x0));
    items
}
