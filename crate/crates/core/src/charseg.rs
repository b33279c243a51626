//! Polarity normalization and 4-connected character labeling.
//!
//! Connected components are found over white pixels, so regions with a light
//! background are complemented first; the background is judged by sampling a
//! 3x3 patch at each of the four corners. Labels are assigned in
//! first-encounter row-major order starting at 1.

use serde::Serialize;

use crate::grow::BBox;
use crate::raster::BinaryMask;

/// Background polarity of a binarized region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    DarkBackground,
    LightBackground,
}

/// One 4-connected component of a region mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Label assigned in first-encounter row-major order, starting at 1.
    pub label: u32,
    /// Tight bounds in region-local coordinates.
    pub bbox: BBox,
    /// Number of true pixels.
    pub area: u32,
    /// Component pixels, cropped to `bbox` dimensions.
    pub mask: BinaryMask,
}

/// Judges the background by majority vote over a 3x3 sample at each corner
/// (smaller regions sample what exists). Mostly-true samples mean a light
/// background.
pub fn detect_polarity(mask: &BinaryMask) -> Polarity {
    let (w, h) = (mask.width(), mask.height());
    let pw = w.min(3);
    let ph = h.min(3);
    let mut trues = 0u32;
    let mut total = 0u32;
    for y0 in [0, h - ph] {
        for x0 in [0, w - pw] {
            for dy in 0..ph {
                for dx in 0..pw {
                    total += 1;
                    if mask.get(x0 + dx, y0 + dy) {
                        trues += 1;
                    }
                }
            }
        }
    }
    if trues * 2 > total {
        Polarity::LightBackground
    } else {
        Polarity::DarkBackground
    }
}

/// Complements the mask when the background is light, so characters are
/// always the true (white) pixels.
pub fn normalize_polarity(mask: &BinaryMask, polarity: Polarity) -> BinaryMask {
    match polarity {
        Polarity::DarkBackground => mask.clone(),
        Polarity::LightBackground => {
            let bits = mask.bits().iter().map(|&b| !b).collect();
            BinaryMask::from_bits(mask.width(), mask.height(), bits)
        }
    }
}

/// Union-find over provisional row labels.
struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new() -> Self {
        Self { parent: vec![0] } // slot 0 is the unused background label
    }

    fn make_set(&mut self) -> u32 {
        let label = self.parent.len() as u32;
        self.parent.push(label);
        label
    }

    fn find(&mut self, label: u32) -> u32 {
        let mut root = label;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = label;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // keep the smaller root so first-encounter order survives
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Partitions the true pixels into maximal 4-connected components (two-pass
/// union-find). Deterministic: identical masks yield identical labels.
pub fn label_components(mask: &BinaryMask) -> Vec<Component> {
    let (w, h) = (mask.width(), mask.height());
    let mut provisional = vec![0u32; w as usize * h as usize];
    let mut sets = DisjointSets::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let idx = y as usize * w as usize + x as usize;
            let west = if x > 0 { provisional[idx - 1] } else { 0 };
            let north = if y > 0 {
                provisional[idx - w as usize]
            } else {
                0
            };
            provisional[idx] = match (west, north) {
                (0, 0) => sets.make_set(),
                (l, 0) | (0, l) => l,
                (a, b) => {
                    sets.union(a, b);
                    a.min(b)
                }
            };
        }
    }

    // map roots to final labels in first-encounter row-major order
    let mut final_of_root = vec![0u32; sets.parent.len()];
    let mut components: Vec<Component> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let idx = y as usize * w as usize + x as usize;
            if provisional[idx] == 0 {
                continue;
            }
            let root = sets.find(provisional[idx]);
            let label = if final_of_root[root as usize] == 0 {
                let label = components.len() as u32 + 1;
                final_of_root[root as usize] = label;
                components.push(Component {
                    label,
                    bbox: BBox::new(x, y, x, y),
                    area: 0,
                    mask: BinaryMask::new(1, 1), // filled in below
                });
                label
            } else {
                final_of_root[root as usize]
            };
            provisional[idx] = label;
            let comp = &mut components[label as usize - 1];
            comp.area += 1;
            comp.bbox = BBox::new(
                comp.bbox.x0.min(x),
                comp.bbox.y0.min(y),
                comp.bbox.x1.max(x),
                comp.bbox.y1.max(y),
            );
        }
    }

    for comp in &mut components {
        comp.mask = BinaryMask::new(comp.bbox.width(), comp.bbox.height());
    }
    for y in 0..h {
        for x in 0..w {
            let label = provisional[y as usize * w as usize + x as usize];
            if label != 0 {
                let comp = &mut components[label as usize - 1];
                comp.mask.set(x - comp.bbox.x0, y - comp.bbox.y0, true);
            }
        }
    }
    components
}

/// Labels the (already polarity-normalized) region, drops components smaller
/// than `min_area`, and orders the rest left to right (ties top to bottom).
pub fn extract_characters(mask: &BinaryMask, min_area: u32) -> Vec<Component> {
    let mut components = label_components(mask);
    components.retain(|c| c.area >= min_area);
    components.sort_by_key(|c| (c.bbox.x0, c.bbox.y0));
    components
}
