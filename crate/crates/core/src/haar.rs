//! Single-level 2-D Haar wavelet transform.
//!
//! Each non-overlapping 2x2 block `[a b; c d]` of the source maps to one
//! coefficient in each of four half-resolution planes:
//!
//! ```text
//! ll = (a + b + c + d) / 2      hl = (a - b + c - d) / 2
//! lh = (a + b - c - d) / 2      hh = (a - b - c + d) / 2
//! ```
//!
//! The divisor 2 makes the transform orthonormal, so energy is conserved
//! exactly and [`inverse_haar`] reconstructs the source bit-for-bit (up to
//! float rounding). LL is the averaged image; HL responds to vertical edges,
//! LH to horizontal edges, HH to diagonal edges.

use crate::raster::GrayImage;
use crate::{Error, Result};

/// Real-valued coefficient plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl Band {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Self {
        assert!(
            width >= 1 && height >= 1,
            "band dimensions must be at least 1x1"
        );
        assert_eq!(
            data.len(),
            width as usize * height as usize,
            "coefficient buffer length must equal width * height"
        );
        Self {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Self::new(width, height, vec![0.0; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: f64) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Affine min-max rescale to `[0, 255]` for visual dumps. A constant band
    /// maps to all zeros.
    pub fn to_gray_normalized(&self) -> GrayImage {
        let min = self.data.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let data = if max > min {
            let scale = 255.0 / (max - min);
            self.data
                .iter()
                .map(|&v| ((v - min) * scale).round() as u8)
                .collect()
        } else {
            vec![0u8; self.data.len()]
        };
        GrayImage::new(self.width, self.height, data)
    }
}

/// The four coefficient planes of one decomposition level.
#[derive(Debug, Clone)]
pub struct SubbandSet {
    pub ll: Band,
    pub lh: Band,
    pub hl: Band,
    pub hh: Band,
    pub source_width: u32,
    pub source_height: u32,
}

/// Decomposes an even-dimensioned grayscale image into LL/LH/HL/HH.
pub fn forward_haar(img: &GrayImage) -> Result<SubbandSet> {
    let (w, h) = (img.width(), img.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::OddDimensions {
            width: w,
            height: h,
        });
    }
    let (bw, bh) = (w / 2, h / 2);
    let mut ll = Band::zeros(bw, bh);
    let mut lh = Band::zeros(bw, bh);
    let mut hl = Band::zeros(bw, bh);
    let mut hh = Band::zeros(bw, bh);
    for by in 0..bh {
        let y = 2 * by;
        for bx in 0..bw {
            let x = 2 * bx;
            let a = img.get(x, y) as f64;
            let b = img.get(x + 1, y) as f64;
            let c = img.get(x, y + 1) as f64;
            let d = img.get(x + 1, y + 1) as f64;
            ll.set(bx, by, (a + b + c + d) / 2.0);
            hl.set(bx, by, (a - b + c - d) / 2.0);
            lh.set(bx, by, (a + b - c - d) / 2.0);
            hh.set(bx, by, (a - b - c + d) / 2.0);
        }
    }
    Ok(SubbandSet {
        ll,
        lh,
        hl,
        hh,
        source_width: w,
        source_height: h,
    })
}

/// Reconstructs the source-resolution image from a sub-band set.
pub fn inverse_haar(bands: &SubbandSet) -> Band {
    let (bw, bh) = (bands.ll.width(), bands.ll.height());
    let mut out = Band::zeros(bands.source_width, bands.source_height);
    for by in 0..bh {
        for bx in 0..bw {
            let ll = bands.ll.get(bx, by);
            let lh = bands.lh.get(bx, by);
            let hl = bands.hl.get(bx, by);
            let hh = bands.hh.get(bx, by);
            let (x, y) = (2 * bx, 2 * by);
            out.set(x, y, (ll + hl + lh + hh) / 2.0);
            out.set(x + 1, y, (ll - hl + lh - hh) / 2.0);
            out.set(x, y + 1, (ll + hl - lh - hh) / 2.0);
            out.set(x + 1, y + 1, (ll - hl - lh + hh) / 2.0);
        }
    }
    out
}
