//! Candidate-text mask extraction from the detail sub-bands.
//!
//! Text regions mix vertical, horizontal and diagonal edges, so a pixel is a
//! candidate only where all three detail bands respond. Each band is
//! binarized against `sigma` times the standard deviation of its absolute
//! coefficients, dilated so that nearby responses of different orientations
//! overlap, and the three masks are AND-fused. The fused mask is upsampled
//! back to source resolution and rows with too few candidate pixels are
//! cleared (isolated textured background rarely fills a whole row).

use serde::Serialize;

use crate::haar::{Band, SubbandSet};
use crate::raster::BinaryMask;
use crate::{Error, Result};

/// Tunables for the edge-map stage.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeParams {
    /// Multiplier on the per-band standard deviation of absolute
    /// coefficients; larger values prune more textured background.
    pub sigma: f64,
    /// 3x3 dilation passes applied to each binarized band before fusion.
    pub dilate_iters: u32,
    /// Row survival threshold as a fraction of image width.
    pub row_frac: f64,
    /// Absolute floor for the row survival threshold.
    pub row_min: u32,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self {
            sigma: 1.5,
            dilate_iters: 2,
            row_frac: 0.02,
            row_min: 4,
        }
    }
}

/// Marks coefficients whose magnitude exceeds `sigma` standard deviations of
/// the band's absolute coefficients. A flat band (zero deviation) yields an
/// all-false mask.
pub fn binarize_subband(band: &Band, sigma: f64) -> BinaryMask {
    let n = band.data().len() as f64;
    let mean = band.data().iter().map(|c| c.abs()).sum::<f64>() / n;
    let var = band
        .data()
        .iter()
        .map(|c| {
            let d = c.abs() - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let sd = var.sqrt();
    if sd == 0.0 {
        return BinaryMask::new(band.width(), band.height());
    }
    let threshold = sigma * sd;
    let bits = band.data().iter().map(|c| c.abs() > threshold).collect();
    BinaryMask::from_bits(band.width(), band.height(), bits)
}

fn dilate_once(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    // 3x3 square element, separable into a horizontal and a vertical pass
    let mut horiz = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let hit = mask.get(x, y)
                || (x > 0 && mask.get(x - 1, y))
                || (x + 1 < w && mask.get(x + 1, y));
            horiz.set(x, y, hit);
        }
    }
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let hit = horiz.get(x, y)
                || (y > 0 && horiz.get(x, y - 1))
                || (y + 1 < h && horiz.get(x, y + 1));
            out.set(x, y, hit);
        }
    }
    out
}

/// `iters` passes of 3x3 square dilation; `iters = 0` is the identity.
pub fn dilate(mask: &BinaryMask, iters: u32) -> BinaryMask {
    let mut out = mask.clone();
    for _ in 0..iters {
        out = dilate_once(&out);
    }
    out
}

/// Pixel-wise conjunction of the three oriented edge masks.
pub fn fuse_and(h: &BinaryMask, v: &BinaryMask, d: &BinaryMask) -> Result<BinaryMask> {
    let dims = (h.width(), h.height());
    for m in [v, d] {
        if (m.width(), m.height()) != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: (m.width(), m.height()),
            });
        }
    }
    let bits = h
        .bits()
        .iter()
        .zip(v.bits())
        .zip(d.bits())
        .map(|((&a, &b), &c)| a && b && c)
        .collect();
    Ok(BinaryMask::from_bits(h.width(), h.height(), bits))
}

/// Nearest-neighbor x2 expansion cropped to `target_w` x `target_h`:
/// sub-band pixel `(i, j)` fills source rows `2i..=2i+1`, columns `2j..=2j+1`.
pub fn upsample2x(mask: &BinaryMask, target_w: u32, target_h: u32) -> BinaryMask {
    assert!(
        2 * mask.width() >= target_w && 2 * mask.height() >= target_h,
        "mask too small for upsample target"
    );
    let mut out = BinaryMask::new(target_w, target_h);
    for y in 0..target_h {
        for x in 0..target_w {
            out.set(x, y, mask.get(x / 2, y / 2));
        }
    }
    out
}

/// Clears every row whose count of true pixels is below
/// `max(round(row_frac * width), row_min)`; surviving rows are kept intact.
pub fn row_filter(mask: &BinaryMask, row_frac: f64, row_min: u32) -> BinaryMask {
    let threshold = ((row_frac * mask.width() as f64).round() as usize).max(row_min as usize);
    let mut out = BinaryMask::new(mask.width(), mask.height());
    for y in 0..mask.height() {
        let count = (0..mask.width()).filter(|&x| mask.get(x, y)).count();
        if count >= threshold {
            for x in 0..mask.width() {
                out.set(x, y, mask.get(x, y));
            }
        }
    }
    out
}

/// Runs the whole edge-map stage: binarize the three detail bands, dilate,
/// AND-fuse, upsample to `target_w` x `target_h`, and row-filter.
pub fn candidate_mask(
    bands: &SubbandSet,
    params: &EdgeParams,
    target_w: u32,
    target_h: u32,
) -> Result<BinaryMask> {
    let lh = dilate(
        &binarize_subband(&bands.lh, params.sigma),
        params.dilate_iters,
    );
    let hl = dilate(
        &binarize_subband(&bands.hl, params.sigma),
        params.dilate_iters,
    );
    let hh = dilate(
        &binarize_subband(&bands.hh, params.sigma),
        params.dilate_iters,
    );
    let fused = fuse_and(&lh, &hl, &hh)?;
    let upsampled = upsample2x(&fused, target_w, target_h);
    Ok(row_filter(&upsampled, params.row_frac, params.row_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::forward_haar;
    use crate::raster::GrayImage;
    use proptest::prelude::*;

    fn is_subset(a: &BinaryMask, b: &BinaryMask) -> bool {
        a.bits().iter().zip(b.bits()).all(|(&x, &y)| !x || y)
    }

    #[test]
    fn binarize_flat_band_is_all_false() {
        let band = Band::zeros(4, 2);
        assert_eq!(binarize_subband(&band, 1.5).count_true(), 0);
        // equal nonzero magnitudes also have zero deviation
        let band = Band::new(2, 2, vec![3.0, -3.0, 3.0, 3.0]);
        assert_eq!(binarize_subband(&band, 0.1).count_true(), 0);
    }

    #[test]
    fn binarize_single_outlier() {
        // |coefs| = [0,0,0,0,0,0,0,100]: mean 12.5, var 1093.75, sd ~33.07
        // threshold at sigma 1.5 is ~49.6, so only the outlier survives
        let band = Band::new(8, 1, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 100.0]);
        let mask = binarize_subband(&band, 1.5);
        let expect: Vec<bool> = vec![false, false, false, false, false, false, false, true];
        assert_eq!(mask.bits(), &expect[..]);
    }

    #[test]
    fn dilate_single_pixel_becomes_block() {
        let mut mask = BinaryMask::new(11, 11);
        mask.set(5, 5, true);
        let out = dilate(&mask, 1);
        assert_eq!(out.count_true(), 9);
        for y in 4..=6 {
            for x in 4..=6 {
                assert!(out.get(x, y));
            }
        }
    }

    #[test]
    fn dilate_zero_iters_is_identity() {
        let mut mask = BinaryMask::new(5, 5);
        mask.set(2, 3, true);
        assert_eq!(dilate(&mask, 0), mask);
        assert_eq!(dilate(&BinaryMask::new(4, 4), 3).count_true(), 0);
    }

    #[test]
    fn dilate_closes_gap_of_three() {
        // pixels at x=5 and x=9: two passes grow each by 2, meeting at x=7
        let mut mask = BinaryMask::new(15, 3);
        mask.set(5, 1, true);
        mask.set(9, 1, true);
        let out = dilate(&mask, 2);
        for x in 3..=11 {
            assert!(out.get(x, 1), "gap not closed at x={x}");
        }
    }

    #[test]
    fn fuse_examples() {
        let all = BinaryMask::from_bits(2, 2, vec![true; 4]);
        assert_eq!(fuse_and(&all, &all, &all).unwrap(), all);

        let none = BinaryMask::new(2, 2);
        assert_eq!(fuse_and(&all, &none, &all).unwrap(), none);

        let mut h = BinaryMask::new(3, 3);
        h.set(0, 0, true);
        h.set(1, 1, true);
        let mut v = BinaryMask::new(3, 3);
        v.set(1, 1, true);
        let mut d = BinaryMask::new(3, 3);
        d.set(1, 1, true);
        d.set(2, 2, true);
        let fused = fuse_and(&h, &v, &d).unwrap();
        assert_eq!(fused.count_true(), 1);
        assert!(fused.get(1, 1));
    }

    #[test]
    fn fuse_rejects_mismatched_dims() {
        let a = BinaryMask::new(2, 2);
        let b = BinaryMask::new(3, 2);
        assert!(matches!(
            fuse_and(&a, &b, &a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn upsample_examples() {
        let mut one = BinaryMask::new(1, 1);
        one.set(0, 0, true);
        assert_eq!(upsample2x(&one, 2, 2).count_true(), 4);

        let mut m = BinaryMask::new(2, 2);
        m.set(0, 0, true);
        let up = upsample2x(&m, 4, 4);
        assert_eq!(up.count_true(), 4);
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            assert!(up.get(x, y));
        }

        let all = BinaryMask::from_bits(2, 2, vec![true; 4]);
        let cropped = upsample2x(&all, 3, 3);
        assert_eq!(cropped.count_true(), 9);
    }

    #[test]
    fn row_filter_examples() {
        assert_eq!(row_filter(&BinaryMask::new(6, 4), 0.5, 1).count_true(), 0);

        // 10 wide, 3 true pixels, T = max(round(0.2*10), 1) = 2 -> kept
        let mut m = BinaryMask::new(10, 2);
        for x in [1, 4, 7] {
            m.set(x, 0, true);
        }
        let kept = row_filter(&m, 0.2, 1);
        assert_eq!(kept.count_true(), 3);
        assert!(kept.get(4, 0));

        // 100 wide, 1 true pixel, T = max(2, 4) = 4 -> cleared
        let mut m = BinaryMask::new(100, 1);
        m.set(50, 0, true);
        assert_eq!(row_filter(&m, 0.02, 4).count_true(), 0);
    }

    #[test]
    fn constant_image_yields_empty_candidates() {
        let img = GrayImage::filled(64, 64, 128);
        let bands = forward_haar(&img).unwrap();
        let mask = candidate_mask(&bands, &EdgeParams::default(), 64, 64).unwrap();
        assert_eq!(mask.count_true(), 0);
    }

    fn arb_mask(max: u32) -> impl Strategy<Value = BinaryMask> {
        (1u32..max, 1u32..max).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<bool>(), (w * h) as usize)
                .prop_map(move |bits| BinaryMask::from_bits(w, h, bits))
        })
    }

    fn arb_band() -> impl Strategy<Value = Band> {
        (1u32..10, 1u32..10).prop_flat_map(|(w, h)| {
            proptest::collection::vec(-1000.0f64..1000.0, (w * h) as usize)
                .prop_map(move |data| Band::new(w, h, data))
        })
    }

    proptest! {
        #[test]
        fn binarize_is_antitone_in_sigma(band in arb_band(), lo in 0.1f64..2.0, extra in 0.0f64..3.0) {
            let loose = binarize_subband(&band, lo);
            let tight = binarize_subband(&band, lo + extra);
            prop_assert!(is_subset(&tight, &loose));
        }

        #[test]
        fn dilate_is_extensive_and_monotone(mask in arb_mask(16), iters in 0u32..4) {
            let once = dilate(&mask, iters);
            let more = dilate(&mask, iters + 1);
            prop_assert!(is_subset(&mask, &once));
            prop_assert!(is_subset(&once, &more));
        }

        #[test]
        fn fused_mask_is_subset_of_inputs(
            bits in proptest::collection::vec(any::<(bool, bool, bool)>(), 1..128),
        ) {
            let n = bits.len() as u32;
            let h = BinaryMask::from_bits(n, 1, bits.iter().map(|b| b.0).collect());
            let v = BinaryMask::from_bits(n, 1, bits.iter().map(|b| b.1).collect());
            let d = BinaryMask::from_bits(n, 1, bits.iter().map(|b| b.2).collect());
            let fused = fuse_and(&h, &v, &d).unwrap();
            prop_assert!(is_subset(&fused, &h));
            prop_assert!(is_subset(&fused, &v));
            prop_assert!(is_subset(&fused, &d));
        }

        #[test]
        fn row_filter_output_is_subset(mask in arb_mask(24), frac in 0.01f64..1.0, row_min in 1u32..6) {
            let out = row_filter(&mask, frac, row_min);
            prop_assert!(is_subset(&out, &mask));
            let threshold = ((frac * mask.width() as f64).round() as usize).max(row_min as usize);
            for y in 0..mask.height() {
                let survived = (0..mask.width()).any(|x| out.get(x, y));
                if survived {
                    let count = (0..mask.width()).filter(|&x| mask.get(x, y)).count();
                    prop_assert!(count >= threshold);
                    // surviving rows are copied verbatim
                    for x in 0..mask.width() {
                        prop_assert_eq!(out.get(x, y), mask.get(x, y));
                    }
                }
            }
        }
    }
}
