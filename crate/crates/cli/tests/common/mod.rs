use textspot::grow::BBox;
use textspot::raster::GrayImage;

/// 512x512 horizontal-gradient background with one grid-textured patch.
///
/// The patch is a checkerboard of 4-pixel cells whose origin sits at odd
/// coordinates, so the transform's 2x2 blocks straddle every cell boundary:
/// vertical boundaries excite HL, horizontal ones LH, and cell corners HH,
/// while the smooth gradient excites none of the detail bands.
pub fn synthetic_scene(patch: BBox) -> GrayImage {
    let mut img = GrayImage::filled(512, 512, 0);
    for y in 0..512 {
        for x in 0..512 {
            img.set(x, y, (x * 255 / 511) as u8);
        }
    }
    for y in patch.y0..=patch.y1 {
        for x in patch.x0..=patch.x1 {
            let cell = ((x - patch.x0) / 4 + (y - patch.y0) / 4) % 2;
            img.set(x, y, if cell == 0 { 0 } else { 255 });
        }
    }
    img
}

/// Ground-truth patch placement used by the end-to-end checks.
pub fn scene_patch() -> BBox {
    BBox::new(191, 231, 350, 278)
}
