//! Image buffers and file I/O: binary PGM (P5) and PNG in, PGM out.
//!
//! PGM is the bit-exact fixture format; PNG covers real photographs. Color
//! pixels are reduced with BT.601 luma weights, alpha is composited over
//! white first.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use crate::{Error, Result};

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major pixel buffer. Panics unless `data.len() == width * height`
    /// and both dimensions are at least 1.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Self {
        assert!(
            width >= 1 && height >= 1,
            "image dimensions must be at least 1x1"
        );
        assert_eq!(
            data.len(),
            width as usize * height as usize,
            "pixel buffer length must equal width * height"
        );
        Self {
            width,
            height,
            data,
        }
    }

    /// Constant-valued image.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Copy of the inclusive rectangle `(x0, y0)..=(x1, y1)`.
    pub fn crop(&self, x0: u32, y0: u32, x1: u32, y1: u32) -> GrayImage {
        assert!(
            x0 <= x1 && y0 <= y1 && x1 < self.width && y1 < self.height,
            "crop out of bounds"
        );
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut data = Vec::with_capacity(w as usize * h as usize);
        for y in y0..=y1 {
            let row = y as usize * self.width as usize;
            data.extend_from_slice(&self.data[row + x0 as usize..row + x1 as usize + 1]);
        }
        GrayImage::new(w, h, data)
    }
}

/// Boolean raster; `true` marks a candidate text (foreground) pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// All-false mask.
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    /// Wraps a row-major bit buffer. Panics unless `bits.len() == width * height`.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Self {
        assert_eq!(
            bits.len(),
            width as usize * height as usize,
            "bit buffer length must equal width * height"
        );
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// BT.601 luma with round-half-up.
pub fn to_gray(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    (y + 0.5).floor().min(255.0) as u8
}

/// Loads a PGM (binary P5) or PNG file as grayscale. Color PNGs are converted
/// pixel-wise via [`to_gray`]; alpha channels are composited over white first.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        load_png(path)
    } else if bytes.starts_with(b"P5") {
        parse_pgm(path, &bytes)
    } else {
        Err(Error::Format {
            path: path.to_path_buf(),
            reason: "unsupported format (expected binary PGM or PNG)".into(),
        })
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

struct PgmHeader {
    width: u32,
    height: u32,
    data_start: usize,
}

/// Reads the P5 header: magic, width, height, maxval, with `#` comments and
/// arbitrary whitespace between tokens, then exactly one whitespace byte
/// before the raster data.
fn parse_pgm_header(path: &Path, bytes: &[u8]) -> Result<PgmHeader> {
    let mut pos = 2; // past "P5"
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comment lines
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(path, "malformed PGM header"));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("digits are ASCII");
        *field = token
            .parse::<u32>()
            .map_err(|_| format_err(path, "PGM header field out of range"))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(format_err(path, "PGM dimensions must be at least 1x1"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(format_err(path, format!("unsupported PGM maxval {maxval}")));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(format_err(path, "malformed PGM header"));
    }
    pos += 1; // single whitespace byte before raster data
    Ok(PgmHeader {
        width,
        height,
        data_start: pos,
    })
}

fn parse_pgm(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let header = parse_pgm_header(path, bytes)?;
    let expected = header.width as usize * header.height as usize;
    let data = &bytes[header.data_start..];
    if data.len() < expected {
        return Err(format_err(path, "PGM raster data truncated"));
    }
    Ok(GrayImage::new(
        header.width,
        header.height,
        data[..expected].to_vec(),
    ))
}

/// Alpha compositing over a white background, rounded to nearest.
#[inline]
fn over_white(c: u8, a: u8) -> u8 {
    let x = c as u32 * a as u32 + 255 * (255 - a as u32);
    ((x + 127) / 255) as u8
}

fn load_png(path: &Path) -> Result<GrayImage> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    // Expand palette/low-bit-depth images and strip 16-bit down to 8.
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder
        .read_info()
        .map_err(|e| format_err(path, format!("PNG decode failed: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| format_err(path, "PNG dimensions overflow"))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| format_err(path, format!("PNG decode failed: {e}")))?;
    if info.width == 0 || info.height == 0 {
        return Err(format_err(path, "PNG dimensions must be at least 1x1"));
    }
    let pixels = info.width as usize * info.height as usize;
    let frame = &buf[..info.buffer_size()];
    let data: Vec<u8> = match info.color_type {
        png::ColorType::Grayscale => frame[..pixels].to_vec(),
        png::ColorType::GrayscaleAlpha => frame
            .chunks_exact(2)
            .map(|p| over_white(p[0], p[1]))
            .collect(),
        png::ColorType::Rgb => frame
            .chunks_exact(3)
            .map(|p| to_gray(p[0], p[1], p[2]))
            .collect(),
        png::ColorType::Rgba => frame
            .chunks_exact(4)
            .map(|p| {
                to_gray(
                    over_white(p[0], p[3]),
                    over_white(p[1], p[3]),
                    over_white(p[2], p[3]),
                )
            })
            .collect(),
        other => {
            return Err(format_err(
                path,
                format!("unsupported PNG color type {other:?}"),
            ));
        }
    };
    Ok(GrayImage::new(info.width, info.height, data))
}

/// Replicates the last column and/or row once so both dimensions are even.
/// Even-dimensioned inputs are returned unchanged.
pub fn pad_to_even(img: &GrayImage) -> GrayImage {
    let w = img.width() + (img.width() & 1);
    let h = img.height() + (img.height() & 1);
    if w == img.width() && h == img.height() {
        return img.clone();
    }
    let mut out = GrayImage::filled(w, h, 0);
    for y in 0..h {
        let sy = y.min(img.height() - 1);
        for x in 0..w {
            out.set(x, y, img.get(x.min(img.width() - 1), sy));
        }
    }
    out
}

fn write_pgm(path: &Path, width: u32, height: u32, data: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(data.len() + 32);
    out.extend_from_slice(format!("P5\n{width} {height}\n255\n").as_bytes());
    out.extend_from_slice(data);
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a grayscale image as binary PGM (P5, maxval 255).
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    write_pgm(path.as_ref(), img.width(), img.height(), img.data())
}

/// Writes a mask as binary PGM with 0 for false and 255 for true.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let data: Vec<u8> = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    write_pgm(path.as_ref(), mask.width(), mask.height(), &data)
}
