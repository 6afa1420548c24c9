//! Grayscale images and the 2-D discrete gradient.

use std::io::Read;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Row-major grayscale image.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::DimensionMismatch {
                context: "image pixels",
                expected: height * width,
                got: pixels.len(),
            });
        }
        Ok(Self { height, width, pixels })
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }

    /// Piecewise-constant test image (a bright rectangle and a darker disc on
    /// a mid-gray background) plus Gaussian noise of standard deviation `noise`.
    pub fn synthetic(height: usize, width: usize, noise: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise.max(0.0)).expect("finite standard deviation");
        let (h, w) = (height as f64, width as f64);
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                let (y, x) = (r as f64 / h, c as f64 / w);
                let mut v = 0.5;
                if (0.15..0.55).contains(&y) && (0.1..0.6).contains(&x) {
                    v = 0.9;
                }
                if (y - 0.7).powi(2) + (x - 0.7).powi(2) < 0.04 {
                    v = 0.2;
                }
                pixels.push(v + normal.sample(&mut rng));
            }
        }
        Self { height, width, pixels }
    }
}

/// Forward-difference gradient of an `h × w` image with `2hw` rows: row `2p`
/// is the horizontal and row `2p + 1` the vertical difference at pixel `p`.
/// Differences that would leave the image are zero rows.
pub fn discrete_gradient_2d(h: usize, w: usize) -> SparseMatrix {
    let n = h * w;
    let mut row_offsets = Vec::with_capacity(2 * n + 1);
    let mut col_indices = Vec::with_capacity(4 * n);
    let mut values = Vec::with_capacity(4 * n);
    row_offsets.push(0);
    for r in 0..h {
        for c in 0..w {
            let p = r * w + c;
            if c + 1 < w {
                col_indices.extend([p, p + 1]);
                values.extend([-1.0, 1.0]);
            }
            row_offsets.push(col_indices.len());
            if r + 1 < h {
                col_indices.extend([p, p + w]);
                values.extend([-1.0, 1.0]);
            }
            row_offsets.push(col_indices.len());
        }
    }
    SparseMatrix::new(2 * n, n, row_offsets, col_indices, values)
        .expect("gradient structure is valid by construction")
}

/// Reads a PGM (P2 or P5) scaled to `[0, 1]`, or a CSV of reals taken verbatim.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_image(&bytes)
}

pub fn parse_image(bytes: &[u8]) -> Result<Image> {
    match bytes.get(..2) {
        Some(b"P2") | Some(b"P5") => parse_pgm(bytes),
        Some([b'P', d]) if d.is_ascii_digit() => Err(Error::UnsupportedFormat(format!(
            "netpbm magic P{}",
            *d as char
        ))),
        _ => parse_csv_image(bytes),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn line(&self) -> usize {
        1 + self.bytes[..self.pos].iter().filter(|&&b| b == b'\n').count()
    }

    fn token(&mut self) -> Result<&str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.bytes.get(self.pos) == Some(&b'#') {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse { line: self.line(), message: "truncated PGM data".into() });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::Parse { line: self.line(), message: "non-ASCII header".into() })
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let line = self.line();
        let tok = self.token()?;
        tok.parse().map_err(|_| Error::Parse { line, message: format!("invalid {what} '{tok}'") })
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let binary = &bytes[..2] == b"P5";
    let mut rd = HeaderReader { bytes, pos: 2 };
    let width = rd.number("width")?;
    let height = rd.number("height")?;
    let maxval = rd.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse { line: rd.line(), message: format!("maxval {maxval} out of range") });
    }
    let n = width * height;
    let scale = maxval as f64;
    let mut pixels = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let start = rd.pos + 1;
        let bpp = if maxval < 256 { 1 } else { 2 };
        let raster = bytes.get(start..start + n * bpp).ok_or_else(|| Error::Parse {
            line: rd.line(),
            message: format!("truncated raster: expected {} bytes", n * bpp),
        })?;
        for k in 0..n {
            let v = if bpp == 1 {
                raster[k] as usize
            } else {
                ((raster[2 * k] as usize) << 8) | raster[2 * k + 1] as usize
            };
            pixels.push(v as f64 / scale);
        }
    } else {
        for _ in 0..n {
            pixels.push(rd.number("pixel")? as f64 / scale);
        }
    }
    Image::new(height, width, pixels)
}

fn parse_csv_image(bytes: &[u8]) -> Result<Image> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::UnsupportedFormat("image is neither PGM nor UTF-8 CSV".into()))?;
    let mut pixels = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid number '{}'", t.trim()),
                })
            })
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        pixels.extend(row);
        height += 1;
    }
    let width = width.ok_or(Error::Parse { line: 1, message: "empty image".into() })?;
    Image::new(height, width, pixels)
}
