//! 8-bit greyscale PGM (P2 plain, P5 binary) reading and writing.
//!
//! Dark pixels are membranes: a value below the threshold becomes
//! [`Phase::Lipid`], anything else [`Phase::Aqueous`]. Writing uses 0 for lipid
//! and 255 for aqueous pixels.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ExperimentError, Phase, PhaseMask};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskReadOptions {
    /// Grey level separating the phases; `None` uses `maxval / 2`.
    pub threshold: Option<f64>,
    pub pixel_size: f64,
}

impl Default for MaskReadOptions {
    fn default() -> Self {
        Self { threshold: None, pixel_size: 1.0 }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn error(&self, message: impl Into<String>) -> ExperimentError {
        ExperimentError::Parse { offset: self.pos, message: message.into() }
    }

    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ExperimentError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(format!("expected {what}")));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or_default();
        digits.parse().map_err(|_| ExperimentError::Parse {
            offset: start,
            message: format!("{what} out of range"),
        })
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<PgmImage, ExperimentError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if bytes.len() < 2 || bytes[0] != b'P' || !(bytes[1] == b'2' || bytes[1] == b'5') {
        return Err(cur.error("missing P2/P5 magic number"));
    }
    let binary = bytes[1] == b'5';
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_space();
    let maxval_pos = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ExperimentError::Parse { offset: maxval_pos, message: "empty image".into() });
    }
    if maxval == 0 || maxval > 255 {
        return Err(ExperimentError::Parse {
            offset: maxval_pos,
            message: format!("maxval {maxval} unsupported (8-bit only)"),
        });
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(cur.error("expected whitespace before raster"));
        }
        cur.pos += 1;
        let raster = &bytes[cur.pos..];
        if raster.len() < count {
            cur.pos = bytes.len();
            return Err(cur.error(format!("raster truncated: {} of {count} bytes", raster.len())));
        }
        pixels.extend_from_slice(&raster[..count]);
    } else {
        for _ in 0..count {
            let at = {
                cur.skip_space();
                cur.pos
            };
            let v = cur.number("pixel value")?;
            if v > maxval {
                return Err(ExperimentError::Parse { offset: at, message: format!("pixel {v} exceeds maxval") });
            }
            pixels.push(v as u8);
        }
    }
    if let Some(&v) = pixels.iter().find(|v| usize::from(**v) > maxval) {
        return Err(cur.error(format!("pixel {v} exceeds maxval")));
    }
    Ok(PgmImage { width, height, maxval: maxval as u16, pixels })
}

impl PgmImage {
    pub fn to_mask(&self, options: &MaskReadOptions) -> Result<PhaseMask, ExperimentError> {
        let threshold = options.threshold.unwrap_or(f64::from(self.maxval) / 2.0);
        let labels = self
            .pixels
            .iter()
            .map(|&v| if f64::from(v) < threshold { Phase::Lipid } else { Phase::Aqueous })
            .collect();
        let mut mask = PhaseMask::new(self.width, self.height, labels, options.pixel_size)?;
        if options.threshold.is_none() {
            let grey = self
                .pixels
                .iter()
                .filter(|v| **v != 0 && u16::from(**v) != self.maxval)
                .count();
            if grey > 0 {
                mask.warnings.push(format!(
                    "{grey} non-binary pixels thresholded at {threshold}"
                ));
            }
        }
        Ok(mask)
    }
}

pub fn read_mask(path: impl AsRef<Path>, options: &MaskReadOptions) -> Result<PhaseMask, ExperimentError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
    parse_pgm(&bytes)?.to_mask(options)
}

pub fn write_pgm(mask: &PhaseMask, path: impl AsRef<Path>, binary: bool) -> Result<(), ExperimentError> {
    let path = path.as_ref();
    let io_err = |source| ExperimentError::Io { path: path.to_path_buf(), source };
    let mut out = Vec::new();
    let value = |p: &Phase| match p {
        Phase::Lipid => 0u8,
        Phase::Aqueous => 255u8,
    };
    let magic = if binary { "P5" } else { "P2" };
    write!(out, "{magic}\n{} {}\n255\n", mask.width(), mask.height()).map_err(io_err)?;
    if binary {
        out.extend(mask.labels().iter().map(value));
    } else {
        for row in mask.labels().chunks(mask.width()) {
            let line: Vec<String> = row.iter().map(|p| value(p).to_string()).collect();
            writeln!(out, "{}", line.join(" ")).map_err(io_err)?;
        }
    }
    fs::write(path, out).map_err(io_err)
}
