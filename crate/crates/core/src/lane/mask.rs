//! Labeled segmentation raster and its binary PGM (P5) exchange format.

use crate::{Error, Result};

/// Maximum lane label; 0 is background, 1..4 are the lane instances
/// left-left, left, right, right-right.
pub const MAX_LABEL: u8 = 4;

/// Row-major 8-bit label grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SegMask {
    pub width: usize,
    pub height: usize,
    labels: Vec<u8>,
}

impl SegMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            labels: vec![0; width * height],
        }
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::MalformedPgm(format!(
                "label buffer {} does not match {}x{}",
                labels.len(),
                width,
                height
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > MAX_LABEL) {
            return Err(Error::MalformedPgm(format!("label {bad} out of range 0..=4")));
        }
        Ok(Self { width, height, labels })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, label: u8) {
        debug_assert!(label <= MAX_LABEL);
        self.labels[y * self.width + x] = label;
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn count_label(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Parse a binary PGM (P5, maxval <= 255) whose raw bytes are labels 0..4.
    pub fn from_pgm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;

        fn skip_ws(bytes: &[u8], mut pos: usize) -> usize {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    return pos;
                }
            }
        }

        fn read_token(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
            let start = skip_ws(bytes, pos);
            let mut end = start;
            while end < bytes.len() && !bytes[end].is_ascii_whitespace() {
                end += 1;
            }
            if start == end {
                return Err(Error::MalformedPgm("unexpected end of header".into()));
            }
            let token = std::str::from_utf8(&bytes[start..end])
                .map_err(|_| Error::MalformedPgm("non-ascii header".into()))?;
            let value: usize = token
                .parse()
                .map_err(|_| Error::MalformedPgm(format!("bad header token `{token}`")))?;
            Ok((value, end))
        }

        if bytes.len() < 2 || &bytes[0..2] != b"P5" {
            return Err(Error::MalformedPgm("missing P5 magic".into()));
        }
        pos += 2;

        let (width, p) = read_token(bytes, pos)?;
        let (height, p) = read_token(bytes, p)?;
        let (maxval, p) = read_token(bytes, p)?;
        pos = p;
        if maxval == 0 || maxval > 255 {
            return Err(Error::MalformedPgm(format!("unsupported maxval {maxval}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::MalformedPgm("zero dimension".into()));
        }
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let need = width * height;
        if bytes.len() < pos + need {
            return Err(Error::MalformedPgm(format!(
                "raster truncated: need {need} bytes, have {}",
                bytes.len().saturating_sub(pos)
            )));
        }
        Self::from_labels(width, height, bytes[pos..pos + need].to_vec())
    }

    /// Serialize as binary PGM with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.labels);
        out
    }
}
