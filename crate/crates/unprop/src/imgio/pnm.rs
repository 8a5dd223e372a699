use std::path::Path;

use unprop_core::{Channels, Image};

use super::IoError;

fn is_pnm_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if is_pnm_space(b) {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

pub(super) fn decode(path: &Path, bytes: &[u8]) -> Result<Image, IoError> {
    let malformed = |reason: String| IoError::Malformed {
        path: path.into(),
        reason,
    };

    let channels = match &bytes[..2.min(bytes.len())] {
        b"P5" => Channels::Gray,
        b"P6" => Channels::Rgb,
        _ => {
            return Err(IoError::Unsupported {
                path: path.into(),
                reason: "not a binary PNM (expected P5 or P6)".into(),
            })
        }
    };

    let mut lexer = Lexer { bytes, pos: 2 };
    let width = lexer
        .number()
        .ok_or_else(|| malformed("missing or invalid width".into()))?;
    let height = lexer
        .number()
        .ok_or_else(|| malformed("missing or invalid height".into()))?;
    let maxval = lexer
        .number()
        .ok_or_else(|| malformed("missing or invalid maxval".into()))?;
    if width == 0 || height == 0 {
        return Err(malformed(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(IoError::Unsupported {
            path: path.into(),
            reason: format!("maxval {maxval}, only 255 is supported"),
        });
    }

    // Exactly one whitespace byte separates the header from the raster.
    if lexer.pos >= bytes.len() || !is_pnm_space(bytes[lexer.pos]) {
        return Err(malformed("missing whitespace after maxval".into()));
    }
    let raster_start = lexer.pos + 1;

    let need = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels.count()))
        .ok_or_else(|| malformed(format!("dimensions {width}x{height} overflow")))?;
    let found = bytes.len() - raster_start;
    if found < need {
        return Err(malformed(format!(
            "raster truncated: need {need} bytes, found {found}"
        )));
    }

    let data = bytes[raster_start..raster_start + need].to_vec();
    Image::new(width, height, channels, data)
        .map_err(|e| malformed(e.to_string()))
}

pub(super) fn encode(img: &Image) -> Vec<u8> {
    let magic = match img.channels() {
        Channels::Gray => "P5",
        Channels::Rgb => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}
