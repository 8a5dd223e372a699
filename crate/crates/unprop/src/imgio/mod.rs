use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use unprop_core::{Channels, Image};

mod png_io;
mod pnm;

/// On-disk formats the tool reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFileFormat {
    Png,
    /// Binary PNM: P5 for grayscale, P6 for RGB.
    PpmBinary,
}

impl ImageFileFormat {
    /// Picks a format from a file extension, case-insensitive.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFileFormat::Png),
            "ppm" | "pgm" | "pnm" => Some(ImageFileFormat::PpmBinary),
            _ => None,
        }
    }

    /// Conventional extension for an image with `channels`.
    pub fn extension(self, channels: Channels) -> &'static str {
        match (self, channels) {
            (ImageFileFormat::Png, _) => "png",
            (ImageFileFormat::PpmBinary, Channels::Gray) => "pgm",
            (ImageFileFormat::PpmBinary, Channels::Rgb) => "ppm",
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("{path}: unsupported: {reason}")]
    Unsupported { path: PathBuf, reason: String },
}

/// Loads a PNG or binary PNM image, sniffing the container from its
/// magic bytes rather than the file name.
pub fn load_image(path: &Path) -> Result<Image, IoError> {
    let bytes = fs::read(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    if bytes.starts_with(b"\x89PNG") {
        png_io::decode(path, &bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        pnm::decode(path, &bytes)
    } else {
        Err(IoError::Unsupported {
            path: path.into(),
            reason: "unrecognized magic bytes, expected PNG, P5, or P6".into(),
        })
    }
}

/// Writes `img` to `path` in `format`; the PNM flavor follows the
/// channel count.
pub fn save_image(img: &Image, path: &Path, format: ImageFileFormat) -> Result<(), IoError> {
    let bytes = match format {
        ImageFileFormat::Png => png_io::encode(path, img)?,
        ImageFileFormat::PpmBinary => pnm::encode(img),
    };
    fs::write(path, bytes).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}
