use std::io::Cursor;
use std::path::Path;

use unprop_core::{Channels, Image};

use super::IoError;

pub(super) fn decode(path: &Path, bytes: &[u8]) -> Result<Image, IoError> {
    let malformed = |e: png::DecodingError| IoError::Malformed {
        path: path.into(),
        reason: e.to_string(),
    };

    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(malformed)?;

    let info = reader.info();
    let channels = match (info.color_type, info.bit_depth) {
        (png::ColorType::Grayscale, png::BitDepth::Eight) => Channels::Gray,
        (png::ColorType::Rgb, png::BitDepth::Eight) => Channels::Rgb,
        (color, depth) => {
            return Err(IoError::Unsupported {
                path: path.into(),
                reason: format!(
                    "{color:?} at {depth:?} bit depth, only 8-bit grayscale and RGB are supported"
                ),
            })
        }
    };

    let size = reader.output_buffer_size().ok_or_else(|| IoError::Malformed {
        path: path.into(),
        reason: "declared dimensions overflow the output buffer".into(),
    })?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(malformed)?;
    buf.truncate(frame.buffer_size());
    Image::new(frame.width, frame.height, channels, buf).map_err(|e| IoError::Malformed {
        path: path.into(),
        reason: e.to_string(),
    })
}

pub(super) fn encode(path: &Path, img: &Image) -> Result<Vec<u8>, IoError> {
    let failed = |e: png::EncodingError| IoError::Io {
        path: path.into(),
        source: std::io::Error::other(e),
    };

    let mut out = Vec::new();
    let mut encoder = png::Encoder::new(&mut out, img.width(), img.height());
    encoder.set_color(match img.channels() {
        Channels::Gray => png::ColorType::Grayscale,
        Channels::Rgb => png::ColorType::Rgb,
    });
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(failed)?;
    writer.write_image_data(img.data()).map_err(failed)?;
    writer.finish().map_err(failed)?;
    Ok(out)
}
