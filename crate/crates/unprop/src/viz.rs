use thiserror::Error;
use unprop_core::{Channels, Image, Partition};

/// Border color drawn on RGB overlays.
pub const BORDER_RGB: [u8; 3] = [255, 0, 0];
/// Border value drawn on grayscale overlays.
pub const BORDER_GRAY: u8 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum VizError {
    #[error("partition is for a {partition_width}x{partition_height} image, got {image_width}x{image_height}")]
    GeometryMismatch {
        partition_width: u32,
        partition_height: u32,
        image_width: u32,
        image_height: u32,
    },
    #[error("images of {left_height}px and {right_height}px height cannot sit side by side")]
    HeightMismatch {
        left_height: u32,
        right_height: u32,
    },
    #[error("images with different channel counts cannot sit side by side")]
    ChannelMismatch,
}

fn paint(img: &mut Image, x: u32, y: u32) {
    let ch = img.channels();
    let idx = (y as usize * img.width() as usize + x as usize) * ch.count();
    match ch {
        Channels::Gray => img.data_mut()[idx] = BORDER_GRAY,
        Channels::Rgb => img.data_mut()[idx..idx + 3].copy_from_slice(&BORDER_RGB),
    }
}

/// Copy of `img` with every rect's top row and left column painted,
/// plus the image's bottom row and right column, so each internal seam
/// shows as a single-pixel line and the canvas is fully framed.
pub fn draw_partition_borders(img: &Image, partition: &Partition) -> Result<Image, VizError> {
    if partition.image_width != img.width() || partition.image_height != img.height() {
        return Err(VizError::GeometryMismatch {
            partition_width: partition.image_width,
            partition_height: partition.image_height,
            image_width: img.width(),
            image_height: img.height(),
        });
    }
    let mut out = img.clone();
    for r in &partition.rects {
        for x in r.x..r.x + r.w {
            paint(&mut out, x, r.y);
        }
        for y in r.y..r.y + r.h {
            paint(&mut out, r.x, y);
        }
    }
    let w = img.width();
    let h = img.height();
    for x in 0..w {
        paint(&mut out, x, h - 1);
    }
    for y in 0..h {
        paint(&mut out, w - 1, y);
    }
    Ok(out)
}

/// How many pixels [`draw_partition_borders`] paints for `partition`:
/// a pixel is a border pixel when it lies on the image frame or when
/// the rect owning it differs from the rect owning its left or upper
/// neighbor. The partition must tile its image exactly.
pub fn border_pixel_count(partition: &Partition) -> u64 {
    let w = partition.image_width as usize;
    let h = partition.image_height as usize;
    let mut owner = vec![usize::MAX; w * h];
    for (i, r) in partition.rects.iter().enumerate() {
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                owner[y as usize * w + x as usize] = i;
            }
        }
    }
    debug_assert!(owner.iter().all(|&o| o != usize::MAX), "partition must tile");

    let mut count = 0u64;
    for y in 0..h {
        for x in 0..w {
            let here = owner[y * w + x];
            let on_frame = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if on_frame || owner[y * w + x - 1] != here || owner[(y - 1) * w + x] != here {
                count += 1;
            }
        }
    }
    count
}

/// Joins two images of equal height and channel layout into one canvas,
/// `left` on the left.
pub fn compose_side_by_side(left: &Image, right: &Image) -> Result<Image, VizError> {
    if left.height() != right.height() {
        return Err(VizError::HeightMismatch {
            left_height: left.height(),
            right_height: right.height(),
        });
    }
    if left.channels() != right.channels() {
        return Err(VizError::ChannelMismatch);
    }
    let ch = left.channels().count();
    let lw = left.width() as usize * ch;
    let rw = right.width() as usize * ch;
    let mut data = Vec::with_capacity((lw + rw) * left.height() as usize);
    for y in 0..left.height() as usize {
        data.extend_from_slice(&left.data()[y * lw..(y + 1) * lw]);
        data.extend_from_slice(&right.data()[y * rw..(y + 1) * rw]);
    }
    Ok(
        Image::new(left.width() + right.width(), left.height(), left.channels(), data)
            .expect("composed buffer sized to both inputs"),
    )
}
