use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::Rect;

/// Channel layouts the pipeline understands: 8-bit grayscale or RGB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("pixel buffer holds {got} bytes, expected {expected}")]
    BufferSize { got: usize, expected: usize },
    #[error("region {region:?} exceeds the {width}x{height} image bounds")]
    RegionOutOfBounds {
        region: Rect,
        width: u32,
        height: u32,
    },
}

/// Row-major interleaved 8-bit raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: Channels,
    data: Vec<u8>,
}

impl Image {
    /// Wraps an existing buffer; it must hold exactly
    /// `width * height * channels.count()` bytes.
    pub fn new(width: u32, height: u32, channels: Channels, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize * channels.count();
        if data.len() != expected {
            return Err(ImageError::BufferSize {
                got: data.len(),
                expected,
            });
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    /// Solid-color image, every channel of every pixel set to `value`.
    pub fn filled(width: u32, height: u32, channels: Channels, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be at least 1x1");
        let len = width as usize * height as usize * channels.count();
        Image {
            width,
            height,
            channels,
            data: vec![value; len],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Channel `c` of the pixel at `(x, y)`. Panics out of bounds.
    pub fn pixel(&self, x: u32, y: u32, c: usize) -> u8 {
        assert!(x < self.width && y < self.height && c < self.channels.count());
        let idx = (y as usize * self.width as usize + x as usize) * self.channels.count() + c;
        self.data[idx]
    }

    /// Borrowed view of a rectangular region, for patch resampling.
    pub fn view(&self, region: Rect) -> Result<PatchView<'_>, ImageError> {
        let x1 = u64::from(region.x) + u64::from(region.w);
        let y1 = u64::from(region.y) + u64::from(region.h);
        if region.w == 0
            || region.h == 0
            || x1 > u64::from(self.width)
            || y1 > u64::from(self.height)
        {
            return Err(ImageError::RegionOutOfBounds {
                region,
                width: self.width,
                height: self.height,
            });
        }
        Ok(PatchView {
            image: self,
            region,
        })
    }
}

/// Read-only window into an [`Image`]; coordinates are region-local.
#[derive(Debug, Clone, Copy)]
pub struct PatchView<'a> {
    image: &'a Image,
    region: Rect,
}

impl<'a> PatchView<'a> {
    pub fn width(&self) -> u32 {
        self.region.w
    }

    pub fn height(&self) -> u32 {
        self.region.h
    }

    pub fn channels(&self) -> Channels {
        self.image.channels()
    }

    /// Channel `c` at region-local `(x, y)`. Panics out of bounds.
    pub fn sample(&self, x: u32, y: u32, c: usize) -> u8 {
        assert!(x < self.region.w && y < self.region.h);
        self.image.pixel(self.region.x + x, self.region.y + y, c)
    }
}
