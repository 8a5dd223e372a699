use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Axis-aligned rectangle in image pixel coordinates.
///
/// `(x, y)` is the top-left corner; `w` and `h` are at least 1 for any
/// rectangle produced by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    /// Pixel count, widened so 65536x65536 does not overflow.
    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }
}

/// Ways a rectangle list can fail to tile its image exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PartitionViolation {
    #[error("rect {rect} exceeds the {width}x{height} image bounds")]
    OutOfBounds { rect: usize, width: u32, height: u32 },
    #[error("rects {first} and {second} overlap at ({x}, {y})")]
    Overlap {
        first: usize,
        second: usize,
        x: u32,
        y: u32,
    },
    #[error("no rect covers ({x}, {y})")]
    Gap { x: u32, y: u32 },
}

/// A set of rectangles intended to tile a `image_width` x `image_height`
/// canvas exactly: every pixel covered once, no overlap, no spill.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Partition {
    pub image_width: u32,
    pub image_height: u32,
    pub rects: Vec<Rect>,
}

impl Partition {
    /// Checks the exact-tiling invariant by rasterizing rect ownership.
    ///
    /// Reports the first violation found: bounds are checked per rect in
    /// list order, then overlap during the paint (pixel already owned),
    /// then gaps in row-major scan order.
    pub fn validate(&self) -> Result<(), PartitionViolation> {
        let w = self.image_width as usize;
        let h = self.image_height as usize;
        let mut owner: Vec<u32> = vec![0; w * h];

        for (i, r) in self.rects.iter().enumerate() {
            let x1 = u64::from(r.x) + u64::from(r.w);
            let y1 = u64::from(r.y) + u64::from(r.h);
            if r.w == 0
                || r.h == 0
                || x1 > u64::from(self.image_width)
                || y1 > u64::from(self.image_height)
            {
                return Err(PartitionViolation::OutOfBounds {
                    rect: i,
                    width: self.image_width,
                    height: self.image_height,
                });
            }
            for y in r.y..r.y + r.h {
                let row = y as usize * w;
                for x in r.x..r.x + r.w {
                    let cell = &mut owner[row + x as usize];
                    if *cell != 0 {
                        return Err(PartitionViolation::Overlap {
                            first: (*cell - 1) as usize,
                            second: i,
                            x,
                            y,
                        });
                    }
                    *cell = i as u32 + 1;
                }
            }
        }

        if let Some(idx) = owner.iter().position(|&c| c == 0) {
            return Err(PartitionViolation::Gap {
                x: (idx % w) as u32,
                y: (idx / w) as u32,
            });
        }
        Ok(())
    }
}
