use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::geom::{Partition, Rect};

/// Cut orientation. A vertical cut runs top to bottom and splits the
/// width; a horizontal cut runs left to right and splits the height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitDirection {
    Vertical,
    Horizontal,
}

impl SplitDirection {
    pub fn flipped(self) -> Self {
        match self {
            SplitDirection::Vertical => SplitDirection::Horizontal,
            SplitDirection::Horizontal => SplitDirection::Vertical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("offset {offset} outside [1, {}] for a {direction:?} split of extent {extent}", extent.saturating_sub(1))]
pub struct InvalidOffset {
    pub direction: SplitDirection,
    pub extent: u32,
    pub offset: u32,
}

/// Splits `rect` into two abutting children at `offset` pixels from its
/// left (vertical cut) or top (horizontal cut) edge. The offset must
/// leave both children at least one pixel wide.
pub fn split_rect(
    rect: Rect,
    direction: SplitDirection,
    offset: u32,
) -> Result<(Rect, Rect), InvalidOffset> {
    let extent = match direction {
        SplitDirection::Vertical => rect.w,
        SplitDirection::Horizontal => rect.h,
    };
    if offset == 0 || offset >= extent {
        return Err(InvalidOffset {
            direction,
            extent,
            offset,
        });
    }
    let pair = match direction {
        SplitDirection::Vertical => (
            Rect::new(rect.x, rect.y, offset, rect.h),
            Rect::new(rect.x + offset, rect.y, rect.w - offset, rect.h),
        ),
        SplitDirection::Horizontal => (
            Rect::new(rect.x, rect.y, rect.w, offset),
            Rect::new(rect.x, rect.y + offset, rect.w, rect.h - offset),
        ),
    };
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("target rect count must be at least 2, got {target}")]
    TargetBelowMinimum { target: u32 },
    #[error("{width}x{height} image cannot host {target} rects of at least one pixel")]
    Infeasible {
        width: u32,
        height: u32,
        target: u32,
    },
}

/// Uniform offset in `[1, extent - 1]`, re-rolled once if it would halve
/// an even extent exactly; a second exact half is nudged one pixel right.
/// Extent 2 admits only the equal 1 + 1 split and consumes no randomness.
fn sample_unequal_offset<R: Rng + ?Sized>(extent: u32, rng: &mut R) -> u32 {
    debug_assert!(extent >= 2);
    if extent == 2 {
        return 1;
    }
    let mut offset = rng.gen_range(1..extent);
    if extent.is_multiple_of(2) && offset == extent / 2 {
        offset = rng.gen_range(1..extent);
        if offset == extent / 2 {
            offset = (extent / 2 + 1).min(extent - 1);
        }
    }
    offset
}

/// Grows a partition from the whole canvas by repeated random splits
/// until it holds exactly `target` rects.
///
/// Each iteration draws a candidate rect (1x1 rects are dropped from the
/// pool and redrawn), then a cut direction (flipped when the drawn axis
/// is a single pixel), then an offset biased away from equal halves.
pub fn generate_partition<R: Rng + ?Sized>(
    width: u32,
    height: u32,
    target: u32,
    rng: &mut R,
) -> Result<Partition, PartitionError> {
    if target < 2 {
        return Err(PartitionError::TargetBelowMinimum { target });
    }
    if u64::from(width) * u64::from(height) < u64::from(target) {
        return Err(PartitionError::Infeasible {
            width,
            height,
            target,
        });
    }

    let mut rects = vec![Rect::new(0, 0, width, height)];
    let mut pool: Vec<usize> = vec![0];

    while rects.len() < target as usize {
        let idx = loop {
            debug_assert!(!pool.is_empty(), "splittable area cannot run out before target");
            let at = rng.gen_range(0..pool.len() as u32) as usize;
            let idx = pool[at];
            if rects[idx].w == 1 && rects[idx].h == 1 {
                pool.remove(at);
            } else {
                break idx;
            }
        };

        let rect = rects[idx];
        let mut direction = if rng.gen_range(0..2u32) == 0 {
            SplitDirection::Vertical
        } else {
            SplitDirection::Horizontal
        };
        let drawn_extent = match direction {
            SplitDirection::Vertical => rect.w,
            SplitDirection::Horizontal => rect.h,
        };
        if drawn_extent == 1 {
            direction = direction.flipped();
        }
        let extent = match direction {
            SplitDirection::Vertical => rect.w,
            SplitDirection::Horizontal => rect.h,
        };

        let offset = sample_unequal_offset(extent, rng);
        let (a, b) = split_rect(rect, direction, offset)
            .expect("sampled offset is always within [1, extent - 1]");
        rects[idx] = a;
        rects.push(b);
        pool.push(rects.len() - 1);
    }

    Ok(Partition {
        image_width: width,
        image_height: height,
        rects,
    })
}

fn satisfies_aspect(rect: Rect, floor: f64) -> bool {
    let lo = rect.w.min(rect.h) as f64;
    let hi = rect.w.max(rect.h) as f64;
    lo / hi >= floor
}

/// Splits aspect-ratio violators until none remain or `max_steps` extra
/// cuts have been spent, and returns the number of cuts made.
///
/// The threshold is normalized to `min(aspect_ratio, 1 / aspect_ratio)`,
/// and a rect passes when its short side over its long side reaches it.
/// Violators are fixed in list order, cut across the longer axis at the
/// midpoint, shifted one pixel right on even extents above 2 so the
/// children stay unequal.
pub fn refine_partition(partition: &mut Partition, aspect_ratio: f64, max_steps: u32) -> u32 {
    debug_assert!(aspect_ratio > 0.0);
    let floor = aspect_ratio.min(1.0 / aspect_ratio);
    let mut used = 0;
    while used < max_steps {
        let Some(idx) = partition
            .rects
            .iter()
            .position(|&r| !satisfies_aspect(r, floor))
        else {
            break;
        };
        let rect = partition.rects[idx];
        let (direction, extent) = if rect.w >= rect.h {
            (SplitDirection::Vertical, rect.w)
        } else {
            (SplitDirection::Horizontal, rect.h)
        };
        let offset = if extent % 2 == 0 && extent > 2 {
            extent / 2 + 1
        } else {
            extent / 2
        };
        let (a, b) = split_rect(rect, direction, offset)
            .expect("violators have a splittable longer axis");
        partition.rects[idx] = a;
        partition.rects.push(b);
        used += 1;
    }
    used
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid must have at least 2 cells, got {rows}x{cols}")]
    TooFewCells { rows: u32, cols: u32 },
    #[error("{rows}x{cols} grid does not fit a {width}x{height} image")]
    GridExceedsImage {
        rows: u32,
        cols: u32,
        width: u32,
        height: u32,
    },
}

/// Equal-cell baseline partition in row-major cell order; division
/// remainders go to the last column and last row.
pub fn grid_partition(width: u32, height: u32, rows: u32, cols: u32) -> Result<Partition, GridError> {
    if u64::from(rows) * u64::from(cols) < 2 {
        return Err(GridError::TooFewCells { rows, cols });
    }
    if cols > width || rows > height {
        return Err(GridError::GridExceedsImage {
            rows,
            cols,
            width,
            height,
        });
    }
    let cell_w = width / cols;
    let cell_h = height / rows;
    let mut rects = Vec::with_capacity(rows as usize * cols as usize);
    for row in 0..rows {
        let h = if row == rows - 1 { height - cell_h * (rows - 1) } else { cell_h };
        for col in 0..cols {
            let w = if col == cols - 1 { width - cell_w * (cols - 1) } else { cell_w };
            rects.push(Rect::new(col * cell_w, row * cell_h, w, h));
        }
    }
    Ok(Partition {
        image_width: width,
        image_height: height,
        rects,
    })
}
