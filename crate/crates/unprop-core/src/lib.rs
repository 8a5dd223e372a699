//! Seedable unproportional mosaicing.
//!
//! The augmentation partitions an image into randomly sized rectangles,
//! permutes their contents, and resizes each patch into its destination
//! slot with bicubic interpolation. Unlike a grid shuffle the rectangles
//! are deliberately unequal, so patch contents are rescaled by different
//! factors along each axis.
//!
//! Everything is driven by a caller-supplied [`ChaCha8Rng`], so a run is
//! reproducible from a single `u64` seed.
//!
//! ```
//! use unprop_core::{unprop, Channels, ChaCha8Rng, Image, SeedableRng, UnpropParams};
//!
//! let img = Image::filled(64, 48, Channels::Rgb, 128);
//! let params = UnpropParams { apply_prob: 1.0, ..UnpropParams::default() };
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! let (out, record) = unprop(img, &params, &mut rng).unwrap();
//! assert!(record.applied);
//! assert_eq!((out.width(), out.height()), (64, 48));
//! ```

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod augment;
mod geom;
mod image;
mod partition;
mod resample;
mod stream;

pub use augment::{
    apply_mosaic, grid_shuffle, is_augmentation_inconsistent, preserves_intensity_order,
    sample_record, unprop, AugmentationRecord, MosaicError, ParamsError, Permutation,
    PermutationError, RecordError, UnpropError, UnpropParams,
};
pub use geom::{Partition, PartitionViolation, Rect};
pub use image::{Channels, Image, ImageError, PatchView};
pub use partition::{
    generate_partition, grid_partition, refine_partition, split_rect, GridError, InvalidOffset,
    PartitionError, SplitDirection,
};
pub use resample::{cubic_kernel, resize_patch, KERNEL_SHARPNESS};
pub use stream::{item_rng, mix_seed};

pub use rand::{Rng, RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
