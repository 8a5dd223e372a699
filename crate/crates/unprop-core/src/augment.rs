use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::geom::Partition;
use crate::image::Image;
use crate::partition::{generate_partition, grid_partition, refine_partition, GridError, PartitionError};
use crate::resample::resize_patch;

/// Knobs of the mosaicing augmentation.
///
/// `aspect_ratio` bounds how elongated a rect may stay after refinement
/// (values above and below 1 mean the same bound), `target_rects` is the
/// partition size before refinement, `refine_steps` caps the extra cuts
/// refinement may spend, and `apply_prob` gates whether a given draw
/// augments at all. `seed` is carried so records and manifests can name
/// their origin; callers derive the actual RNG stream from it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UnpropParams {
    pub aspect_ratio: f64,
    pub target_rects: u32,
    pub refine_steps: u32,
    pub apply_prob: f64,
    pub seed: u64,
}

impl Default for UnpropParams {
    fn default() -> Self {
        UnpropParams {
            aspect_ratio: 1.18,
            target_rects: 5,
            refine_steps: 7,
            apply_prob: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamsError {
    #[error("aspect ratio must be positive and finite, got {got}")]
    AspectRatio { got: f64 },
    #[error("target rect count must be at least 2, got {got}")]
    TargetRects { got: u32 },
    #[error("apply probability must be within [0, 1], got {got}")]
    ApplyProb { got: f64 },
}

impl UnpropParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if !self.aspect_ratio.is_finite() || self.aspect_ratio <= 0.0 {
            return Err(ParamsError::AspectRatio {
                got: self.aspect_ratio,
            });
        }
        if self.target_rects < 2 {
            return Err(ParamsError::TargetRects {
                got: self.target_rects,
            });
        }
        if !(self.apply_prob >= 0.0 && self.apply_prob <= 1.0) {
            return Err(ParamsError::ApplyProb {
                got: self.apply_prob,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("index {value} at position {position} is out of range for length {len}")]
    OutOfRange {
        position: usize,
        value: usize,
        len: usize,
    },
    #[error("index {value} appears more than once")]
    Duplicate { value: usize },
}

/// Bijection over rect indices. `mapping()[d] = s` means destination
/// slot `d` receives the content of source rect `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<usize>", into = "Vec<usize>"))]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation {
            mapping: (0..len).collect(),
        }
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut mapping: Vec<usize> = (0..len).collect();
        mapping.shuffle(rng);
        Permutation { mapping }
    }

    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self, PermutationError> {
        let len = mapping.len();
        let mut seen = vec![false; len];
        for (position, &value) in mapping.iter().enumerate() {
            if value >= len {
                return Err(PermutationError::OutOfRange {
                    position,
                    value,
                    len,
                });
            }
            if seen[value] {
                return Err(PermutationError::Duplicate { value });
            }
            seen[value] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| i == v)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermutationError;

    fn try_from(mapping: Vec<usize>) -> Result<Self, Self::Error> {
        Permutation::from_mapping(mapping)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.mapping
    }
}

/// Outcome of one augmentation draw: whether the gate fired and, if so,
/// the geometry needed to reproduce or audit the exact transform.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AugmentationRecord {
    pub applied: bool,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub partition: Option<Partition>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub permutation: Option<Permutation>,
    pub params: UnpropParams,
}

impl AugmentationRecord {
    pub fn skipped(params: UnpropParams) -> Self {
        AugmentationRecord {
            applied: false,
            partition: None,
            permutation: None,
            params,
        }
    }

    pub fn applied(partition: Partition, permutation: Permutation, params: UnpropParams) -> Self {
        AugmentationRecord {
            applied: true,
            partition: Some(partition),
            permutation: Some(permutation),
            params,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("the augmentation was not applied, no geometry to inspect")]
    NotApplied,
    #[error("applied record is missing partition or permutation data")]
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MosaicError {
    #[error("partition is for a {partition_width}x{partition_height} image, got {image_width}x{image_height}")]
    GeometryMismatch {
        partition_width: u32,
        partition_height: u32,
        image_width: u32,
        image_height: u32,
    },
    #[error("permutation length {permutation} does not match {rects} rects")]
    LengthMismatch { rects: usize, permutation: usize },
    #[error("rect {rect} exceeds the image bounds")]
    RectOutOfBounds { rect: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum UnpropError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Draws the augmentation decision and, when it fires, the partition and
/// permutation for a `width` x `height` image. Consumes no pixel data.
///
/// The gate comes first in the RNG stream: one uniform draw in [0, 1),
/// applied iff it is below `apply_prob`. Feasibility is checked before
/// any randomness so an error leaves the stream untouched.
pub fn sample_record<R: Rng + ?Sized>(
    width: u32,
    height: u32,
    params: &UnpropParams,
    rng: &mut R,
) -> Result<AugmentationRecord, UnpropError> {
    params.validate()?;
    if u64::from(width) * u64::from(height) < u64::from(params.target_rects) {
        return Err(UnpropError::Partition(PartitionError::Infeasible {
            width,
            height,
            target: params.target_rects,
        }));
    }
    let draw: f64 = rng.gen();
    if draw >= params.apply_prob {
        return Ok(AugmentationRecord::skipped(*params));
    }
    let mut partition = generate_partition(width, height, params.target_rects, rng)
        .expect("feasibility checked above");
    refine_partition(&mut partition, params.aspect_ratio, params.refine_steps);
    let permutation = Permutation::random(partition.rects.len(), rng);
    Ok(AugmentationRecord::applied(partition, permutation, *params))
}

/// Rebuilds an image from a partition and permutation: the content of
/// rect `mapping[d]` is bicubically resized to the geometry of rect `d`
/// and written there.
///
/// Checks geometry, length, and rect bounds; exact tiling is the
/// caller's contract (use [`Partition::validate`] on untrusted input).
pub fn apply_mosaic(
    img: &Image,
    partition: &Partition,
    permutation: &Permutation,
) -> Result<Image, MosaicError> {
    if partition.image_width != img.width() || partition.image_height != img.height() {
        return Err(MosaicError::GeometryMismatch {
            partition_width: partition.image_width,
            partition_height: partition.image_height,
            image_width: img.width(),
            image_height: img.height(),
        });
    }
    if permutation.len() != partition.rects.len() {
        return Err(MosaicError::LengthMismatch {
            rects: partition.rects.len(),
            permutation: permutation.len(),
        });
    }
    for (i, r) in partition.rects.iter().enumerate() {
        let x1 = u64::from(r.x) + u64::from(r.w);
        let y1 = u64::from(r.y) + u64::from(r.h);
        if r.w == 0 || r.h == 0 || x1 > u64::from(img.width()) || y1 > u64::from(img.height()) {
            return Err(MosaicError::RectOutOfBounds { rect: i });
        }
    }

    let ch = img.channels().count();
    let width = img.width() as usize;
    let mut out = vec![0u8; img.data().len()];
    for (d, &s) in permutation.mapping().iter().enumerate() {
        let dst = partition.rects[d];
        let src = partition.rects[s];
        let patch = img.view(src).expect("rect bounds checked above");
        let resized = resize_patch(&patch, dst.w, dst.h);
        let row_bytes = dst.w as usize * ch;
        for row in 0..dst.h as usize {
            let from = row * row_bytes;
            let to = ((dst.y as usize + row) * width + dst.x as usize) * ch;
            out[to..to + row_bytes].copy_from_slice(&resized.data()[from..from + row_bytes]);
        }
    }
    Ok(Image::new(img.width(), img.height(), img.channels(), out)
        .expect("output buffer sized to the input image"))
}

/// The full augmentation: gate, partition, refine, permute, resample.
/// Returns the (possibly untouched) image and the record of what
/// happened. When the gate does not fire the input buffer is returned
/// as is, with no copy.
pub fn unprop<R: Rng + ?Sized>(
    img: Image,
    params: &UnpropParams,
    rng: &mut R,
) -> Result<(Image, AugmentationRecord), UnpropError> {
    let record = sample_record(img.width(), img.height(), params, rng)?;
    if !record.applied {
        return Ok((img, record));
    }
    let out = apply_mosaic(
        &img,
        record.partition.as_ref().expect("applied record has a partition"),
        record.permutation.as_ref().expect("applied record has a permutation"),
    )
    .expect("generated geometry fits the image it was drawn for");
    Ok((out, record))
}

/// Equal-cell shuffle baseline: partitions the image into a `rows` x
/// `cols` grid and permutes cell contents. Remainder pixels from the
/// division go to the last row and column, so those cells resample.
pub fn grid_shuffle<R: Rng + ?Sized>(
    img: &Image,
    rows: u32,
    cols: u32,
    rng: &mut R,
) -> Result<(Image, Partition, Permutation), GridError> {
    let partition = grid_partition(img.width(), img.height(), rows, cols)?;
    let permutation = Permutation::random(partition.rects.len(), rng);
    let out = apply_mosaic(img, &partition, &permutation)
        .expect("grid partition fits its own image");
    Ok((out, partition, permutation))
}

/// Whether any two moves of an applied record rescale content by
/// different factors, compared exactly as integer ratios. The identity
/// permutation is always consistent (every factor is 1).
pub fn is_augmentation_inconsistent(record: &AugmentationRecord) -> Result<bool, RecordError> {
    if !record.applied {
        return Err(RecordError::NotApplied);
    }
    let (Some(partition), Some(permutation)) = (&record.partition, &record.permutation) else {
        return Err(RecordError::Incomplete);
    };
    if permutation.len() != partition.rects.len() {
        return Err(RecordError::Incomplete);
    }

    let scale_of = |d: usize| {
        let dst = partition.rects[d];
        let src = partition.rects[permutation.mapping()[d]];
        (
            u64::from(dst.w),
            u64::from(src.w),
            u64::from(dst.h),
            u64::from(src.h),
        )
    };
    if permutation.is_empty() {
        return Ok(false);
    }
    let (dw0, sw0, dh0, sh0) = scale_of(0);
    for d in 1..permutation.len() {
        let (dw, sw, dh, sh) = scale_of(d);
        if dw0 * sw != dw * sw0 || dh0 * sh != dh * sh0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Order relation a mosaic move is expected to keep: if the source pair
/// was ordered, the augmented pair must stay ordered.
pub fn preserves_intensity_order(source: (u8, u8), augmented: (u8, u8)) -> bool {
    source.0 > source.1 || augmented.0 <= augmented.1
}
