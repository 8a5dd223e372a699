//! Support code for the unprop test suites: reference implementations
//! kept deliberately naive (per-pixel nested loops, std math, no
//! precomputed plans) so production output can be checked against an
//! independently structured computation, plus deterministic fixtures.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unprop_core::{Channels, Image, Partition, Permutation, Rect};

fn kernel(t: f64, a: f64) -> f64 {
    let t = t.abs();
    let t2 = t * t;
    let t3 = t2 * t;
    if t <= 1.0 {
        (a + 2.0) * t3 - (a + 3.0) * t2 + 1.0
    } else if t < 2.0 {
        a * t3 - 5.0 * a * t2 + 8.0 * a * t - 4.0 * a
    } else {
        0.0
    }
}

/// Scalar reference resize over a raw interleaved buffer. One full 4x4
/// neighborhood sum per output pixel, row taps clamped to the patch,
/// weights taken at the unclamped distances, rounded half away from
/// zero and clamped once at the end.
pub fn resize_reference(
    src: &[u8],
    src_w: u32,
    src_h: u32,
    channels: u32,
    dst_w: u32,
    dst_h: u32,
) -> Vec<u8> {
    assert!(src_w > 0 && src_h > 0 && dst_w > 0 && dst_h > 0);
    let ch = channels as usize;
    assert_eq!(src.len(), src_w as usize * src_h as usize * ch);

    let a = -0.5f64;
    let scale_x = src_w as f64 / dst_w as f64;
    let scale_y = src_h as f64 / dst_h as f64;
    let max_x = src_w as i64 - 1;
    let max_y = src_h as i64 - 1;
    let mut out = vec![0u8; dst_w as usize * dst_h as usize * ch];

    for dy in 0..dst_h as usize {
        let sy = (dy as f64 + 0.5) * scale_y - 0.5;
        let by = sy.floor();
        let fy = sy - by;
        let wys = [
            kernel(1.0 + fy, a),
            kernel(fy, a),
            kernel(1.0 - fy, a),
            kernel(2.0 - fy, a),
        ];
        for dx in 0..dst_w as usize {
            let sx = (dx as f64 + 0.5) * scale_x - 0.5;
            let bx = sx.floor();
            let fx = sx - bx;
            let wxs = [
                kernel(1.0 + fx, a),
                kernel(fx, a),
                kernel(1.0 - fx, a),
                kernel(2.0 - fx, a),
            ];
            for c in 0..ch {
                let mut acc = 0.0f64;
                for (ky, wy) in wys.iter().enumerate() {
                    let ty = (by as i64 - 1 + ky as i64).clamp(0, max_y) as usize;
                    let mut inner = 0.0f64;
                    for (kx, wx) in wxs.iter().enumerate() {
                        let tx = (bx as i64 - 1 + kx as i64).clamp(0, max_x) as usize;
                        inner += wx * f64::from(src[(ty * src_w as usize + tx) * ch + c]);
                    }
                    acc += wy * inner;
                }
                out[(dy * dst_w as usize + dx) * ch + c] =
                    acc.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}

/// Copies the bytes of `rect` out of `img` into a standalone buffer.
pub fn extract_patch(img: &Image, rect: Rect) -> Vec<u8> {
    let ch = img.channels().count();
    let w = img.width() as usize;
    let mut patch = vec![0u8; rect.w as usize * rect.h as usize * ch];
    for y in 0..rect.h as usize {
        for x in 0..rect.w as usize {
            for c in 0..ch {
                patch[(y * rect.w as usize + x) * ch + c] =
                    img.data()[((rect.y as usize + y) * w + rect.x as usize + x) * ch + c];
            }
        }
    }
    patch
}

/// Reference mosaic: materializes each source patch, resizes it with
/// [`resize_reference`], and writes it pixel by pixel into its
/// destination rect.
pub fn mosaic_reference(img: &Image, partition: &Partition, permutation: &Permutation) -> Image {
    assert_eq!(partition.image_width, img.width());
    assert_eq!(partition.image_height, img.height());
    assert_eq!(permutation.len(), partition.rects.len());

    let ch = img.channels().count();
    let w = img.width() as usize;
    let mut out = vec![0u8; img.data().len()];
    for (d, &s) in permutation.mapping().iter().enumerate() {
        let dst = partition.rects[d];
        let src = partition.rects[s];
        let patch = extract_patch(img, src);
        let resized = resize_reference(&patch, src.w, src.h, ch as u32, dst.w, dst.h);
        for y in 0..dst.h as usize {
            for x in 0..dst.w as usize {
                for c in 0..ch {
                    out[((dst.y as usize + y) * w + dst.x as usize + x) * ch + c] =
                        resized[(y * dst.w as usize + x) * ch + c];
                }
            }
        }
    }
    Image::new(img.width(), img.height(), img.channels(), out).unwrap()
}

/// How many rects claim each pixel, in row-major order. An exact tiling
/// is all ones. Panics if a rect leaves the canvas.
pub fn coverage_counts(partition: &Partition) -> Vec<u32> {
    let w = partition.image_width as usize;
    let mut counts = vec![0u32; w * partition.image_height as usize];
    for r in &partition.rects {
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                counts[y as usize * w + x as usize] += 1;
            }
        }
    }
    counts
}

/// Deterministic noise image.
pub fn random_image(w: u32, h: u32, channels: Channels, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0u8; w as usize * h as usize * channels.count()];
    rng.fill_bytes(&mut data);
    Image::new(w, h, channels, data).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_identity_is_byte_exact() {
        let src: Vec<u8> = (0..24).map(|i| (i * 11) as u8).collect();
        assert_eq!(resize_reference(&src, 4, 2, 3, 4, 2), src);
    }

    #[test]
    fn reference_keeps_constants() {
        let src = vec![77u8; 8 * 8];
        let out = resize_reference(&src, 8, 8, 1, 3, 5);
        assert!(out.iter().all(|&b| b == 77));
    }

    #[test]
    fn coverage_flags_gaps_and_overlaps() {
        let p = Partition {
            image_width: 2,
            image_height: 2,
            rects: vec![Rect::new(0, 0, 2, 1), Rect::new(0, 0, 1, 2)],
        };
        assert_eq!(coverage_counts(&p), vec![2, 1, 1, 0]);
    }

    #[test]
    fn random_images_are_seed_stable() {
        let a = random_image(5, 4, Channels::Rgb, 3);
        let b = random_image(5, 4, Channels::Rgb, 3);
        assert_eq!(a, b);
        assert_ne!(a, random_image(5, 4, Channels::Rgb, 4));
    }
}
