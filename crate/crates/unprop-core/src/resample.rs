use alloc::vec;
use alloc::vec::Vec;

use crate::image::{Image, PatchView};

/// Sharpness coefficient of the cubic convolution kernel; -0.5 is the
/// Catmull-Rom spline.
pub const KERNEL_SHARPNESS: f64 = -0.5;

/// Two-lobe cubic convolution kernel with sharpness `a`, symmetric in
/// `t` and zero outside `|t| < 2`.
pub fn cubic_kernel(t: f64, a: f64) -> f64 {
    let t = if t < 0.0 { -t } else { t };
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

fn floor_i64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) > x {
        t - 1
    } else {
        t
    }
}

/// Round half away from zero; agrees with `f64::round` for |x| < 2^52.
fn round_half_away(x: f64) -> f64 {
    let t = (x as i64) as f64;
    let frac = x - t;
    if frac >= 0.5 {
        t + 1.0
    } else if frac <= -0.5 {
        t - 1.0
    } else {
        t
    }
}

fn quantize(x: f64) -> u8 {
    let r = round_half_away(x);
    if r < 0.0 {
        0
    } else if r > 255.0 {
        255
    } else {
        r as u8
    }
}

struct AxisTap {
    taps: [usize; 4],
    weights: [f64; 4],
}

/// Tap positions and weights for one output axis. The source coordinate
/// of output cell `d` is `(d + 0.5) * (src / dst) - 0.5`; the four taps
/// around it clamp to the patch while their weights keep the unclamped
/// distances, which replicates the edge row/column.
fn axis_plan(src_extent: u32, dst_extent: u32) -> Vec<AxisTap> {
    let scale = src_extent as f64 / dst_extent as f64;
    let max = src_extent as i64 - 1;
    (0..dst_extent)
        .map(|d| {
            let s = (d as f64 + 0.5) * scale - 0.5;
            let base = floor_i64(s);
            let f = s - base as f64;
            let weights = [
                cubic_kernel(1.0 + f, KERNEL_SHARPNESS),
                cubic_kernel(f, KERNEL_SHARPNESS),
                cubic_kernel(1.0 - f, KERNEL_SHARPNESS),
                cubic_kernel(2.0 - f, KERNEL_SHARPNESS),
            ];
            let mut taps = [0usize; 4];
            for (k, tap) in taps.iter_mut().enumerate() {
                *tap = (base - 1 + k as i64).clamp(0, max) as usize;
            }
            AxisTap { taps, weights }
        })
        .collect()
}

/// Resamples a patch to `dst_w` x `dst_h` with separable cubic
/// convolution. The horizontal pass keeps full f64 precision; pixels are
/// rounded half away from zero and clamped to [0, 255] only once, after
/// the vertical pass.
///
/// Panics if either destination extent is zero.
pub fn resize_patch(src: &PatchView<'_>, dst_w: u32, dst_h: u32) -> Image {
    assert!(dst_w > 0 && dst_h > 0, "destination dimensions must be at least 1x1");
    let ch = src.channels().count();
    let src_h = src.height() as usize;
    let xplan = axis_plan(src.width(), dst_w);
    let yplan = axis_plan(src.height(), dst_h);
    let dw = dst_w as usize;

    let mut mid = vec![0.0f64; src_h * dw * ch];
    for y in 0..src.height() {
        for (dx, t) in xplan.iter().enumerate() {
            for c in 0..ch {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += t.weights[k] * f64::from(src.sample(t.taps[k] as u32, y, c));
                }
                mid[(y as usize * dw + dx) * ch + c] = acc;
            }
        }
    }

    let mut out = vec![0u8; dst_h as usize * dw * ch];
    for (dy, t) in yplan.iter().enumerate() {
        for dx in 0..dw {
            for c in 0..ch {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += t.weights[k] * mid[(t.taps[k] * dw + dx) * ch + c];
                }
                out[(dy * dw + dx) * ch + c] = quantize(acc);
            }
        }
    }

    Image::new(dst_w, dst_h, src.channels(), out).expect("output buffer sized to dimensions")
}
