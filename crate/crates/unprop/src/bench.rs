use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unprop_core::{
    item_rng, mix_seed, unprop, ChaCha8Rng, Channels, Image, RngCore, SeedableRng, UnpropParams,
};

/// Timing summary for one apply probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub p: f64,
    pub mean_ms: f64,
    /// Sample standard deviation; absent when only one rep ran.
    pub std_dev_ms: Option<f64>,
    pub reps: u32,
}

/// Least-squares line through (probability, mean time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope_ms: f64,
    pub intercept_ms: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub image_size: u32,
    pub warmup_reps: u32,
    pub probes: Vec<ProbePoint>,
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Side of the square RGB noise image the sweep runs on.
    pub image_size: u32,
    pub aspect_ratio: f64,
    pub target_rects: u32,
    pub refine_steps: u32,
    /// Apply probabilities to time, strictly increasing within [0, 1].
    pub probes: Vec<f64>,
    pub reps: u32,
    pub warmup_reps: u32,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            image_size: 512,
            aspect_ratio: 1.18,
            target_rects: 5,
            refine_steps: 7,
            probes: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            reps: 50,
            warmup_reps: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error("probes must be non-empty, strictly increasing, and within [0, 1]")]
    BadProbes,
    #[error("image must hold at least {target} pixels, got {size}x{size}")]
    ImageTooSmall { size: u32, target: u32 },
}

fn validate(config: &SweepConfig) -> Result<(), BenchError> {
    if config.reps == 0 {
        return Err(BenchError::ZeroReps);
    }
    if config.probes.is_empty()
        || config.probes.iter().any(|p| !(0.0..=1.0).contains(p))
        || config.probes.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(BenchError::BadProbes);
    }
    if u64::from(config.image_size) * u64::from(config.image_size)
        < u64::from(config.target_rects)
    {
        return Err(BenchError::ImageTooSmall {
            size: config.image_size,
            target: config.target_rects,
        });
    }
    Ok(())
}

/// Ordinary least squares with r^2. Degenerate inputs pick the constant
/// line: a single x gives slope 0, and when the line explains all
/// variance (including zero variance) r^2 is 1.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    LinearFit {
        slope_ms: slope,
        intercept_ms: intercept,
        r_squared,
    }
}

/// Runs the sweep with an injected measurement so tests can substitute
/// a synthetic timer. The measured call receives a fresh image clone
/// and a per-rep generator derived from (seed, probe index, rep index);
/// cloning stays outside the measured region.
pub fn run_p_sweep_with<M>(config: &SweepConfig, mut measure: M) -> Result<BenchReport, BenchError>
where
    M: FnMut(Image, &UnpropParams, &mut ChaCha8Rng) -> Duration,
{
    validate(config)?;

    let mut noise = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, u64::MAX));
    let mut data = vec![0u8; config.image_size as usize * config.image_size as usize * 3];
    noise.fill_bytes(&mut data);
    let base = Image::new(config.image_size, config.image_size, Channels::Rgb, data)
        .expect("bench image dimensions are validated");

    let mut points = Vec::with_capacity(config.probes.len());
    for (probe_idx, &p) in config.probes.iter().enumerate() {
        let params = UnpropParams {
            aspect_ratio: config.aspect_ratio,
            target_rects: config.target_rects,
            refine_steps: config.refine_steps,
            apply_prob: p,
            seed: config.seed,
        };
        let stream = mix_seed(config.seed, probe_idx as u64);
        let mut samples = Vec::with_capacity(config.reps as usize);
        for rep in 0..config.warmup_reps + config.reps {
            let mut rng = item_rng(stream, u64::from(rep));
            let img = base.clone();
            let elapsed = measure(img, &params, &mut rng);
            if rep >= config.warmup_reps {
                samples.push(elapsed.as_secs_f64() * 1e3);
            }
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let std_dev = if samples.len() >= 2 {
            let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                / (samples.len() - 1) as f64;
            Some(var.sqrt())
        } else {
            None
        };
        points.push(ProbePoint {
            p,
            mean_ms: mean,
            std_dev_ms: std_dev,
            reps: config.reps,
        });
    }

    let means: Vec<f64> = points.iter().map(|pt| pt.mean_ms).collect();
    let fit = linear_fit(&config.probes, &means);
    Ok(BenchReport {
        image_size: config.image_size,
        warmup_reps: config.warmup_reps,
        probes: points,
        fit,
    })
}

/// Times the real augmentation across the configured probabilities on a
/// seeded noise image.
pub fn run_p_sweep(config: &SweepConfig) -> Result<BenchReport, BenchError> {
    run_p_sweep_with(config, |img, params, rng| {
        let start = Instant::now();
        let out = unprop(img, params, rng).expect("bench params are valid");
        let elapsed = start.elapsed();
        std::hint::black_box(&out);
        elapsed
    })
}

/// Renders the report as a self-contained SVG scatter plot with the
/// fitted line.
pub fn render_svg(report: &BenchReport) -> String {
    let width = 640.0;
    let height = 400.0;
    let left = 70.0;
    let right = 20.0;
    let top = 30.0;
    let bottom = 50.0;
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let max_y = report
        .probes
        .iter()
        .map(|pt| pt.mean_ms)
        .fold(0.0f64, f64::max)
        .max(1e-6);
    let x_of = |p: f64| left + p * plot_w;
    let y_of = |ms: f64| top + plot_h - (ms / max_y) * plot_h;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = write!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">mean time vs apply probability ({1}x{1} image)</text>"#,
        width / 2.0,
        report.image_size
    );
    // Axes.
    let _ = write!(
        svg,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h
    );
    let _ = write!(
        svg,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + plot_h
    );
    for tick in 0..=5 {
        let p = f64::from(tick) / 5.0;
        let x = x_of(p);
        let _ = write!(
            svg,
            r#"<line x1="{x}" y1="{0}" x2="{x}" y2="{1}" stroke="black"/><text x="{x}" y="{2}" font-family="sans-serif" font-size="11" text-anchor="middle">{p:.1}</text>"#,
            top + plot_h,
            top + plot_h + 5.0,
            top + plot_h + 18.0
        );
        let ms = max_y * p;
        let y = y_of(ms);
        let _ = write!(
            svg,
            r#"<line x1="{0}" y1="{y}" x2="{left}" y2="{y}" stroke="black"/><text x="{1}" y="{2}" font-family="sans-serif" font-size="11" text-anchor="end">{ms:.2}</text>"#,
            left - 5.0,
            left - 8.0,
            y + 4.0
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">apply probability</text>"#,
        left + plot_w / 2.0,
        height - 12.0
    );
    let _ = write!(
        svg,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {0})">ms</text>"#,
        top + plot_h / 2.0
    );
    // Fitted line across the probe span.
    let (p0, p1) = (report.probes[0].p, report.probes[report.probes.len() - 1].p);
    let _ = write!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="steelblue" stroke-width="1.5"/>"#,
        x_of(p0),
        y_of(report.fit.intercept_ms + report.fit.slope_ms * p0),
        x_of(p1),
        y_of(report.fit.intercept_ms + report.fit.slope_ms * p1)
    );
    for pt in &report.probes {
        let _ = write!(
            svg,
            r#"<circle cx="{}" cy="{}" r="3.5" fill="crimson"/>"#,
            x_of(pt.p),
            y_of(pt.mean_ms)
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">slope {:.3} ms, intercept {:.3} ms, r^2 {:.4}</text>"#,
        left + 8.0,
        top + 14.0,
        report.fit.slope_ms,
        report.fit.intercept_ms,
        report.fit.r_squared
    );
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_linear_timer_fits_exactly() {
        let config = SweepConfig {
            image_size: 8,
            reps: 3,
            warmup_reps: 1,
            ..SweepConfig::default()
        };
        let report = run_p_sweep_with(&config, |_img, params, _rng| {
            Duration::from_secs_f64(params.apply_prob * 0.003)
        })
        .unwrap();
        assert!((report.fit.slope_ms - 3.0).abs() < 1e-6, "{:?}", report.fit);
        assert!(report.fit.intercept_ms.abs() < 1e-6, "{:?}", report.fit);
        assert!((report.fit.r_squared - 1.0).abs() < 1e-9, "{:?}", report.fit);
        assert_eq!(report.probes.len(), 11);
        assert_eq!(report.probes[0].std_dev_ms, Some(0.0));
    }

    #[test]
    fn single_rep_reports_no_std_dev() {
        let config = SweepConfig {
            image_size: 8,
            probes: vec![0.0, 1.0],
            reps: 1,
            warmup_reps: 0,
            ..SweepConfig::default()
        };
        let report =
            run_p_sweep_with(&config, |_, _, _| Duration::from_micros(5)).unwrap();
        assert!(report.probes.iter().all(|pt| pt.std_dev_ms.is_none()));
        assert!(report.probes.iter().all(|pt| pt.reps == 1));
    }

    #[test]
    fn fit_matches_hand_computed_lines() {
        let fit = linear_fit(&[0.0, 1.0], &[1.0, 3.0]);
        assert_eq!(fit.slope_ms, 2.0);
        assert_eq!(fit.intercept_ms, 1.0);
        assert_eq!(fit.r_squared, 1.0);

        let fit = linear_fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]);
        assert!(fit.slope_ms.abs() < 1e-12);
        assert!((fit.intercept_ms - 1.0 / 3.0).abs() < 1e-12);
        assert!(fit.r_squared.abs() < 1e-12);

        let flat = linear_fit(&[0.0, 0.5, 1.0], &[2.0, 2.0, 2.0]);
        assert_eq!(flat.slope_ms, 0.0);
        assert_eq!(flat.r_squared, 1.0);

        let single = linear_fit(&[0.5], &[4.0]);
        assert_eq!(single.slope_ms, 0.0);
        assert_eq!(single.intercept_ms, 4.0);
        assert_eq!(single.r_squared, 1.0);
    }

    #[test]
    fn config_validation_rejects_bad_sweeps() {
        let base = SweepConfig {
            image_size: 8,
            ..SweepConfig::default()
        };
        let cases = [
            (
                SweepConfig { reps: 0, ..base.clone() },
                BenchError::ZeroReps,
            ),
            (
                SweepConfig { probes: vec![], ..base.clone() },
                BenchError::BadProbes,
            ),
            (
                SweepConfig { probes: vec![0.5, 0.2], ..base.clone() },
                BenchError::BadProbes,
            ),
            (
                SweepConfig { probes: vec![0.2, 0.2], ..base.clone() },
                BenchError::BadProbes,
            ),
            (
                SweepConfig { probes: vec![0.0, 1.2], ..base.clone() },
                BenchError::BadProbes,
            ),
            (
                SweepConfig { image_size: 2, target_rects: 5, ..base.clone() },
                BenchError::ImageTooSmall { size: 2, target: 5 },
            ),
        ];
        for (config, want) in cases {
            assert_eq!(run_p_sweep_with(&config, |_, _, _| Duration::ZERO).unwrap_err(), want);
        }
    }

    #[test]
    fn real_sweep_produces_a_sane_report() {
        let config = SweepConfig {
            image_size: 32,
            probes: vec![0.0, 1.0],
            reps: 2,
            warmup_reps: 1,
            ..SweepConfig::default()
        };
        let report = run_p_sweep(&config).unwrap();
        assert_eq!(report.image_size, 32);
        assert_eq!(report.probes.len(), 2);
        assert!(report.probes.iter().all(|pt| pt.mean_ms >= 0.0));
        assert!(report.probes[0].mean_ms <= report.probes[1].mean_ms);
    }

    #[test]
    fn svg_renders_one_marker_per_probe() {
        let config = SweepConfig {
            image_size: 8,
            probes: vec![0.0, 0.5, 1.0],
            reps: 1,
            warmup_reps: 0,
            ..SweepConfig::default()
        };
        let report =
            run_p_sweep_with(&config, |_, _, _| Duration::from_micros(100)).unwrap();
        let svg = render_svg(&report);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
