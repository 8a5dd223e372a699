//! End-to-end acceptance run. Every check prints one [PASS] or [FAIL]
//! line; run with `cargo test -p unprop --test acceptance -- --nocapture`
//! to see them all.

use std::time::Instant;

use unprop::batch::apply_batch;
use unprop::bench::{run_p_sweep, SweepConfig};
use unprop::imgio::{load_image, save_image, ImageFileFormat};
use unprop_core::{
    apply_mosaic, cubic_kernel, generate_partition, is_augmentation_inconsistent, item_rng,
    mix_seed, refine_partition, resize_patch, sample_record, unprop, AugmentationRecord, Channels,
    ChaCha8Rng, Image, Permutation, Rect, Rng, UnpropParams, KERNEL_SHARPNESS,
};
use unprop_testkit::{mosaic_reference, random_image, resize_reference};

const SEED: u64 = 0xACC397;

fn stream_rng(check: u64, trial: u64) -> ChaCha8Rng {
    item_rng(mix_seed(SEED, check), trial)
}

fn random_canvas(rng: &mut ChaCha8Rng, max_side: u32, min_pixels: u64) -> (u32, u32) {
    loop {
        let w = rng.gen_range(1..=max_side);
        let h = rng.gen_range(1..=max_side);
        if u64::from(w) * u64::from(h) >= min_pixels {
            return (w, h);
        }
    }
}

fn check_partition_generation() -> Result<String, String> {
    let trials = 10_000u64;
    let start = Instant::now();
    for t in 0..trials {
        let mut rng = stream_rng(1, t);
        let n = rng.gen_range(2..=64u32);
        let (w, h) = random_canvas(&mut rng, 512, u64::from(n));
        let partition = generate_partition(w, h, n, &mut rng)
            .map_err(|e| format!("trial {t} ({w}x{h}, {n} rects): {e}"))?;
        if partition.rects.len() != n as usize {
            return Err(format!(
                "trial {t}: {} rects instead of {n}",
                partition.rects.len()
            ));
        }
        if partition.rects.iter().any(|r| r.w == 0 || r.h == 0) {
            return Err(format!("trial {t}: a rect has a zero side"));
        }
        partition
            .validate()
            .map_err(|e| format!("trial {t} ({w}x{h}, {n} rects): {e}"))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        return Err(format!("{trials} trials took {elapsed:.1}s, limit 60s"));
    }
    Ok(format!("{trials} random partitions tiled exactly in {elapsed:.1}s"))
}

fn check_refinement_budget() -> Result<String, String> {
    let trials = 1_000u64;
    for t in 0..trials {
        let mut rng = stream_rng(2, t);
        let n = rng.gen_range(2..=32u32);
        let budget = rng.gen_range(0..=16u32);
        let aspect = rng.gen_range(1.0..2.0f64);
        let (w, h) = random_canvas(&mut rng, 256, u64::from(n));
        let mut partition = generate_partition(w, h, n, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        let used = refine_partition(&mut partition, aspect, budget);
        let len = partition.rects.len();
        if used > budget {
            return Err(format!("trial {t}: used {used} cuts of a {budget} budget"));
        }
        if len < n as usize || len > (n + budget) as usize {
            return Err(format!(
                "trial {t}: {len} rects, expected between {n} and {}",
                n + budget
            ));
        }
        partition
            .validate()
            .map_err(|e| format!("trial {t} after refinement: {e}"))?;
    }
    Ok(format!("{trials} refinements stayed within budget and kept the tiling"))
}

fn check_scale_inconsistency() -> Result<String, String> {
    let trials = 10_000u64;
    let params = UnpropParams {
        apply_prob: 1.0,
        ..UnpropParams::default()
    };
    let mut inconsistent = 0u64;
    for t in 0..trials {
        let mut rng = stream_rng(3, t);
        let record = sample_record(512, 512, &params, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        if !record.applied {
            return Err(format!("trial {t}: gate skipped at probability 1"));
        }
        if is_augmentation_inconsistent(&record).map_err(|e| format!("trial {t}: {e}"))? {
            inconsistent += 1;
        }
        if t % 100 == 0 {
            let partition = record.partition.expect("applied record");
            let identity = AugmentationRecord::applied(
                partition.clone(),
                Permutation::identity(partition.rects.len()),
                params,
            );
            if is_augmentation_inconsistent(&identity) != Ok(false) {
                return Err(format!("trial {t}: identity permutation flagged inconsistent"));
            }
        }
    }
    let fraction = inconsistent as f64 / trials as f64;
    if fraction > 0.95 {
        Ok(format!(
            "{inconsistent}/{trials} shuffles rescale content unevenly ({:.1}%)",
            fraction * 100.0
        ))
    } else {
        Err(format!(
            "only {inconsistent}/{trials} shuffles were inconsistent, need more than 95%"
        ))
    }
}

fn check_gate_probability() -> Result<String, String> {
    let trials = 10_000u64;
    let count_applied = |prob: f64, check: u64| -> Result<u64, String> {
        let params = UnpropParams {
            apply_prob: prob,
            ..UnpropParams::default()
        };
        let mut applied = 0u64;
        for t in 0..trials {
            let mut rng = stream_rng(check, t);
            let record = sample_record(64, 64, &params, &mut rng)
                .map_err(|e| format!("trial {t} at probability {prob}: {e}"))?;
            applied += u64::from(record.applied);
        }
        Ok(applied)
    };

    let at_default = count_applied(0.1, 4)?;
    let fraction = at_default as f64 / trials as f64;
    if !(0.0923..=0.1079).contains(&fraction) {
        return Err(format!(
            "probability 0.1 fired {at_default}/{trials} times ({fraction:.4}), outside [0.0923, 0.1079]"
        ));
    }
    let at_zero = count_applied(0.0, 5)?;
    if at_zero != 0 {
        return Err(format!("probability 0 fired {at_zero} times"));
    }
    let at_one = count_applied(1.0, 6)?;
    if at_one != trials {
        return Err(format!("probability 1 fired only {at_one}/{trials} times"));
    }
    Ok(format!(
        "gate fired {at_default}/{trials} at 0.1, {at_zero} at 0, {at_one} at 1"
    ))
}

fn check_resampler_reference() -> Result<String, String> {
    let exact: [(f64, f64); 5] = [
        (cubic_kernel(0.0, KERNEL_SHARPNESS), 1.0),
        (cubic_kernel(0.5, KERNEL_SHARPNESS), 0.5625),
        (cubic_kernel(1.0, KERNEL_SHARPNESS), 0.0),
        (cubic_kernel(1.5, KERNEL_SHARPNESS), -0.0625),
        (cubic_kernel(2.0, KERNEL_SHARPNESS), 0.0),
    ];
    for (got, want) in exact {
        if got.to_bits() != want.to_bits() {
            return Err(format!("kernel value {got} is not exactly {want}"));
        }
    }

    let trials = 500u64;
    for t in 0..trials {
        let mut rng = stream_rng(7, t);
        let channels = if rng.gen_range(0..2u32) == 0 {
            Channels::Gray
        } else {
            Channels::Rgb
        };
        let sw = rng.gen_range(1..=64u32);
        let sh = rng.gen_range(1..=64u32);
        let (dw, dh) = match t % 3 {
            0 => (sw, sh),
            1 => (rng.gen_range(sw..=96u32), rng.gen_range(sh..=96u32)),
            _ => (rng.gen_range(1..=sw), rng.gen_range(1..=sh)),
        };
        let img = random_image(sw, sh, channels, mix_seed(SEED, 700 + t));
        let got = resize_patch(&img.view(Rect::new(0, 0, sw, sh)).unwrap(), dw, dh);
        let want = resize_reference(
            img.data(),
            sw,
            sh,
            channels.count() as u32,
            dw,
            dh,
        );
        if got.data() != want.as_slice() {
            return Err(format!(
                "trial {t}: {sw}x{sh} -> {dw}x{dh} {channels:?} diverged from the reference"
            ));
        }
    }
    Ok(format!(
        "{trials} resizes matched the naive reference byte for byte, kernel constants exact"
    ))
}

fn check_mosaic_reference() -> Result<String, String> {
    let params = UnpropParams {
        apply_prob: 1.0,
        ..UnpropParams::default()
    };
    let mut compared = 0u64;
    for (k, (side, runs)) in [(8u32, 100u64), (32, 100), (512, 100)].into_iter().enumerate() {
        let k = k as u64;
        for t in 0..runs {
            let img = random_image(side, side, Channels::Rgb, mix_seed(SEED, 800 + k * 1000 + t));
            let mut rng = stream_rng(8 + k, t);
            let (got, record) = unprop(img.clone(), &params, &mut rng)
                .map_err(|e| format!("{side}px trial {t}: {e}"))?;
            let partition = record.partition.as_ref().expect("applied record");
            let permutation = record.permutation.as_ref().expect("applied record");
            let want = mosaic_reference(&img, partition, permutation);
            if got != want {
                return Err(format!(
                    "{side}px trial {t}: output diverged from the naive mosaic"
                ));
            }
            let replay = apply_mosaic(&img, partition, permutation)
                .map_err(|e| format!("{side}px trial {t}: {e}"))?;
            if replay != got {
                return Err(format!("{side}px trial {t}: record replay diverged"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} full runs matched the naive mosaic reference byte for byte"
    ))
}

fn check_determinism() -> Result<String, String> {
    let params = UnpropParams {
        apply_prob: 0.7,
        seed: 41,
        ..UnpropParams::default()
    };
    for (i, (w, h)) in [(16u32, 16u32), (64, 48), (128, 96), (7, 130)]
        .into_iter()
        .enumerate()
    {
        for t in 0..10u64 {
            let img = random_image(w, h, Channels::Rgb, mix_seed(SEED, 900 + t));
            let run = |stream: u64| {
                let mut rng = item_rng(params.seed, stream);
                unprop(img.clone(), &params, &mut rng).unwrap()
            };
            let stream = i as u64 * 100 + t;
            let (out_a, rec_a) = run(stream);
            let (out_b, rec_b) = run(stream);
            if out_a != out_b || rec_a != rec_b {
                return Err(format!("{w}x{h} stream {stream}: two identical runs diverged"));
            }
        }
    }

    let items: Vec<(u64, Image)> = (0..12u64)
        .map(|i| (i, random_image(48, 32, Channels::Rgb, mix_seed(SEED, 950 + i))))
        .collect();
    let single = apply_batch(items.clone(), &params, Some(1)).map_err(|e| e.to_string())?;
    let eight = apply_batch(items.clone(), &params, Some(8)).map_err(|e| e.to_string())?;
    let default_pool = apply_batch(items, &params, None).map_err(|e| e.to_string())?;
    if single != eight || single != default_pool {
        return Err("batch results changed with the thread count".into());
    }
    Ok("repeat runs and thread counts 1, 8, default all agree byte for byte".into())
}

fn check_runtime_scaling() -> Result<String, String> {
    let start = Instant::now();
    let config = SweepConfig {
        image_size: 512,
        probes: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
        reps: 300,
        warmup_reps: 10,
        seed: SEED,
        ..SweepConfig::default()
    };
    let report = run_p_sweep(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();

    let never = report.probes.first().expect("probe list is fixed");
    let always = report.probes.last().expect("probe list is fixed");
    let r2 = report.fit.r_squared;
    let detail = format!(
        "slope {:.3} ms, intercept {:.4} ms, r^2 {:.4}, mean {:.5} ms at p=0 vs {:.3} ms at p=1, {elapsed:.0}s",
        report.fit.slope_ms, report.fit.intercept_ms, r2, never.mean_ms, always.mean_ms
    );
    if elapsed >= 300.0 {
        return Err(format!("sweep took too long: {detail}"));
    }
    if r2 < 0.98 {
        return Err(format!("fit is not linear enough: {detail}"));
    }
    if never.mean_ms > always.mean_ms / 100.0 {
        return Err(format!("skipped runs are not cheap enough: {detail}"));
    }
    Ok(detail)
}

fn check_file_round_trips() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let trials = 100u64;
    for t in 0..trials {
        let mut rng = stream_rng(20, t);
        let w = rng.gen_range(1..=64u32);
        let h = rng.gen_range(1..=64u32);
        let channels = if t % 2 == 0 { Channels::Gray } else { Channels::Rgb };
        let img = random_image(w, h, channels, mix_seed(SEED, 990 + t));
        for format in [ImageFileFormat::PpmBinary, ImageFileFormat::Png] {
            let path = dir
                .path()
                .join(format!("t{t}.{}", format.extension(channels)));
            save_image(&img, &path, format).map_err(|e| format!("trial {t}: {e}"))?;
            let back = load_image(&path).map_err(|e| format!("trial {t}: {e}"))?;
            if back != img {
                return Err(format!(
                    "trial {t}: {w}x{h} {channels:?} changed through {format:?}"
                ));
            }
        }
    }
    Ok(format!("{trials} images survived PNM and PNG round trips unchanged"))
}

type Check = fn() -> Result<String, String>;

#[test]
fn acceptance() {
    let checks: Vec<(&str, Check)> = vec![
        ("criterion 1: random partitions tile exactly", check_partition_generation),
        ("criterion 2: refinement respects its budget", check_refinement_budget),
        ("criterion 3: shuffles rescale content unevenly", check_scale_inconsistency),
        ("criterion 4: the apply gate matches its probability", check_gate_probability),
        ("criterion 5: the resampler matches a naive reference", check_resampler_reference),
        ("criterion 6: full runs match a naive mosaic", check_mosaic_reference),
        ("criterion 7: runs are deterministic across repeats and threads", check_determinism),
        ("criterion 8: runtime grows linearly with the apply probability", check_runtime_scaling),
        ("criterion 9: images survive file round trips", check_file_round_trips),
    ];

    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
