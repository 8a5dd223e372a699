use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unprop::batch::{apply_batch, BatchError};
use unprop::bench::{render_svg, run_p_sweep, SweepConfig};
use unprop::imgio::{load_image, save_image, ImageFileFormat, IoError};
use unprop::manifest::{ManifestEntry, ManifestError, RunManifest};
use unprop::viz::{compose_side_by_side, draw_partition_borders};
use unprop_core::{
    generate_partition, grid_shuffle, is_augmentation_inconsistent, item_rng, mix_seed,
    refine_partition, resize_patch, sample_record, unprop as unprop_augment, ChaCha8Rng, Channels,
    Image, Permutation, Rect, Rng, RngCore, SeedableRng, UnpropParams,
};

#[derive(Parser)]
#[command(name = "unprop", version, about = "Unproportional mosaicing image augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Augment images and write the results
    Apply(ApplyArgs),
    /// Render augmented images with partition borders, next to the original
    Viz(VizArgs),
    /// Time the augmentation across apply probabilities
    Bench(BenchArgs),
    /// Run seeded self-checks of the augmentation invariants
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Aspect-ratio floor enforced by refinement
    #[arg(long, default_value_t = 1.18)]
    aspect: f64,

    /// Number of rects before refinement
    #[arg(long, default_value_t = 5)]
    rects: u32,

    /// Extra refinement cuts allowed
    #[arg(long = "refine-steps", default_value_t = 7)]
    refine_steps: u32,

    /// Base seed (falls back to UNPROP_SEED, then 0)
    #[arg(long, env = "UNPROP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Png,
    Ppm,
}

impl From<FormatArg> for ImageFileFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Png => ImageFileFormat::Png,
            FormatArg::Ppm => ImageFileFormat::PpmBinary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    Grid,
}

#[derive(Args)]
struct ApplyArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Probability that each input is augmented
    #[arg(long, default_value_t = 0.1)]
    prob: f64,

    /// Directory for the outputs
    #[arg(short, long)]
    out_dir: PathBuf,

    /// Output format (defaults to each input's own format)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Write a JSON manifest of the run here
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Warn and continue when an input cannot be used
    #[arg(long)]
    skip_errors: bool,

    /// Worker threads (defaults to one per CPU)
    #[arg(long)]
    threads: Option<usize>,

    /// Input images (PNG or binary PNM)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct VizArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Visualize a reference method instead of the augmentation
    #[arg(long, value_enum)]
    baseline: Option<BaselineArg>,

    /// Grid rows for the baseline
    #[arg(long, default_value_t = 4)]
    rows: u32,

    /// Grid columns for the baseline
    #[arg(long, default_value_t = 4)]
    cols: u32,

    /// Directory for the composites
    #[arg(short, long)]
    out_dir: PathBuf,

    /// Output format (defaults to each input's own format)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Write a JSON manifest of the run here
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Warn and continue when an input cannot be used
    #[arg(long)]
    skip_errors: bool,

    /// Input images (PNG or binary PNM)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Side of the square test image in pixels
    #[arg(long, default_value_t = 512)]
    size: u32,

    /// Timed repetitions per probe
    #[arg(long, default_value_t = 50)]
    reps: u32,

    /// Untimed warm-up repetitions per probe
    #[arg(long, default_value_t = 10)]
    warmup: u32,

    /// Comma-separated apply probabilities to time
    #[arg(long, value_delimiter = ',')]
    probes: Option<Vec<f64>>,

    /// Write the JSON report here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,

    /// Also render an SVG chart of the sweep
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Randomized cases per check
    #[arg(long, default_value_t = 200)]
    trials: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Verification(msg) | CliError::Io(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Apply(args) => run_apply(args),
        Command::Viz(args) => run_viz(args),
        Command::Bench(args) => run_bench(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn build_params(args: &ParamArgs, prob: f64) -> Result<UnpropParams, CliError> {
    let params = UnpropParams {
        aspect_ratio: args.aspect,
        target_rects: args.rects,
        refine_steps: args.refine_steps,
        apply_prob: prob,
        seed: args.seed,
    };
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// Loads the inputs sequentially, keeping each image's original position
/// as its stream index so skipped files do not shift later streams.
fn load_inputs(
    paths: &[PathBuf],
    skip_errors: bool,
    min_pixels: u64,
) -> Result<Vec<(u64, PathBuf, Image)>, CliError> {
    let mut loaded = Vec::with_capacity(paths.len());
    for (i, path) in paths.iter().enumerate() {
        let img = match load_image(path) {
            Ok(img) => img,
            Err(e) => {
                if skip_errors {
                    eprintln!("warning: skipping {e}");
                    continue;
                }
                return Err(e.into());
            }
        };
        let pixels = u64::from(img.width()) * u64::from(img.height());
        if pixels < min_pixels {
            let msg = format!(
                "{}: {}x{} image is too small to partition into {min_pixels} rects",
                path.display(),
                img.width(),
                img.height()
            );
            if skip_errors {
                eprintln!("warning: skipping {msg}");
                continue;
            }
            return Err(CliError::Usage(msg));
        }
        loaded.push((i as u64, path.clone(), img));
    }
    Ok(loaded)
}

fn pick_format(flag: Option<FormatArg>, input: &Path) -> ImageFileFormat {
    flag.map(Into::into)
        .or_else(|| ImageFileFormat::from_path(input))
        .unwrap_or(ImageFileFormat::Png)
}

fn unique_output(
    dir: &Path,
    input: &Path,
    ext: &str,
    index: u64,
    used: &mut HashSet<PathBuf>,
) -> PathBuf {
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image");
    let mut candidate = dir.join(format!("{stem}.{ext}"));
    if used.contains(&candidate) {
        candidate = dir.join(format!("{stem}_{index}.{ext}"));
    }
    used.insert(candidate.clone());
    candidate
}

fn run_apply(args: ApplyArgs) -> Result<(), CliError> {
    let params = build_params(&args.params, args.prob)?;
    create_out_dir(&args.out_dir)?;

    let loaded = load_inputs(&args.inputs, args.skip_errors, u64::from(params.target_rects))?;
    let total = loaded.len();
    let mut metas = Vec::with_capacity(total);
    let mut items = Vec::with_capacity(total);
    for (index, path, img) in loaded {
        metas.push((index, path));
        items.push((index, img));
    }

    let results = apply_batch(items, &params, args.threads).map_err(|e| match e {
        BatchError::Params(p) => CliError::Usage(p.to_string()),
        BatchError::Item { index, source } => CliError::Usage(format!("item {index}: {source}")),
        BatchError::Pool(msg) => CliError::Io(format!("thread pool: {msg}")),
    })?;

    let mut manifest = RunManifest::new("apply", params);
    let mut used = HashSet::new();
    let mut augmented = 0usize;
    for ((index, input), (img, record)) in metas.iter().zip(results) {
        let format = pick_format(args.format, input);
        let out_path = unique_output(
            &args.out_dir,
            input,
            format.extension(img.channels()),
            *index,
            &mut used,
        );
        save_image(&img, &out_path, format)?;
        augmented += usize::from(record.applied);
        manifest.entries.push(ManifestEntry::from_record(
            input.display().to_string(),
            out_path.display().to_string(),
            record,
        ));
    }
    if let Some(path) = &args.manifest {
        manifest.save(path)?;
    }
    println!(
        "{total} image(s) processed, {augmented} augmented, outputs in {}",
        args.out_dir.display()
    );
    Ok(())
}

fn run_viz(args: VizArgs) -> Result<(), CliError> {
    // Visualization always applies the transform it is asked to show.
    let params = build_params(&args.params, 1.0)?;
    create_out_dir(&args.out_dir)?;

    let min_pixels = match args.baseline {
        Some(BaselineArg::Grid) => 1,
        None => u64::from(params.target_rects),
    };
    let loaded = load_inputs(&args.inputs, args.skip_errors, min_pixels)?;
    let total = loaded.len();

    let command = match args.baseline {
        Some(BaselineArg::Grid) => format!("viz --baseline grid --rows {} --cols {}", args.rows, args.cols),
        None => "viz".to_string(),
    };
    let mut manifest = RunManifest::new(command, params);
    let mut used = HashSet::new();
    for (index, input, img) in loaded {
        let shuffled = match args.baseline {
            Some(BaselineArg::Grid) => {
                let mut rng = item_rng(params.seed, index);
                match grid_shuffle(&img, args.rows, args.cols, &mut rng) {
                    Ok(t) => t,
                    Err(e) => {
                        let msg = format!("{}: {e}", input.display());
                        if args.skip_errors {
                            eprintln!("warning: skipping {msg}");
                            continue;
                        }
                        return Err(CliError::Usage(msg));
                    }
                }
            }
            None => {
                let mut rng = item_rng(params.seed, index);
                let (out, record) = unprop_augment(img.clone(), &params, &mut rng)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
                let partition = record.partition.expect("forced apply always partitions");
                let permutation = record.permutation.expect("forced apply always permutes");
                (out, partition, permutation)
            }
        };
        let (augmented, partition, permutation) = shuffled;
        let overlay = draw_partition_borders(&augmented, &partition)
            .expect("partition was generated for this image");
        let composite =
            compose_side_by_side(&img, &overlay).expect("overlay keeps the input shape");

        let format = pick_format(args.format, &input);
        let out_path = unique_output(
            &args.out_dir,
            &input,
            format.extension(composite.channels()),
            index,
            &mut used,
        );
        save_image(&composite, &out_path, format)?;
        manifest.entries.push(ManifestEntry {
            input: input.display().to_string(),
            output: out_path.display().to_string(),
            applied: true,
            partition: Some(partition),
            permutation: Some(permutation),
        });
    }
    if let Some(path) = &args.manifest {
        manifest.save(path)?;
    }
    println!(
        "{total} composite(s) written to {}",
        args.out_dir.display()
    );
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    if args.reps == 1 {
        eprintln!("warning: a single rep cannot estimate spread; std_dev_ms will be null");
    } else if args.reps < 30 {
        eprintln!(
            "warning: {} reps is below the recommended 30; the fit may be noisy",
            args.reps
        );
    }
    let _ = build_params(&args.params, 0.5)?;

    let config = SweepConfig {
        image_size: args.size,
        aspect_ratio: args.params.aspect,
        target_rects: args.params.rects,
        refine_steps: args.params.refine_steps,
        probes: args
            .probes
            .unwrap_or_else(|| (0..=10).map(|i| f64::from(i) / 10.0).collect()),
        reps: args.reps,
        warmup_reps: args.warmup,
        seed: args.params.seed,
    };
    let report = run_p_sweep(&config).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    json.push('\n');
    match &args.json {
        Some(path) => {
            fs::write(path, &json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!(
                "slope {:.4} ms, intercept {:.4} ms, r^2 {:.4}, report in {}",
                report.fit.slope_ms,
                report.fit.intercept_ms,
                report.fit.r_squared,
                path.display()
            );
        }
        None => print!("{json}"),
    }
    if let Some(path) = &args.svg {
        fs::write(path, render_svg(&report))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

struct CheckReport {
    failures: Vec<String>,
}

impl CheckReport {
    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                self.failures.push(name.to_string());
            }
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let params = build_params(&args.params, 1.0)?;
    let trials = args.trials;
    let seed = params.seed;
    let mut report = CheckReport { failures: Vec::new() };

    report.record("partition tiling", check_tiling(&params, trials, mix_seed(seed, 1)));
    report.record(
        "refinement budget",
        check_refinement(&params, trials, mix_seed(seed, 2)),
    );
    report.record(
        "scale inconsistency",
        check_inconsistency(&params, trials, mix_seed(seed, 3)),
    );
    report.record("gate endpoints", check_gate(&params, trials, mix_seed(seed, 4)));
    report.record("resampler fixed points", check_resampler(trials, mix_seed(seed, 5)));

    if report.failures.is_empty() {
        println!("all checks passed ({trials} trials each)");
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of 5 checks failed: {}",
            report.failures.len(),
            report.failures.join(", ")
        )))
    }
}

fn random_canvas(rng: &mut ChaCha8Rng, min_pixels: u32) -> (u32, u32) {
    loop {
        let w = rng.gen_range(1..=96);
        let h = rng.gen_range(1..=96);
        if w * h >= min_pixels {
            return (w, h);
        }
    }
}

fn check_tiling(params: &UnpropParams, trials: u32, stream: u64) -> Result<String, String> {
    for t in 0..trials {
        let mut rng = item_rng(stream, u64::from(t));
        let (w, h) = random_canvas(&mut rng, params.target_rects);
        let partition = generate_partition(w, h, params.target_rects, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        if partition.rects.len() != params.target_rects as usize {
            return Err(format!(
                "trial {t}: {} rects instead of {}",
                partition.rects.len(),
                params.target_rects
            ));
        }
        if let Err(e) = partition.validate() {
            return Err(format!("trial {t} ({w}x{h}): {e}"));
        }
    }
    Ok(format!("{trials} random canvases tiled exactly"))
}

fn check_refinement(params: &UnpropParams, trials: u32, stream: u64) -> Result<String, String> {
    let n = params.target_rects as usize;
    for t in 0..trials {
        let mut rng = item_rng(stream, u64::from(t));
        let (w, h) = random_canvas(&mut rng, params.target_rects);
        let mut partition = generate_partition(w, h, params.target_rects, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        let used = refine_partition(&mut partition, params.aspect_ratio, params.refine_steps);
        let len = partition.rects.len();
        if used > params.refine_steps || len < n || len > n + params.refine_steps as usize {
            return Err(format!(
                "trial {t}: {len} rects after {used} cuts, budget {}",
                params.refine_steps
            ));
        }
        if let Err(e) = partition.validate() {
            return Err(format!("trial {t} ({w}x{h}): {e}"));
        }
    }
    Ok(format!("rect counts stayed within budget over {trials} refinements"))
}

fn check_inconsistency(params: &UnpropParams, trials: u32, stream: u64) -> Result<String, String> {
    let mut inconsistent = 0u32;
    for t in 0..trials {
        let mut rng = item_rng(stream, u64::from(t));
        let record = sample_record(512, 512, params, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        let partition = record.partition.clone().expect("forced apply");
        match is_augmentation_inconsistent(&record) {
            Ok(true) => inconsistent += 1,
            Ok(false) => {}
            Err(e) => return Err(format!("trial {t}: {e}")),
        }
        let identity = unprop_core::AugmentationRecord::applied(
            partition.clone(),
            Permutation::identity(partition.rects.len()),
            *params,
        );
        if is_augmentation_inconsistent(&identity) != Ok(false) {
            return Err(format!("trial {t}: identity permutation flagged inconsistent"));
        }
    }
    let fraction = f64::from(inconsistent) / f64::from(trials);
    if fraction > 0.95 {
        Ok(format!(
            "{inconsistent}/{trials} shuffled records rescale content unevenly"
        ))
    } else {
        Err(format!(
            "only {inconsistent}/{trials} records were inconsistent (need > 95%)"
        ))
    }
}

fn check_gate(params: &UnpropParams, trials: u32, stream: u64) -> Result<String, String> {
    let never = UnpropParams { apply_prob: 0.0, ..*params };
    let always = UnpropParams { apply_prob: 1.0, ..*params };
    for t in 0..trials {
        let mut rng = item_rng(stream, u64::from(t));
        let skipped = sample_record(16, 16, &never, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        if skipped.applied {
            return Err(format!("trial {t}: applied at probability 0"));
        }
        let applied = sample_record(16, 16, &always, &mut rng)
            .map_err(|e| format!("trial {t}: {e}"))?;
        if !applied.applied {
            return Err(format!("trial {t}: skipped at probability 1"));
        }
    }
    Ok(format!("probability 0 never fired and 1 always fired over {trials} trials"))
}

fn check_resampler(trials: u32, stream: u64) -> Result<String, String> {
    for t in 0..trials {
        let mut rng = item_rng(stream, u64::from(t));
        let w = rng.gen_range(1..=48);
        let h = rng.gen_range(1..=48);
        let dw = rng.gen_range(1..=48);
        let dh = rng.gen_range(1..=48);
        let value = (rng.next_u32() & 0xFF) as u8;

        let flat = Image::filled(w, h, Channels::Gray, value);
        let out = resize_patch(&flat.view(Rect::new(0, 0, w, h)).unwrap(), dw, dh);
        if out.data().iter().any(|&b| b != value) {
            return Err(format!("trial {t}: constant {value} not preserved at {w}x{h} -> {dw}x{dh}"));
        }

        let mut data = vec![0u8; w as usize * h as usize * 3];
        let mut noise = ChaCha8Rng::seed_from_u64(mix_seed(stream, u64::from(t)));
        noise.fill_bytes(&mut data);
        let img = Image::new(w, h, Channels::Rgb, data).unwrap();
        let same = resize_patch(&img.view(Rect::new(0, 0, w, h)).unwrap(), w, h);
        if same.data() != img.data() {
            return Err(format!("trial {t}: identity resize changed bytes at {w}x{h}"));
        }
    }
    Ok(format!("constants and identity resizes were exact over {trials} trials"))
}
