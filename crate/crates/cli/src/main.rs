//! `keeporig` command-line driver.
//!
//! Exit status: 0 on success, 1 when some images failed (or replay found
//! mismatches), 2 for invocation and configuration errors.

mod args;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use keeporig::dataset::{decode_cifar, encode_cifar, write_image_file, ImageFormat, MANIFEST_FILE};
use keeporig::parallel::PARALLEL;
use keeporig::pipeline::{
    bench_images, run_augment, run_bench, run_replay, run_saliency, AugmentOptions, BenchRun, Corpus, InputSource,
};
use keeporig::preview::{render_preview, sample_indices, PreviewEntry};
use keeporig::saliency::load_external_saliency;
use keeporig::{Error, PipelineConfig, SaliencyProvider, StageTimings};
use serde_json::json;

use args::{Cli, Command, InputArgs};

const FAILED: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Augment {
            io,
            output,
            strict,
            config,
        } => augment(&io, output, strict, &config.resolve()?),
        Command::Saliency { io, output, config } => saliency(&io, &output, &config.resolve()?),
        Command::Preview {
            io,
            output,
            grid,
            config,
        } => preview(&io, &output, grid, &config.resolve()?),
        Command::CifarRoundtrip { input, cifar, output } => {
            let bytes = std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let records = match decode_cifar(&bytes, cifar, &input) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(FAILED));
                }
            };
            let encoded = encode_cifar(&records, cifar)?;
            let identical = encoded == bytes;
            if let Some(out) = output {
                std::fs::write(&out, &encoded).with_context(|| format!("writing {}", out.display()))?;
            }
            println!(
                "{} records ({}), re-encode byte-identical: {}",
                records.len(),
                cifar.as_str(),
                if identical { "yes" } else { "no" }
            );
            Ok(if identical {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(FAILED)
            })
        }
        Command::Bench {
            count,
            size,
            json,
            config,
        } => bench(count, size, json, &config.resolve()?),
        Command::Replay {
            manifest,
            input,
            workers,
        } => replay(&manifest, &input, workers),
    }
}

fn input_source(io: &InputArgs) -> InputSource {
    match io.cifar {
        Some(v) => InputSource::Cifar(io.input.clone(), v),
        None => InputSource::Corpus(io.input.clone()),
    }
}

fn report_failures(failures: &[(u64, String)]) {
    for (i, e) in failures {
        eprintln!("image {i}: {e}");
    }
}

fn augment(io: &InputArgs, output: PathBuf, strict: bool, cfg: &PipelineConfig) -> anyhow::Result<ExitCode> {
    let opts = AugmentOptions {
        input: input_source(io),
        output,
        saliency_dir: io.saliency_dir.clone(),
        strict,
    };
    let report = match run_augment(&opts, cfg) {
        Ok(r) => r,
        Err(e @ Error::Image { .. }) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(FAILED));
        }
        Err(e) => return Err(e.into()),
    };
    report_failures(&report.failures);
    println!(
        "{} images, {} augmented, {} failed, {:.3} s; manifest {}",
        report.images,
        report.applied,
        report.failures.len(),
        report.wall.as_secs_f64(),
        opts.output.join(MANIFEST_FILE).display()
    );
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    })
}

fn saliency(io: &InputArgs, output: &Path, cfg: &PipelineConfig) -> anyhow::Result<ExitCode> {
    let report = run_saliency(
        &input_source(io),
        output,
        cfg.saliency_provider,
        io.saliency_dir.as_deref(),
        cfg.workers,
    )?;
    report_failures(&report.failures);
    println!(
        "{} images, {} failed; provider {}",
        report.images,
        report.failures.len(),
        cfg.saliency_provider
    );
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    })
}

fn preview(
    io: &InputArgs,
    output: &Path,
    (rows, cols): (usize, usize),
    cfg: &PipelineConfig,
) -> anyhow::Result<ExitCode> {
    let corpus = Corpus::open(&input_source(io))?;
    let mut entries = Vec::new();
    for i in sample_indices(corpus.len(), rows, cfg.seed) {
        let image = corpus.load(i)?;
        let saliency = if cfg.saliency_provider == SaliencyProvider::External {
            let path = corpus.sidecar_path(i, io.saliency_dir.as_deref())?;
            Some(load_external_saliency(&path, (image.width(), image.height()))?)
        } else {
            None
        };
        entries.push(PreviewEntry {
            index: i as u64,
            image,
            saliency,
        });
    }
    let (sheet, layout) = render_preview(&entries, cfg, rows, cols)?;
    let format = output
        .extension()
        .and_then(|e| e.to_str())
        .and_then(|e| e.parse().ok())
        .unwrap_or(ImageFormat::Png);
    write_image_file(&sheet, output, format)?;
    let shown: Vec<String> = layout.filled.iter().map(|r| r.index.to_string()).collect();
    println!(
        "{}x{} sheet ({rows}x{cols} cells of {}x{}), images [{}] -> {}",
        layout.sheet_w,
        layout.sheet_h,
        layout.cell_w,
        layout.cell_h,
        shown.join(", "),
        output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn stages_json(s: &StageTimings) -> serde_json::Value {
    json!({
        "saliency_s": s.saliency.as_secs_f64(),
        "search_s": s.search.as_secs_f64(),
        "ops_s": s.ops.as_secs_f64(),
        "compose_s": s.compose.as_secs_f64(),
    })
}

fn bench(count: usize, size: u32, as_json: bool, cfg: &PipelineConfig) -> anyhow::Result<ExitCode> {
    if size == 0 {
        anyhow::bail!("--size must be at least 1");
    }
    let multi = if cfg.workers > 1 {
        cfg.workers
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .max(2)
    };
    let images = bench_images(count, size, cfg.seed);
    let runs = run_bench(&images, cfg, &[1, multi])?;
    let (single, parallel) = (&runs[0], &runs[1]);
    let mut warnings = Vec::new();
    if !PARALLEL {
        warnings.push("built without the `parallel` feature: multi-worker run is sequential".to_string());
    }
    if count >= 1000 && parallel.images_per_sec() < single.images_per_sec() {
        warnings.push(format!(
            "{} workers ran slower than 1 ({:.1} vs {:.1} images/s)",
            parallel.workers,
            parallel.images_per_sec(),
            single.images_per_sec()
        ));
    }
    if as_json {
        let run_json = |r: &BenchRun| {
            json!({
                "workers": r.workers,
                "images": r.images,
                "applied": r.applied,
                "failures": r.failures,
                "wall_s": r.wall.as_secs_f64(),
                "images_per_sec": r.images_per_sec(),
                "stages": stages_json(&r.stages),
            })
        };
        let report = json!({
            "count": count,
            "size": size,
            "method": cfg.method.as_str(),
            "parallel_feature": PARALLEL,
            "runs": runs.iter().map(run_json).collect::<Vec<_>>(),
            "warnings": warnings,
        });
        println!("{report}");
    } else {
        println!("bench: {count} images {size}x{size}, method {}", cfg.method);
        for r in &runs {
            let s = &r.stages;
            println!(
                "workers={:<3} wall {:8.3} s  {:10.1} images/s  augmented {}  stages: saliency {:.3} s, search {:.3} s, ops {:.3} s, compose {:.3} s",
                r.workers,
                r.wall.as_secs_f64(),
                r.images_per_sec(),
                r.applied,
                s.saliency.as_secs_f64(),
                s.search.as_secs_f64(),
                s.ops.as_secs_f64(),
                s.compose.as_secs_f64()
            );
        }
        for w in &warnings {
            eprintln!("warning: {w}");
        }
    }
    let failed = runs.iter().any(|r| r.failures > 0);
    Ok(if failed {
        ExitCode::from(FAILED)
    } else {
        ExitCode::SUCCESS
    })
}

fn replay(manifest: &Path, input: &Path, workers: usize) -> anyhow::Result<ExitCode> {
    let manifest = if manifest.is_dir() {
        manifest.join(MANIFEST_FILE)
    } else {
        manifest.to_path_buf()
    };
    let report = run_replay(&manifest, input, workers.max(1))?;
    for (i, msg) in &report.mismatches {
        eprintln!("mismatch at image {i}: {msg}");
    }
    println!(
        "{} checked, {} skipped (recorded errors), {} mismatched",
        report.checked,
        report.skipped,
        report.mismatches.len()
    );
    Ok(if report.mismatches.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    })
}
