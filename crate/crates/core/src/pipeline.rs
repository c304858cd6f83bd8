//! Corpus-level drivers: augment, replay, saliency export and bench.
//!
//! Image `i` of a corpus always uses stream `(cfg.seed, i)`, so outputs
//! depend only on corpus order, never on the worker count.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::composer::{augment_timed, replay_plan, AugmentPlan, StageTimings};
use crate::config::{Method, PipelineConfig, SaliencyProvider};
use crate::dataset::{
    encode_image, read_cifar_batch, read_image_file, read_manifest, relative_key, scan_corpus, write_cifar_batch,
    write_image_file, write_manifest, CifarRecord, CifarVariant, ImageFormat, Label, ManifestHeader, ManifestRow,
    DEFAULT_EXTENSIONS, MANIFEST_FILE,
};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::parallel::{map_indexed, try_map_indexed};
use crate::rng::RngStream;
use crate::saliency::{compute_saliency, load_external_saliency, write_salm, SaliencyMap};
use crate::synthetic::synthetic_image;

pub const SALFMIX_NOTE: &str =
    "salfmix: destination is the least-salient surrounding cell (approximation of the published method)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSource {
    Corpus(PathBuf),
    Cifar(PathBuf, CifarVariant),
}

impl InputSource {
    pub fn mode(&self) -> &'static str {
        match self {
            InputSource::Corpus(_) => "corpus",
            InputSource::Cifar(_, v) => v.as_str(),
        }
    }

    /// Rebuilds the input description from a manifest mode.
    pub fn from_mode(mode: &str, path: PathBuf) -> Result<Self> {
        match mode {
            "corpus" => Ok(InputSource::Corpus(path)),
            "cifar10" => Ok(InputSource::Cifar(path, CifarVariant::C10)),
            "cifar100" => Ok(InputSource::Cifar(path, CifarVariant::C100)),
            other => Err(Error::Manifest(format!("unknown manifest mode {other:?}"))),
        }
    }
}

enum Items {
    Files {
        root: PathBuf,
        paths: Vec<PathBuf>,
    },
    Cifar {
        file_name: String,
        records: Vec<CifarRecord>,
    },
}

/// An opened, ordered input corpus.
pub struct Corpus {
    items: Items,
}

impl Corpus {
    pub fn open(input: &InputSource) -> Result<Self> {
        let items = match input {
            InputSource::Corpus(root) => Items::Files {
                root: root.clone(),
                paths: scan_corpus(root, DEFAULT_EXTENSIONS)?,
            },
            InputSource::Cifar(path, variant) => Items::Cifar {
                file_name: path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                records: read_cifar_batch(path, *variant)?,
            },
        };
        Ok(Corpus { items })
    }

    pub fn len(&self) -> usize {
        match &self.items {
            Items::Files { paths, .. } => paths.len(),
            Items::Cifar { records, .. } => records.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn load(&self, i: usize) -> Result<Image> {
        match &self.items {
            Items::Files { paths, .. } => read_image_file(&paths[i]),
            Items::Cifar { records, .. } => Ok(records[i].image.clone()),
        }
    }

    /// `relative/path.png`, or `file#index` for CIFAR.
    pub fn source(&self, i: usize) -> String {
        match &self.items {
            Items::Files { root, paths } => relative_key(root, &paths[i]),
            Items::Cifar { file_name, .. } => format!("{file_name}#{i}"),
        }
    }

    /// Relative path without its extension, or the zero-padded index for CIFAR.
    fn stem_key(&self, i: usize) -> String {
        match &self.items {
            Items::Files { root, paths } => relative_key(root, &paths[i].with_extension("")),
            Items::Cifar { .. } => format!("{i:08}"),
        }
    }

    /// Parent directory name for file corpora, class index for CIFAR.
    pub fn label(&self, i: usize) -> Option<Label> {
        match &self.items {
            Items::Files { root, paths } => {
                let key = relative_key(root, &paths[i]);
                let mut parts: Vec<&str> = key.split('/').collect();
                parts.pop();
                parts.pop().map(|p| Label::Name(p.to_string()))
            }
            Items::Cifar { records, .. } => Some(Label::Index(records[i].label as u16)),
        }
    }

    /// Output file name for image `i` of a file corpus: `{i:08}_{stem}.png`.
    pub fn output_name(&self, i: usize) -> String {
        let key = self.stem_key(i);
        let stem = key.rsplit('/').next().unwrap_or(&key);
        format!("{i:08}_{stem}.png")
    }

    /// Where the SALM sidecar of image `i` lives: `<dir>/<relative stem>.salm`
    /// when a saliency directory is given, otherwise next to the image.
    /// CIFAR sidecars are `<dir>/{i:08}.salm`.
    pub fn sidecar_path(&self, i: usize, saliency_dir: Option<&Path>) -> Result<PathBuf> {
        match (&self.items, saliency_dir) {
            (_, Some(dir)) => Ok(dir.join(format!("{}.salm", self.stem_key(i)))),
            (Items::Files { paths, .. }, None) => Ok(paths[i].with_extension("salm")),
            (Items::Cifar { .. }, None) => Err(Error::validation(
                "saliency_dir",
                "external saliency for CIFAR input needs a saliency directory",
            )),
        }
    }

    fn external(&self, i: usize, img: &Image, cfg: &PipelineConfig, dir: Option<&Path>) -> Result<Option<SaliencyMap>> {
        if cfg.saliency_provider != SaliencyProvider::External || !needs_saliency(cfg.method) {
            return Ok(None);
        }
        let path = self.sidecar_path(i, dir)?;
        load_external_saliency(&path, (img.width(), img.height())).map(Some)
    }
}

fn needs_saliency(method: Method) -> bool {
    matches!(
        method,
        Method::KeepOriginal | Method::KeepOriginalCutout | Method::KeepAugment | Method::SalfMix
    )
}

#[derive(Clone, Debug)]
pub struct AugmentOptions {
    pub input: InputSource,
    pub output: PathBuf,
    pub saliency_dir: Option<PathBuf>,
    /// Stop at the first per-image error instead of recording it.
    pub strict: bool,
}

#[derive(Clone, Debug, Default)]
pub struct AugmentReport {
    pub images: usize,
    pub applied: usize,
    /// `(image index, message)` for every image that failed.
    pub failures: Vec<(u64, String)>,
    pub timings: StageTimings,
    pub wall: Duration,
}

struct Processed {
    row: ManifestRow,
    image: Option<Image>,
    timings: StageTimings,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn run_augment(opts: &AugmentOptions, cfg: &PipelineConfig) -> Result<AugmentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let corpus = Corpus::open(&opts.input)?;
    create_dir(&opts.output)?;
    let cifar = matches!(opts.input, InputSource::Cifar(..));

    let process = |i: usize| -> Result<Processed> {
        let mut timings = StageTimings::default();
        let mut attempt = || -> Result<(Image, AugmentPlan, Option<String>)> {
            let img = corpus.load(i)?;
            let ext = corpus.external(i, &img, cfg, opts.saliency_dir.as_deref())?;
            let mut rng = RngStream::new(cfg.seed, i as u64);
            let (out, plan) = augment_timed(&img, cfg, &mut rng, ext.as_ref(), &mut timings)?;
            let output = if cifar {
                None
            } else {
                let name = corpus.output_name(i);
                write_image_file(&out, &opts.output.join(&name), ImageFormat::Png)?;
                Some(name)
            };
            Ok((out, plan, output))
        };
        let (image, plan, output, error) = match attempt() {
            Ok((out, plan, output)) => (Some(out), plan, output, None),
            Err(e) if opts.strict => {
                return Err(Error::Image {
                    index: i as u64,
                    source_name: corpus.source(i),
                    reason: e.to_string(),
                })
            }
            Err(e) => {
                let plan = AugmentPlan::kept(cfg, &RngStream::new(cfg.seed, i as u64));
                (None, plan, None, Some(e.to_string()))
            }
        };
        let row = ManifestRow {
            plan,
            source: corpus.source(i),
            label: corpus.label(i),
            output,
            error,
        };
        Ok(Processed { row, image, timings })
    };
    let processed = try_map_indexed(corpus.len(), cfg.workers, process)?;

    let mut report = AugmentReport {
        images: processed.len(),
        ..Default::default()
    };
    for p in &processed {
        report.timings += p.timings;
        report.applied += p.row.plan.applied as usize;
        if let Some(e) = &p.row.error {
            report.failures.push((p.row.plan.image_index, e.clone()));
        }
    }

    let mut rows: Vec<ManifestRow> = Vec::with_capacity(processed.len());
    if let (InputSource::Cifar(path, variant), Items::Cifar { records, file_name, .. }) = (&opts.input, &corpus.items) {
        // Failed records keep their original pixels so the batch stays aligned.
        let mut out_records = Vec::with_capacity(records.len());
        for (i, p) in processed.into_iter().enumerate() {
            let image = p.image.unwrap_or_else(|| records[i].image.clone());
            out_records.push(CifarRecord {
                image,
                ..records[i].clone()
            });
            let mut row = p.row;
            row.output = Some(format!("{file_name}#{i}"));
            rows.push(row);
        }
        let _ = path;
        write_cifar_batch(&out_records, &opts.output.join(file_name), *variant)?;
    } else {
        rows.extend(processed.into_iter().map(|p| p.row));
    }

    let mut header = ManifestHeader::new(opts.input.mode(), cfg);
    if cfg.method == Method::SalfMix {
        header.notes.push(SALFMIX_NOTE.into());
    }
    write_manifest(&opts.output.join(MANIFEST_FILE), &header, &rows)?;
    report.wall = start.elapsed();
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct ReplayReport {
    pub checked: usize,
    /// Rows that recorded an error and have no output to verify.
    pub skipped: usize,
    /// `(image index, description)` for every row whose output differs.
    pub mismatches: Vec<(u64, String)>,
}

fn describe_diff(want: &[u8], got: &[u8]) -> String {
    if want.len() != got.len() {
        return format!("length {} != expected {}", got.len(), want.len());
    }
    let first = want.iter().zip(got).position(|(a, b)| a != b).unwrap_or(0);
    let count = want.iter().zip(got).filter(|(a, b)| a != b).count();
    format!("{count} byte(s) differ, first at offset {first}")
}

/// Re-executes every manifest row against the input corpus and compares the
/// result with the stored outputs (PNG bytes, or CIFAR record pixels).
pub fn run_replay(manifest: &Path, input: &Path, workers: usize) -> Result<ReplayReport> {
    let (header, rows) = read_manifest(manifest)?;
    let out_root = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let source = InputSource::from_mode(&header.mode, input.to_path_buf())?;
    let corpus = Corpus::open(&source)?;
    if corpus.len() != rows.len() {
        return Err(Error::Manifest(format!(
            "manifest has {} rows but the input has {} images",
            rows.len(),
            corpus.len()
        )));
    }
    let cfg = &header.config;
    let stored = match (&source, &corpus.items) {
        (InputSource::Cifar(_, variant), Items::Cifar { file_name, .. }) => {
            Some(read_cifar_batch(&out_root.join(file_name), *variant)?)
        }
        _ => None,
    };

    let check = |i: usize| -> Option<(bool, Option<String>)> {
        let row = &rows[i];
        if row.error.is_some() {
            return None;
        }
        let verdict = (|| -> Result<Option<String>> {
            if row.source != corpus.source(i) {
                return Ok(Some(format!(
                    "source is {:?}, manifest says {:?}",
                    corpus.source(i),
                    row.source
                )));
            }
            let img = corpus.load(i)?;
            let expected = replay_plan(&img, &row.plan, cfg)?;
            match &stored {
                Some(records) => {
                    let got = records.get(i).map(|r| r.image.data()).unwrap_or(&[]);
                    Ok((got != expected.data()).then(|| describe_diff(expected.data(), got)))
                }
                None => {
                    let name = row
                        .output
                        .as_deref()
                        .ok_or_else(|| Error::Manifest(format!("row {i} has no output")))?;
                    let path = out_root.join(name);
                    let got = match std::fs::read(&path) {
                        Ok(b) => b,
                        Err(e) => return Ok(Some(format!("cannot read {}: {e}", path.display()))),
                    };
                    let want = encode_image(&expected, ImageFormat::Png)?;
                    Ok((got != want).then(|| format!("{name}: {}", describe_diff(&want, &got))))
                }
            }
        })();
        Some(match verdict {
            Ok(None) => (true, None),
            Ok(Some(msg)) => (false, Some(msg)),
            Err(e) => (false, Some(e.to_string())),
        })
    };
    let results = map_indexed(rows.len(), workers, check);

    let mut report = ReplayReport::default();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            None => report.skipped += 1,
            Some((ok, msg)) => {
                report.checked += 1;
                if !ok {
                    report.mismatches.push((i as u64, msg.unwrap_or_default()));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct SaliencyReport {
    pub images: usize,
    pub failures: Vec<(u64, String)>,
}

/// Writes `<stem>.salm` and `<stem>_heatmap.png` per image, mirroring the
/// input tree (CIFAR stems are `{index:08}`).
pub fn run_saliency(
    input: &InputSource,
    output: &Path,
    provider: SaliencyProvider,
    saliency_dir: Option<&Path>,
    workers: usize,
) -> Result<SaliencyReport> {
    let corpus = Corpus::open(input)?;
    create_dir(output)?;
    let one = |i: usize| -> Result<()> {
        let img = corpus.load(i)?;
        let map = match provider {
            SaliencyProvider::External => {
                load_external_saliency(&corpus.sidecar_path(i, saliency_dir)?, (img.width(), img.height()))?
            }
            p => compute_saliency(&img, p)?,
        };
        let stem = output.join(corpus.stem_key(i));
        if let Some(parent) = stem.parent() {
            create_dir(parent)?;
        }
        let base = stem.to_string_lossy().into_owned();
        write_salm(&map, Path::new(&format!("{base}.salm")))?;
        write_image_file(
            &map.to_heatmap(),
            Path::new(&format!("{base}_heatmap.png")),
            ImageFormat::Png,
        )
    };
    let results = map_indexed(corpus.len(), workers, |i| one(i).err().map(|e| e.to_string()));
    Ok(SaliencyReport {
        images: corpus.len(),
        failures: results
            .into_iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|e| (i as u64, e)))
            .collect(),
    })
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    pub workers: usize,
    pub images: usize,
    pub applied: usize,
    pub failures: usize,
    pub wall: Duration,
    /// Stage times summed over all images (across threads).
    pub stages: StageTimings,
}

impl BenchRun {
    pub fn images_per_sec(&self) -> f64 {
        let s = self.wall.as_secs_f64();
        if s > 0.0 {
            self.images as f64 / s
        } else {
            0.0
        }
    }
}

/// Synthetic RGB bench inputs, seeded by the config seed.
pub fn bench_images(count: usize, size: u32, seed: u64) -> Vec<Image> {
    (0..count)
        .map(|i| synthetic_image(seed, i as u64, size, size, 3))
        .collect()
}

/// Runs the configured method over in-memory images once per worker count.
/// Image generation is not timed.
pub fn run_bench(images: &[Image], cfg: &PipelineConfig, worker_counts: &[usize]) -> Result<Vec<BenchRun>> {
    let mut base = cfg.clone();
    if base.saliency_provider == SaliencyProvider::External {
        return Err(Error::validation(
            "saliency_provider",
            "bench needs a built-in provider",
        ));
    }
    base.workers = 1;
    base.validate()?;
    let mut runs = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        if workers == 0 {
            return Err(Error::validation("workers", "must be at least 1"));
        }
        let start = Instant::now();
        let results = map_indexed(images.len(), workers, |i| {
            let mut t = StageTimings::default();
            let mut rng = RngStream::new(base.seed, i as u64);
            let r = augment_timed(&images[i], &base, &mut rng, None, &mut t);
            let applied = r.map(|(img, plan)| {
                std::hint::black_box(img);
                plan.applied
            });
            (applied, t)
        });
        let wall = start.elapsed();
        let mut run = BenchRun {
            workers,
            images: images.len(),
            applied: 0,
            failures: 0,
            wall,
            stages: StageTimings::default(),
        };
        for (applied, t) in results {
            run.stages += t;
            match applied {
                Ok(a) => run.applied += a as usize,
                Err(_) => run.failures += 1,
            }
        }
        runs.push(run);
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::write_image_file;

    fn write_corpus(dir: &Path, n: u64) {
        std::fs::create_dir_all(dir.join("cls")).unwrap();
        for i in 0..n {
            let sub = if i % 3 == 0 { "cls/" } else { "" };
            let img = synthetic_image(4, i, 20 + i as u32 % 5, 18, if i % 4 == 0 { 1 } else { 3 });
            write_image_file(&img, &dir.join(format!("{sub}img{i:02}.png")), ImageFormat::Png).unwrap();
        }
    }

    fn opts(input: &Path, output: &Path) -> AugmentOptions {
        AugmentOptions {
            input: InputSource::Corpus(input.to_path_buf()),
            output: output.to_path_buf(),
            saliency_dir: None,
            strict: false,
        }
    }

    #[test]
    fn augment_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let (input, output) = (dir.path().join("in"), dir.path().join("out"));
        write_corpus(&input, 9);
        let cfg = PipelineConfig {
            seed: 42,
            ..PipelineConfig::default()
        };
        let report = run_augment(&opts(&input, &output), &cfg).unwrap();
        assert_eq!(report.images, 9);
        assert!(report.failures.is_empty());
        let (_, rows) = read_manifest(&output.join(MANIFEST_FILE)).unwrap();
        let sources: Vec<&str> = rows.iter().map(|r| r.source.as_str()).collect();
        assert_eq!(
            &sources[..4],
            &["cls/img00.png", "cls/img03.png", "cls/img06.png", "img01.png"]
        );
        assert_eq!(rows[3].output.as_deref(), Some("00000003_img01.png"));
        assert!(output.join("00000003_img01.png").exists());
        assert_eq!(rows[0].label, Some(Label::Name("cls".into())));
        assert_eq!(rows[3].label, None);
        let replay = run_replay(&output.join(MANIFEST_FILE), &input, 1).unwrap();
        assert_eq!((replay.checked, replay.mismatches.len()), (9, 0));

        let victim = output.join(rows[4].output.as_ref().unwrap());
        let mut bytes = std::fs::read(&victim).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        std::fs::write(&victim, bytes).unwrap();
        let replay = run_replay(&output.join(MANIFEST_FILE), &input, 2).unwrap();
        assert_eq!(replay.mismatches.len(), 1);
        assert_eq!(replay.mismatches[0].0, 4);
    }

    #[test]
    fn external_without_sidecar_is_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let (input, output) = (dir.path().join("in"), dir.path().join("out"));
        write_corpus(&input, 3);
        let cfg = PipelineConfig {
            keep_prob: 0.0,
            saliency_provider: SaliencyProvider::External,
            ..PipelineConfig::default()
        };
        let report = run_augment(&opts(&input, &output), &cfg).unwrap();
        assert_eq!(report.failures.len(), 3);
        let (_, rows) = read_manifest(&output.join(MANIFEST_FILE)).unwrap();
        assert!(rows
            .iter()
            .all(|r| !r.plan.applied && r.error.is_some() && r.output.is_none()));
        let strict = AugmentOptions {
            strict: true,
            ..opts(&input, &dir.path().join("out2"))
        };
        assert!(matches!(run_augment(&strict, &cfg), Err(Error::Image { .. })));
    }

    #[test]
    fn saliency_export_feeds_external_provider() {
        let dir = tempfile::tempdir().unwrap();
        let (input, sal, output) = (dir.path().join("in"), dir.path().join("sal"), dir.path().join("out"));
        write_corpus(&input, 4);
        let src = InputSource::Corpus(input.clone());
        let rep = run_saliency(&src, &sal, SaliencyProvider::FineGrained, None, 1).unwrap();
        assert!(rep.failures.is_empty());
        assert!(sal.join("cls/img00.salm").exists() && sal.join("cls/img00_heatmap.png").exists());
        let cfg = PipelineConfig {
            keep_prob: 0.0,
            saliency_provider: SaliencyProvider::External,
            ..PipelineConfig::default()
        };
        let o = AugmentOptions {
            saliency_dir: Some(sal.clone()),
            ..opts(&input, &output)
        };
        assert!(run_augment(&o, &cfg).unwrap().failures.is_empty());
        // Same maps as computing in-process.
        let direct = PipelineConfig {
            saliency_provider: SaliencyProvider::FineGrained,
            ..cfg
        };
        let out2 = dir.path().join("out2");
        run_augment(&opts(&input, &out2), &direct).unwrap();
        let (_, rows) = read_manifest(&output.join(MANIFEST_FILE)).unwrap();
        for row in rows {
            let name = row.output.unwrap();
            assert_eq!(
                std::fs::read(output.join(&name)).unwrap(),
                std::fs::read(out2.join(&name)).unwrap()
            );
        }
    }

    #[test]
    fn bench_accounting() {
        let imgs = bench_images(50, 32, 0);
        let runs = run_bench(&imgs, &PipelineConfig::default(), &[1, 2]).unwrap();
        assert_eq!(runs.len(), 2);
        assert!(runs[0].stages.total() <= runs[0].wall);
        assert_eq!(runs[0].applied, runs[1].applied);
        assert!(run_bench(&[], &PipelineConfig::default(), &[1]).unwrap()[0].images == 0);
    }
}
