use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use keeporig::dataset::CifarVariant;
use keeporig::PipelineConfig;

#[derive(Parser, Debug)]
#[command(
    name = "keeporig",
    version,
    about = "Saliency-guided augmentation that keeps the original salient region"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Augment a corpus directory or CIFAR batch and write a manifest.
    Augment {
        #[command(flatten)]
        io: InputArgs,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
        /// Abort on the first per-image error.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Export saliency maps (SALM) and heatmaps.
    Saliency {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render a contact sheet of sampled inputs.
    Preview {
        #[command(flatten)]
        io: InputArgs,
        /// Output image path (.png or .jpg).
        #[arg(long)]
        output: PathBuf,
        /// Rows x columns, e.g. `4x6`.
        #[arg(long, default_value = "4x6", value_parser = parse_grid)]
        grid: (usize, usize),
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Decode a CIFAR batch, re-encode it, and compare bytes.
    CifarRoundtrip {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "10", value_parser = parse_variant)]
        cifar: CifarVariant,
        /// Also write the re-encoded batch here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the pipeline on seeded synthetic images.
    Bench {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Side of the square synthetic images.
        #[arg(long, default_value_t = 32)]
        size: u32,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Re-execute a manifest and verify stored outputs byte for byte.
    Replay {
        /// Manifest file, or the output directory holding `manifest.jsonl`.
        #[arg(long)]
        manifest: PathBuf,
        /// The input corpus or CIFAR batch the manifest was produced from.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Corpus directory, or a CIFAR batch file with `--cifar`.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as a CIFAR binary batch.
    #[arg(long, value_parser = parse_variant)]
    pub cifar: Option<CifarVariant>,
    /// Directory holding SALM sidecars for the external provider.
    #[arg(long)]
    pub saliency_dir: Option<PathBuf>,
}

/// Configuration flags. Values are applied through the same parser as the
/// config file, so errors name the offending field.
#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long, env = "KEEPORIG_CONFIG")]
    pub config: Option<PathBuf>,
    /// Any config key, repeatable: `--set cutout_size=0.4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub placement: Option<String>,
    #[arg(long)]
    pub aug_target: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub window_ratio: Option<String>,
    #[arg(long)]
    pub keep_prob: Option<String>,
    #[arg(long)]
    pub rand_n: Option<String>,
    #[arg(long)]
    pub rand_m: Option<String>,
    #[arg(long)]
    pub provider: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub workers: Option<String>,
}

impl ConfigArgs {
    /// Defaults < config file < `--set` pairs < named flags.
    pub fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut overrides = Vec::new();
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("--set expects KEY=VALUE, got {pair:?}"))?;
            overrides.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = [
            ("method", &self.method),
            ("placement", &self.placement),
            ("aug_target", &self.aug_target),
            ("tau", &self.tau),
            ("window_ratio", &self.window_ratio),
            ("keep_prob", &self.keep_prob),
            ("rand_n", &self.rand_n),
            ("rand_m", &self.rand_m),
            ("saliency_provider", &self.provider),
            ("seed", &self.seed),
            ("workers", &self.workers),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                overrides.push((k.to_string(), v.clone()));
            }
        }
        Ok(PipelineConfig::resolve(self.config.as_deref(), &overrides)?)
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RxC, got {s:?}"))?;
    let r: usize = r.trim().parse().map_err(|e| format!("rows: {e}"))?;
    let c: usize = c.trim().parse().map_err(|e| format!("columns: {e}"))?;
    if r == 0 || c == 0 {
        return Err("rows and columns must be at least 1".into());
    }
    Ok((r, c))
}

fn parse_variant(s: &str) -> Result<CifarVariant, String> {
    s.parse()
}
