//! Synthetic corpus generation.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use muscale_core::canonical::to_canonical_bytes;
use muscale_core::serialize_document;
use muscale_core::synthgen::{generate, generate_scattered, GenError, GenSpec};

use crate::Failure;

#[derive(Clone, Copy, ValueEnum)]
pub enum Preset {
    Figure3,
    Figure4,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Built-in spec.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<Preset>,
    /// JSON generation spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Base seed. Document `i` of a batch uses `seed + i`. Without a preset or
    /// spec, each seed also picks a random spec.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Scattered layouts without separation guarantees and without ground truth.
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    no_margins: bool,
    /// Element count for scattered layouts.
    #[arg(long, default_value_t = 40, requires = "no_margins")]
    elements: usize,
    /// Output directory, created if missing.
    #[arg(short, long)]
    output: PathBuf,
}

enum Source {
    Spec { name: String, spec: GenSpec },
    Random,
    Scattered,
}

pub fn run(args: &GenerateArgs) -> Result<(), Failure> {
    let source = if let Some(p) = args.preset {
        let (name, spec) = match p {
            Preset::Figure3 => ("figure3", GenSpec::figure3()),
            Preset::Figure4 => ("figure4", GenSpec::figure4()),
        };
        Source::Spec {
            name: name.to_owned(),
            spec,
        }
    } else if let Some(path) = &args.spec {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: GenSpec = serde_json::from_slice(&bytes)
            .map_err(|e| Failure::validation(anyhow::anyhow!("{}: {e}", path.display())))?;
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("spec");
        let name = name.strip_suffix(".json").unwrap_or(name).to_owned();
        Source::Spec { name, spec }
    } else if args.no_margins {
        Source::Scattered
    } else {
        Source::Random
    };

    fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    for i in 0..args.count {
        match &source {
            Source::Spec { name, spec } => {
                let mut spec = spec.clone();
                if let Some(seed) = args.seed {
                    spec.seed = seed;
                }
                spec.seed += i;
                let name = if args.count == 1 {
                    name.clone()
                } else {
                    format!("{name}-{i:04}")
                };
                write_generated(&args.output, &name, &spec)?;
            }
            Source::Random => {
                let seed = args.seed.unwrap_or(0) + i;
                write_generated(
                    &args.output,
                    &format!("synth-{seed:06}"),
                    &GenSpec::random(seed),
                )?;
            }
            Source::Scattered => {
                let seed = args.seed.unwrap_or(0) + i;
                let doc = generate_scattered(seed, args.elements);
                write(
                    &args.output.join(format!("scattered-{seed:06}.ffwc.json")),
                    &serialize_document(&doc),
                )?;
            }
        }
    }
    Ok(())
}

fn write_generated(dir: &Path, name: &str, spec: &GenSpec) -> Result<(), Failure> {
    let (doc, truth) = generate(spec).map_err(|e| match e {
        GenError::InvalidSpec(_) | GenError::InfeasibleSpec(_) => Failure::validation(e),
        other => other.into(),
    })?;
    write(
        &dir.join(format!("{name}.ffwc.json")),
        &serialize_document(&doc),
    )?;
    write(
        &dir.join(format!("{name}.truth.json")),
        &to_canonical_bytes(&truth)?,
    )
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
