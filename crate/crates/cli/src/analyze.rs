//! Batch analytics over files and directory trees.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use muscale_core::canonical::to_canonical_bytes;
use muscale_core::{compute_analytics, parse_document, AnalyticsRecord, RecognizerConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Failure, Format};

const TRUTH_SUFFIX: &str = ".truth.json";

#[derive(Serialize)]
struct Entry<'a> {
    path: String,
    analytics: &'a AnalyticsRecord,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    path: &'a str,
    hash: &'a str,
    scales: usize,
    clusters: usize,
    clusters_per_scale: String,
    elements: usize,
    words: usize,
    images: usize,
}

enum FileError {
    Io(anyhow::Error),
    Invalid(anyhow::Error),
}

/// Expands directories into the `.json` documents they contain, skipping
/// ground-truth side files, and returns the sorted, deduplicated list.
pub fn collect_inputs(paths: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> anyhow::Result<()> {
        for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                walk(&path, out)?;
            } else {
                let name = path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .unwrap_or_default();
                if name.ends_with(".json") && !name.ends_with(TRUTH_SUFFIX) {
                    out.push(path);
                }
            }
        }
        Ok(())
    }

    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            walk(p, &mut files)?;
        } else {
            files.push(p.clone());
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn analyze_file(path: &Path, config: &RecognizerConfig) -> Result<AnalyticsRecord, FileError> {
    let bytes =
        fs::read(path).map_err(|e| FileError::Io(anyhow::anyhow!("{}: {e}", path.display())))?;
    let doc = parse_document(&bytes)
        .map_err(|e| FileError::Invalid(anyhow::anyhow!("{}: {e}", path.display())))?;
    Ok(compute_analytics(&doc, config))
}

/// Writes the records of every readable, valid input to `out`. Inputs that
/// fail are reported on stderr and reflected in the returned status.
pub fn run(
    paths: &[PathBuf],
    format: Format,
    config: &RecognizerConfig,
    out: &mut Vec<u8>,
) -> Result<(), Failure> {
    let files = collect_inputs(paths)?;
    let results: Vec<_> = files.par_iter().map(|p| analyze_file(p, config)).collect();

    let mut records = Vec::new();
    let (mut invalid, mut io) = (0usize, 0usize);
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(r) => records.push((path.display().to_string(), r)),
            Err(FileError::Invalid(e)) => {
                invalid += 1;
                eprintln!("invalid: {e:#}");
            }
            Err(FileError::Io(e)) => {
                io += 1;
                eprintln!("error: {e:#}");
            }
        }
    }

    match format {
        Format::Json => {
            let entries: Vec<_> = records
                .iter()
                .map(|(path, a)| Entry {
                    path: path.clone(),
                    analytics: a,
                })
                .collect();
            out.extend(to_canonical_bytes(&entries)?);
            out.push(b'\n');
        }
        Format::Jsonl => {
            for (path, a) in &records {
                out.extend(to_canonical_bytes(&Entry {
                    path: path.clone(),
                    analytics: a,
                })?);
                out.push(b'\n');
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if records.is_empty() {
                w.write_record([
                    "path",
                    "hash",
                    "scales",
                    "clusters",
                    "clusters_per_scale",
                    "elements",
                    "words",
                    "images",
                ])?;
            }
            for (path, a) in &records {
                w.serialize(CsvRow {
                    path,
                    hash: &a.content_hash,
                    scales: a.num_scales,
                    clusters: a.num_clusters,
                    clusters_per_scale: a
                        .clusters_per_scale
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                    elements: a.fluency.element_count,
                    words: a.fluency.word_count,
                    images: a.fluency.image_count,
                })?;
            }
            out.write_all(&w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
        }
    }

    if io > 0 {
        return Err(anyhow::anyhow!("{io} of {} inputs could not be read", files.len()).into());
    }
    if invalid > 0 {
        return Err(Failure::validation(anyhow::anyhow!(
            "{invalid} of {} inputs failed validation",
            files.len()
        )));
    }
    Ok(())
}
