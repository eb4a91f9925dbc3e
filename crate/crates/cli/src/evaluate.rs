//! Scoring of paired prediction/ground-truth directories.
//!
//! Files are paired by relative path. Per-image PSNR/SSIM go to the CSV;
//! stdout gets a summary table with one row per partition (filename
//! prefixes, mirroring exposure-time splits of deblurring benchmarks)
//! plus an Average row over every matched image.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rawblur_core::metrics;

use crate::pngio::load_srgb;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub pred: PathBuf,
    pub gt: PathBuf,
    /// Relative-path prefixes defining sub-reports.
    pub partitions: Vec<String>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct ImageRow {
    name: String,
    psnr_db: f64,
    ssim: f64,
}

#[derive(Debug, Clone)]
struct SummaryRow {
    name: String,
    count: usize,
    psnr_db: f64,
    ssim: f64,
}

/// Runs the evaluation; returns false when any file was unmatched or
/// unusable (callers map that to a nonzero exit).
pub fn run(options: &EvalOptions) -> Result<bool> {
    let pred_files = png_files(&options.pred)?;
    let gt_files = png_files(&options.gt)?;

    let mut clean = true;
    for name in pred_files.keys() {
        if !gt_files.contains_key(name) {
            eprintln!("unmatched prediction (no ground truth): {name}");
            clean = false;
        }
    }
    for name in gt_files.keys() {
        if !pred_files.contains_key(name) {
            eprintln!("unmatched ground truth (no prediction): {name}");
            clean = false;
        }
    }

    let mut rows = Vec::new();
    for (name, pred_path) in &pred_files {
        let Some(gt_path) = gt_files.get(name) else {
            continue;
        };
        let pred = load_srgb(pred_path)?;
        let gt = load_srgb(gt_path)?;
        match metrics::report(&gt, &pred) {
            Ok(report) => rows.push(ImageRow {
                name: name.clone(),
                psnr_db: report.psnr_db,
                ssim: report.ssim,
            }),
            Err(error) => {
                eprintln!("excluding {name}: {error}");
                clean = false;
            }
        }
    }

    let summaries = summarize(&rows, &options.partitions);
    print_table(&summaries);

    if let Some(csv_path) = &options.csv {
        write_csv(csv_path, &rows, &summaries)?;
    }
    Ok(clean)
}

/// All PNG files under `root`, keyed by relative path with `/` separators.
fn png_files(root: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut files = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.with_context(|| format!("cannot scan {}", root.display()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png {
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .expect("walkdir stays under root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.insert(rel, path.to_path_buf());
    }
    Ok(files)
}

fn mean_rows(name: &str, rows: &[&ImageRow]) -> SummaryRow {
    let count = rows.len();
    let (mut psnr_sum, mut ssim_sum) = (0.0f64, 0.0f64);
    for row in rows {
        psnr_sum += row.psnr_db;
        ssim_sum += row.ssim;
    }
    SummaryRow {
        name: name.to_owned(),
        count,
        psnr_db: if count > 0 {
            psnr_sum / count as f64
        } else {
            f64::NAN
        },
        ssim: if count > 0 {
            ssim_sum / count as f64
        } else {
            f64::NAN
        },
    }
}

/// One row per partition (first matching prefix wins) plus the Average
/// row over all scored images.
fn summarize(rows: &[ImageRow], partitions: &[String]) -> Vec<SummaryRow> {
    let mut summaries = Vec::new();
    for prefix in partitions {
        let members: Vec<&ImageRow> = rows
            .iter()
            .filter(|row| {
                row.name.starts_with(prefix.as_str())
                    && partitions
                        .iter()
                        .find(|p| row.name.starts_with(p.as_str()))
                        .is_some_and(|first| first == prefix)
            })
            .collect();
        summaries.push(mean_rows(prefix, &members));
    }
    let all: Vec<&ImageRow> = rows.iter().collect();
    summaries.push(mean_rows("Average", &all));
    summaries
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_owned()
    } else if v.is_nan() {
        "-".to_owned()
    } else {
        format!("{v:.2}")
    }
}

fn fmt_ssim(v: f64) -> String {
    if v.is_nan() {
        "-".to_owned()
    } else {
        format!("{v:.4}")
    }
}

fn print_table(summaries: &[SummaryRow]) {
    println!(
        "{:<24} {:>8} {:>10} {:>8}",
        "partition", "images", "PSNR", "SSIM"
    );
    for row in summaries {
        println!(
            "{:<24} {:>8} {:>10} {:>8}",
            row.name,
            row.count,
            fmt_db(row.psnr_db),
            fmt_ssim(row.ssim)
        );
    }
}

fn write_csv(path: &Path, rows: &[ImageRow], summaries: &[SummaryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(["scope", "name", "psnr_db", "ssim"])?;
    for row in rows {
        writer.write_record([
            "image",
            row.name.as_str(),
            &fmt_db(row.psnr_db),
            &fmt_ssim(row.ssim),
        ])?;
    }
    for (i, row) in summaries.iter().enumerate() {
        let scope = if i + 1 == summaries.len() {
            "average"
        } else {
            "partition"
        };
        writer.write_record([
            scope,
            row.name.as_str(),
            &fmt_db(row.psnr_db),
            &fmt_ssim(row.ssim),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
