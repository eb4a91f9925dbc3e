//! Manifest summary: window-length histogram, profile spread, failures.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use rawblur_core::isp::Crf;

use crate::manifest::{self, Domain, ManifestEntry};

pub fn run(path: &Path) -> Result<()> {
    let entries = manifest::read(path)?;

    let mut raw_pairs = 0usize;
    let mut rgb_pairs = 0usize;
    let mut failures = Vec::new();
    let mut sequences: BTreeMap<String, usize> = BTreeMap::new();
    let mut window_histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut gamma_exponents = Vec::new();
    let mut srgb_profiles = 0usize;
    let mut wb_red: Vec<f64> = Vec::new();
    let mut wb_blue: Vec<f64> = Vec::new();
    let mut cfa_counts: BTreeMap<String, usize> = BTreeMap::new();

    for entry in &entries {
        match entry {
            ManifestEntry::Pair {
                sequence,
                window,
                domain,
                profile,
                ..
            } => {
                *sequences.entry(sequence.clone()).or_default() += 1;
                match domain {
                    Domain::Raw => raw_pairs += 1,
                    Domain::Rgb => rgb_pairs += 1,
                }
                // RGB baseline rows duplicate the window and profile of
                // their RAW siblings; count each only once.
                if *domain == Domain::Raw {
                    *window_histogram.entry(window.length).or_default() += 1;
                    match profile.crf() {
                        Crf::Gamma(g) => gamma_exponents.push(*g),
                        Crf::SrgbPiecewise => srgb_profiles += 1,
                    }
                    let gains = profile.wb_gains();
                    wb_red.push(gains[0]);
                    wb_blue.push(gains[2]);
                    *cfa_counts
                        .entry(format!("{:?}", profile.cfa()))
                        .or_default() += 1;
                }
            }
            ManifestEntry::Failure { sequence, error } => {
                failures.push((sequence.clone(), error.clone()));
            }
        }
    }

    println!("manifest: {}", path.display());
    println!(
        "pairs: {} (raw {}, rgb {})  sequences: {}  failures: {}",
        raw_pairs + rgb_pairs,
        raw_pairs,
        rgb_pairs,
        sequences.len(),
        failures.len()
    );

    if !window_histogram.is_empty() {
        println!("window lengths:");
        for (length, count) in &window_histogram {
            println!("  M = {length:<4} x{count}");
        }
    }

    let profiles = gamma_exponents.len() + srgb_profiles;
    if profiles > 0 {
        println!(
            "response curves: gamma x{}, srgb x{}",
            gamma_exponents.len(),
            srgb_profiles
        );
        if !gamma_exponents.is_empty() {
            println!(
                "  gamma exponent: min {:.4}  mean {:.4}  max {:.4}",
                min(&gamma_exponents),
                mean(&gamma_exponents),
                max(&gamma_exponents)
            );
        }
        println!(
            "white balance:  red {:.4}..{:.4}  blue {:.4}..{:.4}",
            min(&wb_red),
            max(&wb_red),
            min(&wb_blue),
            max(&wb_blue)
        );
        let cfa: Vec<String> = cfa_counts
            .iter()
            .map(|(name, count)| format!("{name} x{count}"))
            .collect();
        println!("cfa patterns:   {}", cfa.join(", "));
    }

    for (sequence, error) in &failures {
        println!("failed: {sequence}: {error}");
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
