//! Shared generators and process helpers for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rawblur_core::frame::SrgbFrame;

/// Band-limited noise texture: uniform noise softened by box passes.
pub fn noise_canvas(w: usize, h: usize, seed: u64, passes: usize) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tex: Vec<f32> = (0..w * h).map(|_| rng.random_range(0.1..0.9)).collect();
    for _ in 0..passes {
        let src = tex.clone();
        for y in 0..h {
            for x in 0..w {
                let mut sum = 0.0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let ny = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                        let nx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                        sum += src[ny * w + nx];
                    }
                }
                tex[y * w + x] = sum / 9.0;
            }
        }
    }
    tex
}

/// Gray frame cut from a canvas at horizontal offset `x0`.
pub fn crop_gray(canvas: &[f32], canvas_w: usize, w: usize, h: usize, x0: usize) -> SrgbFrame {
    let mut data = Vec::with_capacity(3 * w * h);
    for y in 0..h {
        for x in 0..w {
            let v = canvas[y * canvas_w + x + x0];
            data.extend_from_slice(&[v, v, v]);
        }
    }
    SrgbFrame::new(w, h, data).unwrap()
}

/// Gray ramp along the given direction, spanning `lo..hi`.
pub fn ramp_frame(w: usize, h: usize, horizontal: bool, lo: f32, hi: f32) -> SrgbFrame {
    let mut data = Vec::with_capacity(3 * w * h);
    for y in 0..h {
        for x in 0..w {
            let t = if horizontal {
                x as f32 / (w - 1) as f32
            } else {
                y as f32 / (h - 1) as f32
            };
            let v = lo + (hi - lo) * t;
            data.extend_from_slice(&[v, v, v]);
        }
    }
    SrgbFrame::new(w, h, data).unwrap()
}

/// Diagonal gray ramp.
pub fn diagonal_ramp_frame(w: usize, h: usize, lo: f32, hi: f32) -> SrgbFrame {
    let mut data = Vec::with_capacity(3 * w * h);
    for y in 0..h {
        for x in 0..w {
            let t = (x + y) as f32 / (w + h - 2) as f32;
            let v = lo + (hi - lo) * t;
            data.extend_from_slice(&[v, v, v]);
        }
    }
    SrgbFrame::new(w, h, data).unwrap()
}

/// Gaussian blob on a dark floor, optionally with a mild per-channel tint.
pub fn blob_frame(
    w: usize,
    h: usize,
    cx: f32,
    cy: f32,
    sigma: f32,
    amplitude: f32,
    tint: [f32; 3],
) -> SrgbFrame {
    let mut data = Vec::with_capacity(3 * w * h);
    for y in 0..h {
        for x in 0..w {
            let dx = x as f32 - cx;
            let dy = y as f32 - cy;
            let g = amplitude * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            for &t in &tint {
                data.push((0.03 + g * t).clamp(0.0, 1.0));
            }
        }
    }
    SrgbFrame::new(w, h, data).unwrap()
}

/// Writes a frame as an 8-bit PNG (corpus input side).
pub fn save_png8(path: &Path, frame: &SrgbFrame) {
    let data: Vec<u8> = frame
        .data()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    let buf = image::ImageBuffer::<image::Rgb<u8>, Vec<u8>>::from_raw(
        frame.width() as u32,
        frame.height() as u32,
        data,
    )
    .unwrap();
    buf.save(path).unwrap();
}

/// Writes one sequence directory of a sliding-texture scene.
pub fn write_moving_sequence(dir: &Path, w: usize, h: usize, frames: usize, seed: u64) {
    fs::create_dir_all(dir).unwrap();
    let canvas_w = w + frames;
    let canvas = noise_canvas(canvas_w, h, seed, 2);
    for i in 0..frames {
        let frame = crop_gray(&canvas, canvas_w, w, h, i);
        save_png8(&dir.join(format!("{i:05}.png")), &frame);
    }
}

/// Runs the `rawblur` binary with the given arguments.
pub fn rawblur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rawblur"))
        .args(args)
        .output()
        .expect("failed to launch rawblur")
}

/// All files under `root` keyed by relative path, with contents.
pub fn dir_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.unwrap();
        if entry.file_type().is_file() {
            let rel = entry
                .path()
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .replace('\\', "/");
            files.insert(rel, fs::read(entry.path()).unwrap());
        }
    }
    files
}
