//! Frame-sequence discovery and validation.
//!
//! Every first-level subdirectory of the corpus root is one sequence; the
//! PNG files inside are its frames, ordered lexicographically by file
//! name. Headers are decoded up front so dimension mismatches and broken
//! files surface before any synthesis work starts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// One discovered frame sequence.
#[derive(Debug, Clone)]
pub struct SequenceSource {
    /// Subdirectory name, used as the sequence id everywhere downstream.
    pub id: String,
    /// Frame files in lexicographic order.
    pub frames: Vec<PathBuf>,
    pub width: u32,
    pub height: u32,
    /// Declared capture rate from an optional `fps.txt`; informational.
    pub frame_rate: Option<f64>,
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Scans `root` and returns one source per subdirectory, sorted by id.
/// An empty root yields an empty list; a sequence with no frames, an
/// undecodable file, or mixed dimensions is an error naming the offender.
pub fn ingest(root: &Path) -> Result<Vec<SequenceSource>> {
    if !root.is_dir() {
        bail!("input root {} is not a directory", root.display());
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .with_context(|| format!("cannot read {}", root.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    let mut sources = Vec::with_capacity(dirs.len());
    for dir in dirs {
        let id = dir
            .file_name()
            .and_then(|n| n.to_str())
            .map(str::to_owned)
            .with_context(|| format!("sequence directory {} has no UTF-8 name", dir.display()))?;

        let mut frames: Vec<PathBuf> = fs::read_dir(&dir)
            .with_context(|| format!("cannot read {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && is_png(p))
            .collect();
        frames.sort_by_key(|p| p.file_name().map(|n| n.to_owned()));
        if frames.is_empty() {
            bail!("sequence {} contains no PNG frames", dir.display());
        }

        let mut dims: Option<(u32, u32)> = None;
        for frame in &frames {
            let (w, h) = image::image_dimensions(frame)
                .with_context(|| format!("cannot decode {}", frame.display()))?;
            match dims {
                None => dims = Some((w, h)),
                Some((ew, eh)) if (w, h) != (ew, eh) => {
                    bail!(
                        "{} is {w}x{h} but the sequence started at {ew}x{eh}",
                        frame.display()
                    );
                }
                Some(_) => {}
            }
        }
        let (width, height) = dims.expect("at least one frame");

        let frame_rate = fs::read_to_string(dir.join("fps.txt"))
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok());

        sources.push(SequenceSource {
            id,
            frames,
            width,
            height,
            frame_rate,
        });
    }
    Ok(sources)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_png(path: &Path, w: u32, h: u32) {
        let buf =
            image::ImageBuffer::<image::Rgb<u8>, Vec<u8>>::from_pixel(w, h, image::Rgb([64; 3]));
        buf.save(path).unwrap();
    }

    #[test]
    fn two_subdirectories_become_two_sequences() {
        let root = tempfile::tempdir().unwrap();
        for seq in ["a", "b"] {
            let dir = root.path().join(seq);
            fs::create_dir(&dir).unwrap();
            for i in 0..63 {
                write_png(&dir.join(format!("{i:04}.png")), 8, 6);
            }
        }
        let sources = ingest(root.path()).unwrap();
        assert_eq!(sources.len(), 2);
        assert_eq!(sources[0].id, "a");
        assert_eq!(sources[0].frames.len(), 63);
        assert_eq!(sources[1].frames.len(), 63);
        assert_eq!((sources[0].width, sources[0].height), (8, 6));
    }

    #[test]
    fn frames_are_ordered_lexicographically() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("seq");
        fs::create_dir(&dir).unwrap();
        for name in ["c.png", "a.png", "b.png"] {
            write_png(&dir.join(name), 4, 4);
        }
        let sources = ingest(root.path()).unwrap();
        let names: Vec<_> = sources[0]
            .frames
            .iter()
            .map(|p| p.file_name().unwrap().to_str().unwrap().to_owned())
            .collect();
        assert_eq!(names, ["a.png", "b.png", "c.png"]);
    }

    #[test]
    fn unreadable_frame_is_an_error_naming_the_file() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("seq");
        fs::create_dir(&dir).unwrap();
        write_png(&dir.join("0.png"), 4, 4);
        fs::write(dir.join("1.png"), b"garbage").unwrap();
        let err = ingest(root.path()).unwrap_err();
        assert!(format!("{err:#}").contains("1.png"), "{err:#}");
    }

    #[test]
    fn mixed_dimensions_are_an_error_naming_the_file() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("seq");
        fs::create_dir(&dir).unwrap();
        write_png(&dir.join("0.png"), 4, 4);
        write_png(&dir.join("1.png"), 6, 4);
        let err = ingest(root.path()).unwrap_err();
        assert!(format!("{err:#}").contains("1.png"), "{err:#}");
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let root = tempfile::tempdir().unwrap();
        fs::create_dir(root.path().join("empty")).unwrap();
        assert!(ingest(root.path()).is_err());
    }

    #[test]
    fn empty_root_is_ok() {
        let root = tempfile::tempdir().unwrap();
        assert!(ingest(root.path()).unwrap().is_empty());
    }

    #[test]
    fn optional_fps_file_is_parsed() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("seq");
        fs::create_dir(&dir).unwrap();
        write_png(&dir.join("0.png"), 4, 4);
        fs::write(dir.join("fps.txt"), "240\n").unwrap();
        let sources = ingest(root.path()).unwrap();
        assert_eq!(sources[0].frame_rate, Some(240.0));
    }
}
