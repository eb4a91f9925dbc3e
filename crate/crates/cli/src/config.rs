//! Declarative job configuration: a TOML file mirrored by CLI overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rawblur_core::blur::WindowPolicy;
use rawblur_core::isp::CameraProfile;
use serde::Deserialize;

/// Fully resolved synthesis job.
#[derive(Debug, Clone)]
pub struct JobConfig {
    /// Corpus root holding one subdirectory per frame sequence.
    pub input: PathBuf,
    /// Output root for images and the manifest.
    pub output: PathBuf,
    /// Master seed all per-sequence randomness derives from.
    pub seed: u64,
    /// Frame-rate multiplier applied before windowing; 1 skips
    /// interpolation entirely.
    pub factor: usize,
    /// Also emit the RGB-domain baseline pair for every window.
    pub baseline_rgb: bool,
    pub window: WindowPolicy,
    pub profile: ProfileMode,
}

/// Where each sequence's camera profile comes from.
#[derive(Debug, Clone)]
pub enum ProfileMode {
    /// Per-sequence random profile derived from the master seed.
    Random,
    /// One explicit profile for every sequence.
    Fixed(Box<CameraProfile>),
}

/// Flag-level overrides collected from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub factor: Option<usize>,
    pub baseline_rgb: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: PathBuf,
    output: Option<PathBuf>,
    seed: Option<u64>,
    interpolation_factor: Option<usize>,
    baseline_rgb: Option<bool>,
    window: Option<WindowSection>,
    profile: Option<ProfileSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowSection {
    m_min: Option<usize>,
    m_max: Option<usize>,
    stride: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSection {
    mode: Option<String>,
    fixed: Option<CameraProfile>,
}

impl JobConfig {
    /// Parses the TOML file and applies flag overrides.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let file: FileConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;

        let output = overrides
            .out
            .clone()
            .or(file.output)
            .context("no output directory: set `output` in the config or pass --out")?;

        let factor = overrides.factor.or(file.interpolation_factor).unwrap_or(8);
        if factor == 0 || !factor.is_power_of_two() {
            bail!("interpolation factor must be a power of two, got {factor}");
        }

        let defaults = WindowPolicy::default();
        let (m_min, m_max, stride) = match &file.window {
            Some(section) => {
                let m_min = section.m_min.unwrap_or(defaults.m_min());
                let m_max = section.m_max.unwrap_or(defaults.m_max());
                (m_min, m_max, section.stride.unwrap_or(m_max))
            }
            None => (defaults.m_min(), defaults.m_max(), defaults.stride()),
        };
        let window = WindowPolicy::new(m_min, m_max, stride)
            .map_err(|e| anyhow::anyhow!("bad [window] section: {e}"))?;

        let profile = match &file.profile {
            None => ProfileMode::Random,
            Some(section) => {
                let mode = section.mode.as_deref().unwrap_or("random");
                match mode {
                    "random" => ProfileMode::Random,
                    "fixed" => {
                        let profile = section
                            .fixed
                            .clone()
                            .context("[profile] mode is \"fixed\" but no [profile.fixed] table")?;
                        profile
                            .validate()
                            .map_err(|e| anyhow::anyhow!("bad [profile.fixed]: {e}"))?;
                        ProfileMode::Fixed(Box::new(profile))
                    }
                    other => bail!("unknown profile mode {other:?}; use \"random\" or \"fixed\""),
                }
            }
        };

        Ok(Self {
            input: file.input,
            output,
            seed: overrides.seed.or(file.seed).unwrap_or(0),
            factor,
            baseline_rgb: overrides.baseline_rgb || file.baseline_rgb.unwrap_or(false),
            window,
            profile,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("job.toml");
        let mut file = fs::File::create(&path).unwrap();
        file.write_all(text.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let (_dir, path) = write_config("input = \"corpus\"\noutput = \"out\"\n");
        let job = JobConfig::load(&path, &Overrides::default()).unwrap();
        assert_eq!(job.seed, 0);
        assert_eq!(job.factor, 8);
        assert!(!job.baseline_rgb);
        assert_eq!(job.window.m_min(), 17);
        assert_eq!(job.window.m_max(), 65);
        assert_eq!(job.window.stride(), 65);
        assert!(matches!(job.profile, ProfileMode::Random));
    }

    #[test]
    fn overrides_beat_file_values() {
        let (_dir, path) = write_config(
            "input = \"corpus\"\noutput = \"out\"\nseed = 5\ninterpolation_factor = 4\n",
        );
        let overrides = Overrides {
            seed: Some(9),
            factor: Some(2),
            baseline_rgb: true,
            out: Some(PathBuf::from("elsewhere")),
        };
        let job = JobConfig::load(&path, &overrides).unwrap();
        assert_eq!(job.seed, 9);
        assert_eq!(job.factor, 2);
        assert!(job.baseline_rgb);
        assert_eq!(job.output, PathBuf::from("elsewhere"));
    }

    #[test]
    fn stride_defaults_to_m_max() {
        let (_dir, path) =
            write_config("input = \"c\"\noutput = \"o\"\n[window]\nm_min = 5\nm_max = 9\n");
        let job = JobConfig::load(&path, &Overrides::default()).unwrap();
        assert_eq!(job.window.stride(), 9);
    }

    #[test]
    fn fixed_profile_is_parsed_and_validated() {
        let (_dir, path) = write_config(
            r#"
input = "c"
output = "o"
[profile]
mode = "fixed"
[profile.fixed]
wb_gains = [1.5, 1.0, 1.8]
ccm = [[0.9, 0.06, 0.04], [0.05, 0.9, 0.05], [0.02, 0.08, 0.9]]
crf = { Gamma = 2.2 }
cfa = "Rggb"
"#,
        );
        let job = JobConfig::load(&path, &Overrides::default()).unwrap();
        match job.profile {
            ProfileMode::Fixed(profile) => {
                assert_eq!(profile.wb_gains(), [1.5, 1.0, 1.8]);
            }
            ProfileMode::Random => panic!("expected fixed profile"),
        }
    }

    #[test]
    fn invalid_fixed_profile_is_rejected() {
        let (_dir, path) = write_config(
            r#"
input = "c"
output = "o"
[profile]
mode = "fixed"
[profile.fixed]
wb_gains = [9.0, 1.0, 1.0]
ccm = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
crf = "SrgbPiecewise"
cfa = "Rggb"
"#,
        );
        assert!(JobConfig::load(&path, &Overrides::default()).is_err());
    }

    #[test]
    fn bad_factor_is_rejected() {
        let (_dir, path) =
            write_config("input = \"c\"\noutput = \"o\"\ninterpolation_factor = 3\n");
        assert!(JobConfig::load(&path, &Overrides::default()).is_err());
    }

    #[test]
    fn even_window_bound_is_rejected() {
        let (_dir, path) = write_config("input = \"c\"\noutput = \"o\"\n[window]\nm_min = 4\n");
        assert!(JobConfig::load(&path, &Overrides::default()).is_err());
    }
}
