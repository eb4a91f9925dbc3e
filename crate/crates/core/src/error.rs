//! Error type shared by all modules of the crate.

use crate::frame::CfaPattern;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by frame constructors and pipeline operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("frame dimensions must be nonzero, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },

    #[error("frame dimensions must be even for Bayer tiling, got {width}x{height}")]
    OddDimensions { width: usize, height: usize },

    #[error("data length {actual} does not match expected {expected}")]
    DataLength { expected: usize, actual: usize },

    #[error("non-finite sample value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: {expected_width}x{expected_height} vs {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("CFA pattern mismatch: expected {expected:?}, got {actual:?}")]
    CfaMismatch {
        expected: CfaPattern,
        actual: CfaPattern,
    },

    #[error("white balance gains must be positive, got {gain}")]
    NonPositiveGain { gain: f64 },

    #[error("color matrix is numerically singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("invalid camera profile: {reason}")]
    InvalidProfile { reason: &'static str },

    #[error("profile sampling exhausted {retries} retries without a well-conditioned matrix")]
    ProfileSampling { retries: usize },

    #[error("invalid pyramid configuration: {reason}")]
    InvalidPyramidConfig { reason: &'static str },

    #[error("frame {width}x{height} too small for a {levels}-level pyramid")]
    FrameTooSmall {
        width: usize,
        height: usize,
        levels: usize,
    },

    #[error("warp fraction must lie in [0, 1], got {t}")]
    WarpFraction { t: f32 },

    #[error("upsampling factor must be a power of two >= 2, got {factor}")]
    UpsampleFactor { factor: usize },

    #[error("flow displacement at index {index} exceeds the {max} px bound")]
    FlowOutOfBounds { index: usize, max: f32 },

    #[error("sequence of length {length} is shorter than the required {minimum}")]
    SequenceTooShort { length: usize, minimum: usize },

    #[error("empty frame sequence")]
    EmptySequence,

    #[error("exposure window length must be an odd count >= 3, got {length}")]
    InvalidWindowLength { length: usize },

    #[error(
        "window [{start}, {start}+{length}) does not fit a sequence of {sequence_length} frames"
    )]
    WindowOutOfBounds {
        start: usize,
        length: usize,
        sequence_length: usize,
    },

    #[error("invalid window policy: {reason}")]
    InvalidPolicy { reason: &'static str },

    #[error("image {width}x{height} smaller than the {window}x{window} SSIM window")]
    TooSmallForSsim {
        width: usize,
        height: usize,
        window: usize,
    },
}
