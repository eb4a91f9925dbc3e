//! Camera-imaging simulation for synthesizing realistic motion-blurred /
//! sharp image pairs.
//!
//! Real motion blur is an average of sensor signal over the exposure time,
//! i.e. it happens in the linear RAW domain, *before* the camera's ISP
//! applies white balance, demosaicing, color correction, and the nonlinear
//! response curve. Averaging already-encoded RGB frames therefore produces
//! blur that no real camera would capture. This crate models the whole
//! chain so blur can be synthesized where it physically occurs:
//!
//! * [`isp`] — a parametric, invertible image signal processor: sRGB frames
//!   can be unprocessed back to Bayer mosaics and reprocessed under a
//!   randomizable [`CameraProfile`].
//! * [`interp`] — pyramidal Lucas–Kanade flow estimation and midpoint frame
//!   interpolation, used to raise the frame rate before averaging so long
//!   exposure windows do not alias.
//! * [`blur`] — exposure-window sampling and RAW-domain accumulation, plus
//!   the naive RGB-domain baseline for comparison.
//! * [`metrics`] — PSNR and single-scale SSIM for scoring generated pairs.
//!
//! All operations are pure functions over immutable frame values and are
//! safe to call concurrently. The crate is `no_std` (with `alloc`); file
//! formats and batch orchestration live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blur;
pub mod error;
pub mod frame;
pub mod interp;
pub mod isp;
pub mod metrics;

pub use blur::{ExposureWindow, WindowPolicy};
pub use error::{Error, Result};
pub use frame::{CfaPattern, Channel, LinearRgbFrame, RawFrame, SrgbFrame};
pub use interp::{FlowField, PyramidConfig};
pub use isp::{CameraProfile, Crf};
pub use metrics::MetricReport;
