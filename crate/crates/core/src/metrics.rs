//! PSNR and single-scale SSIM over display-referred frames.
//!
//! Both metrics take values in `[0, 1]` (so PSNR's peak is 1.0) and
//! average over the three channels. SSIM uses the standard 11x11 Gaussian
//! window with sigma 1.5, K1 = 0.01, K2 = 0.03; the window is applied with
//! full support only, which crops a 5-pixel border from the similarity map
//! and avoids boundary bias.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::SrgbFrame;

const SSIM_WINDOW: usize = 11;
const SSIM_RADIUS: usize = SSIM_WINDOW / 2;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Pairwise quality scores for one image pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    /// Peak signal-to-noise ratio in dB; infinite for identical images.
    pub psnr_db: f64,
    /// Mean structural similarity in `[-1, 1]`.
    pub ssim: f64,
    /// Number of pixels compared.
    pub pixel_count: usize,
}

fn check_dims(reference: &SrgbFrame, test: &SrgbFrame) -> Result<()> {
    if reference.width() != test.width() || reference.height() != test.height() {
        return Err(Error::DimensionMismatch {
            expected_width: reference.width(),
            expected_height: reference.height(),
            width: test.width(),
            height: test.height(),
        });
    }
    Ok(())
}

/// Peak signal-to-noise ratio, `10 * log10(1 / MSE)`, with the mean taken
/// over all pixels and channels. Identical images report `f64::INFINITY`.
pub fn psnr(reference: &SrgbFrame, test: &SrgbFrame) -> Result<f64> {
    check_dims(reference, test)?;
    let mut se = 0.0f64;
    for (&a, &b) in reference.data().iter().zip(test.data()) {
        let d = a as f64 - b as f64;
        se += d * d;
    }
    let mse = se / reference.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * libm::log10(mse))
}

/// Normalized 1-D Gaussian taps for the SSIM window.
fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut kernel = [0.0; SSIM_WINDOW];
    let mut sum = 0.0;
    for (i, tap) in kernel.iter_mut().enumerate() {
        let d = i as f64 - SSIM_RADIUS as f64;
        *tap = libm::exp(-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
        sum += *tap;
    }
    for tap in kernel.iter_mut() {
        *tap /= sum;
    }
    kernel
}

/// Separable valid-support Gaussian filter: output is (w-10) x (h-10).
fn windowed(plane: &[f64], w: usize, h: usize, kernel: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let vw = w - 2 * SSIM_RADIUS;
    let vh = h - 2 * SSIM_RADIUS;
    // Horizontal pass over every row, valid columns only.
    let mut horizontal = vec![0.0f64; vw * h];
    for y in 0..h {
        for x in 0..vw {
            let mut acc = 0.0;
            for (k, &tap) in kernel.iter().enumerate() {
                acc += tap * plane[y * w + x + k];
            }
            horizontal[y * vw + x] = acc;
        }
    }
    // Vertical pass over valid rows.
    let mut out = vec![0.0f64; vw * vh];
    for y in 0..vh {
        for x in 0..vw {
            let mut acc = 0.0;
            for (k, &tap) in kernel.iter().enumerate() {
                acc += tap * horizontal[(y + k) * vw + x];
            }
            out[y * vw + x] = acc;
        }
    }
    out
}

/// Single-scale structural similarity, computed per channel and averaged.
/// Frames must be at least 11 pixels in each dimension.
pub fn ssim(reference: &SrgbFrame, test: &SrgbFrame) -> Result<f64> {
    check_dims(reference, test)?;
    let (w, h) = (reference.width(), reference.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmallForSsim {
            width: w,
            height: h,
            window: SSIM_WINDOW,
        });
    }
    let kernel = gaussian_kernel();
    let c1 = K1 * K1;
    let c2 = K2 * K2;

    let mut channel_means = 0.0f64;
    for c in 0..3 {
        let x: Vec<f64> = reference.data()[c..]
            .iter()
            .step_by(3)
            .map(|&v| v as f64)
            .collect();
        let y: Vec<f64> = test.data()[c..]
            .iter()
            .step_by(3)
            .map(|&v| v as f64)
            .collect();
        let xx: Vec<f64> = x.iter().map(|&v| v * v).collect();
        let yy: Vec<f64> = y.iter().map(|&v| v * v).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| a * b).collect();

        let mu_x = windowed(&x, w, h, &kernel);
        let mu_y = windowed(&y, w, h, &kernel);
        let e_xx = windowed(&xx, w, h, &kernel);
        let e_yy = windowed(&yy, w, h, &kernel);
        let e_xy = windowed(&xy, w, h, &kernel);

        let mut sum = 0.0f64;
        for i in 0..mu_x.len() {
            let mx = mu_x[i];
            let my = mu_y[i];
            let sigma_x2 = e_xx[i] - mx * mx;
            let sigma_y2 = e_yy[i] - my * my;
            let sigma_xy = e_xy[i] - mx * my;
            sum += ((2.0 * mx * my + c1) * (2.0 * sigma_xy + c2))
                / ((mx * mx + my * my + c1) * (sigma_x2 + sigma_y2 + c2));
        }
        channel_means += sum / mu_x.len() as f64;
    }
    Ok(channel_means / 3.0)
}

/// Both metrics at once.
pub fn report(reference: &SrgbFrame, test: &SrgbFrame) -> Result<MetricReport> {
    Ok(MetricReport {
        psnr_db: psnr(reference, test)?,
        ssim: ssim(reference, test)?,
        pixel_count: reference.width() * reference.height(),
    })
}
