//! Parametric, invertible image signal processor.
//!
//! [`process`] turns a Bayer mosaic into a display-referred sRGB frame by
//! composing demosaic → white balance → color matrix → response curve;
//! [`unprocess`] runs the exact inverse composition so sRGB footage can be
//! taken back to plausible sensor data. A [`CameraProfile`] bundles the
//! parameters of one virtual device and [`sample_profile`] draws randomized
//! profiles to emulate device diversity.
//!
//! Every stage clips its output into `[0, 1]`: sensor and display signals
//! are physically bounded, so saturated values lose information here just
//! as they do in a real camera.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{CfaPattern, Channel, LinearRgbFrame, RawFrame, SrgbFrame};

/// Maximum Frobenius condition number accepted for a color matrix.
const MAX_CONDITION: f64 = 100.0;

/// Retry budget for [`sample_profile`] when a drawn matrix is rejected.
const SAMPLE_RETRIES: usize = 100;

const SRGB_LINEAR_KNEE: f64 = 0.003_130_8;
const SRGB_ENCODED_KNEE: f64 = 0.040_45;
const SRGB_LINEAR_SLOPE: f64 = 12.92;
const SRGB_SCALE: f64 = 1.055;
const SRGB_OFFSET: f64 = 0.055;
const SRGB_EXPONENT: f64 = 2.4;

/// Camera response function: the nonlinear map from scene-linear intensity
/// to encoded pixel value.
///
/// Both variants are strictly increasing bijections of `[0, 1]` that fix 0
/// and 1, so encode and decode are exact inverses up to floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Crf {
    /// Pure power curve: encode is `v^(1/exponent)`, decode is `v^exponent`.
    Gamma(f64),
    /// The standard sRGB curve: linear toe of slope 12.92 below the knee,
    /// `1.055 v^(1/2.4) - 0.055` above it.
    SrgbPiecewise,
}

impl Crf {
    /// Scene-linear to display-referred. Input is clipped to `[0, 1]`.
    pub fn encode(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        match *self {
            Crf::Gamma(exponent) => libm::pow(v, 1.0 / exponent),
            Crf::SrgbPiecewise => {
                if v <= SRGB_LINEAR_KNEE {
                    SRGB_LINEAR_SLOPE * v
                } else {
                    SRGB_SCALE * libm::pow(v, 1.0 / SRGB_EXPONENT) - SRGB_OFFSET
                }
            }
        }
    }

    /// Display-referred back to scene-linear; exact inverse of [`encode`].
    ///
    /// [`encode`]: Crf::encode
    pub fn decode(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        match *self {
            Crf::Gamma(exponent) => libm::pow(v, exponent),
            Crf::SrgbPiecewise => {
                if v <= SRGB_ENCODED_KNEE {
                    v / SRGB_LINEAR_SLOPE
                } else {
                    libm::pow((v + SRGB_OFFSET) / SRGB_SCALE, SRGB_EXPONENT)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Crf::Gamma(exponent) = *self {
            if !(exponent.is_finite() && exponent > 0.0) {
                return Err(Error::InvalidProfile {
                    reason: "gamma exponent must be a positive finite scalar",
                });
            }
        }
        Ok(())
    }
}

/// Parameters of one virtual camera: white-balance gains, a row-stochastic
/// color correction matrix, a response curve and the sensor's CFA layout.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CameraProfile {
    wb_gains: [f64; 3],
    ccm: [[f64; 3]; 3],
    crf: Crf,
    cfa: CfaPattern,
}

impl CameraProfile {
    /// Validates and builds a profile.
    ///
    /// Gains must lie in `[0.25, 4.0]` (green conventionally 1.0), each row
    /// of the color matrix must sum to 1 so the gray axis is preserved, and
    /// the matrix must be invertible with condition number below 100.
    pub fn new(wb_gains: [f64; 3], ccm: [[f64; 3]; 3], crf: Crf, cfa: CfaPattern) -> Result<Self> {
        let profile = Self {
            wb_gains,
            ccm,
            crf,
            cfa,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// The do-nothing device: unit gains, identity matrix, `Gamma(1.0)`.
    /// Under this profile the ISP is linear and commutes with averaging.
    pub fn identity(cfa: CfaPattern) -> Self {
        Self {
            wb_gains: [1.0; 3],
            ccm: IDENTITY,
            crf: Crf::Gamma(1.0),
            cfa,
        }
    }

    /// Re-checks every profile invariant; useful after deserializing.
    pub fn validate(&self) -> Result<()> {
        for &gain in &self.wb_gains {
            if !(gain.is_finite() && (0.25..=4.0).contains(&gain)) {
                return Err(Error::InvalidProfile {
                    reason: "white balance gains must lie in [0.25, 4.0]",
                });
            }
        }
        for row in &self.ccm {
            let sum: f64 = row.iter().sum();
            if !sum.is_finite() || (sum - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidProfile {
                    reason: "each color matrix row must sum to 1.0",
                });
            }
        }
        let inverse = invert3(&self.ccm)?;
        if frobenius_norm(&self.ccm) * frobenius_norm(&inverse) >= MAX_CONDITION {
            return Err(Error::InvalidProfile {
                reason: "color matrix condition number must stay below 100",
            });
        }
        self.crf.validate()
    }

    pub fn wb_gains(&self) -> [f64; 3] {
        self.wb_gains
    }

    pub fn ccm(&self) -> &[[f64; 3]; 3] {
        &self.ccm
    }

    pub fn crf(&self) -> &Crf {
        &self.crf
    }

    pub fn cfa(&self) -> CfaPattern {
        self.cfa
    }
}

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn frobenius_norm(m: &[[f64; 3]; 3]) -> f64 {
    let mut sum = 0.0;
    for row in m {
        for &v in row {
            sum += v * v;
        }
    }
    libm::sqrt(sum)
}

/// 3x3 inverse via the adjugate; rejects |det| < 1e-8.
fn invert3(m: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if libm::fabs(det) < 1e-8 {
        return Err(Error::SingularMatrix { det });
    }
    let inv_det = 1.0 / det;
    Ok([
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
        ],
    ])
}

/// Applies the response curve per sample: scene-linear in, display out.
pub fn encode_crf(frame: &LinearRgbFrame, crf: &Crf) -> SrgbFrame {
    let data: Vec<f32> = frame
        .data()
        .iter()
        .map(|&v| crf.encode(v as f64).clamp(0.0, 1.0) as f32)
        .collect();
    SrgbFrame::from_clipped(frame.width(), frame.height(), data)
}

/// Inverts the response curve per sample: display in, scene-linear out.
pub fn decode_crf(frame: &SrgbFrame, crf: &Crf) -> LinearRgbFrame {
    let data: Vec<f32> = frame
        .data()
        .iter()
        .map(|&v| crf.decode(v as f64).clamp(0.0, 1.0) as f32)
        .collect();
    LinearRgbFrame::from_clipped(frame.width(), frame.height(), data)
}

/// Channel-wise gain (or its inverse when `invert`), clipped to `[0, 1]`.
pub fn apply_white_balance(
    frame: &LinearRgbFrame,
    gains: [f64; 3],
    invert: bool,
) -> Result<LinearRgbFrame> {
    for &gain in &gains {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::NonPositiveGain { gain });
        }
    }
    let factors = if invert {
        [
            (1.0 / gains[0]) as f32,
            (1.0 / gains[1]) as f32,
            (1.0 / gains[2]) as f32,
        ]
    } else {
        [gains[0] as f32, gains[1] as f32, gains[2] as f32]
    };
    let data: Vec<f32> = frame
        .data()
        .chunks_exact(3)
        .flat_map(|px| {
            [
                (px[0] * factors[0]).clamp(0.0, 1.0),
                (px[1] * factors[1]).clamp(0.0, 1.0),
                (px[2] * factors[2]).clamp(0.0, 1.0),
            ]
        })
        .collect();
    Ok(LinearRgbFrame::from_clipped(
        frame.width(),
        frame.height(),
        data,
    ))
}

/// Per-pixel 3x3 color transform (or its inverse when `invert`), clipped
/// to `[0, 1]`. Rejects numerically singular matrices.
pub fn apply_color_matrix(
    frame: &LinearRgbFrame,
    ccm: &[[f64; 3]; 3],
    invert: bool,
) -> Result<LinearRgbFrame> {
    let inverse = invert3(ccm)?;
    let m = if invert { &inverse } else { ccm };
    let m: [[f32; 3]; 3] = [
        [m[0][0] as f32, m[0][1] as f32, m[0][2] as f32],
        [m[1][0] as f32, m[1][1] as f32, m[1][2] as f32],
        [m[2][0] as f32, m[2][1] as f32, m[2][2] as f32],
    ];
    let data: Vec<f32> = frame
        .data()
        .chunks_exact(3)
        .flat_map(|px| {
            [
                (m[0][0] * px[0] + m[0][1] * px[1] + m[0][2] * px[2]).clamp(0.0, 1.0),
                (m[1][0] * px[0] + m[1][1] * px[1] + m[1][2] * px[2]).clamp(0.0, 1.0),
                (m[2][0] * px[0] + m[2][1] * px[1] + m[2][2] * px[2]).clamp(0.0, 1.0),
            ]
        })
        .collect();
    Ok(LinearRgbFrame::from_clipped(
        frame.width(),
        frame.height(),
        data,
    ))
}

/// Drops a full RGB frame down to one sample per site per the CFA tile.
pub fn mosaic(frame: &LinearRgbFrame, cfa: CfaPattern) -> Result<RawFrame> {
    let (width, height) = (frame.width(), frame.height());
    if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::OddDimensions { width, height });
    }
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            data.push(frame.pixel(y, x)[cfa.channel_at(y, x).index()]);
        }
    }
    Ok(RawFrame::from_clipped(width, height, cfa, data))
}

// Bilinear gather weights over the 3x3 neighborhood, proportional to
// 2^-(|dy|+|dx|). Integer-valued so constant regions interpolate exactly:
// the weighted sum is an integer multiple of the constant and the final
// division restores it bit-for-bit.
const GATHER_WEIGHTS: [[f64; 3]; 3] = [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]];

/// Reconstructs the two missing channels at each site by bilinear
/// interpolation of the same-channel neighbors. Borders replicate edge
/// samples (clamped indexing); output is clipped to `[0, 1]`.
pub fn demosaic(raw: &RawFrame) -> LinearRgbFrame {
    let (width, height) = (raw.width(), raw.height());
    let cfa = raw.cfa();
    let mut data = Vec::with_capacity(3 * width * height);
    for y in 0..height {
        for x in 0..width {
            let site = cfa.channel_at(y, x);
            for channel in [Channel::Red, Channel::Green, Channel::Blue] {
                if channel == site {
                    data.push(raw.get(y, x));
                    continue;
                }
                // Weighted average over the neighbors that carry `channel`.
                // Clamped indices keep the gather inside the frame; the
                // channel test uses the clamped site so replicated borders
                // stay consistent with the CFA.
                let mut num = 0.0f64;
                let mut den = 0.0f64;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let ny = (y as i64 + dy).clamp(0, height as i64 - 1) as usize;
                        let nx = (x as i64 + dx).clamp(0, width as i64 - 1) as usize;
                        if cfa.channel_at(ny, nx) == channel {
                            let w = GATHER_WEIGHTS[(dy + 1) as usize][(dx + 1) as usize];
                            num += w * raw.get(ny, nx) as f64;
                            den += w;
                        }
                    }
                }
                debug_assert!(den > 0.0);
                data.push(((num / den) as f32).clamp(0.0, 1.0));
            }
        }
    }
    LinearRgbFrame::from_clipped(width, height, data)
}

/// The full forward ISP: demosaic, white balance, color matrix, response
/// curve. The mosaic's CFA must match the profile.
pub fn process(raw: &RawFrame, profile: &CameraProfile) -> Result<SrgbFrame> {
    if raw.cfa() != profile.cfa() {
        return Err(Error::CfaMismatch {
            expected: profile.cfa(),
            actual: raw.cfa(),
        });
    }
    let rgb = demosaic(raw);
    let rgb = apply_white_balance(&rgb, profile.wb_gains(), false)?;
    let rgb = apply_color_matrix(&rgb, profile.ccm(), false)?;
    Ok(encode_crf(&rgb, profile.crf()))
}

/// The full inverse ISP: decode the response curve, undo the color matrix
/// and white balance, then mosaic down to the profile's CFA.
pub fn unprocess(srgb: &SrgbFrame, profile: &CameraProfile) -> Result<RawFrame> {
    let rgb = decode_crf(srgb, profile.crf());
    let rgb = apply_color_matrix(&rgb, profile.ccm(), true)?;
    let rgb = apply_white_balance(&rgb, profile.wb_gains(), true)?;
    mosaic(&rgb, profile.cfa())
}

/// Draws a randomized but valid profile, deterministically in the seed.
///
/// Red/blue gains are uniform in `[0.7, 2.2]` with green fixed at 1.0; the
/// color matrix is the identity plus uniform perturbations in `[-0.15,
/// 0.15]` with rows renormalized to sum 1; the response curve is a gamma
/// with exponent uniform in `[1.8, 2.6]` or the sRGB piecewise curve with
/// equal probability. The CFA is RGGB.
pub fn sample_profile(rng_seed: u64) -> Result<CameraProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let wb_gains = [
        rng.random_range(0.7..=2.2),
        1.0,
        rng.random_range(0.7..=2.2),
    ];

    let mut ccm = None;
    for _ in 0..SAMPLE_RETRIES {
        let mut candidate = IDENTITY;
        for row in candidate.iter_mut() {
            for v in row.iter_mut() {
                *v += rng.random_range(-0.15..=0.15);
            }
            let sum: f64 = row.iter().sum();
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        let well_conditioned = invert3(&candidate)
            .map(|inverse| frobenius_norm(&candidate) * frobenius_norm(&inverse) < MAX_CONDITION)
            .unwrap_or(false);
        if well_conditioned {
            ccm = Some(candidate);
            break;
        }
    }
    let ccm = ccm.ok_or(Error::ProfileSampling {
        retries: SAMPLE_RETRIES,
    })?;

    let crf = if rng.random_bool(0.5) {
        Crf::Gamma(rng.random_range(1.8..=2.6))
    } else {
        Crf::SrgbPiecewise
    };

    CameraProfile::new(wb_gains, ccm, crf, CfaPattern::Rggb)
}
