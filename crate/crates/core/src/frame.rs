//! Image containers: Bayer mosaics and three-channel RGB frames.
//!
//! All pixel data is `f32` in `[0, 1]`. Constructors reject non-finite
//! samples and clip everything else into range, so a frame value always
//! satisfies its invariants once built. RGB data is interleaved RGB.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One of the three sensor color channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    /// Index of the channel inside an interleaved RGB pixel.
    pub fn index(self) -> usize {
        match self {
            Channel::Red => 0,
            Channel::Green => 1,
            Channel::Blue => 2,
        }
    }
}

/// The 2x2 Bayer tile layout of a color filter array.
///
/// The variant name spells the tile row-major: `Rggb` means the even/even
/// site is red, even/odd and odd/even are green, odd/odd is blue. Every
/// tile carries two green, one red and one blue site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CfaPattern {
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl CfaPattern {
    /// Channel recorded at pixel `(y, x)`.
    pub fn channel_at(self, y: usize, x: usize) -> Channel {
        use Channel::{Blue, Green, Red};
        match (self, y & 1, x & 1) {
            (CfaPattern::Rggb, 0, 0) => Red,
            (CfaPattern::Rggb, 1, 1) => Blue,
            (CfaPattern::Rggb, _, _) => Green,
            (CfaPattern::Bggr, 0, 0) => Blue,
            (CfaPattern::Bggr, 1, 1) => Red,
            (CfaPattern::Bggr, _, _) => Green,
            (CfaPattern::Grbg, 0, 1) => Red,
            (CfaPattern::Grbg, 1, 0) => Blue,
            (CfaPattern::Grbg, _, _) => Green,
            (CfaPattern::Gbrg, 0, 1) => Blue,
            (CfaPattern::Gbrg, 1, 0) => Red,
            (CfaPattern::Gbrg, _, _) => Green,
        }
    }

    /// All four patterns, handy for sweeps in tests.
    pub fn all() -> [CfaPattern; 4] {
        [
            CfaPattern::Rggb,
            CfaPattern::Bggr,
            CfaPattern::Grbg,
            CfaPattern::Gbrg,
        ]
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyDimensions { width, height });
    }
    Ok(())
}

fn check_even(width: usize, height: usize) -> Result<()> {
    if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::OddDimensions { width, height });
    }
    Ok(())
}

/// Rejects NaN/infinite samples, clips the rest into `[0, 1]`.
fn sanitize(data: &mut [f32]) -> Result<()> {
    for (index, v) in data.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

/// A single-channel Bayer mosaic: one sensor sample per pixel, laid out
/// row-major, with the channel of each site given by the CFA pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFrame {
    width: usize,
    height: usize,
    cfa: CfaPattern,
    data: Vec<f32>,
}

impl RawFrame {
    /// Builds a mosaic from row-major samples. Dimensions must be even so
    /// the frame holds complete Bayer tiles; samples are clipped to `[0, 1]`.
    pub fn new(width: usize, height: usize, cfa: CfaPattern, mut data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        check_even(width, height)?;
        if data.len() != width * height {
            return Err(Error::DataLength {
                expected: width * height,
                actual: data.len(),
            });
        }
        sanitize(&mut data)?;
        Ok(Self {
            width,
            height,
            cfa,
            data,
        })
    }

    /// Mosaic with the same value at every site.
    pub fn constant(width: usize, height: usize, cfa: CfaPattern, value: f32) -> Result<Self> {
        Self::new(width, height, cfa, vec![value; width * height])
    }

    /// Invariants upheld by the caller: even nonzero dims, clipped data.
    pub(crate) fn from_clipped(
        width: usize,
        height: usize,
        cfa: CfaPattern,
        data: Vec<f32>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            cfa,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cfa(&self) -> CfaPattern {
        self.cfa
    }

    /// Row-major sample plane.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Sample at `(y, x)`.
    pub fn get(&self, y: usize, x: usize) -> f32 {
        self.data[y * self.width + x]
    }

    /// Channel recorded at `(y, x)` under this frame's CFA.
    pub fn channel_at(&self, y: usize, x: usize) -> Channel {
        self.cfa.channel_at(y, x)
    }
}

macro_rules! rgb_frame {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            width: usize,
            height: usize,
            data: Vec<f32>,
        }

        impl $name {
            /// Builds a frame from interleaved row-major RGB samples;
            /// samples are clipped to `[0, 1]`.
            pub fn new(width: usize, height: usize, mut data: Vec<f32>) -> Result<Self> {
                check_dims(width, height)?;
                if data.len() != 3 * width * height {
                    return Err(Error::DataLength {
                        expected: 3 * width * height,
                        actual: data.len(),
                    });
                }
                sanitize(&mut data)?;
                Ok(Self { width, height, data })
            }

            /// Frame filled with a single RGB color.
            pub fn constant(width: usize, height: usize, rgb: [f32; 3]) -> Result<Self> {
                let mut data = Vec::with_capacity(3 * width * height);
                for _ in 0..width * height {
                    data.extend_from_slice(&rgb);
                }
                Self::new(width, height, data)
            }

            /// Invariants upheld by the caller: nonzero dims, clipped data.
            pub(crate) fn from_clipped(width: usize, height: usize, data: Vec<f32>) -> Self {
                debug_assert_eq!(data.len(), 3 * width * height);
                Self { width, height, data }
            }

            pub fn width(&self) -> usize {
                self.width
            }

            pub fn height(&self) -> usize {
                self.height
            }

            /// Interleaved row-major RGB samples.
            pub fn data(&self) -> &[f32] {
                &self.data
            }

            /// RGB triple at `(y, x)`.
            pub fn pixel(&self, y: usize, x: usize) -> [f32; 3] {
                let i = 3 * (y * self.width + x);
                [self.data[i], self.data[i + 1], self.data[i + 2]]
            }
        }
    };
}

rgb_frame!(
    /// Scene-linear three-channel frame: radiometry proportional to light,
    /// the domain in which the sensor accumulates signal.
    LinearRgbFrame
);

rgb_frame!(
    /// Display-referred three-channel frame, i.e. after the camera response
    /// function has been applied.
    SrgbFrame
);
