//! Exposure-window sampling and blur accumulation.
//!
//! A blurry frame is the per-site mean of M consecutive RAW frames; the
//! sharp ground truth is the window's center frame pushed through the same
//! ISP round trip. [`synthesize_pair_rgb`] provides the naive baseline
//! that averages encoded sRGB frames directly, so the two synthesis
//! domains can be compared on identical content.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{RawFrame, SrgbFrame};
use crate::isp::{process, unprocess, CameraProfile};

/// A run of M consecutive frames with its center frame singled out as the
/// sharp ground truth. M is odd so the center is the unique median.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExposureWindow {
    start: usize,
    length: usize,
}

impl ExposureWindow {
    /// `length` must be odd and at least 3.
    pub fn new(start: usize, length: usize) -> Result<Self> {
        if length < 3 || length.is_multiple_of(2) {
            return Err(Error::InvalidWindowLength { length });
        }
        Ok(Self { start, length })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// The window length M.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Index of the sharp ground-truth frame: the window median.
    pub fn center(&self) -> usize {
        self.start + (self.length - 1) / 2
    }

    /// Whether the window lies inside a sequence of `sequence_length`.
    pub fn fits(&self, sequence_length: usize) -> bool {
        self.start
            .checked_add(self.length)
            .is_some_and(|end| end <= sequence_length)
    }
}

/// Law for drawing exposure windows along a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPolicy {
    m_min: usize,
    m_max: usize,
    stride: usize,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            m_min: 17,
            m_max: 65,
            stride: 65,
        }
    }
}

impl WindowPolicy {
    /// Bounds must be odd with `3 <= m_min <= m_max`; `stride >= 1`.
    pub fn new(m_min: usize, m_max: usize, stride: usize) -> Result<Self> {
        if m_min < 3 || m_min.is_multiple_of(2) || m_max.is_multiple_of(2) {
            return Err(Error::InvalidPolicy {
                reason: "window bounds must be odd counts >= 3",
            });
        }
        if m_min > m_max {
            return Err(Error::InvalidPolicy {
                reason: "m_min must not exceed m_max",
            });
        }
        if stride == 0 {
            return Err(Error::InvalidPolicy {
                reason: "stride must be >= 1",
            });
        }
        Ok(Self {
            m_min,
            m_max,
            stride,
        })
    }

    pub fn m_min(&self) -> usize {
        self.m_min
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn stride(&self) -> usize {
        self.stride
    }
}

/// Per-site arithmetic mean of the given mosaics. All frames must share
/// dimensions and CFA. Accumulation runs in f64.
pub fn average_raw(frames: &[RawFrame]) -> Result<RawFrame> {
    let first = frames.first().ok_or(Error::EmptySequence)?;
    for frame in &frames[1..] {
        if frame.width() != first.width() || frame.height() != first.height() {
            return Err(Error::DimensionMismatch {
                expected_width: first.width(),
                expected_height: first.height(),
                width: frame.width(),
                height: frame.height(),
            });
        }
        if frame.cfa() != first.cfa() {
            return Err(Error::CfaMismatch {
                expected: first.cfa(),
                actual: frame.cfa(),
            });
        }
    }
    if frames.len() == 1 {
        return Ok(first.clone());
    }
    let scale = 1.0 / frames.len() as f64;
    let mut acc = alloc::vec![0.0f64; first.data().len()];
    for frame in frames {
        for (a, &v) in acc.iter_mut().zip(frame.data()) {
            *a += v as f64;
        }
    }
    let data: Vec<f32> = acc.iter().map(|&a| (a * scale) as f32).collect();
    Ok(RawFrame::from_clipped(
        first.width(),
        first.height(),
        first.cfa(),
        data,
    ))
}

/// Walks a sequence with the policy's stride, drawing each window's length
/// uniformly from the odd values in `[m_min, m_max]`. The walk stops as
/// soon as a drawn window no longer fits. Deterministic in the seed.
pub fn sample_window(
    policy: &WindowPolicy,
    sequence_length: usize,
    rng_seed: u64,
) -> Result<Vec<ExposureWindow>> {
    if sequence_length < policy.m_min {
        return Err(Error::SequenceTooShort {
            length: sequence_length,
            minimum: policy.m_min,
        });
    }
    let odd_values = (policy.m_max - policy.m_min) / 2 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut windows = Vec::new();
    let mut start = 0usize;
    loop {
        let length = policy.m_min + 2 * rng.random_range(0..odd_values);
        let window = ExposureWindow::new(start, length)?;
        if !window.fits(sequence_length) {
            break;
        }
        windows.push(window);
        start += policy.stride;
    }
    Ok(windows)
}

fn check_window(frames: &[SrgbFrame], window: &ExposureWindow) -> Result<()> {
    if !window.fits(frames.len()) {
        return Err(Error::WindowOutOfBounds {
            start: window.start(),
            length: window.length(),
            sequence_length: frames.len(),
        });
    }
    let first = &frames[window.start()];
    for frame in &frames[window.start()..window.start() + window.length()] {
        if frame.width() != first.width() || frame.height() != first.height() {
            return Err(Error::DimensionMismatch {
                expected_width: first.width(),
                expected_height: first.height(),
                width: frame.width(),
                height: frame.height(),
            });
        }
    }
    Ok(())
}

/// RAW-domain pair synthesis: every windowed frame is unprocessed to a
/// mosaic, the mosaics are averaged, and the mean is processed back to
/// sRGB. The sharp ground truth is the center frame run through the same
/// unprocess/process round trip so both outputs share the ISP's signature.
pub fn synthesize_pair_raw(
    frames: &[SrgbFrame],
    window: &ExposureWindow,
    profile: &CameraProfile,
) -> Result<(SrgbFrame, SrgbFrame)> {
    check_window(frames, window)?;
    let raws: Vec<RawFrame> = frames[window.start()..window.start() + window.length()]
        .iter()
        .map(|frame| unprocess(frame, profile))
        .collect::<Result<_>>()?;
    let blurry = process(&average_raw(&raws)?, profile)?;
    let sharp = process(&raws[window.center() - window.start()], profile)?;
    Ok((blurry, sharp))
}

/// RGB-domain baseline: the blurry frame is the per-pixel mean of the
/// windowed sRGB frames and the sharp frame is the center frame untouched.
pub fn synthesize_pair_rgb(
    frames: &[SrgbFrame],
    window: &ExposureWindow,
) -> Result<(SrgbFrame, SrgbFrame)> {
    check_window(frames, window)?;
    let members = &frames[window.start()..window.start() + window.length()];
    let first = &members[0];
    let scale = 1.0 / members.len() as f64;
    let mut acc = alloc::vec![0.0f64; first.data().len()];
    for frame in members {
        for (a, &v) in acc.iter_mut().zip(frame.data()) {
            *a += v as f64;
        }
    }
    let data: Vec<f32> = acc.iter().map(|&a| (a * scale) as f32).collect();
    let blurry = SrgbFrame::from_clipped(first.width(), first.height(), data);
    let sharp = frames[window.center()].clone();
    Ok((blurry, sharp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::CfaPattern;
    use crate::isp::Crf;
    use alloc::vec;

    #[test]
    fn window_center_is_median() {
        let window = ExposureWindow::new(0, 63).unwrap();
        assert_eq!(window.center(), 31);
        let window = ExposureWindow::new(10, 5).unwrap();
        assert_eq!(window.center(), 12);
    }

    #[test]
    fn window_rejects_even_or_short_lengths() {
        assert!(ExposureWindow::new(0, 4).is_err());
        assert!(ExposureWindow::new(0, 1).is_err());
        assert!(ExposureWindow::new(0, 0).is_err());
        assert!(ExposureWindow::new(0, 3).is_ok());
    }

    #[test]
    fn policy_validation() {
        assert!(WindowPolicy::new(17, 65, 65).is_ok());
        assert!(WindowPolicy::new(16, 65, 65).is_err());
        assert!(WindowPolicy::new(17, 64, 65).is_err());
        assert!(WindowPolicy::new(65, 17, 1).is_err());
        assert!(WindowPolicy::new(17, 65, 0).is_err());
        assert!(WindowPolicy::new(1, 65, 1).is_err());
    }

    #[test]
    fn average_of_constant_planes() {
        let frames = vec![
            RawFrame::constant(4, 4, CfaPattern::Rggb, 0.2).unwrap(),
            RawFrame::constant(4, 4, CfaPattern::Rggb, 0.4).unwrap(),
            RawFrame::constant(4, 4, CfaPattern::Rggb, 0.6).unwrap(),
        ];
        let mean = average_raw(&frames).unwrap();
        for &v in mean.data() {
            assert!((v - 0.4).abs() < 1e-7);
        }
    }

    #[test]
    fn average_of_single_frame_is_identity() {
        let frame = RawFrame::new(2, 2, CfaPattern::Rggb, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mean = average_raw(core::slice::from_ref(&frame)).unwrap();
        assert_eq!(mean, frame);
    }

    #[test]
    fn average_rejects_mismatches() {
        assert!(matches!(average_raw(&[]), Err(Error::EmptySequence)));
        let a = RawFrame::constant(4, 4, CfaPattern::Rggb, 0.5).unwrap();
        let b = RawFrame::constant(4, 6, CfaPattern::Rggb, 0.5).unwrap();
        assert!(matches!(
            average_raw(&[a.clone(), b]),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = RawFrame::constant(4, 4, CfaPattern::Bggr, 0.5).unwrap();
        assert!(matches!(
            average_raw(&[a, c]),
            Err(Error::CfaMismatch { .. })
        ));
    }

    #[test]
    fn average_matches_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let frames: Vec<RawFrame> = (0..5)
            .map(|_| {
                let data: Vec<f32> = (0..16 * 16).map(|_| rng.random_range(0.0..1.0)).collect();
                RawFrame::new(16, 16, CfaPattern::Rggb, data).unwrap()
            })
            .collect();
        let mean = average_raw(&frames).unwrap();
        // Naive accumulate-then-divide, written independently.
        for i in 0..16 * 16 {
            let mut sum = 0.0f64;
            for frame in &frames {
                sum += frame.data()[i] as f64;
            }
            let expected = (sum / frames.len() as f64) as f32;
            assert!((mean.data()[i] - expected).abs() <= 1e-6);
        }
    }

    #[test]
    fn fixed_63_frame_window_centers_on_index_31() {
        let policy = WindowPolicy::new(63, 63, 63).unwrap();
        let windows = sample_window(&policy, 63, 7).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].start(), 0);
        assert_eq!(windows[0].length(), 63);
        assert_eq!(windows[0].center(), 31);
    }

    #[test]
    fn sample_window_is_deterministic() {
        let policy = WindowPolicy::default();
        assert_eq!(
            sample_window(&policy, 500, 123).unwrap(),
            sample_window(&policy, 500, 123).unwrap()
        );
    }

    #[test]
    fn sample_window_rejects_short_sequences() {
        let policy = WindowPolicy::default();
        assert!(matches!(
            sample_window(&policy, 16, 1),
            Err(Error::SequenceTooShort { .. })
        ));
    }

    #[test]
    fn sampled_lengths_are_odd_in_bounds_and_uniform() {
        let policy = WindowPolicy::new(17, 65, 1).unwrap();
        // Long sequence so ~10050 windows are drawn in one walk.
        let windows = sample_window(&policy, 10_115, 42).unwrap();
        assert!(windows.len() >= 10_000, "got {}", windows.len());
        let mut counts = [0usize; 25];
        for window in windows.iter().take(10_000) {
            let m = window.length();
            assert!(m % 2 == 1 && (17..=65).contains(&m));
            counts[(m - 17) / 2] += 1;
        }
        // 3 sigma for Binomial(10000, 1/25): 400 +- 3 * 19.6.
        for (i, &count) in counts.iter().enumerate() {
            assert!(
                (341..=459).contains(&count),
                "M = {} drawn {} times",
                17 + 2 * i,
                count
            );
        }
    }

    #[test]
    fn identical_window_frames_make_blurry_equal_sharp() {
        let frame = SrgbFrame::constant(8, 8, [0.3, 0.5, 0.4]).unwrap();
        let frames = vec![frame; 5];
        let window = ExposureWindow::new(0, 5).unwrap();
        let profile = crate::isp::sample_profile(3).unwrap();
        let (blurry, sharp) = synthesize_pair_raw(&frames, &window, &profile).unwrap();
        for (&a, &b) in blurry.data().iter().zip(sharp.data()) {
            assert!((a - b).abs() <= 1e-5);
        }
    }

    #[test]
    fn static_gray_scene_identity_profile_round_trips() {
        let frame = SrgbFrame::constant(8, 8, [0.42; 3]).unwrap();
        let frames = vec![frame.clone(); 3];
        let window = ExposureWindow::new(0, 3).unwrap();
        let profile = CameraProfile::identity(CfaPattern::Rggb);
        let (blurry, sharp) = synthesize_pair_raw(&frames, &window, &profile).unwrap();
        for (&a, &b) in blurry.data().iter().zip(frame.data()) {
            assert!((a - b).abs() <= 1e-5);
        }
        for (&a, &b) in sharp.data().iter().zip(frame.data()) {
            assert!((a - b).abs() <= 1e-5);
        }
    }

    #[test]
    fn raw_versus_rgb_levels_on_alternating_scene() {
        // Frames 0, 1, 0 under gamma 2.2: the RAW-domain mean decodes the
        // extremes first, so the blurry level is (1/3)^(1/2.2) = 0.606913,
        // while the RGB-domain mean stays at 1/3.
        let zero = SrgbFrame::constant(8, 8, [0.0; 3]).unwrap();
        let one = SrgbFrame::constant(8, 8, [1.0; 3]).unwrap();
        let frames = vec![zero.clone(), one, zero];
        let window = ExposureWindow::new(0, 3).unwrap();
        let profile = CameraProfile::new(
            [1.0; 3],
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            Crf::Gamma(2.2),
            CfaPattern::Rggb,
        )
        .unwrap();

        let (raw_blurry, _) = synthesize_pair_raw(&frames, &window, &profile).unwrap();
        for &v in raw_blurry.data() {
            assert!((v - 0.606_913_4).abs() < 1e-3, "raw level {v}");
        }

        let (rgb_blurry, rgb_sharp) = synthesize_pair_rgb(&frames, &window).unwrap();
        for &v in rgb_blurry.data() {
            assert!((v - 1.0 / 3.0).abs() < 1e-6, "rgb level {v}");
        }
        for (&a, &b) in raw_blurry.data().iter().zip(rgb_blurry.data()) {
            assert!(a - b >= 0.2, "gap {}", a - b);
        }
        assert_eq!(rgb_sharp.data(), frames[1].data());
    }

    #[test]
    fn rgb_pair_of_identical_frames_is_exact() {
        let frame = SrgbFrame::constant(4, 4, [0.25, 0.5, 0.75]).unwrap();
        let frames = vec![frame.clone(); 3];
        let window = ExposureWindow::new(0, 3).unwrap();
        let (blurry, sharp) = synthesize_pair_rgb(&frames, &window).unwrap();
        assert_eq!(blurry.data(), frame.data());
        assert_eq!(sharp.data(), frame.data());
    }

    #[test]
    fn window_must_fit_sequence() {
        let frames = vec![SrgbFrame::constant(4, 4, [0.5; 3]).unwrap(); 4];
        let window = ExposureWindow::new(2, 3).unwrap();
        assert!(matches!(
            synthesize_pair_rgb(&frames, &window),
            Err(Error::WindowOutOfBounds { .. })
        ));
    }

    #[test]
    fn sharp_output_is_center_round_trip_bit_exact() {
        let mut frames = Vec::new();
        for i in 0..5 {
            frames.push(SrgbFrame::constant(8, 8, [0.1 * (i as f32 + 1.0); 3]).unwrap());
        }
        let window = ExposureWindow::new(1, 3).unwrap();
        let profile = crate::isp::sample_profile(17).unwrap();
        let (_, sharp) = synthesize_pair_raw(&frames, &window, &profile).unwrap();
        let reference = process(
            &unprocess(&frames[window.center()], &profile).unwrap(),
            &profile,
        )
        .unwrap();
        assert_eq!(sharp.data(), reference.data());
    }
}
