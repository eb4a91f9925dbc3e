//! PNG decode/encode at the pipeline's floating-point boundary.
//!
//! 8-bit and 16-bit PNG are accepted on input; everything is promoted to
//! 16 bits before normalization (the 8-to-16 promotion is exact on the
//! `[0, 1]` scale). Outputs are always written as 16-bit PNG so the
//! synthesized pairs do not lose RAW-domain precision to re-quantization.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use rawblur_core::frame::SrgbFrame;

/// Decodes a PNG into a normalized sRGB frame.
pub fn load_srgb(path: &Path) -> Result<SrgbFrame> {
    let img = image::open(path).with_context(|| format!("cannot decode {}", path.display()))?;
    let rgb = img.into_rgb16();
    let (width, height) = rgb.dimensions();
    let data: Vec<f32> = rgb
        .into_raw()
        .into_iter()
        .map(|v| v as f32 / u16::MAX as f32)
        .collect();
    SrgbFrame::new(width as usize, height as usize, data)
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Encodes a frame as 16-bit RGB PNG.
pub fn save_srgb16(path: &Path, frame: &SrgbFrame) -> Result<()> {
    let data: Vec<u16> = frame
        .data()
        .iter()
        .map(|&v| (v as f64 * u16::MAX as f64).round() as u16)
        .collect();
    let buf = image::ImageBuffer::<image::Rgb<u16>, Vec<u16>>::from_raw(
        frame.width() as u32,
        frame.height() as u32,
        data,
    )
    .expect("frame data length matches dimensions");
    image::DynamicImage::ImageRgb16(buf)
        .save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_bit_round_trip_is_lossless_on_grid_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame.png");
        // Values on the u16 grid survive the round trip exactly.
        let data: Vec<f32> = (0..3 * 8 * 8)
            .map(|i| (i * 971 % 65536) as f32 / 65535.0)
            .collect();
        let frame = SrgbFrame::new(8, 8, data).unwrap();
        save_srgb16(&path, &frame).unwrap();
        let back = load_srgb(&path).unwrap();
        assert_eq!(back.data(), frame.data());
    }

    #[test]
    fn eight_bit_input_is_promoted_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame8.png");
        let buf = image::ImageBuffer::<image::Rgb<u8>, Vec<u8>>::from_fn(4, 4, |x, y| {
            image::Rgb([(x * 17) as u8, (y * 31) as u8, 128])
        });
        buf.save(&path).unwrap();
        let frame = load_srgb(&path).unwrap();
        // u8 v scales to v/255 exactly through the 16-bit promotion.
        assert_eq!(frame.pixel(0, 1)[0], 17.0 / 255.0);
        assert_eq!(frame.pixel(2, 0)[1], 62.0 / 255.0);
        assert_eq!(frame.pixel(3, 3)[2], 128.0 / 255.0);
    }

    #[test]
    fn unreadable_file_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("not_an_image.png");
        std::fs::write(&path, b"definitely not a png").unwrap();
        let err = load_srgb(&path).unwrap_err();
        assert!(format!("{err:#}").contains("not_an_image.png"));
    }
}
