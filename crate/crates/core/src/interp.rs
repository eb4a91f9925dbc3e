//! Frame-rate upsampling via dense pyramidal Lucas-Kanade flow.
//!
//! Averaging frames from a low-frame-rate source produces ghosted,
//! aliased blur when motion between frames is large. Inserting midpoint
//! frames first makes the average approximate continuous integration.
//! The interpolator here is deliberately classical: luma-only coarse-to-
//! fine Lucas-Kanade, symmetric backward warping, 50/50 blending. No
//! occlusion reasoning.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::SrgbFrame;

/// Default bound on flow displacement magnitude, in pixels.
pub const DEFAULT_MAX_FLOW: f32 = 64.0;

/// Windows whose structure tensor has a smaller eigenvalue than this are
/// treated as textureless and receive no flow update.
const MIN_EIGENVALUE: f64 = 1e-6;

/// Coarse-to-fine solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyramidConfig {
    /// Number of pyramid levels (finest included).
    pub levels: usize,
    /// Half-width of the integration window, in pixels.
    pub window_radius: usize,
    /// Lucas-Kanade refinement passes per level.
    pub iterations_per_level: usize,
    /// Bound on flow displacement magnitude, in pixels.
    pub max_flow: f32,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        Self {
            levels: 4,
            window_radius: 7,
            iterations_per_level: 3,
            max_flow: DEFAULT_MAX_FLOW,
        }
    }
}

impl PyramidConfig {
    fn validate(&self) -> Result<()> {
        if self.levels < 1 {
            return Err(Error::InvalidPyramidConfig {
                reason: "levels must be >= 1",
            });
        }
        if self.window_radius < 1 {
            return Err(Error::InvalidPyramidConfig {
                reason: "window radius must be >= 1",
            });
        }
        if self.iterations_per_level < 1 {
            return Err(Error::InvalidPyramidConfig {
                reason: "iterations per level must be >= 1",
            });
        }
        if !(self.max_flow.is_finite() && self.max_flow > 0.0) {
            return Err(Error::InvalidPyramidConfig {
                reason: "max flow must be a positive finite number of pixels",
            });
        }
        Ok(())
    }
}

/// Dense displacement field mapping each pixel of frame A toward frame B:
/// at convergence `B(p + flow(p)) = A(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    /// Interleaved (dx, dy), row-major.
    data: Vec<f32>,
}

impl FlowField {
    /// Builds a field from interleaved (dx, dy) pairs; every displacement
    /// must be finite with magnitude at most [`DEFAULT_MAX_FLOW`].
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDimensions { width, height });
        }
        if data.len() != 2 * width * height {
            return Err(Error::DataLength {
                expected: 2 * width * height,
                actual: data.len(),
            });
        }
        for (index, pair) in data.chunks_exact(2).enumerate() {
            let mag2 = pair[0] * pair[0] + pair[1] * pair[1];
            if !mag2.is_finite() || mag2 > DEFAULT_MAX_FLOW * DEFAULT_MAX_FLOW {
                return Err(Error::FlowOutOfBounds {
                    index,
                    max: DEFAULT_MAX_FLOW,
                });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Field with the same displacement everywhere.
    pub fn constant(width: usize, height: usize, dx: f32, dy: f32) -> Result<Self> {
        let mut data = Vec::with_capacity(2 * width * height);
        for _ in 0..width * height {
            data.push(dx);
            data.push(dy);
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Interleaved (dx, dy) pairs, row-major.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Displacement (dx, dy) at `(y, x)`.
    pub fn get(&self, y: usize, x: usize) -> (f32, f32) {
        let i = 2 * (y * self.width + x);
        (self.data[i], self.data[i + 1])
    }
}

/// Single-channel f32 plane used for pyramid levels and gradients.
struct Plane {
    w: usize,
    h: usize,
    data: Vec<f32>,
}

impl Plane {
    fn zeros(w: usize, h: usize) -> Self {
        Self {
            w,
            h,
            data: vec![0.0; w * h],
        }
    }

    #[inline]
    fn get(&self, y: usize, x: usize) -> f32 {
        self.data[y * self.w + x]
    }

    /// Bilinear sample with edge clamping.
    fn sample(&self, x: f32, y: f32) -> f32 {
        let x = x.clamp(0.0, (self.w - 1) as f32);
        let y = y.clamp(0.0, (self.h - 1) as f32);
        let x0 = x as usize;
        let y0 = y as usize;
        let x1 = (x0 + 1).min(self.w - 1);
        let y1 = (y0 + 1).min(self.h - 1);
        let fx = x - x0 as f32;
        let fy = y - y0 as f32;
        let top = self.get(y0, x0) * (1.0 - fx) + self.get(y0, x1) * fx;
        let bottom = self.get(y1, x0) * (1.0 - fx) + self.get(y1, x1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Rec. 601 luma.
fn luma(frame: &SrgbFrame) -> Plane {
    let data = frame
        .data()
        .chunks_exact(3)
        .map(|px| 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2])
        .collect();
    Plane {
        w: frame.width(),
        h: frame.height(),
        data,
    }
}

/// Separable 5-tap binomial smoothing (clamped borders) followed by 2x
/// subsampling. The prefilter keeps aliasing out of the coarse levels.
fn downsample(src: &Plane) -> Plane {
    const TAPS: [f32; 5] = [0.0625, 0.25, 0.375, 0.25, 0.0625];
    let (sw, sh) = (src.w, src.h);
    let mut horizontal = vec![0.0f32; sw * sh];
    for y in 0..sh {
        for x in 0..sw {
            let mut acc = 0.0;
            for (k, &tap) in TAPS.iter().enumerate() {
                let nx = (x as i64 + k as i64 - 2).clamp(0, sw as i64 - 1) as usize;
                acc += tap * src.get(y, nx);
            }
            horizontal[y * sw + x] = acc;
        }
    }
    let w = sw / 2;
    let h = sh / 2;
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &tap) in TAPS.iter().enumerate() {
                let ny = (2 * y as i64 + k as i64 - 2).clamp(0, sh as i64 - 1) as usize;
                acc += tap * horizontal[ny * sw + 2 * x];
            }
            data.push(acc);
        }
    }
    Plane { w, h, data }
}

/// Pyramid with `levels` planes, index 0 finest.
fn build_pyramid(base: Plane, levels: usize) -> Vec<Plane> {
    let mut pyramid = Vec::with_capacity(levels);
    pyramid.push(base);
    for i in 1..levels {
        pyramid.push(downsample(&pyramid[i - 1]));
    }
    pyramid
}

/// Central-difference gradients with clamped borders.
fn gradients(p: &Plane) -> (Plane, Plane) {
    let mut ix = Plane::zeros(p.w, p.h);
    let mut iy = Plane::zeros(p.w, p.h);
    for y in 0..p.h {
        for x in 0..p.w {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(p.w - 1);
            let ym = y.saturating_sub(1);
            let yp = (y + 1).min(p.h - 1);
            ix.data[y * p.w + x] = 0.5 * (p.get(y, xp) - p.get(y, xm));
            iy.data[y * p.w + x] = 0.5 * (p.get(yp, x) - p.get(ym, x));
        }
    }
    (ix, iy)
}

/// Summed-area table in f64 so window sums are O(1).
struct Integral {
    w: usize,
    data: Vec<f64>,
}

impl Integral {
    fn build(p: &Plane) -> Self {
        let (w, h) = (p.w, p.h);
        let stride = w + 1;
        let mut data = vec![0.0f64; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0f64;
            for x in 0..w {
                row += p.get(y, x) as f64;
                data[(y + 1) * stride + x + 1] = data[y * stride + x + 1] + row;
            }
        }
        Self { w, data }
    }

    fn build_product(a: &Plane, b: &Plane) -> Self {
        let (w, h) = (a.w, a.h);
        let stride = w + 1;
        let mut data = vec![0.0f64; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0f64;
            for x in 0..w {
                row += (a.get(y, x) * b.get(y, x)) as f64;
                data[(y + 1) * stride + x + 1] = data[y * stride + x + 1] + row;
            }
        }
        Self { w, data }
    }

    /// Sum over the inclusive rectangle [y0..=y1] x [x0..=x1].
    #[inline]
    fn window(&self, y0: usize, y1: usize, x0: usize, x1: usize) -> f64 {
        let stride = self.w + 1;
        self.data[(y1 + 1) * stride + x1 + 1] + self.data[y0 * stride + x0]
            - self.data[y0 * stride + x1 + 1]
            - self.data[(y1 + 1) * stride + x0]
    }
}

/// Bilinear resize of one flow component to `(w, h)`, rescaling the
/// displacement values by `scale`.
fn upsample_component(src: &Plane, w: usize, h: usize, scale: f32) -> Plane {
    let mut out = Plane::zeros(w, h);
    let sx = src.w as f32 / w as f32;
    let sy = src.h as f32 / h as f32;
    for y in 0..h {
        for x in 0..w {
            let v = src.sample((x as f32 + 0.5) * sx - 0.5, (y as f32 + 0.5) * sy - 0.5);
            out.data[y * w + x] = v * scale;
        }
    }
    out
}

/// One pyramid level of Lucas-Kanade refinement, updating `(u, v)` in place.
fn refine_level(a: &Plane, b: &Plane, u: &mut Plane, v: &mut Plane, cfg: &PyramidConfig) {
    let (w, h) = (a.w, a.h);
    let r = cfg.window_radius;
    let (ix, iy) = gradients(a);
    let ixx = Integral::build_product(&ix, &ix);
    let ixy = Integral::build_product(&ix, &iy);
    let iyy = Integral::build_product(&iy, &iy);
    let max2 = (cfg.max_flow * cfg.max_flow) as f64;

    let mut gx = Plane::zeros(w, h);
    let mut gy = Plane::zeros(w, h);
    for _ in 0..cfg.iterations_per_level {
        // Residual against B warped by the current flow, projected onto
        // the spatial gradients of A.
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let residual = b.sample(x as f32 + u.data[i], y as f32 + v.data[i]) - a.get(y, x);
                gx.data[i] = ix.data[i] * residual;
                gy.data[i] = iy.data[i] * residual;
            }
        }
        let bx = Integral::build(&gx);
        let by = Integral::build(&gy);

        for y in 0..h {
            let y0 = y.saturating_sub(r);
            let y1 = (y + r).min(h - 1);
            for x in 0..w {
                let x0 = x.saturating_sub(r);
                let x1 = (x + r).min(w - 1);

                let sxx = ixx.window(y0, y1, x0, x1);
                let sxy = ixy.window(y0, y1, x0, x1);
                let syy = iyy.window(y0, y1, x0, x1);

                // Smaller eigenvalue of the 2x2 structure tensor.
                let trace = sxx + syy;
                let delta = libm::sqrt((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy);
                if 0.5 * (trace - delta) < MIN_EIGENVALUE {
                    continue;
                }

                let det = sxx * syy - sxy * sxy;
                let rx = bx.window(y0, y1, x0, x1);
                let ry = by.window(y0, y1, x0, x1);
                let du = (sxy * ry - syy * rx) / det;
                let dv = (sxy * rx - sxx * ry) / det;

                let i = y * w + x;
                let mut nu = u.data[i] as f64 + du;
                let mut nv = v.data[i] as f64 + dv;
                let mag2 = nu * nu + nv * nv;
                if mag2 > max2 {
                    let s = libm::sqrt(max2 / mag2);
                    nu *= s;
                    nv *= s;
                }
                u.data[i] = nu as f32;
                v.data[i] = nv as f32;
            }
        }

        // The window model assumes locally constant flow; averaging the
        // field over the same window after each pass keeps the per-pixel
        // updates from amplifying into high-frequency noise.
        box_smooth(u, r);
        box_smooth(v, r);
    }
}

/// In-place box average over a (2r+1)^2 window with clamped borders.
fn box_smooth(p: &mut Plane, r: usize) {
    let (w, h) = (p.w, p.h);
    let integral = Integral::build(p);
    for y in 0..h {
        let y0 = y.saturating_sub(r);
        let y1 = (y + r).min(h - 1);
        for x in 0..w {
            let x0 = x.saturating_sub(r);
            let x1 = (x + r).min(w - 1);
            let area = ((y1 - y0 + 1) * (x1 - x0 + 1)) as f64;
            p.data[y * w + x] = (integral.window(y0, y1, x0, x1) / area) as f32;
        }
    }
}

/// Estimates the dense displacement field carrying frame `a` toward `b`.
///
/// Luma pyramids are refined coarse-to-fine: each level solves the 2x2
/// structure-tensor system per pixel per iteration, and pixels whose
/// window is textureless (smallest eigenvalue below 1e-6) keep their
/// current flow. Frames must share dimensions and each axis must hold at
/// least `2^levels` pixels.
pub fn estimate_flow(a: &SrgbFrame, b: &SrgbFrame, cfg: &PyramidConfig) -> Result<FlowField> {
    cfg.validate()?;
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            expected_width: a.width(),
            expected_height: a.height(),
            width: b.width(),
            height: b.height(),
        });
    }
    let min_extent = 1usize << cfg.levels;
    if a.width() < min_extent || a.height() < min_extent {
        return Err(Error::FrameTooSmall {
            width: a.width(),
            height: a.height(),
            levels: cfg.levels,
        });
    }

    let pa = build_pyramid(luma(a), cfg.levels);
    let pb = build_pyramid(luma(b), cfg.levels);

    let coarsest = cfg.levels - 1;
    let mut u = Plane::zeros(pa[coarsest].w, pa[coarsest].h);
    let mut v = Plane::zeros(pa[coarsest].w, pa[coarsest].h);
    for level in (0..cfg.levels).rev() {
        let (la, lb) = (&pa[level], &pb[level]);
        if level != coarsest {
            u = upsample_component(&u, la.w, la.h, la.w as f32 / u.w as f32);
            v = upsample_component(&v, la.w, la.h, la.h as f32 / v.h as f32);
        }
        refine_level(la, lb, &mut u, &mut v, cfg);
    }

    let mut data = Vec::with_capacity(2 * u.w * u.h);
    for i in 0..u.data.len() {
        data.push(u.data[i]);
        data.push(v.data[i]);
    }
    Ok(FlowField {
        width: a.width(),
        height: a.height(),
        data,
    })
}

/// Backward-warps `frame` by `t * flow`: the output at `p` samples the
/// input at `p - t * flow(p)` bilinearly, clamping out-of-bounds reads to
/// the edge. `t` must lie in `[0, 1]`.
pub fn warp(frame: &SrgbFrame, flow: &FlowField, t: f32) -> Result<SrgbFrame> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::WarpFraction { t });
    }
    if frame.width() != flow.width() || frame.height() != flow.height() {
        return Err(Error::DimensionMismatch {
            expected_width: frame.width(),
            expected_height: frame.height(),
            width: flow.width(),
            height: flow.height(),
        });
    }
    let (w, h) = (frame.width(), frame.height());
    let src = frame.data();
    let mut data = Vec::with_capacity(3 * w * h);
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = flow.get(y, x);
            let sx = (x as f32 - t * dx).clamp(0.0, (w - 1) as f32);
            let sy = (y as f32 - t * dy).clamp(0.0, (h - 1) as f32);
            let x0 = sx as usize;
            let y0 = sy as usize;
            let x1 = (x0 + 1).min(w - 1);
            let y1 = (y0 + 1).min(h - 1);
            let fx = sx - x0 as f32;
            let fy = sy - y0 as f32;
            let w00 = (1.0 - fx) * (1.0 - fy);
            let w01 = fx * (1.0 - fy);
            let w10 = (1.0 - fx) * fy;
            let w11 = fx * fy;
            let i00 = 3 * (y0 * w + x0);
            let i01 = 3 * (y0 * w + x1);
            let i10 = 3 * (y1 * w + x0);
            let i11 = 3 * (y1 * w + x1);
            for c in 0..3 {
                let v = w00 * src[i00 + c]
                    + w01 * src[i01 + c]
                    + w10 * src[i10 + c]
                    + w11 * src[i11 + c];
                data.push(v.clamp(0.0, 1.0));
            }
        }
    }
    Ok(SrgbFrame::from_clipped(w, h, data))
}

/// Synthesizes the temporal midpoint of two frames: both are warped
/// halfway along their mutual flows and blended 50/50.
pub fn interpolate_midpoint(
    a: &SrgbFrame,
    b: &SrgbFrame,
    cfg: &PyramidConfig,
) -> Result<SrgbFrame> {
    let forward = estimate_flow(a, b, cfg)?;
    let backward = estimate_flow(b, a, cfg)?;
    let wa = warp(a, &forward, 0.5)?;
    let wb = warp(b, &backward, 0.5)?;
    let data: Vec<f32> = wa
        .data()
        .iter()
        .zip(wb.data())
        .map(|(&x, &y)| (0.5 * (x + y)).clamp(0.0, 1.0))
        .collect();
    Ok(SrgbFrame::from_clipped(a.width(), a.height(), data))
}

/// Raises the frame rate by recursively inserting midpoints.
///
/// `factor` must be a power of two >= 2; the output holds
/// `(n - 1) * factor + 1` frames with the originals unmodified at stride
/// `factor`.
pub fn upsample_frame_rate(
    frames: &[SrgbFrame],
    factor: usize,
    cfg: &PyramidConfig,
) -> Result<Vec<SrgbFrame>> {
    if frames.len() < 2 {
        return Err(Error::SequenceTooShort {
            length: frames.len(),
            minimum: 2,
        });
    }
    if factor < 2 || !factor.is_power_of_two() {
        return Err(Error::UpsampleFactor { factor });
    }
    let mut current = frames.to_vec();
    let passes = factor.trailing_zeros();
    for _ in 0..passes {
        let mut next = Vec::with_capacity(2 * current.len() - 1);
        for i in 0..current.len() - 1 {
            next.push(current[i].clone());
            next.push(interpolate_midpoint(&current[i], &current[i + 1], cfg)?);
        }
        next.push(current[current.len() - 1].clone());
        current = next;
    }
    Ok(current)
}
