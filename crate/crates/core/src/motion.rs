//! Per-frame motion analysis: decide whether each input frame is dropped,
//! kept as a masked motion frame, or kept whole as a keyframe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame_io::{Frame, PixelFormat};
use crate::sidecar::SidecarRecord;

/// User-tunable analysis parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionConfig {
    /// Luma differences strictly greater than this count as motion.
    pub threshold: u8,
    /// Analysis runs on a grid `downscale` times coarser than the frame.
    pub downscale: u32,
    /// Dilation radius of the buffer region, in analysis-grid cells.
    pub buffer_radius: u32,
    /// Emitted frames between keyframes inside a motion sequence.
    pub keyframe_interval: u32,
    /// Thresholded cells required before a frame counts as moving.
    pub min_motion_pixels: u64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            threshold: 25,
            downscale: 2,
            buffer_radius: 5,
            keyframe_interval: 100,
            min_motion_pixels: 10,
        }
    }
}

impl MotionConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.threshold == 0 {
            return fail("threshold must be in [1, 255]");
        }
        if self.downscale == 0 {
            return fail("downscale must be at least 1");
        }
        if self.keyframe_interval == 0 {
            return fail("keyframe interval must be at least 1");
        }
        if self.min_motion_pixels == 0 {
            return fail("min motion pixels must be at least 1");
        }
        Ok(())
    }
}

/// Single-channel 8-bit image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayFrame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if data.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} gray frame needs {} bytes, got {}",
                width as usize * height as usize,
                data.len()
            )));
        }
        Ok(GrayFrame {
            width,
            height,
            data,
        })
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    fn check_same(&self, other: &GrayFrame) -> Result<()> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }
}

/// Binary grid; a set cell marks motion (or buffer around motion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotionMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl MotionMask {
    pub fn empty(width: u32, height: u32) -> Self {
        MotionMask {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn full(width: u32, height: u32) -> Self {
        MotionMask {
            width,
            height,
            bits: vec![true; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().filter(|b| **b).count() as u64
    }
}

fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}

/// Dimensions of the analysis grid for a frame.
pub fn grid_dims(width: u32, height: u32, downscale: u32) -> (u32, u32) {
    (ceil_div(width, downscale), ceil_div(height, downscale))
}

/// Luma of a frame; RGB uses BT.601 integer weights.
pub fn to_grayscale(frame: &Frame) -> GrayFrame {
    let (w, h) = (frame.width(), frame.height());
    let n = frame.pixel_count();
    let data = match frame.pixel_format() {
        PixelFormat::Gray8 | PixelFormat::Yuv420 | PixelFormat::Yuv444 => {
            frame.data()[..n].to_vec()
        }
        PixelFormat::Rgb24 => frame
            .data()
            .chunks_exact(3)
            .map(|p| {
                let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
                ((weighted + 500) / 1000) as u8
            })
            .collect(),
    };
    GrayFrame {
        width: w,
        height: h,
        data,
    }
}

fn downscale_plane(luma: &[u8], width: u32, height: u32, s: u32) -> GrayFrame {
    if s == 1 {
        return GrayFrame {
            width,
            height,
            data: luma.to_vec(),
        };
    }
    let (w, h, s) = (width as usize, height as usize, s as usize);
    let (ow, oh) = (w.div_ceil(s), h.div_ceil(s));
    let mut out = Vec::with_capacity(ow * oh);
    let mut acc = vec![0u32; ow];
    for oy in 0..oh {
        acc.fill(0);
        let (y0, y1) = (oy * s, ((oy + 1) * s).min(h));
        for row in luma[y0 * w..y1 * w].chunks_exact(w) {
            for (cell, block) in acc.iter_mut().zip(row.chunks(s)) {
                *cell += block.iter().map(|&v| v as u32).sum::<u32>();
            }
        }
        let rows = (y1 - y0) as u32;
        out.extend(acc.iter().enumerate().map(|(ox, &sum)| {
            let cols = (w - ox * s).min(s) as u32;
            let count = cols * rows;
            ((sum + count / 2) / count) as u8
        }));
    }
    GrayFrame {
        width: ow as u32,
        height: oh as u32,
        data: out,
    }
}

/// Block-mean downscale by an integer factor; ragged edge blocks average the
/// pixels they actually cover.
pub fn downscale(gray: &GrayFrame, s: u32) -> GrayFrame {
    assert!(s >= 1, "downscale factor must be at least 1");
    downscale_plane(&gray.data, gray.width, gray.height, s)
}

/// Grayscale and downscale in one pass, borrowing the luma plane when possible.
pub fn analysis_gray(frame: &Frame, s: u32) -> GrayFrame {
    match frame.pixel_format() {
        PixelFormat::Rgb24 => downscale(&to_grayscale(frame), s),
        _ => downscale_plane(
            &frame.data()[..frame.pixel_count()],
            frame.width(),
            frame.height(),
            s,
        ),
    }
}

pub fn abs_diff(prev: &GrayFrame, curr: &GrayFrame) -> Result<GrayFrame> {
    prev.check_same(curr)?;
    let data = prev
        .data
        .iter()
        .zip(&curr.data)
        .map(|(a, b)| a.abs_diff(*b))
        .collect();
    Ok(GrayFrame {
        width: curr.width,
        height: curr.height,
        data,
    })
}

pub fn threshold_mask(diff: &GrayFrame, threshold: u8) -> MotionMask {
    MotionMask {
        width: diff.width,
        height: diff.height,
        bits: diff.data.iter().map(|&d| d > threshold).collect(),
    }
}

/// Square-kernel dilation of radius `r`, clipped at the borders.
pub fn dilate(mask: &MotionMask, r: u32) -> MotionMask {
    if r == 0 {
        return mask.clone();
    }
    let (w, h, r) = (mask.width as usize, mask.height as usize, r as usize);

    // Horizontal pass through row prefix counts.
    let mut horizontal = vec![false; w * h];
    let mut prefix = vec![0u32; w + 1];
    for (src, dst) in mask.bits.chunks_exact(w).zip(horizontal.chunks_exact_mut(w)) {
        for (x, &b) in src.iter().enumerate() {
            prefix[x + 1] = prefix[x] + b as u32;
        }
        for (x, out) in dst.iter_mut().enumerate() {
            *out = prefix[(x + r + 1).min(w)] > prefix[x.saturating_sub(r)];
        }
    }

    // Vertical pass with a sliding per-column window count.
    let mut bits = vec![false; w * h];
    let mut window = vec![0u32; w];
    let row = |y: usize| &horizontal[y * w..(y + 1) * w];
    for y in 0..r.min(h) {
        for (c, &b) in window.iter_mut().zip(row(y)) {
            *c += b as u32;
        }
    }
    for y in 0..h {
        if y + r < h {
            for (c, &b) in window.iter_mut().zip(row(y + r)) {
                *c += b as u32;
            }
        }
        if y > r {
            for (c, &b) in window.iter_mut().zip(row(y - r - 1)) {
                *c -= b as u32;
            }
        }
        for (out, &c) in bits[y * w..(y + 1) * w].iter_mut().zip(&window) {
            *out = c > 0;
        }
    }
    MotionMask {
        width: mask.width,
        height: mask.height,
        bits,
    }
}

/// Nearest-neighbour replication of an analysis-grid mask to frame size.
pub fn upscale_mask(mask: &MotionMask, s: u32, target_w: u32, target_h: u32) -> Result<MotionMask> {
    let expected = grid_dims(target_w, target_h, s);
    if (mask.width, mask.height) != expected {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{}, {target_w}x{target_h} at factor {s} needs {}x{}",
            mask.width, mask.height, expected.0, expected.1
        )));
    }
    if s == 1 {
        return Ok(mask.clone());
    }
    let (tw, th, s) = (target_w as usize, target_h as usize, s as usize);
    let mut bits = Vec::with_capacity(tw * th);
    for y in 0..th {
        let start = bits.len();
        if y % s != 0 {
            bits.extend_from_within(start - tw..start);
            continue;
        }
        let src = &mask.bits[(y / s) * mask.width as usize..][..mask.width as usize];
        for &b in src {
            bits.extend(std::iter::repeat(b).take(s));
        }
        bits.truncate(start + tw);
    }
    Ok(MotionMask {
        width: target_w,
        height: target_h,
        bits,
    })
}

/// Keeps pixels under set mask cells verbatim and zeroes everything else.
///
/// For 4:2:0 a chroma sample is kept when any of its four luma pixels is.
pub fn apply_mask(frame: &Frame, mask: &MotionMask) -> Result<Frame> {
    if (mask.width, mask.height) != (frame.width(), frame.height()) {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{}, frame is {}x{}",
            mask.width,
            mask.height,
            frame.width(),
            frame.height()
        )));
    }
    let mut out = frame.clone();
    let n = frame.pixel_count();
    let data = out.data_mut();
    let keep = |v: &mut u8, m: bool| {
        if !m {
            *v = 0
        }
    };
    match frame.pixel_format() {
        PixelFormat::Gray8 => {
            data.iter_mut().zip(&mask.bits).for_each(|(v, &m)| keep(v, m));
        }
        PixelFormat::Rgb24 => {
            for (px, &m) in data.chunks_exact_mut(3).zip(&mask.bits) {
                if !m {
                    px.fill(0);
                }
            }
        }
        PixelFormat::Yuv444 => {
            for plane in data.chunks_exact_mut(n) {
                plane.iter_mut().zip(&mask.bits).for_each(|(v, &m)| keep(v, m));
            }
        }
        PixelFormat::Yuv420 => {
            let (luma, chroma) = data.split_at_mut(n);
            luma.iter_mut().zip(&mask.bits).for_each(|(v, &m)| keep(v, m));
            let w = frame.width() as usize;
            let cw = w / 2;
            let chroma_mask: Vec<bool> = mask
                .bits
                .chunks_exact(2 * w)
                .flat_map(|rows| {
                    let (top, bottom) = rows.split_at(w);
                    (0..cw).map(move |cx| {
                        top[2 * cx] || top[2 * cx + 1] || bottom[2 * cx] || bottom[2 * cx + 1]
                    })
                })
                .collect();
            for plane in chroma.chunks_exact_mut(n / 4) {
                plane.iter_mut().zip(&chroma_mask).for_each(|(v, &m)| keep(v, m));
            }
        }
    }
    Ok(out)
}

/// Motion mask between two analysis-grid frames, plus the number of
/// thresholded (pre-dilation) cells.
pub fn motion_mask(prev: &GrayFrame, curr: &GrayFrame, config: &MotionConfig) -> Result<(MotionMask, u64)> {
    let raw = threshold_mask(&abs_diff(prev, curr)?, config.threshold);
    let count = raw.count();
    Ok((dilate(&raw, config.buffer_radius), count))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Drop,
    Masked,
    FullFrame,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalysisOutcome {
    Drop { input_frame: u64 },
    Masked { frame: Frame, record: SidecarRecord },
    FullFrame { frame: Frame, record: SidecarRecord },
}

impl AnalysisOutcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            AnalysisOutcome::Drop { .. } => OutcomeKind::Drop,
            AnalysisOutcome::Masked { .. } => OutcomeKind::Masked,
            AnalysisOutcome::FullFrame { .. } => OutcomeKind::FullFrame,
        }
    }

    pub fn frame(&self) -> Option<&Frame> {
        match self {
            AnalysisOutcome::Drop { .. } => None,
            AnalysisOutcome::Masked { frame, .. } | AnalysisOutcome::FullFrame { frame, .. } => {
                Some(frame)
            }
        }
    }

    pub fn record(&self) -> Option<&SidecarRecord> {
        match self {
            AnalysisOutcome::Drop { .. } => None,
            AnalysisOutcome::Masked { record, .. } | AnalysisOutcome::FullFrame { record, .. } => {
                Some(record)
            }
        }
    }

    pub fn into_emitted(self) -> Option<(Frame, SidecarRecord)> {
        match self {
            AnalysisOutcome::Drop { .. } => None,
            AnalysisOutcome::Masked { frame, record } | AnalysisOutcome::FullFrame { frame, record } => {
                Some((frame, record))
            }
        }
    }
}

/// Sequencing state carried from one input frame to the next.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalysisState {
    /// Analysis-grid luma of the previous input frame.
    pub prev_gray: Option<GrayFrame>,
    pub out_index: u64,
    pub frames_since_keyframe: u32,
    pub in_motion_sequence: bool,
    geometry: Option<(u32, u32, PixelFormat)>,
}

impl AnalysisState {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_geometry(&mut self, frame: &Frame) -> Result<()> {
        let geometry = (frame.width(), frame.height(), frame.pixel_format());
        match self.geometry {
            None => {
                self.geometry = Some(geometry);
                Ok(())
            }
            Some(g) if g == geometry => Ok(()),
            Some((w, h, f)) => Err(Error::DimensionMismatch(format!(
                "frame {} is {}x{} {}, stream started as {w}x{h} {f}",
                frame.index(),
                geometry.0,
                geometry.1,
                geometry.2
            ))),
        }
    }

    fn emit(&mut self, frame: Frame, full: bool) -> AnalysisOutcome {
        let record = SidecarRecord {
            input_frame: frame.index(),
            output_frame: self.out_index,
            full_frame: full,
        };
        self.out_index += 1;
        if full {
            AnalysisOutcome::FullFrame { frame, record }
        } else {
            AnalysisOutcome::Masked { frame, record }
        }
    }

    /// Advances the state by one input frame.
    pub fn step(&mut self, config: &MotionConfig, frame: Frame) -> Result<AnalysisOutcome> {
        self.check_geometry(&frame)?;
        let gray = analysis_gray(&frame, config.downscale);
        let Some(prev) = self.prev_gray.replace(gray) else {
            // The opening frame is always kept whole and anchors the first sequence.
            self.frames_since_keyframe = 0;
            self.in_motion_sequence = true;
            return Ok(self.emit(frame, true));
        };
        let curr = self.prev_gray.as_ref().expect("just stored");
        let (mask, moving) = motion_mask(&prev, curr, config)?;

        if moving < config.min_motion_pixels {
            self.in_motion_sequence = false;
            return Ok(AnalysisOutcome::Drop {
                input_frame: frame.index(),
            });
        }

        self.frames_since_keyframe += 1;
        let keyframe =
            !self.in_motion_sequence || self.frames_since_keyframe >= config.keyframe_interval;
        self.in_motion_sequence = true;
        if keyframe {
            self.frames_since_keyframe = 0;
            return Ok(self.emit(frame, true));
        }
        let full_mask = upscale_mask(&mask, config.downscale, frame.width(), frame.height())?;
        let masked = apply_mask(&frame, &full_mask)?;
        Ok(self.emit(masked, false))
    }
}

/// Pure form of [`AnalysisState::step`].
pub fn analyse(
    mut state: AnalysisState,
    config: &MotionConfig,
    frame: Frame,
) -> Result<(AnalysisOutcome, AnalysisState)> {
    let outcome = state.step(config, frame)?;
    Ok((outcome, state))
}
