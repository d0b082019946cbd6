#![allow(dead_code)]

use motionzip::{Frame, MotionConfig, PixelFormat, SidecarRecord, StreamHeader};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn header(w: u32, h: u32, format: PixelFormat) -> StreamHeader {
    StreamHeader::new(w, h, 30, 1, format).unwrap()
}

/// Cheap deterministic texture value for integer coordinates.
pub fn hash2(x: u32, y: u32) -> u8 {
    let mut v = x.wrapping_mul(0x9E37_79B1) ^ y.wrapping_mul(0x85EB_CA77);
    v ^= v >> 15;
    v = v.wrapping_mul(0x2C1B_3C6D);
    v ^= v >> 12;
    (v & 0xFF) as u8
}

pub fn background_luma(x: u32, y: u32) -> u8 {
    (30 + (x * 3 + y * 2) % 120) as u8
}

/// Gray8 scene with a bright 4x4 square moving one pixel right per frame
/// across a textured background.
pub fn moving_square_gray(w: u32, h: u32, frames: u64) -> Vec<Frame> {
    (0..frames)
        .map(|i| {
            let (sx, sy) = (4 + i as u32, h / 3);
            let data = (0..h)
                .flat_map(|y| (0..w).map(move |x| (x, y)))
                .map(|(x, y)| {
                    if (sx..sx + 4).contains(&x) && (sy..sy + 4).contains(&y) {
                        255
                    } else {
                        background_luma(x, y)
                    }
                })
                .collect();
            Frame::new(i, w, h, PixelFormat::Gray8, data).unwrap()
        })
        .collect()
}

/// Converts packed luma rows to the requested layout, deriving colour from
/// position so chroma and RGB channels carry real content.
pub fn colourise(luma: &[u8], w: u32, h: u32, format: PixelFormat) -> Vec<u8> {
    let n = (w * h) as usize;
    match format {
        PixelFormat::Gray8 => luma.to_vec(),
        PixelFormat::Rgb24 => luma
            .iter()
            .enumerate()
            .flat_map(|(i, &l)| [l, l.wrapping_add((i % 7) as u8), 255 - l])
            .collect(),
        PixelFormat::Yuv444 => {
            let mut data = luma.to_vec();
            data.extend(luma.iter().map(|l| 128u8.wrapping_add(l / 4)));
            data.extend(luma.iter().map(|l| 128u8.wrapping_sub(l / 5)));
            data
        }
        PixelFormat::Yuv420 => {
            let mut data = luma.to_vec();
            let (cw, ch) = (w / 2, h / 2);
            for plane in 0..2u8 {
                for cy in 0..ch {
                    for cx in 0..cw {
                        let l = luma[(2 * cy * w + 2 * cx) as usize];
                        data.push(l / 2 + 40 * plane + 20);
                    }
                }
            }
            debug_assert_eq!(data.len(), n * 3 / 2);
            data
        }
    }
}

pub fn moving_square(w: u32, h: u32, frames: u64, format: PixelFormat) -> Vec<Frame> {
    moving_square_gray(w, h, frames)
        .into_iter()
        .map(|f| {
            let data = colourise(f.data(), w, h, format);
            Frame::new(f.index(), w, h, format, data).unwrap()
        })
        .collect()
}

/// Random small video: mostly static background with blocks that appear,
/// move and vanish, plus occasional low-amplitude noise frames.
pub fn random_video(rng: &mut ChaCha8Rng) -> (StreamHeader, Vec<Frame>) {
    let format = [
        PixelFormat::Gray8,
        PixelFormat::Rgb24,
        PixelFormat::Yuv420,
        PixelFormat::Yuv444,
    ][rng.gen_range(0..4)];
    let even = format == PixelFormat::Yuv420;
    let dim = |rng: &mut ChaCha8Rng| {
        let d = rng.gen_range(1..=64u32);
        if even {
            (d + 1) / 2 * 2
        } else {
            d
        }
    };
    let (w, h) = (dim(rng), dim(rng));
    let frames = rng.gen_range(1..=40u64);
    let base: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
    let mut luma = base.clone();
    let video = (0..frames)
        .map(|i| {
            match rng.gen_range(0..10) {
                0..=3 => {}
                4..=6 => {
                    let (bw, bh) = (rng.gen_range(1..=w), rng.gen_range(1..=h));
                    let (x0, y0) = (rng.gen_range(0..=w - bw), rng.gen_range(0..=h - bh));
                    let value: u8 = rng.gen();
                    for y in y0..y0 + bh {
                        for x in x0..x0 + bw {
                            luma[(y * w + x) as usize] = value;
                        }
                    }
                }
                7 => luma.copy_from_slice(&base),
                _ => {
                    for v in luma.iter_mut() {
                        *v = v.saturating_add_signed(rng.gen_range(-3..=3));
                    }
                }
            }
            let data = colourise(&luma, w, h, format);
            Frame::new(i, w, h, format, data).unwrap()
        })
        .collect();
    (header(w, h, format), video)
}

pub fn random_config(rng: &mut ChaCha8Rng) -> MotionConfig {
    MotionConfig {
        threshold: rng.gen_range(1..=60),
        downscale: rng.gen_range(1..=4),
        buffer_radius: rng.gen_range(0..=3),
        keyframe_interval: rng.gen_range(1..=8),
        min_motion_pixels: rng.gen_range(1..=12),
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Brute-force oracle: every quantity recomputed per pixel with plain loops.

pub fn oracle_luma(frame: &Frame, x: u32, y: u32) -> u8 {
    let i = (y * frame.width() + x) as usize;
    match frame.pixel_format() {
        PixelFormat::Rgb24 => {
            let p = &frame.data()[3 * i..3 * i + 3];
            let sum = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
            ((sum + 500) / 1000) as u8
        }
        _ => frame.data()[i],
    }
}

/// Mean luma of analysis cell (cx, cy), rounded half up.
pub fn oracle_cell(frame: &Frame, s: u32, cx: u32, cy: u32) -> u8 {
    let (mut sum, mut count) = (0u32, 0u32);
    for y in cy * s..(cy * s + s).min(frame.height()) {
        for x in cx * s..(cx * s + s).min(frame.width()) {
            sum += oracle_luma(frame, x, y) as u32;
            count += 1;
        }
    }
    ((2 * sum + count) / (2 * count)) as u8
}

/// Which pixels survive masking when going from `prev` to `curr`, and how
/// many analysis cells exceeded the threshold.
pub fn oracle_mask(prev: &Frame, curr: &Frame, config: &MotionConfig) -> (Vec<bool>, u64) {
    let s = config.downscale;
    let (w, h) = (curr.width(), curr.height());
    let (gw, gh) = ((w + s - 1) / s, (h + s - 1) / s);
    let mut moving = vec![false; (gw * gh) as usize];
    for cy in 0..gh {
        for cx in 0..gw {
            let a = oracle_cell(prev, s, cx, cy) as i32;
            let b = oracle_cell(curr, s, cx, cy) as i32;
            moving[(cy * gw + cx) as usize] = (a - b).abs() > config.threshold as i32;
        }
    }
    let count = moving.iter().filter(|&&m| m).count() as u64;
    let r = config.buffer_radius as i64;
    let mut keep = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let (cx, cy) = ((x / s) as i64, (y / s) as i64);
            'search: for ny in cy - r..=cy + r {
                for nx in cx - r..=cx + r {
                    if nx >= 0
                        && ny >= 0
                        && nx < gw as i64
                        && ny < gh as i64
                        && moving[(ny * gw as i64 + nx) as usize]
                    {
                        keep[(y * w + x) as usize] = true;
                        break 'search;
                    }
                }
            }
        }
    }
    (keep, count)
}

/// Expected bytes of a masked frame given the per-pixel keep map.
pub fn oracle_masked(frame: &Frame, keep: &[bool]) -> Vec<u8> {
    let (w, h) = (frame.width() as usize, frame.height() as usize);
    let n = w * h;
    let data = frame.data();
    let mut out = data.to_vec();
    match frame.pixel_format() {
        PixelFormat::Gray8 => (0..n).for_each(|i| {
            if !keep[i] {
                out[i] = 0
            }
        }),
        PixelFormat::Rgb24 => (0..n).for_each(|i| {
            if !keep[i] {
                out[3 * i..3 * i + 3].fill(0)
            }
        }),
        PixelFormat::Yuv444 => (0..3 * n).for_each(|i| {
            if !keep[i % n] {
                out[i] = 0
            }
        }),
        PixelFormat::Yuv420 => {
            (0..n).for_each(|i| {
                if !keep[i] {
                    out[i] = 0
                }
            });
            let cw = w / 2;
            for plane in 0..2 {
                for cy in 0..h / 2 {
                    for cx in 0..cw {
                        let any = [(0, 0), (1, 0), (0, 1), (1, 1)]
                            .iter()
                            .any(|(dx, dy)| keep[(2 * cy + dy) * w + 2 * cx + dx]);
                        if !any {
                            out[n + plane * n / 4 + cy * cw + cx] = 0;
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleStep {
    Drop,
    Full,
    Masked(Vec<bool>),
}

/// Whole-video decision sequence, written directly from the rules.
pub fn oracle_decisions(frames: &[Frame], config: &MotionConfig) -> Vec<OracleStep> {
    let mut steps = Vec::new();
    let mut since_key = 0u32;
    let mut in_sequence = false;
    for (i, frame) in frames.iter().enumerate() {
        if i == 0 {
            steps.push(OracleStep::Full);
            in_sequence = true;
            continue;
        }
        let (keep, count) = oracle_mask(&frames[i - 1], frame, config);
        if count < config.min_motion_pixels {
            in_sequence = false;
            steps.push(OracleStep::Drop);
            continue;
        }
        since_key += 1;
        if !in_sequence || since_key >= config.keyframe_interval {
            since_key = 0;
            steps.push(OracleStep::Full);
        } else {
            steps.push(OracleStep::Masked(keep));
        }
        in_sequence = true;
    }
    steps
}

pub fn oracle_compress(frames: &[Frame], config: &MotionConfig) -> (Vec<Vec<u8>>, Vec<SidecarRecord>) {
    let mut video = Vec::new();
    let mut rows = Vec::new();
    for (frame, step) in frames.iter().zip(oracle_decisions(frames, config)) {
        let (bytes, full) = match step {
            OracleStep::Drop => continue,
            OracleStep::Full => (frame.data().to_vec(), true),
            OracleStep::Masked(keep) => (oracle_masked(frame, &keep), false),
        };
        rows.push(SidecarRecord {
            input_frame: frame.index(),
            output_frame: rows.len() as u64,
            full_frame: full,
        });
        video.push(bytes);
    }
    (video, rows)
}
