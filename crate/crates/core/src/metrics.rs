//! Compression and pixel-change statistics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame_io::FrameSource;
use crate::motion::to_grayscale;
use crate::scalar::Real;

/// `100 * (before - after) / before`, rounded half-up to hundredths using
/// exact integer arithmetic.
fn exact_reduction<T: Real>(before: u64, after: u64) -> Result<T> {
    if before == 0 {
        return Err(Error::ZeroInput);
    }
    if after > before {
        return Err(Error::InvalidCounts(format!(
            "output {after} exceeds input {before}"
        )));
    }
    let (before, removed) = (before as u128, (before - after) as u128);
    let hundredths = (20_000 * removed + before) / (2 * before);
    Ok(T::from_u128(hundredths).unwrap() / T::hundred())
}

/// Percentage of frames removed.
pub fn frame_reduction<T: Real>(frames_in: u64, frames_out: u64) -> Result<T> {
    exact_reduction(frames_in, frames_out)
}

/// Percentage of bytes removed, from exact byte counts.
pub fn byte_reduction<T: Real>(bytes_in: u64, bytes_out: u64) -> Result<T> {
    exact_reduction(bytes_in, bytes_out)
}

/// Percentage of size removed, for sizes in any unit (e.g. megabytes).
pub fn size_reduction<T: Real>(size_in: T, size_out: T) -> Result<T> {
    if size_in <= T::zero() {
        return Err(Error::ZeroInput);
    }
    if size_out < T::zero() || size_out > size_in {
        return Err(Error::InvalidCounts(format!(
            "output {size_out} outside [0, {size_in}]"
        )));
    }
    Ok(((size_in - size_out) / size_in * T::hundred()).round2())
}

pub fn mean<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    values.iter().fold(T::zero(), |acc, v| acc + *v) / T::from_count(values.len() as u64)
}

pub fn median<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in statistics"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / T::from_u8(2).unwrap()
    }
}

/// Sample standard deviation; a single sample reports zero.
pub fn sample_std_dev<T: Real>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let m = mean(values);
    let ss = values.iter().fold(T::zero(), |acc, v| acc + (*v - m) * (*v - m));
    (ss / T::from_count(values.len() as u64 - 1)).sqrt()
}

/// Per-pair changed-pixel percentages with their mean and median.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelChangeSeries<T> {
    pub per_frame: Vec<T>,
    pub mean: T,
    pub median: T,
}

/// Share of pixels whose luma changes by more than `threshold` between each
/// pair of consecutive frames.
pub fn pixel_change_series<T: Real, S: FrameSource + ?Sized>(
    source: &mut S,
    threshold: u8,
) -> Result<PixelChangeSeries<T>> {
    let mut prev = match source.read_frame()? {
        Some(frame) => to_grayscale(&frame),
        None => return Err(Error::TooFewFrames(0)),
    };
    let mut per_frame = Vec::new();
    while let Some(frame) = source.read_frame()? {
        let curr = to_grayscale(&frame);
        let changed = prev
            .data
            .iter()
            .zip(&curr.data)
            .filter(|(a, b)| a.abs_diff(**b) > threshold)
            .count();
        let total = curr.data.len() as u64;
        per_frame.push(T::from_count(changed as u64) * T::hundred() / T::from_count(total));
        prev = curr;
    }
    if per_frame.is_empty() {
        return Err(Error::TooFewFrames(1));
    }
    Ok(PixelChangeSeries {
        mean: mean(&per_frame),
        median: median(&per_frame),
        per_frame,
    })
}

/// Raw counters for one processed video.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompressionStats<T> {
    pub frames_in: u64,
    pub frames_out: u64,
    pub bytes_in: Option<u64>,
    /// Compressed video plus its sidecar.
    pub bytes_out: Option<u64>,
    pub pixel_change: Option<PixelChangeSeries<T>>,
}

/// Presentation form of [`CompressionStats`]: percentages at two decimals,
/// fields in a fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport<T> {
    pub frames_in: u64,
    pub frames_out: u64,
    pub frame_reduction_pct: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bytes_in: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bytes_out: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_reduction_pct: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_change_mean_pct: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_change_median_pct: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_change_pct: Option<Vec<T>>,
}

pub fn stats_report<T: Real>(stats: &CompressionStats<T>) -> Result<StatsReport<T>> {
    let frame_reduction_pct = frame_reduction(stats.frames_in, stats.frames_out)?;
    let size_reduction_pct = match (stats.bytes_in, stats.bytes_out) {
        (Some(bytes_in), Some(bytes_out)) => Some(byte_reduction(bytes_in, bytes_out)?),
        _ => None,
    };
    let pc = stats.pixel_change.as_ref();
    Ok(StatsReport {
        frames_in: stats.frames_in,
        frames_out: stats.frames_out,
        frame_reduction_pct,
        bytes_in: stats.bytes_in,
        bytes_out: stats.bytes_out,
        size_reduction_pct,
        pixel_change_mean_pct: pc.map(|p| p.mean.round2()),
        pixel_change_median_pct: pc.map(|p| p.median.round2()),
        pixel_change_pct: pc.map(|p| p.per_frame.iter().map(|v| v.round2()).collect()),
    })
}

/// Pixel-change statistics on their own, for videos without a processed pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelChangeReport<T> {
    pub threshold: u8,
    pub pairs: u64,
    pub mean_pct: T,
    pub median_pct: T,
    pub per_frame_pct: Vec<T>,
}

impl<T: Real> PixelChangeReport<T> {
    pub fn new(series: &PixelChangeSeries<T>, threshold: u8) -> Self {
        PixelChangeReport {
            threshold,
            pairs: series.per_frame.len() as u64,
            mean_pct: series.mean.round2(),
            median_pct: series.median.round2(),
            per_frame_pct: series.per_frame.iter().map(|v| v.round2()).collect(),
        }
    }

    pub fn to_table(&self) -> String {
        format!(
            "{:>6} {:>10} {:>12} {:>12}\n{:>6} {:>10} {:>12.2} {:>12.2}\n",
            "Thresh", "Pairs", "Mean (%)", "Median (%)",
            self.threshold, self.pairs, self.mean_pct, self.median_pct
        )
    }
}

fn opt<V: std::fmt::Display>(value: &Option<V>, precision: usize) -> String {
    match value {
        Some(v) => format!("{v:.precision$}"),
        None => "-".to_string(),
    }
}

impl<T: Real> StatsReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidCounts(format!("bad stats JSON: {e}")))
    }

    /// Human-readable table laid out like a per-dataset results row.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>12} {:>14} {:>12} {:>14} {:>16} {:>18}",
            "Raw frames", "Raw bytes", "Out frames", "Out bytes", "Frame reduc (%)", "Size reduc (%)"
        );
        let _ = writeln!(
            out,
            "{:>12} {:>14} {:>12} {:>14} {:>16.2} {:>18}",
            self.frames_in,
            opt(&self.bytes_in, 0),
            self.frames_out,
            opt(&self.bytes_out, 0),
            self.frame_reduction_pct,
            opt(&self.size_reduction_pct, 2)
        );
        if let (Some(mean), Some(median)) = (&self.pixel_change_mean_pct, &self.pixel_change_median_pct) {
            let _ = writeln!(out, "pixel change per frame: mean {mean:.2}%, median {median:.2}%");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_io::{Frame, PixelFormat, StreamHeader, VecSource};
    use proptest::prelude::*;

    #[test]
    fn frame_reduction_table_rows() {
        assert_eq!(frame_reduction::<f64>(790, 775).unwrap(), 1.90);
        assert_eq!(frame_reduction::<f64>(56664, 14331).unwrap(), 74.71);
        assert_eq!(frame_reduction::<f64>(5445, 4166).unwrap(), 23.49);
        assert_eq!(frame_reduction::<f64>(22269, 9989).unwrap(), 55.14);
        assert_eq!(frame_reduction::<f64>(5471, 3862).unwrap(), 29.41);
        assert_eq!(frame_reduction::<f32>(300, 300).unwrap(), 0.0);
        // 167489 / 179912 = 0.930949...
        assert_eq!(frame_reduction::<f64>(179912, 12423).unwrap(), 93.09);
    }

    #[test]
    fn size_reduction_table_rows() {
        assert_eq!(size_reduction(10895.05f64, 266.02).unwrap(), 97.56);
        assert_eq!(size_reduction(1303.21f64, 52.92).unwrap(), 95.94);
        assert_eq!(size_reduction(327.48f64, 70.61).unwrap(), 78.44);
        assert_eq!(size_reduction(23.59f64, 2.47).unwrap(), 89.53);
        assert_eq!(size_reduction(5.0f32, 5.0).unwrap(), 0.0);
        assert_eq!(byte_reduction::<f64>(1000, 1000).unwrap(), 0.0);
    }

    #[test]
    fn reduction_errors() {
        assert!(matches!(frame_reduction::<f64>(0, 0), Err(Error::ZeroInput)));
        assert!(matches!(frame_reduction::<f64>(3, 4), Err(Error::InvalidCounts(_))));
        assert!(matches!(size_reduction(0.0f64, 0.0), Err(Error::ZeroInput)));
        assert!(matches!(size_reduction(1.0f64, 2.0), Err(Error::InvalidCounts(_))));
    }

    #[test]
    fn summaries() {
        assert_eq!(mean(&[1.0f64, 2.0, 6.0]), 3.0);
        assert_eq!(median(&[5.0f64, 1.0, 3.0]), 3.0);
        assert_eq!(median(&[4.0f64, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(sample_std_dev(&[7.0f64]), 0.0);
        assert!((sample_std_dev(&[2.0f64, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]) - 2.13809).abs() < 1e-5);
    }

    fn gray_video(w: u32, h: u32, frames: Vec<Vec<u8>>) -> VecSource {
        let header = StreamHeader::new(w, h, 30, 1, PixelFormat::Gray8).unwrap();
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, d)| Frame::new(i as u64, w, h, PixelFormat::Gray8, d).unwrap())
            .collect();
        VecSource::new(header, frames)
    }

    fn square_frame(x0: u32) -> Vec<u8> {
        let mut d = vec![40u8; 100 * 100];
        for y in 45..55 {
            for x in x0..x0 + 10 {
                d[y * 100 + x as usize] = 220;
            }
        }
        d
    }

    #[test]
    fn pixel_change_examples() {
        let s: PixelChangeSeries<f64> =
            pixel_change_series(&mut gray_video(4, 4, vec![vec![9; 16]; 5]), 0).unwrap();
        assert_eq!(s.per_frame, vec![0.0; 4]);
        assert_eq!((s.mean, s.median), (0.0, 0.0));

        let alternating = (0..6).map(|i| vec![if i % 2 == 0 { 0 } else { 255 }; 16]).collect();
        let s: PixelChangeSeries<f64> =
            pixel_change_series(&mut gray_video(4, 4, alternating), 25).unwrap();
        assert_eq!(s.per_frame, vec![100.0; 5]);
        assert_eq!((s.mean, s.median), (100.0, 100.0));
    }

    #[test]
    fn moving_square_changes_two_columns() {
        let frames: Vec<Vec<u8>> = (0..20).map(|i| square_frame(10 + i)).collect();
        // Counting oracle: pixels that differ between consecutive frames.
        let oracle: Vec<f64> = frames
            .windows(2)
            .map(|p| p[0].iter().zip(&p[1]).filter(|(a, b)| a != b).count() as f64 / 100.0)
            .collect();
        assert!(oracle.iter().all(|&v| v == 0.2));
        let s: PixelChangeSeries<f64> =
            pixel_change_series(&mut gray_video(100, 100, frames), 25).unwrap();
        assert_eq!(s.per_frame, oracle);
    }

    #[test]
    fn pixel_change_needs_two_frames() {
        assert!(matches!(
            pixel_change_series::<f64, _>(&mut gray_video(2, 2, vec![vec![0; 4]]), 0),
            Err(Error::TooFewFrames(1))
        ));
        assert!(matches!(
            pixel_change_series::<f64, _>(&mut gray_video(2, 2, vec![]), 0),
            Err(Error::TooFewFrames(0))
        ));
    }

    #[test]
    fn report_json_has_two_decimal_reduction_and_round_trips() {
        let stats = CompressionStats::<f64> {
            frames_in: 790,
            frames_out: 775,
            bytes_in: Some(23_590_000),
            bytes_out: Some(2_470_000),
            pixel_change: None,
        };
        let report = stats_report(&stats).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"frame_reduction_pct\": 1.9"), "{json}");
        assert!(json.contains("\"size_reduction_pct\": 89.53"), "{json}");
        assert_eq!(StatsReport::<f64>::from_json(&json).unwrap(), report);
        assert!(report.to_table().contains("1.90"));

        let empty = CompressionStats::<f64>::default();
        assert!(matches!(stats_report(&empty), Err(Error::ZeroInput)));
    }

    proptest! {
        #[test]
        fn reductions_bounded_and_antitone(a in 1u64..1_000_000, b in 0u64..1_000_000, c in 0u64..1_000_000) {
            let (lo, hi) = (b.min(c).min(a), b.max(c).min(a));
            let r_lo: f64 = frame_reduction(a, lo).unwrap();
            let r_hi: f64 = frame_reduction(a, hi).unwrap();
            prop_assert!((0.0..=100.0).contains(&r_lo));
            prop_assert!(r_hi <= r_lo);
            let s_lo = size_reduction(a as f64, lo as f64).unwrap();
            let s_hi = size_reduction(a as f64, hi as f64).unwrap();
            prop_assert!((0.0..=100.0).contains(&s_hi) && s_hi <= s_lo);
        }

        #[test]
        fn exact_change_count(changed in proptest::collection::btree_set(0usize..64, 0..64)) {
            let a = vec![0u8; 64];
            let mut b = a.clone();
            for &i in &changed {
                b[i] = 1;
            }
            let s: PixelChangeSeries<f64> =
                pixel_change_series(&mut gray_video(8, 8, vec![a, b]), 0).unwrap();
            prop_assert_eq!(s.per_frame[0], 100.0 * changed.len() as f64 / 64.0);
        }
    }
}
