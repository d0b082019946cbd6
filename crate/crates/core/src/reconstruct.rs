//! Rebuilds tracker-ready frames from a compressed video and its sidecar.
//!
//! Each kept frame yields two outputs: the compressed colour frame as stored,
//! and a grayscale frame where pixels outside the motion region are restored
//! from the most recent keyframe.

use std::io::Write;

use crate::error::{Error, Result};
use crate::frame_io::{Frame, FrameSink, FrameSource};
use crate::motion::{to_grayscale, GrayFrame};
use crate::sidecar::SidecarRecord;

fn check_same(a: &GrayFrame, b: &GrayFrame) -> Result<()> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// Per-pixel `|reference - motion|`.
pub fn env_frame(reference: &GrayFrame, motion: &GrayFrame) -> Result<GrayFrame> {
    check_same(reference, motion)?;
    let data = reference
        .data
        .iter()
        .zip(&motion.data)
        .map(|(r, m)| r.abs_diff(*m))
        .collect();
    GrayFrame::new(motion.width, motion.height, data)
}

/// Per-pixel `env + motion`, saturating at 255.
pub fn rec_frame(env: &GrayFrame, motion: &GrayFrame) -> Result<GrayFrame> {
    check_same(env, motion)?;
    let data = env
        .data
        .iter()
        .zip(&motion.data)
        .map(|(e, m)| e.saturating_add(*m))
        .collect();
    GrayFrame::new(motion.width, motion.height, data)
}

/// Grayscale copy of the latest keyframe.
#[derive(Clone, Debug, Default)]
pub struct ReferenceStore {
    pub ref_gray: Option<GrayFrame>,
    pub ref_input_index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedFrame {
    /// Position in the compressed video.
    pub position: u64,
    /// Frame number in the original, uncompressed video.
    pub input_frame: u64,
    pub full_frame: bool,
    /// The compressed frame as stored, for appearance-based detectors.
    pub color: Frame,
    /// Motion plus restored environment, for foreground/background detectors.
    pub fgbg: GrayFrame,
}

/// Streaming reconstruction; yields one item per compressed frame.
pub struct Reconstructor<'a, S: ?Sized> {
    source: &'a mut S,
    records: std::vec::IntoIter<SidecarRecord>,
    store: ReferenceStore,
    position: u64,
    done: bool,
}

pub fn reconstruct_stream<S: FrameSource + ?Sized>(
    source: &mut S,
    records: Vec<SidecarRecord>,
) -> Reconstructor<'_, S> {
    Reconstructor {
        source,
        records: records.into_iter(),
        store: ReferenceStore::default(),
        position: 0,
        done: false,
    }
}

impl<S: FrameSource + ?Sized> Reconstructor<'_, S> {
    pub fn reference(&self) -> &ReferenceStore {
        &self.store
    }

    fn step(&mut self) -> Result<Option<ReconstructedFrame>> {
        let frame = self.source.read_frame()?;
        let record = self.records.next();
        let (frame, record) = match (frame, record) {
            (None, None) => return Ok(None),
            (Some(_), None) => {
                return Err(Error::SidecarMismatch(format!(
                    "video has more than the sidecar's {} frames",
                    self.position
                )))
            }
            (None, Some(_)) => {
                return Err(Error::SidecarMismatch(format!(
                    "video ends after {} frames, sidecar has {}",
                    self.position,
                    self.position + 1 + self.records.len() as u64
                )))
            }
            (Some(frame), Some(record)) => (frame, record),
        };
        let gray = to_grayscale(&frame);
        let fgbg = if record.full_frame {
            self.store.ref_gray = Some(gray.clone());
            self.store.ref_input_index = Some(record.input_frame);
            gray
        } else {
            let reference = self
                .store
                .ref_gray
                .as_ref()
                .ok_or(Error::MissingReference(record.input_frame))?;
            rec_frame(&env_frame(reference, &gray)?, &gray)?
        };
        let item = ReconstructedFrame {
            position: self.position,
            input_frame: record.input_frame,
            full_frame: record.full_frame,
            color: frame,
            fgbg,
        };
        self.position += 1;
        Ok(Some(item))
    }
}

impl<S: FrameSource + ?Sized> Iterator for Reconstructor<'_, S> {
    type Item = Result<ReconstructedFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.step().transpose();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

pub const ALIGNMENT_HEADER: &str = "output_frame,input_frame,full_frame\n";

/// Runs a full reconstruction into the two frame sinks and an alignment CSV.
/// `fgbg` must be a grayscale sink with the source's dimensions.
pub fn reconstruct_to<S, A, B, W>(
    source: &mut S,
    records: Vec<SidecarRecord>,
    color: &mut A,
    fgbg: &mut B,
    mut alignment: W,
) -> Result<u64>
where
    S: FrameSource + ?Sized,
    A: FrameSink + ?Sized,
    B: FrameSink + ?Sized,
    W: Write,
{
    let gray_header = fgbg.header().clone();
    alignment.write_all(ALIGNMENT_HEADER.as_bytes())?;
    let mut count = 0;
    for item in reconstruct_stream(source, records) {
        let item = item?;
        color.write_frame(&item.color)?;
        let gray = Frame::new(
            item.input_frame,
            item.fgbg.width,
            item.fgbg.height,
            gray_header.pixel_format,
            item.fgbg.data,
        )?;
        fgbg.write_frame(&gray)?;
        writeln!(
            alignment,
            "{},{},{}",
            item.position, item.input_frame, item.full_frame as u8
        )?;
        count += 1;
    }
    color.finish()?;
    fgbg.finish()?;
    alignment.flush()?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_io::{PixelFormat, StreamHeader, VecSource};
    use proptest::prelude::*;

    fn px(v: u8) -> GrayFrame {
        GrayFrame::new(1, 1, vec![v]).unwrap()
    }

    #[test]
    fn env_examples() {
        let reference = GrayFrame::new(2, 1, vec![100, 7]).unwrap();
        assert_eq!(env_frame(&reference, &GrayFrame::new(2, 1, vec![0, 0]).unwrap()).unwrap(), reference);
        assert_eq!(env_frame(&reference, &reference).unwrap().data, vec![0, 0]);
        assert_eq!(env_frame(&px(100), &px(180)).unwrap().data, vec![80]);
        assert!(env_frame(&px(1), &reference).is_err());
    }

    #[test]
    fn rec_examples() {
        // |100 - 180| + 180 = 260, saturated.
        let env = env_frame(&px(100), &px(180)).unwrap();
        assert_eq!(rec_frame(&env, &px(180)).unwrap().data, vec![255]);
        let env = env_frame(&px(100), &px(0)).unwrap();
        assert_eq!(rec_frame(&env, &px(0)).unwrap().data, vec![100]);
        let env = env_frame(&px(42), &px(42)).unwrap();
        assert_eq!(rec_frame(&env, &px(42)).unwrap().data, vec![42]);
    }

    fn header() -> StreamHeader {
        StreamHeader::new(2, 2, 30, 1, PixelFormat::Gray8).unwrap()
    }

    fn frame(i: u64, data: [u8; 4]) -> Frame {
        Frame::new(i, 2, 2, PixelFormat::Gray8, data.to_vec()).unwrap()
    }

    fn rec(input_frame: u64, output_frame: u64, full_frame: bool) -> SidecarRecord {
        SidecarRecord {
            input_frame,
            output_frame,
            full_frame,
        }
    }

    #[test]
    fn single_keyframe_passes_through_both_outputs() {
        let key = frame(0, [1, 2, 3, 4]);
        let mut src = VecSource::new(header(), vec![key.clone()]);
        let out: Vec<_> = reconstruct_stream(&mut src, vec![rec(0, 0, true)])
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].color, key);
        assert_eq!(out[0].fgbg.data, vec![1, 2, 3, 4]);
    }

    #[test]
    fn motion_frames_restore_background() {
        let frames = vec![frame(0, [50, 60, 70, 80]), frame(1, [0, 200, 70, 0])];
        let mut src = VecSource::new(header(), frames);
        let out: Vec<_> = reconstruct_stream(&mut src, vec![rec(0, 0, true), rec(9, 1, false)])
            .collect::<Result<_>>()
            .unwrap();
        // 0 -> background; 200 -> |60-200|+200 saturates; 70 == ref -> 70.
        assert_eq!(out[1].fgbg.data, vec![50, 255, 70, 80]);
        assert_eq!(out[1].input_frame, 9);
    }

    #[test]
    fn count_disagreement_is_sidecar_mismatch() {
        let frames: Vec<Frame> = (0..4).map(|i| frame(i, [i as u8; 4])).collect();
        let rows: Vec<SidecarRecord> = (0..5).map(|i| rec(i, i, true)).collect();
        let mut src = VecSource::new(header(), frames.clone());
        let result: Result<Vec<_>> = reconstruct_stream(&mut src, rows).collect();
        assert!(matches!(result, Err(Error::SidecarMismatch(_))));

        let rows: Vec<SidecarRecord> = (0..3).map(|i| rec(i, i, true)).collect();
        let mut src = VecSource::new(header(), frames);
        let result: Result<Vec<_>> = reconstruct_stream(&mut src, rows).collect();
        assert!(matches!(result, Err(Error::SidecarMismatch(_))));
    }

    #[test]
    fn motion_before_keyframe_is_missing_reference() {
        let mut src = VecSource::new(header(), vec![frame(0, [0; 4])]);
        let result: Result<Vec<_>> = reconstruct_stream(&mut src, vec![rec(3, 0, false)]).collect();
        assert!(matches!(result, Err(Error::MissingReference(3))));
    }

    proptest! {
        #[test]
        fn reconstruction_identities(
            pairs in proptest::collection::vec((any::<u8>(), any::<u8>(), 0u8..3), 1..64)
        ) {
            let n = pairs.len() as u32;
            let reference = GrayFrame::new(n, 1, pairs.iter().map(|p| p.0).collect()).unwrap();
            // Bias motion values toward the two identity cases.
            let motion_data = pairs
                .iter()
                .map(|&(r, m, pick)| match pick { 0 => 0, 1 => r, _ => m })
                .collect();
            let motion = GrayFrame::new(n, 1, motion_data).unwrap();
            let env = env_frame(&reference, &motion).unwrap();
            let recf = rec_frame(&env, &motion).unwrap();
            for i in 0..n as usize {
                let (r, m, e, out) = (reference.data[i], motion.data[i], env.data[i], recf.data[i]);
                prop_assert!(out >= m && out >= e);
                if m == 0 || m == r {
                    prop_assert_eq!(out, r);
                }
            }
        }
    }
}
