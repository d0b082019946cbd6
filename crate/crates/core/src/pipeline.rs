//! Reader, analysis and writer running as three threads joined by bounded
//! queues, plus a sequential reference used to check it.

use std::io::Write;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::frame_io::{Frame, FrameSink, FrameSource};
use crate::metrics::CompressionStats;
use crate::motion::{AnalysisOutcome, AnalysisState, MotionConfig};
use crate::scalar::Real;
use crate::sidecar::{SidecarRecord, SidecarWriter};

pub const DEFAULT_QUEUE_CAPACITY: usize = 64;

/// Queue item; `End` is sent exactly once, after the last item.
enum Packet<T> {
    Item(T),
    End,
}

/// Why a stage stopped early.
enum Halt {
    Failed(Error),
    /// A neighbouring stage went away; its own error is the one to report.
    Disconnected,
}

impl From<Error> for Halt {
    fn from(err: Error) -> Self {
        Halt::Failed(err)
    }
}

type StageResult<T> = std::result::Result<T, Halt>;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport<T> {
    pub frames_in: u64,
    pub frames_out: u64,
    pub wall_time: Duration,
    /// Input frames per second of wall time.
    pub processing_speed: T,
    pub stats: CompressionStats<T>,
}

fn send<T>(tx: &SyncSender<Packet<T>>, packet: Packet<T>) -> StageResult<()> {
    tx.send(packet).map_err(|_| Halt::Disconnected)
}

fn recv<T>(rx: &Receiver<Packet<T>>) -> StageResult<Option<T>> {
    match rx.recv() {
        Ok(Packet::Item(item)) => Ok(Some(item)),
        Ok(Packet::End) => Ok(None),
        Err(_) => Err(Halt::Disconnected),
    }
}

fn reader_stage<S: FrameSource + ?Sized>(source: &mut S, tx: SyncSender<Packet<Frame>>) -> StageResult<u64> {
    let mut count = 0;
    while let Some(frame) = source.read_frame()? {
        send(&tx, Packet::Item(frame))?;
        count += 1;
    }
    send(&tx, Packet::End)?;
    Ok(count)
}

fn analysis_stage(
    config: &MotionConfig,
    rx: Receiver<Packet<Frame>>,
    tx: SyncSender<Packet<(Frame, SidecarRecord)>>,
) -> StageResult<()> {
    let mut state = AnalysisState::new();
    while let Some(frame) = recv(&rx)? {
        if let Some(kept) = state.step(config, frame)?.into_emitted() {
            send(&tx, Packet::Item(kept))?;
        }
    }
    send(&tx, Packet::End)
}

fn writer_stage<V: FrameSink + ?Sized, W: Write>(
    video: &mut V,
    sidecar: &mut SidecarWriter<W>,
    rx: Receiver<Packet<(Frame, SidecarRecord)>>,
) -> StageResult<u64> {
    let mut written = 0;
    let result: StageResult<()> = (|| {
        while let Some((frame, record)) = recv(&rx)? {
            video.write_frame(&frame)?;
            sidecar.write(&record)?;
            written += 1;
        }
        Ok(())
    })();
    // Sinks are closed on every path; a close failure only matters on success.
    let closed = video.finish().and_then(|_| sidecar.flush());
    result?;
    closed?;
    Ok(written)
}

fn first_failure(results: [(&'static str, Option<Halt>); 3]) -> Error {
    for (stage, halt) in results {
        if let Some(Halt::Failed(err)) = halt {
            return Error::StageFailure {
                stage,
                source: Box::new(err),
            };
        }
    }
    Error::StageFailure {
        stage: "pipeline",
        source: Box::new(Error::SinkUnavailable("stage disconnected".into())),
    }
}

/// Compresses `source` into `video` and `sidecar` with the three stages
/// running concurrently. `queue_capacity` bounds each inter-stage queue.
pub fn run_pipeline<T, S, V, W>(
    source: &mut S,
    config: &MotionConfig,
    video: &mut V,
    sidecar: W,
    queue_capacity: usize,
) -> Result<PipelineReport<T>>
where
    T: Real,
    S: FrameSource + ?Sized,
    V: FrameSink + ?Sized,
    W: Write + Send,
{
    config.validate()?;
    if queue_capacity == 0 {
        return Err(Error::InvalidConfig("queue capacity must be at least 1".into()));
    }
    let (src, dst) = (source.header(), video.header());
    if (src.width, src.height, src.pixel_format) != (dst.width, dst.height, dst.pixel_format) {
        return Err(Error::DimensionMismatch(format!(
            "source is {}x{} {}, video sink is {}x{} {}",
            src.width, src.height, src.pixel_format, dst.width, dst.height, dst.pixel_format
        )));
    }
    let mut sidecar = SidecarWriter::new(sidecar)?;

    let started = Instant::now();
    let (frame_tx, frame_rx) = sync_channel(queue_capacity);
    let (kept_tx, kept_rx) = sync_channel(queue_capacity);
    let (read, analysed, written) = thread::scope(|scope| {
        let reader = scope.spawn(|| reader_stage(source, frame_tx));
        let analysis = scope.spawn(|| analysis_stage(config, frame_rx, kept_tx));
        let writer = scope.spawn(|| writer_stage(video, &mut sidecar, kept_rx));
        (
            reader.join().expect("reader thread panicked"),
            analysis.join().expect("analysis thread panicked"),
            writer.join().expect("writer thread panicked"),
        )
    });
    let wall_time = started.elapsed();

    let (frames_in, frames_out) = match (read, analysed, written) {
        (Ok(frames_in), Ok(()), Ok(frames_out)) => (frames_in, frames_out),
        (read, analysed, written) => {
            return Err(first_failure([
                ("reader", read.err()),
                ("analysis", analysed.err()),
                ("writer", written.err()),
            ]))
        }
    };
    sidecar.into_inner()?;

    let seconds = T::from_f64(wall_time.as_secs_f64().max(1e-9)).unwrap();
    Ok(PipelineReport {
        frames_in,
        frames_out,
        wall_time,
        processing_speed: T::from_count(frames_in) / seconds,
        stats: CompressionStats {
            frames_in,
            frames_out,
            ..CompressionStats::default()
        },
    })
}

/// Single-threaded fold of the analysis over `frames`; defines the output
/// the concurrent pipeline must reproduce.
pub fn reference_compress(
    frames: impl IntoIterator<Item = Frame>,
    config: &MotionConfig,
) -> Result<(Vec<Frame>, Vec<SidecarRecord>)> {
    config.validate()?;
    let mut state = AnalysisState::new();
    let (mut kept, mut records) = (Vec::new(), Vec::new());
    for frame in frames {
        if let AnalysisOutcome::Masked { frame, record } | AnalysisOutcome::FullFrame { frame, record } =
            state.step(config, frame)?
        {
            kept.push(frame);
            records.push(record);
        }
    }
    Ok((kept, records))
}
