//! Motion-analysis video compression for camera traps.
//!
//! Frames without inter-frame motion are dropped, moving regions (plus a
//! buffer around them) are kept over a blacked-out background, and whole
//! keyframes are kept at the start of every motion sequence and at a fixed
//! cadence inside it. A CSV sidecar maps every kept frame back to its input
//! frame number so the timeline, and a tracker-friendly background, can be
//! reconstructed later.

pub mod cli;
pub mod error;
pub mod frame_io;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod reconstruct;
pub mod scalar;
pub mod sidecar;

pub use error::{Error, Result};
pub use frame_io::{Frame, FrameSink, FrameSource, PixelFormat, StreamHeader};
pub use motion::{AnalysisOutcome, AnalysisState, GrayFrame, MotionConfig, MotionMask, OutcomeKind};
pub use pipeline::{reference_compress, run_pipeline, DEFAULT_QUEUE_CAPACITY};
pub use scalar::Real;
pub use sidecar::{read_sidecar, write_sidecar, SidecarRecord};

/// Statistics in double precision, the default for reports.
pub type CompressionStats = metrics::CompressionStats<f64>;
pub type StatsReport = metrics::StatsReport<f64>;
pub type PixelChangeSeries = metrics::PixelChangeSeries<f64>;
pub type PipelineReport = pipeline::PipelineReport<f64>;

/// Single-precision variants for constrained targets.
pub type CompressionStatsF32 = metrics::CompressionStats<f32>;
pub type PipelineReportF32 = pipeline::PipelineReport<f32>;
