//! Command-line front end: `compress`, `reconstruct`, `stats` and `bench`.
//!
//! Exit codes: 0 on success, 1 on processing failures, 2 on argument errors.
//! Every failure prints one `error: <category>: <detail>` line on stderr.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::frame_io::{
    CommandTemplate, DecodeSource, EncodeSink, FrameSink, FrameSource, PixelFormat, RawReader,
    RawWriter, StreamHeader, Y4mReader, Y4mWriter,
};
use crate::metrics::{
    byte_reduction, frame_reduction, mean, pixel_change_series, sample_std_dev, stats_report,
    CompressionStats, PixelChangeReport, PixelChangeSeries,
};
use crate::motion::MotionConfig;
use crate::pipeline::{run_pipeline, PipelineReport, DEFAULT_QUEUE_CAPACITY};
use crate::reconstruct::reconstruct_to;
use crate::sidecar::read_sidecar;

#[derive(Debug, Parser)]
#[command(name = "motionzip", version, about = "Motion-based video compression for camera traps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Keep only moving regions and keyframes; write video + CSV sidecar.
    Compress(CompressArgs),
    /// Rebuild detector inputs from a compressed video and its sidecar.
    Reconstruct(ReconstructArgs),
    /// Frame/size reductions and per-frame pixel change.
    Stats(StatsArgs),
    /// Time repeated compress runs.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input video: Y4M, raw frames (with --raw-format/--raw-size), `-` for stdin,
    /// or any file the --decode-cmd understands.
    #[arg(long)]
    pub input: PathBuf,
    /// Headerless input of this pixel format (gray8, rgb24, yuv420, yuv444).
    #[arg(long, requires = "raw_size")]
    pub raw_format: Option<String>,
    /// Frame size of raw input, `WIDTHxHEIGHT`.
    #[arg(long, requires = "raw_format")]
    pub raw_size: Option<String>,
    /// Frame rate of raw input, `N` or `N:D`.
    #[arg(long, default_value = "30")]
    pub fps: String,
    /// Decoder writing Y4M to stdout, e.g. `ffmpeg -v error -i {input} -f yuv4mpegpipe -`.
    #[arg(long)]
    pub decode_cmd: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MotionArgs {
    /// Luma difference above which a pixel counts as moving (1-255).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=255))]
    pub threshold: Option<u8>,
    /// Analysis downscale factor (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub downscale: Option<u32>,
    /// Buffer radius around motion, in downscaled pixels.
    #[arg(long)]
    pub buffer: Option<u32>,
    /// Emitted frames between keyframes within a motion sequence (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub keyframe_interval: Option<u32>,
    /// Downscaled motion pixels needed to keep a frame (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_motion_pixels: Option<u64>,
    /// Capacity of each inter-stage queue (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub queue_capacity: Option<u64>,
    /// `key = value` file with any of the options above; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output prefix; writes `<prefix>.y4m` (or the encoded file) and `<prefix>.csv`.
    #[arg(long)]
    pub output: PathBuf,
    /// Encoder reading Y4M on stdin, e.g. `ffmpeg -v error -y -f yuv4mpegpipe -i - {output}`.
    #[arg(long)]
    pub encode_cmd: Option<String>,
    /// File extension of the encoded output.
    #[arg(long, default_value = "mp4")]
    pub encoded_ext: String,
}

#[derive(Debug, Clone, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub motion: MotionArgs,
    /// Also write the run summary as JSON to this path.
    #[arg(long)]
    pub stats_json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Sidecar CSV produced by `compress`.
    #[arg(long)]
    pub sidecar: PathBuf,
    /// Output prefix for `.dl.y4m`, `.fgbg.y4m` and `.alignment.csv`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[arg(long, requires = "frames_out")]
    pub frames_in: Option<u64>,
    #[arg(long, requires = "frames_in")]
    pub frames_out: Option<u64>,
    #[arg(long, requires = "bytes_out")]
    pub bytes_in: Option<u64>,
    #[arg(long, requires = "bytes_in")]
    pub bytes_out: Option<u64>,
    /// Original video; frames are counted and its size is `bytes_in`.
    #[arg(long, requires = "processed")]
    pub raw: Option<PathBuf>,
    /// Compressed video; its size plus the sidecar's is `bytes_out`.
    #[arg(long, requires = "raw")]
    pub processed: Option<PathBuf>,
    /// Sidecar of the processed video.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Video whose per-frame pixel change to measure.
    #[arg(long)]
    pub pixel_change: Option<PathBuf>,
    /// Change threshold for --pixel-change (0 counts any change).
    #[arg(long, default_value_t = MotionConfig::default().threshold)]
    pub threshold: u8,
    /// Decoder for non-Y4M inputs.
    #[arg(long)]
    pub decode_cmd: Option<String>,
    #[arg(long)]
    pub stats_json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub motion: MotionArgs,
    /// Number of sequential compress runs.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub replicates: u32,
    /// Output prefix; defaults to a temporary directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub encode_cmd: Option<String>,
    #[arg(long, default_value = "mp4")]
    pub encoded_ext: String,
    #[arg(long)]
    pub stats_json: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub category: String,
    pub detail: String,
}

impl CliError {
    fn usage(category: &str, detail: impl Into<String>) -> Self {
        CliError {
            code: 2,
            category: category.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err.root() {
            Error::InvalidConfig(_) | Error::InvalidTemplate(_) => 2,
            _ => 1,
        };
        CliError {
            code,
            category: err.category().to_string(),
            detail: err.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return 0;
            }
            let text = err.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return 2;
        }
    };
    let result = match cli.command {
        Command::Compress(args) => cmd_compress(&args),
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Stats(args) => cmd_stats(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            let detail = err.detail.replace('\n', " ");
            eprintln!("error: {}: {detail}", err.category);
            err.code
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    threshold: Option<u8>,
    downscale: Option<u32>,
    #[serde(alias = "buffer_radius")]
    buffer: Option<u32>,
    keyframe_interval: Option<u32>,
    min_motion_pixels: Option<u64>,
    queue_capacity: Option<u64>,
}

impl MotionArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> CliResult<(MotionConfig, usize)> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::usage("missing-input", format!("{}: {e}", path.display()))
                })?;
                toml::from_str::<FileConfig>(&text).map_err(|e| {
                    CliError::usage("invalid-config", format!("{}: {}", path.display(), e.message()))
                })?
            }
            None => FileConfig::default(),
        };
        let defaults = MotionConfig::default();
        let config = MotionConfig {
            threshold: self.threshold.or(file.threshold).unwrap_or(defaults.threshold),
            downscale: self.downscale.or(file.downscale).unwrap_or(defaults.downscale),
            buffer_radius: self.buffer.or(file.buffer).unwrap_or(defaults.buffer_radius),
            keyframe_interval: self
                .keyframe_interval
                .or(file.keyframe_interval)
                .unwrap_or(defaults.keyframe_interval),
            min_motion_pixels: self
                .min_motion_pixels
                .or(file.min_motion_pixels)
                .unwrap_or(defaults.min_motion_pixels),
        };
        config.validate()?;
        let capacity = self
            .queue_capacity
            .or(file.queue_capacity)
            .unwrap_or(DEFAULT_QUEUE_CAPACITY as u64);
        if capacity == 0 {
            return Err(CliError::usage("invalid-config", "queue capacity must be at least 1"));
        }
        Ok((config, capacity as usize))
    }
}

fn parse_size(text: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::usage("invalid-argument", format!("bad size `{text}`, want WIDTHxHEIGHT"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
}

fn parse_fps(text: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::usage("invalid-argument", format!("bad frame rate `{text}`"));
    let (n, d) = text.split_once(':').unwrap_or((text, "1"));
    Ok((n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?))
}

fn is_stdin(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn require_file(path: &Path) -> CliResult<()> {
    if is_stdin(path) || path.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(
            "missing-input",
            format!("{} does not exist", path.display()),
        ))
    }
}

fn template(text: &str) -> CliResult<CommandTemplate> {
    Ok(CommandTemplate::parse(text)?)
}

pub fn open_source(args: &InputArgs) -> CliResult<Box<dyn FrameSource>> {
    if let Some(cmd) = &args.decode_cmd {
        require_file(&args.input)?;
        return Ok(Box::new(DecodeSource::spawn(&template(cmd)?, &args.input)?));
    }
    open_plain(&args.input, args.raw_format.as_deref(), args.raw_size.as_deref(), &args.fps)
}

fn open_plain(
    path: &Path,
    raw_format: Option<&str>,
    raw_size: Option<&str>,
    fps: &str,
) -> CliResult<Box<dyn FrameSource>> {
    require_file(path)?;
    let raw_header = match (raw_format, raw_size) {
        (Some(format), Some(size)) => {
            let format: PixelFormat = format
                .parse()
                .map_err(|e: Error| CliError::usage("invalid-argument", e.to_string()))?;
            let (w, h) = parse_size(size)?;
            let (n, d) = parse_fps(fps)?;
            Some(
                StreamHeader::new(w, h, n, d, format)
                    .map_err(|e| CliError::usage("invalid-argument", e.to_string()))?,
            )
        }
        _ => None,
    };
    let source: Box<dyn FrameSource> = match (raw_header, is_stdin(path)) {
        (Some(h), true) => Box::new(RawReader::new(std::io::stdin(), h)?),
        (Some(h), false) => Box::new(RawReader::new(File::open(path).map_err(Error::from)?, h)?),
        (None, true) => Box::new(Y4mReader::new(std::io::stdin())?),
        (None, false) => Box::new(Y4mReader::new(File::open(path).map_err(Error::from)?)?),
    };
    Ok(source)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(|f| BufWriter::with_capacity(1 << 20, f))
        .map_err(|e| Error::SinkUnavailable(format!("{}: {e}", path.display())).into())
}

fn open_sink(
    header: &StreamHeader,
    path: &Path,
    encode_cmd: Option<&str>,
) -> CliResult<Box<dyn FrameSink>> {
    if let Some(cmd) = encode_cmd {
        return Ok(Box::new(EncodeSink::spawn(&template(cmd)?, path, header.clone())?));
    }
    let file = create(path)?;
    Ok(match header.pixel_format {
        PixelFormat::Rgb24 => Box::new(RawWriter::new(file, header.clone())?),
        _ => Box::new(Y4mWriter::new(file, header.clone())?),
    })
}

/// `prefix.ext`, keeping any dots already in the prefix.
fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// An output written under a `.partial` name and renamed once complete.
struct Staged {
    partial: PathBuf,
    target: PathBuf,
}

impl Staged {
    fn new(prefix: &Path, ext: &str) -> Self {
        Staged {
            partial: with_ext(prefix, &format!("partial.{ext}")),
            target: with_ext(prefix, ext),
        }
    }

    fn commit(&self) -> CliResult<u64> {
        fs::rename(&self.partial, &self.target).map_err(Error::from)?;
        Ok(fs::metadata(&self.target).map_err(Error::from)?.len())
    }
}

fn video_ext(header: &StreamHeader, encode: bool, encoded_ext: &str) -> String {
    match (encode, header.pixel_format) {
        (true, _) => encoded_ext.to_string(),
        (false, PixelFormat::Rgb24) => "rgb".to_string(),
        (false, _) => "y4m".to_string(),
    }
}

/// Summary of one compress run, as printed and as written by `--stats-json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressSummary {
    pub frames_in: u64,
    pub frames_out: u64,
    pub frame_reduction_pct: Option<f64>,
    pub bytes_in: Option<u64>,
    pub bytes_out: u64,
    pub size_reduction_pct: Option<f64>,
    pub wall_time_s: f64,
    pub processing_speed_fps: f64,
    pub video: PathBuf,
    pub sidecar: PathBuf,
}

fn compress(
    input: &InputArgs,
    output: &OutputArgs,
    motion: &MotionArgs,
) -> CliResult<CompressSummary> {
    let (config, capacity) = motion.resolve()?;
    let encode = output.encode_cmd.as_deref();
    if let Some(cmd) = encode {
        template(cmd)?;
    }
    let mut source = open_source(input)?;
    let header = source.header().clone();
    let video = Staged::new(&output.output, &video_ext(&header, encode.is_some(), &output.encoded_ext));
    let sidecar = Staged::new(&output.output, "csv");

    let mut sink = open_sink(&header, &video.partial, encode)?;
    let csv = create(&sidecar.partial)?;
    let report: PipelineReport<f64> = run_pipeline(&mut source, &config, &mut sink, csv, capacity)?;
    drop(sink);
    drop(source);

    let bytes_out = video.commit()? + sidecar.commit()?;
    let bytes_in = if is_stdin(&input.input) {
        None
    } else {
        fs::metadata(&input.input).ok().map(|m| m.len())
    };
    Ok(CompressSummary {
        frames_in: report.frames_in,
        frames_out: report.frames_out,
        frame_reduction_pct: frame_reduction(report.frames_in, report.frames_out).ok(),
        bytes_in,
        bytes_out,
        size_reduction_pct: bytes_in.and_then(|b| byte_reduction(b, bytes_out).ok()),
        wall_time_s: report.wall_time.as_secs_f64(),
        processing_speed_fps: report.processing_speed,
        video: video.target,
        sidecar: sidecar.target,
    })
}

fn pct(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:.2}%"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serialises");
    fs::write(path, text + "\n")
        .map_err(|e| Error::SinkUnavailable(format!("{}: {e}", path.display())).into())
}

pub fn cmd_compress(args: &CompressArgs) -> CliResult<()> {
    let s = compress(&args.input, &args.output, &args.motion)?;
    println!("video:           {}", s.video.display());
    println!("sidecar:         {}", s.sidecar.display());
    println!("frames in/out:   {} / {}", s.frames_in, s.frames_out);
    println!("frame reduction: {}", pct(s.frame_reduction_pct));
    match s.bytes_in {
        Some(b) => println!("bytes in/out:    {b} / {}", s.bytes_out),
        None => println!("bytes out:       {}", s.bytes_out),
    }
    println!("size reduction:  {}", pct(s.size_reduction_pct));
    println!("wall time:       {:.3} s", s.wall_time_s);
    println!("speed:           {:.1} fps", s.processing_speed_fps);
    if let Some(path) = &args.stats_json {
        write_json(path, &s)?;
    }
    Ok(())
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> CliResult<()> {
    require_file(&args.sidecar)?;
    let records = read_sidecar(File::open(&args.sidecar).map_err(Error::from)?)?;
    let mut source = open_source(&args.input)?;
    let header = source.header().clone();
    let dl_ext = if header.pixel_format == PixelFormat::Rgb24 { "dl.rgb" } else { "dl.y4m" };
    let dl = Staged::new(&args.output, dl_ext);
    let fgbg = Staged::new(&args.output, "fgbg.y4m");
    let alignment = Staged::new(&args.output, "alignment.csv");

    let mut dl_sink = open_sink(&header, &dl.partial, None)?;
    let gray_header = header.with_format(PixelFormat::Gray8)?;
    let mut fgbg_sink = Y4mWriter::new(create(&fgbg.partial)?, gray_header)?;
    let count = reconstruct_to(
        &mut source,
        records,
        &mut dl_sink,
        &mut fgbg_sink,
        create(&alignment.partial)?,
    )?;
    drop(dl_sink);
    drop(fgbg_sink);
    for staged in [&dl, &fgbg, &alignment] {
        staged.commit()?;
    }
    println!("frames:          {count}");
    println!("detector frames: {}", dl.target.display());
    println!("fgbg frames:     {}", fgbg.target.display());
    println!("alignment:       {}", alignment.target.display());
    Ok(())
}

fn count_frames(path: &Path, decode_cmd: Option<&str>) -> CliResult<u64> {
    require_file(path)?;
    let mut source: Box<dyn FrameSource> = match decode_cmd {
        Some(cmd) => Box::new(DecodeSource::spawn(&template(cmd)?, path)?),
        None => open_plain(path, None, None, "30")?,
    };
    let mut n = 0;
    while source.read_frame()?.is_some() {
        n += 1;
    }
    Ok(n)
}

fn file_len(path: &Path) -> CliResult<u64> {
    require_file(path)?;
    Ok(fs::metadata(path).map_err(Error::from)?.len())
}

pub fn cmd_stats(args: &StatsArgs) -> CliResult<()> {
    let decode = args.decode_cmd.as_deref();
    let pixel_change: Option<PixelChangeSeries<f64>> = match &args.pixel_change {
        Some(path) => {
            require_file(path)?;
            let mut source: Box<dyn FrameSource> = match decode {
                Some(cmd) => Box::new(DecodeSource::spawn(&template(cmd)?, path)?),
                None => open_plain(path, None, None, "30")?,
            };
            Some(pixel_change_series(&mut source, args.threshold)?)
        }
        None => None,
    };

    let mut stats = CompressionStats::<f64> {
        pixel_change: pixel_change.clone(),
        ..Default::default()
    };
    if let (Some(frames_in), Some(frames_out)) = (args.frames_in, args.frames_out) {
        stats.frames_in = frames_in;
        stats.frames_out = frames_out;
        stats.bytes_in = args.bytes_in;
        stats.bytes_out = args.bytes_out;
    } else if let (Some(raw), Some(processed)) = (&args.raw, &args.processed) {
        stats.frames_in = count_frames(raw, decode)?;
        stats.frames_out = count_frames(processed, decode)?;
        stats.bytes_in = Some(file_len(raw)?);
        let mut bytes_out = file_len(processed)?;
        if let Some(sidecar) = &args.sidecar {
            bytes_out += file_len(sidecar)?;
            let rows = read_sidecar(File::open(sidecar).map_err(Error::from)?)?.len() as u64;
            if rows != stats.frames_out {
                return Err(Error::SidecarMismatch(format!(
                    "{rows} sidecar rows for {} video frames",
                    stats.frames_out
                ))
                .into());
            }
        }
        stats.bytes_out = Some(bytes_out);
    } else if let Some(series) = &pixel_change {
        let report = PixelChangeReport::new(series, args.threshold);
        print!("{}", report.to_table());
        if let Some(path) = &args.stats_json {
            write_json(path, &report)?;
        } else {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
        }
        return Ok(());
    } else {
        return Err(CliError::usage(
            "missing-input",
            "give --frames-in/--frames-out, --raw/--processed, or --pixel-change",
        ));
    }

    let report = stats_report(&stats)?;
    print!("{}", report.to_table());
    match &args.stats_json {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

/// Timings of a bench run, as written by `--stats-json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub frames_in: u64,
    pub frames_out: u64,
    pub replicate_times_s: Vec<f64>,
    pub mean_time_s: f64,
    pub std_dev_time_s: f64,
    pub speed_fps: f64,
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let scratch = tempfile::tempdir().map_err(Error::from)?;
    let prefix = args
        .output
        .clone()
        .unwrap_or_else(|| scratch.path().join("bench"));
    let output = OutputArgs {
        output: prefix,
        encode_cmd: args.encode_cmd.clone(),
        encoded_ext: args.encoded_ext.clone(),
    };

    let mut times = Vec::new();
    let (mut frames_in, mut frames_out) = (0, 0);
    for i in 1..=args.replicates {
        let started = Instant::now();
        let s = compress(&args.input, &output, &args.motion)?;
        let elapsed = started.elapsed().as_secs_f64();
        (frames_in, frames_out) = (s.frames_in, s.frames_out);
        println!(
            "replicate {i}: {elapsed:.3} s ({:.1} fps)",
            s.frames_in as f64 / elapsed
        );
        times.push(elapsed);
    }
    let mean_time = mean(&times);
    let summary = BenchSummary {
        frames_in,
        frames_out,
        std_dev_time_s: sample_std_dev(&times),
        speed_fps: frames_in as f64 / mean_time,
        mean_time_s: mean_time,
        replicate_times_s: times,
    };
    println!("frames in/out: {frames_in} / {frames_out}");
    println!(
        "time: {:.1} ± {:.1} s",
        summary.mean_time_s, summary.std_dev_time_s
    );
    println!("speed: {:.1} fps", summary.speed_fps);
    if let Some(path) = &args.stats_json {
        write_json(path, &summary)?;
    }
    Ok(())
}
