//! Uncompressed frame carriers: YUV4MPEG2 streams, headerless raw files and
//! external codec commands that speak Y4M on their standard streams.

mod codec;
mod raw;
mod y4m;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use codec::{CommandTemplate, DecodeSource, EncodeSink};
pub use raw::{RawReader, RawWriter};
pub use y4m::{parse_y4m_header, Y4mReader, Y4mWriter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PixelFormat {
    Gray8,
    /// Packed `RGBRGB...`, only carried by raw files.
    Rgb24,
    /// Planar Y, then U and V at quarter resolution.
    Yuv420,
    /// Planar Y, U, V at full resolution.
    Yuv444,
}

impl PixelFormat {
    pub fn frame_size(self, width: u32, height: u32) -> usize {
        let luma = width as usize * height as usize;
        match self {
            PixelFormat::Gray8 => luma,
            PixelFormat::Rgb24 | PixelFormat::Yuv444 => 3 * luma,
            PixelFormat::Yuv420 => luma + 2 * (luma / 4),
        }
    }

    /// Default Y4M colorspace token, `None` for formats Y4M cannot carry.
    pub fn y4m_token(self) -> Option<&'static str> {
        match self {
            PixelFormat::Gray8 => Some("mono"),
            PixelFormat::Yuv420 => Some("420jpeg"),
            PixelFormat::Yuv444 => Some("444"),
            PixelFormat::Rgb24 => None,
        }
    }

    pub(crate) fn check_dims(self, width: u32, height: u32) -> Result<()> {
        if width == 0 || height == 0 {
            return Err(Error::MalformedHeader(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if self == PixelFormat::Yuv420 && (width % 2 != 0 || height % 2 != 0) {
            return Err(Error::MalformedHeader(format!(
                "4:2:0 frames need even dimensions, got {width}x{height}"
            )));
        }
        Ok(())
    }
}

impl FromStr for PixelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gray8" | "gray" | "mono" => Ok(PixelFormat::Gray8),
            "rgb24" | "rgb" => Ok(PixelFormat::Rgb24),
            "yuv420" | "yuv420p" => Ok(PixelFormat::Yuv420),
            "yuv444" | "yuv444p" => Ok(PixelFormat::Yuv444),
            other => Err(Error::UnsupportedColorspace(other.to_string())),
        }
    }
}

impl fmt::Display for PixelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PixelFormat::Gray8 => "gray8",
            PixelFormat::Rgb24 => "rgb24",
            PixelFormat::Yuv420 => "yuv420",
            PixelFormat::Yuv444 => "yuv444",
        })
    }
}

/// Stream-level geometry and timing shared by every frame of a video.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub fps_num: u32,
    pub fps_den: u32,
    pub pixel_format: PixelFormat,
    /// The literal Y4M `C` token, kept so headers survive a round trip.
    pub colorspace: Option<String>,
    /// Unrecognised Y4M tags (`I`, `A`, `X...`), verbatim and in order.
    pub extra_tags: Vec<String>,
}

impl StreamHeader {
    pub fn new(
        width: u32,
        height: u32,
        fps_num: u32,
        fps_den: u32,
        pixel_format: PixelFormat,
    ) -> Result<Self> {
        let header = StreamHeader {
            width,
            height,
            fps_num,
            fps_den,
            pixel_format,
            colorspace: pixel_format.y4m_token().map(str::to_string),
            extra_tags: Vec::new(),
        };
        header.validate()?;
        Ok(header)
    }

    pub fn validate(&self) -> Result<()> {
        self.pixel_format.check_dims(self.width, self.height)?;
        if self.fps_num == 0 || self.fps_den == 0 {
            return Err(Error::MalformedHeader(format!(
                "frame rate must be positive, got {}:{}",
                self.fps_num, self.fps_den
            )));
        }
        Ok(())
    }

    pub fn frame_size(&self) -> usize {
        self.pixel_format.frame_size(self.width, self.height)
    }

    pub fn fps(&self) -> f64 {
        self.fps_num as f64 / self.fps_den as f64
    }

    /// Same geometry and timing with a different pixel format.
    pub fn with_format(&self, pixel_format: PixelFormat) -> Result<Self> {
        let mut header = StreamHeader::new(
            self.width,
            self.height,
            self.fps_num,
            self.fps_den,
            pixel_format,
        )?;
        header.extra_tags = self.extra_tags.clone();
        Ok(header)
    }

    pub(crate) fn check_frame(&self, frame: &Frame) -> Result<()> {
        if frame.width() != self.width
            || frame.height() != self.height
            || frame.pixel_format() != self.pixel_format
        {
            return Err(Error::DimensionMismatch(format!(
                "frame {} is {}x{} {}, stream is {}x{} {}",
                frame.index(),
                frame.width(),
                frame.height(),
                frame.pixel_format(),
                self.width,
                self.height,
                self.pixel_format
            )));
        }
        Ok(())
    }
}

/// One uncompressed picture. The payload length always matches the geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    index: u64,
    width: u32,
    height: u32,
    pixel_format: PixelFormat,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(
        index: u64,
        width: u32,
        height: u32,
        pixel_format: PixelFormat,
        data: Vec<u8>,
    ) -> Result<Self> {
        pixel_format.check_dims(width, height)?;
        let expected = pixel_format.frame_size(width, height);
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} {pixel_format} needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Frame {
            index,
            width,
            height,
            pixel_format,
            data,
        })
    }

    /// A frame matching `header` with every byte set to `value`.
    pub fn filled(index: u64, header: &StreamHeader, value: u8) -> Self {
        Frame {
            index,
            width: header.width,
            height: header.height,
            pixel_format: header.pixel_format,
            data: vec![value; header.frame_size()],
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn set_index(&mut self, index: u64) {
        self.index = index;
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_format(&self) -> PixelFormat {
        self.pixel_format
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// A stream of frames with a fixed header.
pub trait FrameSource: Send {
    fn header(&self) -> &StreamHeader;

    /// Next frame, or `None` at a clean end of stream.
    fn read_frame(&mut self) -> Result<Option<Frame>>;
}

/// A destination for frames of one fixed header.
pub trait FrameSink: Send {
    fn header(&self) -> &StreamHeader;

    fn write_frame(&mut self, frame: &Frame) -> Result<()>;

    /// Flush and release the destination, surfacing any deferred failure.
    fn finish(&mut self) -> Result<()>;
}

impl<S: FrameSource + ?Sized> FrameSource for Box<S> {
    fn header(&self) -> &StreamHeader {
        (**self).header()
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        (**self).read_frame()
    }
}

impl<S: FrameSink + ?Sized> FrameSink for Box<S> {
    fn header(&self) -> &StreamHeader {
        (**self).header()
    }

    fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        (**self).write_frame(frame)
    }

    fn finish(&mut self) -> Result<()> {
        (**self).finish()
    }
}

/// In-memory source, mostly for tests and synthetic fixtures.
pub struct VecSource {
    header: StreamHeader,
    frames: std::vec::IntoIter<Frame>,
}

impl VecSource {
    pub fn new(header: StreamHeader, frames: Vec<Frame>) -> Self {
        VecSource {
            header,
            frames: frames.into_iter(),
        }
    }
}

impl FrameSource for VecSource {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        Ok(self.frames.next())
    }
}

/// Drains a source into memory.
pub fn read_all<S: FrameSource + ?Sized>(source: &mut S) -> Result<Vec<Frame>> {
    let mut frames = Vec::new();
    while let Some(frame) = source.read_frame()? {
        frames.push(frame);
    }
    Ok(frames)
}
