use std::io::{BufRead, BufReader, Read, Write};

use super::{Frame, FrameSink, FrameSource, PixelFormat, StreamHeader};
use crate::error::{Error, Result};

const SIGNATURE: &str = "YUV4MPEG2";
const FRAME_MARKER: &[u8] = b"FRAME";
const MAX_LINE: u64 = 4096;

/// Fps assumed when a stream omits its `F` tag (ffmpeg's default).
const DEFAULT_FPS: (u32, u32) = (25, 1);

fn read_line<R: BufRead>(reader: &mut R, buf: &mut Vec<u8>) -> std::io::Result<usize> {
    buf.clear();
    reader.by_ref().take(MAX_LINE).read_until(b'\n', buf)
}

fn parse_dim(tag: &str, value: &str) -> Result<u32> {
    value
        .parse::<u32>()
        .ok()
        .filter(|v| *v > 0)
        .ok_or_else(|| Error::MalformedHeader(format!("bad {tag} tag `{value}`")))
}

fn colorspace_format(token: &str) -> Result<PixelFormat> {
    match token {
        "mono" => Ok(PixelFormat::Gray8),
        "420" | "420jpeg" | "420paldv" | "420mpeg2" => Ok(PixelFormat::Yuv420),
        "444" => Ok(PixelFormat::Yuv444),
        other => Err(Error::UnsupportedColorspace(other.to_string())),
    }
}

/// Reads the stream header line, leaving `reader` at the first `FRAME` marker.
pub fn parse_y4m_header<R: BufRead>(reader: &mut R) -> Result<StreamHeader> {
    let mut line = Vec::new();
    read_line(reader, &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader(
            "missing or unterminated header line".into(),
        ));
    }
    line.pop();
    let text = std::str::from_utf8(&line)
        .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
    let mut tokens = text.split(' ').filter(|t| !t.is_empty());
    if tokens.next() != Some(SIGNATURE) {
        return Err(Error::MalformedHeader(format!(
            "missing `{SIGNATURE}` signature"
        )));
    }

    let (mut width, mut height, mut fps, mut colorspace) = (None, None, None, None);
    let mut extra_tags = Vec::new();
    for token in tokens {
        let (tag, value) = token.split_at(1);
        match tag {
            "W" => width = Some(parse_dim("W", value)?),
            "H" => height = Some(parse_dim("H", value)?),
            "F" => {
                let (num, den) = value
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedHeader(format!("bad F tag `{value}`")))?;
                fps = Some((parse_dim("F", num)?, parse_dim("F", den)?));
            }
            "C" => colorspace = Some(value.to_string()),
            _ => extra_tags.push(token.to_string()),
        }
    }

    let width = width.ok_or_else(|| Error::MalformedHeader("missing W tag".into()))?;
    let height = height.ok_or_else(|| Error::MalformedHeader("missing H tag".into()))?;
    let pixel_format = match &colorspace {
        Some(token) => colorspace_format(token)?,
        None => PixelFormat::Yuv420,
    };
    let (fps_num, fps_den) = fps.unwrap_or(DEFAULT_FPS);
    let header = StreamHeader {
        width,
        height,
        fps_num,
        fps_den,
        pixel_format,
        colorspace,
        extra_tags,
    };
    header.validate()?;
    Ok(header)
}

/// Serialises a header line including the trailing newline.
pub(crate) fn header_line(header: &StreamHeader) -> Result<String> {
    let token = match (&header.colorspace, header.pixel_format) {
        (Some(token), _) => Some(token.as_str()),
        (None, PixelFormat::Yuv420) => None,
        (None, PixelFormat::Rgb24) => {
            return Err(Error::UnsupportedColorspace(
                "rgb24 cannot be carried in Y4M".into(),
            ))
        }
        (None, format) => format.y4m_token(),
    };
    let mut line = format!(
        "{SIGNATURE} W{} H{} F{}:{}",
        header.width, header.height, header.fps_num, header.fps_den
    );
    if let Some(token) = token {
        line.push_str(" C");
        line.push_str(token);
    }
    for tag in &header.extra_tags {
        line.push(' ');
        line.push_str(tag);
    }
    line.push('\n');
    Ok(line)
}

pub struct Y4mReader<R> {
    inner: R,
    header: StreamHeader,
    next_index: u64,
    line: Vec<u8>,
}

impl<R: Read> Y4mReader<BufReader<R>> {
    pub fn new(inner: R) -> Result<Self> {
        Self::from_buffered(BufReader::with_capacity(1 << 20, inner))
    }
}

impl<R: BufRead> Y4mReader<R> {
    pub fn from_buffered(mut inner: R) -> Result<Self> {
        let header = parse_y4m_header(&mut inner)?;
        Ok(Y4mReader {
            inner,
            header,
            next_index: 0,
            line: Vec::with_capacity(64),
        })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    pub fn read_frame(&mut self) -> Result<Option<Frame>> {
        let n = read_line(&mut self.inner, &mut self.line)?;
        if n == 0 {
            return Ok(None);
        }
        let well_formed = self.line.last() == Some(&b'\n')
            && self.line.starts_with(FRAME_MARKER)
            && matches!(self.line[FRAME_MARKER.len()], b'\n' | b' ');
        if !well_formed {
            let shown = String::from_utf8_lossy(&self.line[..self.line.len().min(32)]);
            return Err(Error::MalformedFrameMarker(format!(
                "frame {}: `{}`",
                self.next_index,
                shown.trim_end()
            )));
        }

        let expected = self.header.frame_size();
        let mut data = vec![0u8; expected];
        let mut got = 0;
        while got < expected {
            match self.inner.read(&mut data[got..]) {
                Ok(0) => break,
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        if got < expected {
            return Err(Error::TruncatedFrame {
                index: self.next_index,
                expected,
                got,
            });
        }
        let header = &self.header;
        let frame = Frame {
            index: self.next_index,
            width: header.width,
            height: header.height,
            pixel_format: header.pixel_format,
            data,
        };
        self.next_index += 1;
        Ok(Some(frame))
    }

    pub fn into_inner(self) -> R {
        self.inner
    }
}

impl<R: BufRead + Send> FrameSource for Y4mReader<R> {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        Y4mReader::read_frame(self)
    }
}

impl<R: BufRead> Iterator for Y4mReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_frame().transpose()
    }
}

pub struct Y4mWriter<W: Write> {
    inner: W,
    header: StreamHeader,
}

impl<W: Write> Y4mWriter<W> {
    /// Writes the header immediately so an empty stream is still valid.
    pub fn new(mut inner: W, header: StreamHeader) -> Result<Self> {
        header.validate()?;
        inner.write_all(header_line(&header)?.as_bytes())?;
        Ok(Y4mWriter { inner, header })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    pub fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        self.header.check_frame(frame)?;
        self.inner.write_all(b"FRAME\n")?;
        self.inner.write_all(frame.data())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn get_ref(&self) -> &W {
        &self.inner
    }

    pub fn into_inner(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

impl<W: Write + Send> FrameSink for Y4mWriter<W> {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        Y4mWriter::write_frame(self, frame)
    }

    fn finish(&mut self) -> Result<()> {
        self.flush()
    }
}
