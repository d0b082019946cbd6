use std::io::{BufReader, Read, Write};

use super::{Frame, FrameSink, FrameSource, StreamHeader};
use crate::error::{Error, Result};

/// Headerless concatenation of frames whose geometry is supplied out of band.
pub struct RawReader<R> {
    inner: R,
    header: StreamHeader,
    next_index: u64,
}

impl<R: Read> RawReader<BufReader<R>> {
    pub fn new(inner: R, header: StreamHeader) -> Result<Self> {
        header.validate()?;
        Ok(RawReader {
            inner: BufReader::with_capacity(1 << 20, inner),
            header,
            next_index: 0,
        })
    }
}

impl<R: Read> RawReader<R> {
    pub fn read_frame(&mut self) -> Result<Option<Frame>> {
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
        if got == 0 {
            return Ok(None);
        }
        if got < expected {
            return Err(Error::TruncatedFrame {
                index: self.next_index,
                expected,
                got,
            });
        }
        let h = &self.header;
        let frame = Frame::new(self.next_index, h.width, h.height, h.pixel_format, data)?;
        self.next_index += 1;
        Ok(Some(frame))
    }
}

impl<R: Read + Send> FrameSource for RawReader<R> {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        RawReader::read_frame(self)
    }
}

pub struct RawWriter<W: Write> {
    inner: W,
    header: StreamHeader,
}

impl<W: Write> RawWriter<W> {
    pub fn new(inner: W, header: StreamHeader) -> Result<Self> {
        header.validate()?;
        Ok(RawWriter { inner, header })
    }

    pub fn into_inner(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

impl<W: Write + Send> FrameSink for RawWriter<W> {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        self.header.check_frame(frame)?;
        self.inner.write_all(frame.data())?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_io::PixelFormat;

    #[test]
    fn rgb_round_trip_and_truncation() {
        let header = StreamHeader::new(3, 2, 30, 1, PixelFormat::Rgb24).unwrap();
        let mut writer = RawWriter::new(Vec::new(), header.clone()).unwrap();
        let frames: Vec<Frame> = (0..4).map(|i| Frame::filled(i, &header, 10 * i as u8)).collect();
        for f in &frames {
            writer.write_frame(f).unwrap();
        }
        let mut bytes = writer.into_inner().unwrap();
        assert_eq!(bytes.len(), 4 * 18);

        let mut reader = RawReader::new(&bytes[..], header.clone()).unwrap();
        let mut back = Vec::new();
        while let Some(f) = reader.read_frame().unwrap() {
            back.push(f);
        }
        assert_eq!(back, frames);

        bytes.truncate(bytes.len() - 5);
        let mut reader = RawReader::new(&bytes[..], header).unwrap();
        for _ in 0..3 {
            reader.read_frame().unwrap().unwrap();
        }
        assert!(matches!(
            reader.read_frame().unwrap_err(),
            Error::TruncatedFrame {
                index: 3,
                expected: 18,
                got: 13
            }
        ));
    }
}
