//! Adapters around external codec commands.
//!
//! A decode command receives the compressed file through `{input}` and must
//! write Y4M to stdout. An encode command reads Y4M from stdin and writes the
//! compressed file named by `{output}`.

use std::io::{BufReader, BufWriter, ErrorKind, Read};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, ExitStatus, Stdio};
use std::thread::JoinHandle;

use super::{Frame, FrameSink, FrameSource, StreamHeader, Y4mReader, Y4mWriter};
use crate::error::{Error, Result};

pub const INPUT_PLACEHOLDER: &str = "{input}";
pub const OUTPUT_PLACEHOLDER: &str = "{output}";

/// A shell-quoted command line with `{input}` / `{output}` placeholders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandTemplate {
    words: Vec<String>,
}

impl CommandTemplate {
    pub fn parse(template: &str) -> Result<Self> {
        let words = shlex::split(template)
            .ok_or_else(|| Error::InvalidTemplate(format!("unbalanced quoting in `{template}`")))?;
        if words.is_empty() {
            return Err(Error::InvalidTemplate("empty command".into()));
        }
        Ok(CommandTemplate { words })
    }

    pub fn program(&self) -> &str {
        &self.words[0]
    }

    fn require(&self, placeholder: &str) -> Result<()> {
        if self.words.iter().any(|w| w.contains(placeholder)) {
            Ok(())
        } else {
            Err(Error::InvalidTemplate(format!(
                "`{}` lacks a {placeholder} placeholder",
                self.words.join(" ")
            )))
        }
    }

    fn command(&self, placeholder: &str, path: &Path) -> Command {
        let value = path.to_string_lossy();
        let mut words = self.words.iter().map(|w| w.replace(placeholder, &value));
        let mut cmd = Command::new(words.next().unwrap());
        cmd.args(words);
        cmd
    }
}

/// Drains a child's stderr on a helper thread so the child never blocks on it.
fn capture_stderr(child: &mut Child) -> Option<JoinHandle<String>> {
    let mut stderr = child.stderr.take()?;
    Some(std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).trim().to_string()
    }))
}

fn status_error(program: &str, status: ExitStatus, stderr: Option<JoinHandle<String>>) -> Error {
    let stderr = stderr
        .and_then(|h| h.join().ok())
        .unwrap_or_default();
    let status = match status.code() {
        Some(code) => format!("status {code}"),
        None => status.to_string(),
    };
    Error::NonZeroExit {
        program: program.to_string(),
        status,
        stderr: stderr.lines().last().unwrap_or_default().to_string(),
    }
}

fn spawn(program: &str, mut cmd: Command) -> Result<Child> {
    cmd.spawn().map_err(|source| Error::SpawnFailure {
        program: program.to_string(),
        source,
    })
}

/// Frames decoded by an external command.
pub struct DecodeSource {
    program: String,
    child: Child,
    reader: Y4mReader<BufReader<ChildStdout>>,
    stderr: Option<JoinHandle<String>>,
    finished: bool,
}

impl DecodeSource {
    pub fn spawn(template: &CommandTemplate, input: &Path) -> Result<Self> {
        template.require(INPUT_PLACEHOLDER)?;
        let program = template.program().to_string();
        let mut cmd = template.command(INPUT_PLACEHOLDER, input);
        cmd.stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        let mut child = spawn(&program, cmd)?;
        let mut stderr = capture_stderr(&mut child);
        let stdout = child.stdout.take().expect("stdout is piped");
        match Y4mReader::new(stdout) {
            Ok(reader) => Ok(DecodeSource {
                program,
                child,
                reader,
                stderr,
                finished: false,
            }),
            Err(err) => {
                // A child that died before producing a header explains the parse error.
                let status = child.wait()?;
                if status.success() {
                    Err(err)
                } else {
                    Err(status_error(&program, status, stderr.take()))
                }
            }
        }
    }

    fn close(&mut self) -> Result<()> {
        self.finished = true;
        let status = self.child.wait()?;
        if status.success() {
            Ok(())
        } else {
            Err(status_error(&self.program, status, self.stderr.take()))
        }
    }
}

impl FrameSource for DecodeSource {
    fn header(&self) -> &StreamHeader {
        self.reader.header()
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        if self.finished {
            return Ok(None);
        }
        match self.reader.read_frame() {
            Ok(Some(frame)) => Ok(Some(frame)),
            Ok(None) => self.close().map(|_| None),
            Err(err) => {
                let _ = self.child.kill();
                match self.close() {
                    Err(exit @ Error::NonZeroExit { .. }) if !matches!(err, Error::Io(_)) => {
                        Err(exit)
                    }
                    _ => Err(err),
                }
            }
        }
    }
}

impl Drop for DecodeSource {
    fn drop(&mut self) {
        if !self.finished {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// Frames piped into an external encoder.
pub struct EncodeSink {
    program: String,
    header: StreamHeader,
    child: Child,
    writer: Option<Y4mWriter<BufWriter<ChildStdin>>>,
    stderr: Option<JoinHandle<String>>,
}

impl EncodeSink {
    pub fn spawn(template: &CommandTemplate, output: &Path, header: StreamHeader) -> Result<Self> {
        template.require(OUTPUT_PLACEHOLDER)?;
        let program = template.program().to_string();
        let mut cmd = template.command(OUTPUT_PLACEHOLDER, output);
        cmd.stdin(Stdio::piped())
            .stdout(Stdio::null())
            .stderr(Stdio::piped());
        let mut child = spawn(&program, cmd)?;
        let stderr = capture_stderr(&mut child);
        let stdin = BufWriter::with_capacity(1 << 20, child.stdin.take().expect("stdin is piped"));
        let mut sink = EncodeSink {
            program,
            header: header.clone(),
            child,
            writer: None,
            stderr,
        };
        match Y4mWriter::new(stdin, header) {
            Ok(writer) => sink.writer = Some(writer),
            Err(err) => return Err(sink.pipe_failure(err)),
        }
        Ok(sink)
    }

    /// Turns a write failure into the child's exit error when it has one.
    fn pipe_failure(&mut self, err: Error) -> Error {
        let broken = matches!(&err, Error::Io(e) if e.kind() == ErrorKind::BrokenPipe);
        if !broken {
            return err;
        }
        self.writer = None;
        match self.child.wait() {
            Ok(status) if !status.success() => {
                status_error(&self.program, status, self.stderr.take())
            }
            _ => Error::BrokenPipe(self.program.clone()),
        }
    }
}

impl FrameSink for EncodeSink {
    fn header(&self) -> &StreamHeader {
        &self.header
    }

    fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        let writer = self
            .writer
            .as_mut()
            .ok_or_else(|| Error::SinkUnavailable(format!("`{}` already closed", self.program)))?;
        match writer.write_frame(frame) {
            Ok(()) => Ok(()),
            Err(err) => Err(self.pipe_failure(err)),
        }
    }

    fn finish(&mut self) -> Result<()> {
        let Some(writer) = self.writer.take() else {
            return Ok(());
        };
        if let Err(err) = writer.into_inner() {
            return Err(self.pipe_failure(err));
        }
        let status = self.child.wait()?;
        if status.success() {
            Ok(())
        } else {
            Err(status_error(&self.program, status, self.stderr.take()))
        }
    }
}

impl Drop for EncodeSink {
    fn drop(&mut self) {
        // Closing stdin lets the encoder finalise whatever it received.
        self.writer = None;
        let _ = self.child.wait();
    }
}
