//! The CSV sidecar linking compressed-video frames back to the input timeline.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SIDECAR_HEADER: [&str; 3] = ["input_frame", "output_frame", "full_frame"];

/// One kept frame: where it came from, where it went, and whether it is whole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SidecarRecord {
    pub input_frame: u64,
    pub output_frame: u64,
    pub full_frame: bool,
}

/// Checks ordering of consecutive records; `line` is 1-based and counts the header.
struct OrderCheck {
    last_input: Option<u64>,
    next_output: u64,
}

impl OrderCheck {
    fn new() -> Self {
        OrderCheck {
            last_input: None,
            next_output: 0,
        }
    }

    fn check(&mut self, record: &SidecarRecord, line: u64) -> Result<()> {
        let fail = |detail: String| Err(Error::NonMonotonicIndex { line, detail });
        if record.output_frame != self.next_output {
            return fail(format!(
                "output_frame {} where {} was expected",
                record.output_frame, self.next_output
            ));
        }
        if let Some(last) = self.last_input {
            if record.input_frame <= last {
                return fail(format!(
                    "input_frame {} does not follow {last}",
                    record.input_frame
                ));
            }
        }
        if record.input_frame < record.output_frame {
            return fail(format!(
                "input_frame {} precedes output_frame {}",
                record.input_frame, record.output_frame
            ));
        }
        self.last_input = Some(record.input_frame);
        self.next_output += 1;
        Ok(())
    }
}

/// Streaming sidecar writer; the header is written on construction.
pub struct SidecarWriter<W: Write> {
    inner: csv::Writer<W>,
    order: OrderCheck,
    rows: u64,
}

impl<W: Write> SidecarWriter<W> {
    pub fn new(sink: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        inner.write_record(SIDECAR_HEADER).map_err(csv_error)?;
        Ok(SidecarWriter {
            inner,
            order: OrderCheck::new(),
            rows: 0,
        })
    }

    pub fn write(&mut self, record: &SidecarRecord) -> Result<()> {
        self.order.check(record, self.rows + 2)?;
        self.inner
            .write_record([
                record.input_frame.to_string(),
                record.output_frame.to_string(),
                (record.full_frame as u8).to_string(),
            ])
            .map_err(csv_error)?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

fn csv_error(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_sidecar<W: Write>(records: &[SidecarRecord], sink: W) -> Result<W> {
    let mut writer = SidecarWriter::new(sink)?;
    for record in records {
        writer.write(record)?;
    }
    writer.into_inner()
}

fn parse_field(field: &str, name: &str, line: u64) -> Result<u64> {
    field.trim().parse().map_err(|_| Error::MalformedRow {
        line,
        detail: format!("{name} `{field}` is not a non-negative integer"),
    })
}

pub fn read_sidecar<R: Read>(source: R) -> Result<Vec<SidecarRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = reader.records();
    let header = rows
        .next()
        .ok_or_else(|| Error::MalformedRow {
            line: 1,
            detail: "missing header".into(),
        })?
        .map_err(csv_error)?;
    if header.iter().map(str::trim).ne(SIDECAR_HEADER) {
        return Err(Error::MalformedRow {
            line: 1,
            detail: format!("header must be `{}`", SIDECAR_HEADER.join(",")),
        });
    }

    let mut order = OrderCheck::new();
    let mut records = Vec::new();
    for (i, row) in rows.enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(csv_error)?;
        if row.len() != 3 {
            return Err(Error::MalformedRow {
                line,
                detail: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let full_frame = match parse_field(&row[2], "full_frame", line)? {
            0 => false,
            1 => true,
            other => {
                return Err(Error::MalformedRow {
                    line,
                    detail: format!("full_frame must be 0 or 1, got {other}"),
                })
            }
        };
        let record = SidecarRecord {
            input_frame: parse_field(&row[0], "input_frame", line)?,
            output_frame: parse_field(&row[1], "output_frame", line)?,
            full_frame,
        };
        order.check(&record, line)?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(input_frame: u64, output_frame: u64, full: u8) -> SidecarRecord {
        SidecarRecord {
            input_frame,
            output_frame,
            full_frame: full == 1,
        }
    }

    #[test]
    fn writes_exact_text_and_reads_back() {
        let records = vec![rec(0, 0, 1), rec(17, 1, 0), rec(18, 2, 0)];
        let bytes = write_sidecar(&records, Vec::new()).unwrap();
        assert_eq!(
            String::from_utf8(bytes.clone()).unwrap(),
            "input_frame,output_frame,full_frame\n0,0,1\n17,1,0\n18,2,0\n"
        );
        assert_eq!(read_sidecar(&bytes[..]).unwrap(), records);
    }

    #[test]
    fn empty_sidecar_is_just_a_header() {
        let bytes = write_sidecar(&[], Vec::new()).unwrap();
        assert_eq!(bytes, b"input_frame,output_frame,full_frame\n");
        assert!(read_sidecar(&bytes[..]).unwrap().is_empty());
    }

    #[test]
    fn flag_out_of_range_is_malformed() {
        let text = "input_frame,output_frame,full_frame\n0,0,1\n1,1,0\n5,2,3\n";
        let err = read_sidecar(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 4, .. }), "{err}");
    }

    #[test]
    fn non_integer_is_malformed() {
        let text = "input_frame,output_frame,full_frame\nzero,0,1\n";
        assert!(matches!(
            read_sidecar(text.as_bytes()).unwrap_err(),
            Error::MalformedRow { line: 2, .. }
        ));
        let text = "input_frame,output_frame,full_frame\n0,0\n";
        assert!(matches!(
            read_sidecar(text.as_bytes()).unwrap_err(),
            Error::MalformedRow { .. }
        ));
    }

    #[test]
    fn output_gap_is_non_monotonic() {
        let text = "input_frame,output_frame,full_frame\n0,0,1\n4,2,0\n";
        assert!(matches!(
            read_sidecar(text.as_bytes()).unwrap_err(),
            Error::NonMonotonicIndex { line: 3, .. }
        ));
        let text = "input_frame,output_frame,full_frame\n3,0,1\n3,1,0\n";
        assert!(matches!(
            read_sidecar(text.as_bytes()).unwrap_err(),
            Error::NonMonotonicIndex { .. }
        ));
        assert!(write_sidecar(&[rec(0, 1, 1)], Vec::new()).is_err());
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_sidecar("in,out,full\n0,0,1\n".as_bytes()).is_err());
        assert!(read_sidecar("".as_bytes()).is_err());
    }

    pub(crate) fn arb_records() -> impl Strategy<Value = Vec<SidecarRecord>> {
        proptest::collection::vec((0u64..50, any::<bool>()), 0..60).prop_map(|steps| {
            let mut input = 0;
            steps
                .into_iter()
                .enumerate()
                .map(|(i, (gap, full))| {
                    let record = SidecarRecord {
                        input_frame: input + if i == 0 { 0 } else { gap + 1 },
                        output_frame: i as u64,
                        full_frame: full || i == 0,
                    };
                    input = record.input_frame;
                    record
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn read_inverts_write(records in arb_records()) {
            let bytes = write_sidecar(&records, Vec::new()).unwrap();
            prop_assert_eq!(read_sidecar(&bytes[..]).unwrap(), records);
        }
    }
}
