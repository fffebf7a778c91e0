use std::io::Read;

use crate::error::{Error, Result};

/// Rows of text fields exactly as read, before dictionary encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    rows: Vec<Vec<String>>,
    width: usize,
    header: Option<Vec<String>>,
}

impl RawTable {
    /// Builds a table from in-memory rows. Every row must have `width` fields.
    pub fn new(rows: Vec<Vec<String>>, header: Option<Vec<String>>) -> Result<Self> {
        let width = match (&header, rows.first()) {
            (Some(h), _) => h.len(),
            (None, Some(r)) => r.len(),
            (None, None) => return Err(Error::EmptyInput),
        };
        if width == 0 {
            return Err(Error::InvalidParameter("a table needs at least one column".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                let line = i + 1 + usize::from(header.is_some());
                return Err(Error::RaggedRow {
                    line,
                    expected: width,
                    found: row.len(),
                });
            }
        }
        Ok(RawTable {
            rows,
            width,
            header,
        })
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn header(&self) -> Option<&[String]> {
        self.header.as_deref()
    }
}

/// Reads a delimited text table. Fields may be double-quoted. Blank lines are
/// skipped; line numbers in errors are 1-based.
pub fn load_delimited<R: Read>(source: R, delimiter: char, has_header: bool) -> Result<RawTable> {
    let delimiter = u8::try_from(delimiter)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::InvalidParameter(format!("delimiter {delimiter:?} is not ASCII")))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut record = csv::ByteRecord::new();
    loop {
        match reader.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                return Err(match e.into_kind() {
                    csv::ErrorKind::Io(io) => Error::Io(io),
                    other => Error::InvalidParameter(format!("malformed input: {other:?}")),
                })
            }
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields = record
            .iter()
            .map(|f| String::from_utf8(f.to_vec()).map_err(|_| Error::InvalidUtf8 { line }))
            .collect::<Result<Vec<_>>>()?;
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::RaggedRow { line, expected: w, found: fields.len() })
            }
            Some(_) => {}
        }
        if has_header && header.is_none() {
            header = Some(fields);
        } else {
            rows.push(fields);
        }
    }
    let width = width.ok_or(Error::EmptyInput)?;
    Ok(RawTable { rows, width, header })
}
