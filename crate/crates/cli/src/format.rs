//! Embedding table files.
//!
//! Text: one record per line, `label<TAB>x1 x2 ... xd`. Binary: the magic
//! `OLNS0001`, little-endian `u32` record count and dimension, then per
//! record a `u32` byte length, the UTF-8 label and `d` little-endian `f32`s.
//! Both formats store coordinates as `f32`; they are widened to `f64` once
//! on load, so the two loaders produce identical tables.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use ortho_lens::{EmbeddingTable, Vector};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"OLNS0001";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Text,
    Binary,
}

impl TableFormat {
    /// Binary if the bytes start with the magic, text otherwise.
    pub fn sniff(bytes: &[u8]) -> Self {
        if bytes.starts_with(MAGIC) {
            TableFormat::Binary
        } else {
            TableFormat::Text
        }
    }
}

fn parse_err(path: &str, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn parse_text(text: &str, path: &str) -> CliResult<EmbeddingTable> {
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (label, values) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(path, format!("line {line_no}: expected 'label<TAB>values'")))?;
        let mut coords = Vec::new();
        for field in values.split_whitespace() {
            let x: f32 = field
                .parse()
                .map_err(|_| parse_err(path, format!("line {line_no} ('{label}'): bad number '{field}'")))?;
            if !x.is_finite() {
                return Err(parse_err(
                    path,
                    format!("line {line_no} ('{label}'): non-finite value '{field}'"),
                ));
            }
            coords.push(f64::from(x));
        }
        if coords.is_empty() {
            return Err(parse_err(path, format!("line {line_no} ('{label}'): no coordinates")));
        }
        if let Some(first) = vectors.first().map(|v: &Vector| v.len()) {
            if coords.len() != first {
                return Err(parse_err(
                    path,
                    format!("line {line_no} ('{label}'): {} coordinates, expected {first}", coords.len()),
                ));
            }
        }
        labels.push(label.to_string());
        vectors.push(Vector::from_vec(coords));
    }
    if labels.is_empty() {
        return Err(parse_err(path, "no records"));
    }
    Ok(EmbeddingTable::new(labels, vectors)?)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> CliResult<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            parse_err(self.path, format!("offset {}: truncated while reading {what}", self.pos))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> CliResult<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }
}

pub fn parse_binary(bytes: &[u8], path: &str) -> CliResult<EmbeddingTable> {
    if !bytes.starts_with(MAGIC) {
        return Err(parse_err(path, "offset 0: missing OLNS0001 magic"));
    }
    let mut r = Reader { bytes, pos: 8, path };
    let n = r.u32("record count")? as usize;
    let d = r.u32("dimension")? as usize;
    if n == 0 {
        return Err(parse_err(path, "no records"));
    }
    if d == 0 {
        return Err(parse_err(path, "dimension is 0"));
    }
    let mut labels = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for rec in 0..n {
        let start = r.pos;
        let len = r.u32("label length")? as usize;
        let label = std::str::from_utf8(r.take(len, "label")?)
            .map_err(|_| parse_err(path, format!("offset {start}: record {rec} label is not UTF-8")))?
            .to_string();
        let raw = r.take(4 * d, "coordinates")?;
        let mut coords = Vec::with_capacity(d);
        for chunk in raw.chunks_exact(4) {
            let x = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
            if !x.is_finite() {
                return Err(parse_err(
                    path,
                    format!("offset {start}: record {rec} ('{label}') has a non-finite value"),
                ));
            }
            coords.push(f64::from(x));
        }
        labels.push(label);
        vectors.push(Vector::from_vec(coords));
    }
    if r.pos != bytes.len() {
        return Err(parse_err(path, format!("offset {}: trailing bytes after {n} records", r.pos)));
    }
    Ok(EmbeddingTable::new(labels, vectors)?)
}

pub fn load_table(path: &Path, format: Option<TableFormat>) -> CliResult<EmbeddingTable> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let name = path.display().to_string();
    match format.unwrap_or_else(|| TableFormat::sniff(&bytes)) {
        TableFormat::Binary => parse_binary(&bytes, &name),
        TableFormat::Text => {
            let text = std::str::from_utf8(&bytes).map_err(|e| parse_err(&name, format!("not UTF-8: {e}")))?;
            parse_text(text, &name)
        }
    }
}

fn check_labels(table: &EmbeddingTable) -> CliResult<()> {
    match table.labels().iter().find(|l| l.contains(['\t', '\n', '\r'])) {
        Some(l) => Err(CliError::usage(format!("label {l:?} cannot be written to a text table"))),
        None => Ok(()),
    }
}

/// Coordinates are narrowed to `f32` and printed in shortest round-trip form.
pub fn write_text(table: &EmbeddingTable) -> CliResult<String> {
    check_labels(table)?;
    let mut out = String::new();
    for (label, v) in table.labels().iter().zip(table.vectors()) {
        out.push_str(label);
        out.push('\t');
        for (k, x) in v.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", *x as f32);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_binary(table: &EmbeddingTable) -> CliResult<Vec<u8>> {
    let as_u32 = |x: usize, what: &str| u32::try_from(x).map_err(|_| CliError::usage(format!("{what} exceeds u32")));
    let mut out = Vec::with_capacity(16 + table.len() * (8 + 4 * table.dim()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&as_u32(table.len(), "record count")?.to_le_bytes());
    out.extend_from_slice(&as_u32(table.dim(), "dimension")?.to_le_bytes());
    for (label, v) in table.labels().iter().zip(table.vectors()) {
        out.extend_from_slice(&as_u32(label.len(), "label length")?.to_le_bytes());
        out.extend_from_slice(label.as_bytes());
        for x in v.iter() {
            out.extend_from_slice(&(*x as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn save_table(table: &EmbeddingTable, path: &Path, format: TableFormat) -> CliResult<()> {
    let bytes = match format {
        TableFormat::Text => write_text(table)?.into_bytes(),
        TableFormat::Binary => write_binary(table)?,
    };
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
