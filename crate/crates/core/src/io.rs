//! JSON encodings.
//!
//! Floats are written with 17 significant digits so that every `f64`
//! survives a write/read round trip bit for bit.

use std::collections::BTreeMap;
use std::io;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::loops::{CMatrix, FourierLoop, TruncationConfig, C64};

/// Pretty JSON with round-trip float formatting.
pub struct ExactFormatter<'a>(PrettyFormatter<'a>);

impl Default for ExactFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

fn write_exact<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
    if value.is_finite() {
        write!(writer, "{value:.16e}")
    } else {
        writer.write_all(b"null")
    }
}

impl Formatter for ExactFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write_exact(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write_exact(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFormatter::default());
    value.serialize(&mut ser)?;
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

/// Row-major `[[re, im], ...]` listing of a matrix.
pub fn matrix_entries(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            out.push([v.re, v.im]);
        }
    }
    out
}

fn matrix_from_entries(rows: usize, cols: usize, entries: &[[f64; 2]]) -> Result<CMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::Format(format!("expected {} entries, found {}", rows * cols, entries.len())));
    }
    Ok(CMatrix::from_row_iterator(rows, cols, entries.iter().map(|[re, im]| C64::new(*re, *im))))
}

struct ModeTable<'a>(&'a FourierLoop);

impl Serialize for ModeTable<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (k, c) in self.0.modes() {
            map.serialize_entry(&k.to_string(), &matrix_entries(c))?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct LoopFileOut<'a> {
    dim: usize,
    #[serde(skip_serializing_if = "is_one")]
    cols: usize,
    max_mode: usize,
    real: bool,
    modes: ModeTable<'a>,
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
struct LoopFileIn {
    dim: usize,
    #[serde(default = "one")]
    cols: usize,
    max_mode: usize,
    real: bool,
    modes: BTreeMap<String, Vec<[f64; 2]>>,
}

/// Encodes a loop in the loop file format. Matrix-valued loops carry an
/// extra `"cols"` field; coefficients are listed row-major.
pub fn loop_to_json(l: &FourierLoop) -> Result<String> {
    to_json(&loop_value(l))
}

fn loop_value(l: &FourierLoop) -> LoopFileOut<'_> {
    LoopFileOut { dim: l.dim(), cols: l.cols(), max_mode: l.max_mode(), real: l.is_real(), modes: ModeTable(l) }
}

pub fn loop_to_value(l: &FourierLoop) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(loop_value(l))?)
}

pub fn loop_from_json(text: &str, tol: f64) -> Result<FourierLoop> {
    let file: LoopFileIn = serde_json::from_str(text)?;
    let config = TruncationConfig::with_tol(file.max_mode, file.dim, tol)?;
    let modes = file
        .modes
        .iter()
        .map(|(k, entries)| {
            let mode: i64 = k.parse().map_err(|_| Error::Format(format!("mode key `{k}` is not an integer")))?;
            Ok((mode, matrix_from_entries(file.dim, file.cols, entries)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let l = FourierLoop::from_modes(config, file.cols, modes)?;
    if file.real {
        l.into_real()
    } else {
        Ok(l)
    }
}
