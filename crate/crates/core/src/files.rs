//! Schema-validated JSON persistence for artifacts.
//!
//! Encoding conventions, shared with the report serializers: a complex
//! scalar is a two-element array `[re, im]`, a matrix is a nested
//! row-major array of those, a state is a flat array. Latin squares are
//! `{"order": d, "cells": [[...]]}` with 0-based entries, pairs are
//! `{"first": ..., "second": ...}`, maskers are
//! `{"input_dim": K, "dims": [...], "matrix": [[...]], "provenance": "..."}`.
//!
//! Readers validate shape as they walk the document and report the JSON
//! path of the first offending element; numeric payloads round-trip
//! bit-identically through `serde_json`'s shortest-representation floats.

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::path::Path;
use thiserror::Error;

use crate::masker::{Masker, MaskerError, Provenance};
use crate::mols::{LatinSquare, MolsPair};
use crate::tensor::{ComplexMatrix, MultipartiteDims, StateVector};
use crate::verifier::{CodeSubspace, StateSet, VerifierError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Masker(#[from] MaskerError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
}

pub type FileResult<T> = Result<T, FileError>;

fn schema(path: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Schema { path: path.into(), message: message.into() }
}

fn as_object<'a>(v: &'a Value, path: &str) -> FileResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> FileResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> FileResult<&'a Value> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing required field \"{key}\"")))
}

fn as_count(v: &Value, path: &str) -> FileResult<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_number(v: &Value, path: &str) -> FileResult<f64> {
    v.as_f64().ok_or_else(|| schema(path, "expected a number"))
}

fn parse_complex(v: &Value, path: &str) -> FileResult<Complex64> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(path, "expected a complex scalar as [re, im]"))?;
    if arr.len() != 2 {
        return Err(schema(
            path,
            format!("expected a complex scalar as [re, im], found {} elements", arr.len()),
        ));
    }
    let re = as_number(&arr[0], &format!("{path}[0]"))?;
    let im = as_number(&arr[1], &format!("{path}[1]"))?;
    Ok(Complex64::new(re, im))
}

fn parse_state(v: &Value, path: &str) -> FileResult<StateVector> {
    let arr = as_array(v, path)?;
    let amplitudes = arr
        .iter()
        .enumerate()
        .map(|(i, entry)| parse_complex(entry, &format!("{path}[{i}]")))
        .collect::<FileResult<Vec<_>>>()?;
    Ok(StateVector::from_amplitudes(amplitudes))
}

fn parse_matrix(v: &Value, path: &str) -> FileResult<ComplexMatrix> {
    let rows = as_array(v, path)?;
    if rows.is_empty() {
        return Err(schema(path, "matrix needs at least one row"));
    }
    let mut cols = None;
    let mut entries = Vec::new();
    for (r, row_value) in rows.iter().enumerate() {
        let row_path = format!("{path}[{r}]");
        let row = as_array(row_value, &row_path)?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(schema(
                    row_path,
                    format!("row has {} entries, previous rows have {c}", row.len()),
                ))
            }
            _ => {}
        }
        for (c, entry) in row.iter().enumerate() {
            entries.push(parse_complex(entry, &format!("{row_path}[{c}]"))?);
        }
    }
    let cols = cols.unwrap_or(0);
    if cols == 0 {
        return Err(schema(path, "matrix needs at least one column"));
    }
    ComplexMatrix::from_entries(rows.len(), cols, entries)
        .map_err(|e| schema(path, e.to_string()))
}

fn parse_dims(v: &Value, path: &str) -> FileResult<MultipartiteDims> {
    let arr = as_array(v, path)?;
    let dims = arr
        .iter()
        .enumerate()
        .map(|(i, d)| as_count(d, &format!("{path}[{i}]")))
        .collect::<FileResult<Vec<_>>>()?;
    MultipartiteDims::new(dims).map_err(|e| schema(path, e.to_string()))
}

// ---------------------------------------------------------------------
// Latin squares and pairs

pub fn square_from_value(v: &Value, path: &str) -> FileResult<LatinSquare> {
    let obj = as_object(v, path)?;
    let order = as_count(field(obj, "order", path)?, &format!("{path}.order"))?;
    let cells_path = format!("{path}.cells");
    let rows = as_array(field(obj, "cells", path)?, &cells_path)?;
    if rows.len() != order {
        return Err(schema(
            cells_path,
            format!("declared order {order} but found {} rows", rows.len()),
        ));
    }
    let mut cells = Vec::with_capacity(order);
    for (r, row_value) in rows.iter().enumerate() {
        let row_path = format!("{cells_path}[{r}]");
        let row = as_array(row_value, &row_path)?;
        if row.len() != order {
            return Err(schema(
                row_path,
                format!("declared order {order} but row has {} entries", row.len()),
            ));
        }
        cells.push(
            row.iter()
                .enumerate()
                .map(|(c, entry)| as_count(entry, &format!("{row_path}[{c}]")))
                .collect::<FileResult<Vec<_>>>()?,
        );
    }
    Ok(LatinSquare { order, cells })
}

pub fn square_to_value(square: &LatinSquare) -> Value {
    json!({ "order": square.order, "cells": square.cells })
}

pub fn pair_from_value(v: &Value, path: &str) -> FileResult<MolsPair> {
    let obj = as_object(v, path)?;
    let first = square_from_value(field(obj, "first", path)?, &format!("{path}.first"))?;
    let second = square_from_value(field(obj, "second", path)?, &format!("{path}.second"))?;
    Ok(MolsPair { first, second })
}

pub fn pair_to_value(pair: &MolsPair) -> Value {
    json!({ "first": square_to_value(&pair.first), "second": square_to_value(&pair.second) })
}

// ---------------------------------------------------------------------
// Maskers

pub fn masker_from_value(v: &Value, path: &str) -> FileResult<Masker> {
    let obj = as_object(v, path)?;
    let input_dim = as_count(field(obj, "input_dim", path)?, &format!("{path}.input_dim"))?;
    let dims = parse_dims(field(obj, "dims", path)?, &format!("{path}.dims"))?;
    let matrix = parse_matrix(field(obj, "matrix", path)?, &format!("{path}.matrix"))?;
    let prov_path = format!("{path}.provenance");
    let provenance = match field(obj, "provenance", path)?.as_str() {
        Some("latin") => Provenance::Latin,
        Some("embedded") => Provenance::Embedded,
        Some("extended") => Provenance::Extended,
        Some("dilation-restricted") => Provenance::DilationRestricted,
        Some("user") => Provenance::User,
        Some(other) => {
            return Err(schema(
                prov_path,
                format!(
                    "unknown provenance \"{other}\"; expected latin, embedded, extended, \
                     dilation-restricted or user"
                ),
            ))
        }
        None => return Err(schema(prov_path, "expected a string")),
    };
    Ok(Masker::new(input_dim, dims, matrix, provenance)?)
}

pub fn masker_to_value(masker: &Masker) -> Value {
    json!({
        "input_dim": masker.input_dim(),
        "dims": masker.dims().dims(),
        "matrix": serde_json::to_value(masker.matrix()).expect("matrix serializes"),
        "provenance": masker.provenance().to_string(),
    })
}

// ---------------------------------------------------------------------
// Code subspaces

pub fn code_from_value(v: &Value, path: &str) -> FileResult<CodeSubspace> {
    let obj = as_object(v, path)?;
    let dims = parse_dims(field(obj, "dims", path)?, &format!("{path}.dims"))?;
    let basis_path = format!("{path}.basis");
    let basis = as_array(field(obj, "basis", path)?, &basis_path)?
        .iter()
        .enumerate()
        .map(|(i, b)| parse_state(b, &format!("{basis_path}[{i}]")))
        .collect::<FileResult<Vec<_>>>()?;
    Ok(CodeSubspace::new(dims, basis)?)
}

pub fn code_to_value(code: &CodeSubspace) -> Value {
    json!({
        "dims": code.dims().dims(),
        "basis": code.basis().iter()
            .map(|b| serde_json::to_value(b).expect("state serializes"))
            .collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------
// State sets

pub fn state_set_from_value(v: &Value, path: &str) -> FileResult<StateSet> {
    let obj = as_object(v, path)?;
    let states_path = format!("{path}.states");
    let states = as_array(field(obj, "states", path)?, &states_path)?
        .iter()
        .enumerate()
        .map(|(i, s)| parse_state(s, &format!("{states_path}[{i}]")))
        .collect::<FileResult<Vec<_>>>()?;
    let label = match obj.get("label") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Null) | None => None,
        Some(_) => return Err(schema(format!("{path}.label"), "expected a string")),
    };
    Ok(StateSet::new(states, label)?)
}

pub fn state_set_to_value(set: &StateSet) -> Value {
    let states: Vec<Value> = set
        .states()
        .iter()
        .map(|s| serde_json::to_value(s).expect("state serializes"))
        .collect();
    match set.label() {
        Some(label) => json!({ "states": states, "label": label }),
        None => json!({ "states": states }),
    }
}

// ---------------------------------------------------------------------
// Channel descriptors

/// A serializable description of a built-in one-erasure channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub dims: MultipartiteDims,
    pub subsystem: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Reset,
    Depolarize,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Reset => "reset",
            ChannelKind::Depolarize => "depolarize",
        }
    }
}

impl ChannelSpec {
    pub fn build(&self) -> Result<crate::erasure::KrausChannel, crate::erasure::ErasureError> {
        match self.kind {
            ChannelKind::Reset => crate::erasure::reset_channel(&self.dims, self.subsystem),
            ChannelKind::Depolarize => {
                crate::erasure::depolarize_channel(&self.dims, self.subsystem)
            }
        }
    }
}

pub fn channel_from_value(v: &Value, path: &str) -> FileResult<ChannelSpec> {
    let obj = as_object(v, path)?;
    let kind_path = format!("{path}.kind");
    let kind = match field(obj, "kind", path)?.as_str() {
        Some("reset") => ChannelKind::Reset,
        Some("depolarize") => ChannelKind::Depolarize,
        Some(other) => {
            return Err(schema(
                kind_path,
                format!("unknown channel kind \"{other}\"; expected reset or depolarize"),
            ))
        }
        None => return Err(schema(kind_path, "expected a string")),
    };
    let dims = parse_dims(field(obj, "dims", path)?, &format!("{path}.dims"))?;
    let subsystem = as_count(field(obj, "subsystem", path)?, &format!("{path}.subsystem"))?;
    if subsystem >= dims.n() {
        return Err(schema(
            format!("{path}.subsystem"),
            format!("subsystem {subsystem} out of range for {} factors", dims.n()),
        ));
    }
    Ok(ChannelSpec { kind, dims, subsystem })
}

pub fn channel_to_value(spec: &ChannelSpec) -> Value {
    json!({
        "kind": spec.kind.name(),
        "dims": spec.dims.dims(),
        "subsystem": spec.subsystem,
    })
}

// ---------------------------------------------------------------------
// Disk I/O

pub fn read_value(path: impl AsRef<Path>) -> FileResult<Value> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| FileError::Parse { path: path.display().to_string(), source })
}

pub fn write_value(path: impl AsRef<Path>, value: &Value) -> FileResult<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| FileError::Parse { path: path.display().to_string(), source })?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

pub fn load_square(path: impl AsRef<Path>) -> FileResult<LatinSquare> {
    square_from_value(&read_value(&path)?, "$")
}

pub fn save_square(path: impl AsRef<Path>, square: &LatinSquare) -> FileResult<()> {
    write_value(path, &square_to_value(square))
}

pub fn load_pair(path: impl AsRef<Path>) -> FileResult<MolsPair> {
    pair_from_value(&read_value(&path)?, "$")
}

pub fn save_pair(path: impl AsRef<Path>, pair: &MolsPair) -> FileResult<()> {
    write_value(path, &pair_to_value(pair))
}

pub fn load_masker(path: impl AsRef<Path>) -> FileResult<Masker> {
    masker_from_value(&read_value(&path)?, "$")
}

pub fn save_masker(path: impl AsRef<Path>, masker: &Masker) -> FileResult<()> {
    write_value(path, &masker_to_value(masker))
}

pub fn load_code(path: impl AsRef<Path>) -> FileResult<CodeSubspace> {
    code_from_value(&read_value(&path)?, "$")
}

pub fn save_code(path: impl AsRef<Path>, code: &CodeSubspace) -> FileResult<()> {
    write_value(path, &code_to_value(code))
}

pub fn load_state_set(path: impl AsRef<Path>) -> FileResult<StateSet> {
    state_set_from_value(&read_value(&path)?, "$")
}

pub fn load_channel(path: impl AsRef<Path>) -> FileResult<ChannelSpec> {
    channel_from_value(&read_value(&path)?, "$")
}

pub fn save_channel(path: impl AsRef<Path>, spec: &ChannelSpec) -> FileResult<()> {
    write_value(path, &channel_to_value(spec))
}
