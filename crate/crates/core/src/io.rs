// SPDX-License-Identifier: Apache-2.0

//! JSON files for operators, states, jets and measurement records.
//!
//! Complex numbers are written as `[re, im]` pairs. Every file carries a
//! `kind` tag and, except records, a `dim` that must match the payload.
//! Floats are printed shortest-round-trip and parsed correctly rounded, so
//! a save/load cycle reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Operator, ProjectiveState, C64};
use crate::ncgeom::NCValue;
use crate::tomography::MeasurementRecord;

type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn unpair(p: Pair, what: &'static str) -> Result<C64> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(C64::new(p[0], p[1]))
    } else {
        Err(Error::NonFinite(what))
    }
}

fn vector_out(v: &DVector<C64>) -> Vec<Pair> {
    v.iter().map(|&z| pair(z)).collect()
}

fn vector_in(v: &[Pair], dim: usize, what: &'static str) -> Result<DVector<C64>> {
    if v.len() != dim {
        return Err(Error::Schema(format!(
            "{what}: dim is {dim} but {} entries given",
            v.len()
        )));
    }
    let data = v
        .iter()
        .map(|&p| unpair(p, what))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(data))
}

fn matrix_out(m: &DMatrix<C64>) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

fn matrix_in(rows: &[Vec<Pair>], dim: usize, what: &'static str) -> Result<DMatrix<C64>> {
    if rows.len() != dim {
        return Err(Error::Schema(format!(
            "{what}: dim is {dim} but {} rows given",
            rows.len()
        )));
    }
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Schema(format!(
                "{what}: row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (j, &p) in row.iter().enumerate() {
            m[(i, j)] = unpair(p, what)?;
        }
    }
    Ok(m)
}

fn check_kind(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "expected kind \"{expected}\", found \"{found}\""
        )))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    kind: String,
    dim: usize,
    entries: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    kind: String,
    dim: usize,
    amplitudes: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NCValueFile {
    kind: String,
    dim: usize,
    base: Vec<Pair>,
    f: Pair,
    grad_z: Vec<Pair>,
    grad_zbar: Vec<Pair>,
    hess: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
struct RecordFile {
    kind: String,
    #[serde(flatten)]
    record: MeasurementRecord,
}

/// Values with a JSON file representation.
pub trait JsonFile: Sized {
    fn to_json(&self) -> Result<String>;
    fn from_json(text: &str) -> Result<Self>;
}

impl JsonFile for Operator {
    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&OperatorFile {
            kind: "operator".into(),
            dim: self.dim(),
            entries: matrix_out(self.matrix()),
        })?)
    }

    fn from_json(text: &str) -> Result<Self> {
        let file: OperatorFile = serde_json::from_str(text)?;
        check_kind(&file.kind, "operator")?;
        Operator::from_matrix(matrix_in(&file.entries, file.dim, "operator entries")?)
    }
}

impl JsonFile for ProjectiveState {
    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&StateFile {
            kind: "state".into(),
            dim: self.dim(),
            amplitudes: vector_out(self.amplitudes()),
        })?)
    }

    /// Loaded amplitudes are gauge-fixed; a canonical vector is kept as is.
    fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        check_kind(&file.kind, "state")?;
        ProjectiveState::from_vector(vector_in(&file.amplitudes, file.dim, "state amplitudes")?)
    }
}

impl JsonFile for NCValue {
    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&NCValueFile {
            kind: "ncvalue".into(),
            dim: self.dim(),
            base: vector_out(self.base().amplitudes()),
            f: pair(self.f()),
            grad_z: vector_out(self.grad_z()),
            grad_zbar: vector_out(self.grad_zbar()),
            hess: matrix_out(self.hess()),
        })?)
    }

    fn from_json(text: &str) -> Result<Self> {
        let file: NCValueFile = serde_json::from_str(text)?;
        check_kind(&file.kind, "ncvalue")?;
        let n = file.dim;
        let base = ProjectiveState::from_vector(vector_in(&file.base, n, "ncvalue base")?)?;
        NCValue::new(
            base,
            unpair(file.f, "ncvalue f")?,
            vector_in(&file.grad_z, n, "ncvalue grad_z")?,
            vector_in(&file.grad_zbar, n, "ncvalue grad_zbar")?,
            matrix_in(&file.hess, n, "ncvalue hess")?,
        )
    }
}

impl JsonFile for MeasurementRecord {
    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&RecordFile {
            kind: "record".into(),
            record: self.clone(),
        })?)
    }

    fn from_json(text: &str) -> Result<Self> {
        let file: RecordFile = serde_json::from_str(text)?;
        check_kind(&file.kind, "record")?;
        file.record.validate()?;
        Ok(file.record)
    }
}

pub fn save<T: JsonFile>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, value.to_json()?)?;
    Ok(())
}

pub fn load<T: JsonFile>(path: impl AsRef<Path>) -> Result<T> {
    T::from_json(&fs::read_to_string(path)?)
}
