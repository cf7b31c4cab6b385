//! File helpers for the JSON matrix and constellation formats and CSV output.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::constellation::{Constellation, ConstellationFile};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_json<D: DeserializeOwned>(path: impl AsRef<Path>) -> Result<D> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<S: Serialize>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_matrix<T: Real>(path: impl AsRef<Path>) -> Result<Matrix<T>> {
    read_json(path)
}

pub fn write_matrix<T: Real>(path: impl AsRef<Path>, m: &Matrix<T>) -> Result<()> {
    write_json(path, m)
}

pub fn read_constellation<T: Real>(path: impl AsRef<Path>) -> Result<Constellation<T>> {
    let file: ConstellationFile = read_json(path)?;
    Constellation::try_from(file)
}
