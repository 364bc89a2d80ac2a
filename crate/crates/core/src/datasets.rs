//! Loaders for externally supplied key files.
//!
//! Binary layout: an 8-byte little-endian count `m` followed by exactly `m`
//! 8-byte little-endian unsigned keys.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyFormat {
    BinaryU64,
    CsvTimestamp { column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub path: PathBuf,
    pub format: KeyFormat,
}

impl KeyFile {
    pub fn load(&self) -> Result<Vec<u64>> {
        match self.format {
            KeyFormat::BinaryU64 => load_binary_u64(&self.path),
            KeyFormat::CsvTimestamp { column } => Ok(load_csv_timestamps(&self.path, column)?.keys),
        }
    }

    /// File stem, used to label experiment output.
    pub fn label(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "keys".to_string())
    }
}

pub fn load_binary_u64(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_binary_u64(&bytes).map_err(|(offset, reason)| Error::Format {
        path: path.to_path_buf(),
        offset,
        reason,
    })
}

fn decode_binary_u64(bytes: &[u8]) -> std::result::Result<Vec<u64>, (u64, String)> {
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    if bytes.len() < 8 {
        return Err((0, format!("header needs 8 bytes, file has {}", bytes.len())));
    }
    let count = word(0);
    let payload = (bytes.len() - 8) as u64;
    if !payload.is_multiple_of(8) {
        return Err((
            8 + payload / 8 * 8,
            format!("payload of {payload} bytes is not a whole number of keys"),
        ));
    }
    let present = payload / 8;
    if present != count {
        let offset = 8 + 8 * present.min(count);
        return Err((offset, format!("header declares {count} keys, file holds {present}")));
    }
    Ok((0..count as usize).map(|i| word(8 + 8 * i)).collect())
}

pub fn write_binary_u64(path: impl AsRef<Path>, keys: &[u64]) -> Result<()> {
    let path = path.as_ref();
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&(keys.len() as u64).to_le_bytes())?;
        for k in keys {
            w.write_all(&k.to_le_bytes())?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvKeys {
    pub keys: Vec<u64>,
    /// Rows whose timestamp field was missing, malformed or before 1970.
    pub skipped: usize,
}

/// Reads `YYYY-MM-DD hh:mm:ss` timestamps from `column` (zero-based) of a
/// headed CSV file, converting them to Unix seconds.
pub fn load_csv_timestamps(path: impl AsRef<Path>, column: usize) -> Result<CsvKeys> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let width = reader.headers()?.len();
    if column >= width {
        return Err(Error::ColumnOutOfRange { column, width });
    }

    let mut keys = Vec::new();
    let mut skipped = 0;
    for record in reader.records() {
        let parsed = record.ok().and_then(|r| {
            let field = r.get(column)?.trim().to_string();
            let ts = NaiveDateTime::parse_from_str(&field, TIMESTAMP_FORMAT).ok()?;
            u64::try_from(ts.and_utc().timestamp()).ok()
        });
        match parsed {
            Some(k) => keys.push(k),
            None => skipped += 1,
        }
    }
    Ok(CsvKeys { keys, skipped })
}

/// `n` keys drawn without replacement and returned in random order
/// (partial Fisher–Yates over positions).
pub fn subsample<T: Copy>(keys: &[T], n: usize, seed: u64) -> Result<Vec<T>> {
    if n > keys.len() {
        return Err(Error::SubsampleTooLarge {
            requested: n,
            available: keys.len(),
        });
    }
    let mut positions: Vec<usize> = (0..keys.len()).collect();
    let mut rng = Rng::new(seed);
    for i in 0..n {
        let j = i + rng.index(keys.len() - i);
        positions.swap(i, j);
    }
    Ok(positions[..n].iter().map(|&p| keys[p]).collect())
}
