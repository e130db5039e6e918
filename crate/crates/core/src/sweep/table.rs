//! CSV formatting and the hashed file manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Scientific notation with the shortest digits that round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Incremental CSV writer; every row is flushed as soon as it is written.
pub struct CsvTable {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvTable {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        Self::create_with_preamble(path, &[], header)
    }

    /// Lines in `preamble` are written first, each prefixed with `# `.
    pub fn create_with_preamble(path: &Path, preamble: &[String], header: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = BufWriter::new(file);
        for line in preamble {
            writeln!(buf, "# {line}").map_err(|e| Error::io(path, e))?;
        }
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        inner.write_record(header).map_err(|e| csv_error(path, e))?;
        let mut t = CsvTable {
            path: path.to_path_buf(),
            inner,
        };
        t.flush()?;
        Ok(t)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|e| csv_error(&self.path, e))?;
        self.flush()
    }

    fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Malformed {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Reads a CSV (lines starting with `#` skipped) into header and records.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}

/// Column lookup over a parsed CSV.
pub struct Columns {
    path: PathBuf,
    header: Vec<String>,
}

impl Columns {
    pub fn new(path: &Path, header: Vec<String>) -> Self {
        Columns {
            path: path.to_path_buf(),
            header,
        }
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| Error::Malformed {
            path: self.path.clone(),
            message: format!("missing column `{name}`"),
        })
    }

    pub fn f64(&self, row: &[String], name: &str) -> Result<f64> {
        let raw = &row[self.index(name)?];
        raw.parse().map_err(|_| Error::Malformed {
            path: self.path.clone(),
            message: format!("column `{name}`: `{raw}` is not a number"),
        })
    }

    pub fn usize(&self, row: &[String], name: &str) -> Result<usize> {
        let raw = &row[self.index(name)?];
        raw.parse().map_err(|_| Error::Malformed {
            path: self.path.clone(),
            message: format!("column `{name}`: `{raw}` is not an integer"),
        })
    }

    pub fn str<'r>(&self, row: &'r [String], name: &str) -> Result<&'r str> {
        Ok(&row[self.index(name)?])
    }
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
    pub rows: usize,
    pub failed_rows: usize,
    /// Set when the run aborted before every output was written.
    pub partial: bool,
    pub note: Option<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn record(&mut self, root: &Path, file: &Path) -> Result<()> {
        let rel = file.strip_prefix(root).unwrap_or(file);
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let (sha256, bytes) = sha256_file(file)?;
        self.files.retain(|e| e.path != rel);
        self.files.push(ManifestEntry {
            path: rel,
            sha256,
            bytes,
        });
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(())
    }

    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let path = root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed {
            path,
            message: e.to_string(),
        })
    }

    /// Recomputes every hash; returns the paths whose content no longer
    /// matches (missing files included).
    pub fn verify(&self, root: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|e| !matches!(sha256_file(&root.join(&e.path)), Ok((h, n)) if h == e.sha256 && n == e.bytes))
            .map(|e| e.path.clone())
            .collect()
    }
}
