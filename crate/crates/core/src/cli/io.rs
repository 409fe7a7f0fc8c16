//! Output formats: columnar text tables, the `WARC` binary grid format,
//! atomic file writes, the run manifest and the machine-readable error
//! record.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Magic bytes opening every binary grid.
pub const WARC_MAGIC: &[u8; 4] = b"WARC";
/// Current binary format version.
pub const WARC_VERSION: u32 = 1;

/// A numeric table with `key=value` metadata, written as UTF-8 text with
/// `#`-prefixed header lines and comma-separated rows. Floats use the
/// shortest decimal that round-trips.
#[derive(Clone, Debug, PartialEq)]
pub struct Columnar {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Columnar {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Columnar {
        Columnar { meta: Vec::new(), columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Columnar {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# {}", self.columns.join(","));
        for row in &self.rows {
            let mut first = true;
            for x in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{x:?}");
            }
            out.push('\n');
        }
        out
    }

    /// Parse text produced by [`Columnar::render`]. The last header line
    /// names the columns; earlier ones are metadata.
    pub fn parse(text: &str) -> Result<Columnar> {
        let mut headers = Vec::new();
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(h) = line.strip_prefix('#') {
                if !rows.is_empty() {
                    return Err(Error::Format(format!("line {}: header after data", n + 1)));
                }
                headers.push(h.trim().to_string());
            } else if !line.trim().is_empty() {
                let row = line
                    .split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Format(format!("line {}: '{c}': {e}", n + 1))))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
        }
        let columns_line = headers.pop().ok_or_else(|| Error::Format("missing column header".into()))?;
        let columns: Vec<String> = columns_line.split(',').map(|c| c.trim().to_string()).collect();
        let mut meta = Vec::new();
        for h in headers {
            let (k, v) = h.split_once('=').ok_or_else(|| Error::Format(format!("metadata line '{h}' is not key=value")))?;
            meta.push((k.to_string(), v.to_string()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != columns.len()) {
            return Err(Error::Format(format!("row of {} values for {} columns", r.len(), columns.len())));
        }
        Ok(Columnar { meta, columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Values of a binary grid.
#[derive(Clone, Debug, PartialEq)]
pub enum GridData {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

impl GridData {
    pub fn len(&self) -> usize {
        match self {
            GridData::Real(v) => v.len(),
            GridData::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Row-major n-dimensional array.
///
/// Layout: `"WARC"`, version (`u32`), rank (`u32`), `rank` dimensions
/// (`u64` each), one flag byte (`0` real, `1` complex), then the values as
/// little-endian `f64`, complex values interleaved `re, im`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryGrid {
    pub dims: Vec<u64>,
    pub data: GridData,
}

impl BinaryGrid {
    pub fn real(dims: &[usize], values: Vec<f64>) -> Result<BinaryGrid> {
        BinaryGrid::checked(dims, GridData::Real(values))
    }

    pub fn complex(dims: &[usize], values: Vec<C64>) -> Result<BinaryGrid> {
        BinaryGrid::checked(dims, GridData::Complex(values))
    }

    fn checked(dims: &[usize], data: GridData) -> Result<BinaryGrid> {
        let n: usize = dims.iter().product();
        if n != data.len() {
            return Err(Error::Format(format!("{} values for dimensions {dims:?}", data.len())));
        }
        Ok(BinaryGrid { dims: dims.iter().map(|&d| d as u64).collect(), data })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(17 + 8 * self.dims.len() + 16 * self.data.len());
        out.extend_from_slice(WARC_MAGIC);
        out.extend_from_slice(&WARC_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for d in &self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        match &self.data {
            GridData::Real(v) => {
                out.push(0);
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            GridData::Complex(v) => {
                out.push(1);
                for z in v {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<BinaryGrid> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != WARC_MAGIC {
            return Err(Error::Format("not a WARC grid (bad magic)".into()));
        }
        let version = u32::from_le_bytes(r.array()?);
        if version != WARC_VERSION {
            return Err(Error::Format(format!("unsupported WARC version {version}")));
        }
        let rank = u32::from_le_bytes(r.array()?) as usize;
        let dims = (0..rank).map(|_| r.array().map(u64::from_le_bytes)).collect::<Result<Vec<u64>>>()?;
        let n = dims.iter().try_fold(1u64, |a, &d| a.checked_mul(d)).ok_or_else(|| Error::Format("dimensions overflow".into()))? as usize;
        let flag = r.take(1)?[0];
        let data = match flag {
            0 => GridData::Real((0..n).map(|_| r.array().map(f64::from_le_bytes)).collect::<Result<_>>()?),
            1 => GridData::Complex(
                (0..n)
                    .map(|_| Ok(C64::new(f64::from_le_bytes(r.array()?), f64::from_le_bytes(r.array()?))))
                    .collect::<Result<_>>()?,
            ),
            f => return Err(Error::Format(format!("unknown value flag {f}"))),
        };
        if r.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(BinaryGrid { dims, data })
    }

    pub fn read(path: &Path) -> Result<BinaryGrid> {
        BinaryGrid::decode(&fs::read(path)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| Error::Format("truncated WARC grid".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write through a temporary sibling and rename, so readers never observe
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| Error::Format(format!("'{}' has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// One file written by a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Output directory of one run; records every file for the manifest.
#[derive(Debug)]
pub struct OutputDir {
    pub dir: PathBuf,
    pub files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<OutputDir> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(OutputFile { name: name.to_string(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn table(&mut self, name: &str, table: &Columnar) -> Result<PathBuf> {
        self.write(name, table.render().as_bytes())
    }

    pub fn grid(&mut self, name: &str, grid: &BinaryGrid) -> Result<PathBuf> {
        self.write(name, &grid.encode())
    }

    /// Write `manifest.csv`: command, config hash and wall time as metadata,
    /// then one `file,bytes,sha256` row per output.
    pub fn manifest(&mut self, command: &str, config_sha256: &str, wall_time_s: f64) -> Result<PathBuf> {
        let mut text = String::new();
        let _ = writeln!(text, "# command={command}");
        let _ = writeln!(text, "# config_sha256={config_sha256}");
        let _ = writeln!(text, "# wall_time_s={wall_time_s}");
        let _ = writeln!(text, "# version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "# file,bytes,sha256");
        for f in &self.files {
            let _ = writeln!(text, "{},{},{}", f.name, f.bytes, f.sha256);
        }
        let path = self.dir.join("manifest.csv");
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// Machine-readable description of a failed run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub exit_code: i32,
    pub message: String,
    pub details: Vec<String>,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> ErrorRecord {
        let details = match e {
            Error::Config(list) => list.clone(),
            _ => Vec::new(),
        };
        ErrorRecord { error: e.kind().to_string(), exit_code: e.exit_code(), message: e.to_string(), details }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columnar_round_trip() {
        let mut t = Columnar::new(&["a", "b"]).meta("omega", 0.25);
        t.push(vec![0.1 + 0.2, -1e-300]);
        t.push(vec![f64::NAN, 3.0]);
        let text = t.render();
        assert!(text.starts_with("# omega=0.25\n# a,b\n0.30000000000000004,"));
        let back = Columnar::parse(&text).unwrap();
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][0].is_nan());
        assert_eq!(back.get_meta("omega"), Some("0.25"));
        assert_eq!(back.column("b").unwrap()[1], 3.0);
    }

    #[test]
    fn warc_layout() {
        let g = BinaryGrid::real(&[2, 1], vec![1.0, -0.5]).unwrap();
        let b = g.encode();
        assert_eq!(&b[..4], b"WARC");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(b[12..20].try_into().unwrap()), 2);
        assert_eq!(b[28], 0);
        assert_eq!(b.len(), 29 + 16);
        assert_eq!(BinaryGrid::decode(&b).unwrap(), g);
        let c = BinaryGrid::complex(&[1], vec![C64::new(1.0, -2.0)]).unwrap();
        let bc = c.encode();
        assert_eq!(bc[20], 1);
        assert_eq!(BinaryGrid::decode(&bc).unwrap(), c);
    }

    #[test]
    fn malformed_grids_are_rejected() {
        assert!(BinaryGrid::real(&[3], vec![1.0]).is_err());
        let b = BinaryGrid::real(&[2], vec![1.0, 2.0]).unwrap().encode();
        assert!(matches!(BinaryGrid::decode(&b[..b.len() - 1]), Err(Error::Format(_))));
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(BinaryGrid::decode(&bad).is_err());
        let mut flag = b.clone();
        flag[20] = 7;
        assert!(BinaryGrid::decode(&flag).is_err());
    }

    #[test]
    fn manifest_lists_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("a.txt", b"hello").unwrap();
        let m = out.manifest("bands", "abc", 0.5).unwrap();
        let text = fs::read_to_string(m).unwrap();
        assert!(text.contains(&format!("a.txt,5,{}", sha256_hex(b"hello"))));
        assert!(text.contains("# config_sha256=abc"));
        assert!(!dir.path().join(".a.txt.tmp").exists());
    }

    #[test]
    fn error_record_is_json() {
        let r = ErrorRecord::from_error(&Error::Config(vec!["x".into(), "y".into()]));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["exit_code"], 2);
        assert_eq!(v["details"][1], "y");
    }
}
