//! `PWF1` grid snapshots: a little-endian header followed by raw `f64`
//! fields.
//!
//! ```text
//! "PWF1" | u32 version | u32 N | f64 L | f64 t | u32 field_count
//! field_count × (u32 name_len | ASCII name)
//! field_count × N² f64, row-major
//! ```

use std::path::Path;

use crate::dynamics::SnapshotRecord;
use crate::error::{Error, Result};
use crate::spectral::{Grid, GridField};
use crate::topography::Topography;

pub const MAGIC: &[u8; 4] = b"PWF1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u32,
    pub length: f64,
    pub t: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn from_record(grid: &Grid, rec: &SnapshotRecord) -> Self {
        Snapshot {
            n: grid.n as u32,
            length: grid.length,
            t: rec.t,
            fields: vec![("eta".into(), rec.eta.values.clone()), ("phi".into(), rec.phi.values.clone())],
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_slice())
    }

    pub fn header_len(&self) -> usize {
        32 + self.fields.iter().map(|(name, _)| 4 + name.len()).sum::<usize>()
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let cells = (self.n as usize) * (self.n as usize);
        let mut out = Vec::with_capacity(self.header_len() + 8 * cells * self.fields.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.length.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&(self.fields.len() as u32).to_le_bytes());
        for (name, values) in &self.fields {
            if !name.is_ascii() {
                return Err(Error::Format(format!("field name '{name}' is not ASCII")));
            }
            if values.len() != cells {
                return Err(Error::SizeMismatch {
                    expected: cells,
                    found: values.len(),
                });
            }
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        for (_, values) in &self.fields {
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic (expected PWF1)".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = r.u32()?;
        let length = r.f64()?;
        let t = r.f64()?;
        let count = r.u32()? as usize;
        let mut names = Vec::with_capacity(count.min(64));
        for _ in 0..count {
            let len = r.u32()? as usize;
            let raw = r.take(len)?;
            if !raw.is_ascii() {
                return Err(Error::Format("field name is not ASCII".into()));
            }
            names.push(String::from_utf8(raw.to_vec()).expect("ascii"));
        }
        let cells = (n as usize) * (n as usize);
        let mut fields = Vec::with_capacity(count);
        for name in names {
            let raw = r.take(8 * cells)?;
            let values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
            fields.push((name, values));
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes after payload", bytes.len() - r.pos)));
        }
        Ok(Snapshot { n, length, t, fields })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::Format(format!("truncated at byte {} (wanted {len} more)", self.pos)));
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    std::fs::write(path, snap.encode()?).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Snapshot::decode(&bytes)
}

/// Single-field snapshot holding the depth under the name `H`.
pub fn topography_snapshot(topo: &Topography) -> Snapshot {
    Snapshot {
        n: topo.grid.n as u32,
        length: topo.grid.length,
        t: 0.0,
        fields: vec![("H".into(), topo.depth.values.clone())],
    }
}

pub fn write_topography(path: &Path, topo: &Topography) -> Result<()> {
    write_snapshot(path, &topography_snapshot(topo))
}

pub fn read_topography(path: &Path) -> Result<Topography> {
    let snap = read_snapshot(path)?;
    let values = snap
        .field("H")
        .ok_or_else(|| Error::Format(format!("{}: no field named H", path.display())))?
        .to_vec();
    let grid = Grid::new(snap.length, snap.n as usize)?;
    Topography::from_field(grid, GridField { n: grid.n, values })
}
