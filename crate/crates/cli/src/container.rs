//! Result container: a single self-describing binary file.
//!
//! ```text
//! "QSWC" | u32 version | u32 section count
//! section: u32 name length | name (UTF-8) | u8 kind | body
//!   kind 0, text:  u64 length | UTF-8 bytes
//!   kind 1, array: u32 rank | u64 dims[rank] | f64 values, row-major
//! trailer: SHA-256 of every preceding byte
//! ```
//!
//! All integers and floats are little-endian. The first section is always
//! `metadata`, a JSON document.

use std::fs;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"QSWC";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;
const KIND_TEXT: u8 = 0;
const KIND_ARRAY: u8 = 1;

/// Row sums of `populations` must be within this of one.
pub const POPULATION_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("not a result container")]
    BadMagic,
    #[error("unsupported container version {0}")]
    Version(u32),
    #[error("checksum mismatch; file is truncated or corrupted")]
    Checksum,
    #[error("malformed container: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Array {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Array {
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        let width = self.shape[1..].iter().product::<usize>().max(1);
        self.data.chunks(width)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultContainer {
    pub metadata: Value,
    arrays: Vec<Array>,
}

impl ResultContainer {
    pub fn new(metadata: Value) -> Self {
        ResultContainer {
            metadata,
            arrays: Vec::new(),
        }
    }

    pub fn push_array(&mut self, name: &str, shape: Vec<usize>, data: Vec<f64>) -> Result<(), ContainerError> {
        if name == "metadata" || self.array(name).is_some() {
            return Err(ContainerError::Malformed(format!("duplicate section `{name}`")));
        }
        if shape.iter().product::<usize>() != data.len() {
            return Err(ContainerError::Malformed(format!(
                "`{name}` has {} values for shape {shape:?}",
                data.len()
            )));
        }
        self.arrays.push(Array {
            name: name.to_owned(),
            shape,
            data,
        });
        Ok(())
    }

    pub fn array(&self, name: &str) -> Option<&Array> {
        self.arrays.iter().find(|a| a.name == name)
    }

    pub fn arrays(&self) -> &[Array] {
        &self.arrays
    }

    /// Shapes agree with `n_times` / `n_vertices` in the metadata and each
    /// population row sums to one.
    pub fn validate(&self) -> Result<(), ContainerError> {
        let bad = |m: String| Err(ContainerError::Malformed(m));
        let get = |key: &str| self.metadata.get(key).and_then(Value::as_u64).map(|v| v as usize);
        let (Some(q), Some(n)) = (get("n_times"), get("n_vertices")) else {
            return bad("metadata lacks n_times or n_vertices".into());
        };
        match self.array("times") {
            Some(t) if t.shape == [q] => {}
            _ => return bad(format!("`times` must have shape [{q}]")),
        }
        if let Some(p) = self.array("populations") {
            if p.shape != [q, n] {
                return bad(format!("`populations` has shape {:?}, expected [{q}, {n}]", p.shape));
            }
            for (k, row) in p.rows().enumerate() {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > POPULATION_SUM_TOL {
                    return bad(format!("populations at time index {k} sum to {sum}"));
                }
            }
        }
        if let Some(d) = get("density_dim") {
            for name in ["rho_re", "rho_im"] {
                if let Some(a) = self.array(name) {
                    if a.shape != [q, d, d] {
                        return bad(format!("`{name}` has shape {:?}", a.shape));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.arrays.len() as u32 + 1).to_le_bytes());
        let text = serde_json::to_string_pretty(&self.metadata).expect("JSON values serialise");
        write_name(&mut out, "metadata");
        out.push(KIND_TEXT);
        out.extend_from_slice(&(text.len() as u64).to_le_bytes());
        out.extend_from_slice(text.as_bytes());
        for a in &self.arrays {
            write_name(&mut out, &a.name);
            out.push(KIND_ARRAY);
            out.extend_from_slice(&(a.shape.len() as u32).to_le_bytes());
            for &d in &a.shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for &x in &a.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(ContainerError::BadMagic);
        }
        if bytes.len() < 12 + DIGEST_LEN {
            return Err(ContainerError::Checksum);
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != digest {
            return Err(ContainerError::Checksum);
        }
        let mut r = Reader { bytes: body, pos: 4 };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(ContainerError::Version(version));
        }
        let count = r.u32()?;
        let mut metadata = None;
        let mut arrays = Vec::new();
        for _ in 0..count {
            let name = r.name()?;
            match r.take(1)?[0] {
                KIND_TEXT => {
                    let len = r.len_u64()?;
                    let text =
                        std::str::from_utf8(r.take(len)?).map_err(|e| ContainerError::Malformed(e.to_string()))?;
                    if name == "metadata" {
                        metadata =
                            Some(serde_json::from_str(text).map_err(|e| ContainerError::Malformed(e.to_string()))?);
                    }
                }
                KIND_ARRAY => {
                    let rank = r.u32()? as usize;
                    let shape = (0..rank).map(|_| r.len_u64()).collect::<Result<Vec<_>, _>>()?;
                    let n = shape
                        .iter()
                        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
                        .ok_or_else(|| ContainerError::Malformed(format!("`{name}` is too large")))?;
                    let raw = r.take(
                        n.checked_mul(8)
                            .ok_or_else(|| ContainerError::Malformed("size".into()))?,
                    )?;
                    let data = raw
                        .chunks_exact(8)
                        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                        .collect();
                    arrays.push(Array { name, shape, data });
                }
                k => return Err(ContainerError::Malformed(format!("unknown section kind {k}"))),
            }
        }
        if r.pos != body.len() {
            return Err(ContainerError::Malformed("trailing bytes after last section".into()));
        }
        let metadata = metadata.ok_or_else(|| ContainerError::Malformed("no metadata section".into()))?;
        Ok(ResultContainer { metadata, arrays })
    }
}

fn write_name(out: &mut Vec<u8>, name: &str) {
    out.extend_from_slice(&(name.len() as u32).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| ContainerError::Malformed("section runs past end of file".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn len_u64(&mut self) -> Result<usize, ContainerError> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| ContainerError::Malformed(format!("length {v} too large")))
    }

    fn name(&mut self) -> Result<String, ContainerError> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|e| ContainerError::Malformed(e.to_string()))
    }
}

/// Validates, then writes through a temporary file so a failed write leaves
/// nothing at `path`.
pub fn write_container(container: &ResultContainer, path: &Path) -> Result<(), ContainerError> {
    container.validate()?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    fs::write(&tmp, container.to_bytes())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_container(path: &Path) -> Result<ResultContainer, ContainerError> {
    ResultContainer::from_bytes(&fs::read(path)?)
}
