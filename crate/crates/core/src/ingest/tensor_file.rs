//! `.dfma` binary tensor files.
//!
//! Layout, all little-endian:
//!
//! | offset | size      | field                           |
//! |--------|-----------|---------------------------------|
//! | 0      | 4         | magic `b"DFMA"`                 |
//! | 4      | 2         | version, `u16` = 1              |
//! | 6      | 1         | rank, `u8`                      |
//! | 7      | 4 · rank  | dims, `u32` each                |
//! | …      | 4 · ∏dims | payload, IEEE-754 `f32`, row-major |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::SampleTensor;

pub const MAGIC: &[u8; 4] = b"DFMA";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 7;

/// Raw contents of a `.dfma` file.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub dims: Vec<u32>,
    pub data: Vec<f32>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

impl TensorFile {
    pub fn new(dims: Vec<u32>, data: Vec<f32>) -> Result<Self> {
        if dims.len() > u8::MAX as usize {
            return Err(format_err(format!("rank {} exceeds 255", dims.len())));
        }
        let count = element_count(&dims)?;
        if count != data.len() {
            return Err(Error::Shape(format!(
                "dims {dims:?} need {count} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * (self.dims.len() + self.data.len()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.dims.len() as u8);
        for d in &self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(format_err(format!(
                "truncated header: {} bytes",
                bytes.len()
            )));
        }
        if &bytes[..4] != MAGIC {
            return Err(format_err(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(&bytes[..4])
            )));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(format_err(format!("unsupported version {version}")));
        }
        let rank = bytes[6] as usize;
        let dims_end = HEADER_LEN + 4 * rank;
        if bytes.len() < dims_end {
            return Err(format_err("truncated dims"));
        }
        let dims: Vec<u32> = bytes[HEADER_LEN..dims_end]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let count = element_count(&dims)?;
        let payload = &bytes[dims_end..];
        let want = count
            .checked_mul(4)
            .ok_or_else(|| format_err("payload size overflows"))?;
        if payload.len() < want {
            return Err(format_err(format!(
                "truncated payload: {} of {want} bytes",
                payload.len()
            )));
        }
        if payload.len() > want {
            return Err(format_err(format!(
                "{} trailing bytes after payload",
                payload.len() - want
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self { dims, data })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.encode())?;
        Ok(())
    }
}

fn element_count(dims: &[u32]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
        .ok_or_else(|| format_err(format!("dims {dims:?} overflow")))
}

/// Reads an `(L, C, H, W)` sample; lower ranks are padded with trailing 1s.
pub fn read_tensor<T: Real>(path: &Path) -> Result<SampleTensor<T>> {
    let file = TensorFile::read(path)?;
    to_sample(file)
}

pub fn to_sample<T: Real>(file: TensorFile) -> Result<SampleTensor<T>> {
    if file.dims.is_empty() || file.dims.len() > 4 {
        return Err(format_err(format!(
            "expected rank 1..=4 for a sample tensor, got {}",
            file.dims.len()
        )));
    }
    let mut dims = [1usize; 4];
    for (slot, &d) in dims.iter_mut().zip(&file.dims) {
        *slot = d as usize;
    }
    let data = file.data.into_iter().map(|v| T::lit(v as f64)).collect();
    SampleTensor::new(dims, data)
}

pub fn write_tensor<T: Real>(tensor: &SampleTensor<T>, path: &Path) -> Result<()> {
    from_sample(tensor)?.write(path)
}

pub fn from_sample<T: Real>(tensor: &SampleTensor<T>) -> Result<TensorFile> {
    let dims = tensor
        .dims()
        .iter()
        .map(|&d| u32::try_from(d).map_err(|_| format_err(format!("dim {d} exceeds u32"))))
        .collect::<Result<Vec<_>>>()?;
    let data = tensor
        .data()
        .iter()
        .map(|v| v.to_f32().unwrap_or(f32::NAN))
        .collect();
    TensorFile::new(dims, data)
}
