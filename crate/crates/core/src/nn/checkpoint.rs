//! Binary checkpoint format.
//!
//! ```text
//! magic     8 bytes   "BLASTNN\0"
//! version   u32 LE
//! header    u32 LE length, then UTF-8 "key=value" lines
//! tensors   u32 LE count, then per tensor: u32 name length, name,
//!           u32 rank, rank x u32 dims
//! data      every tensor's values as f32 LE, in table order
//! ```
//!
//! The header records the observation channel legend, network shape and
//! init scheme; free-form metadata (e.g. the training config) rides along.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use super::network::{NetShape, NetworkParams, PARAM_NAMES};
use super::tensor::Tensor;
use crate::obs::ChannelLegend;

pub const MAGIC: &[u8; 8] = b"BLASTNN\0";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub legend: ChannelLegend,
    pub params: NetworkParams<f32>,
    pub meta: BTreeMap<String, String>,
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn corrupt(msg: impl Into<String>) -> CheckpointError {
    CheckpointError::Corrupt(msg.into())
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let s = self.params.shape;
        let mut header = String::new();
        header.push_str(&format!("legend={}\n", self.legend.0.join(",")));
        header.push_str(&format!("width={}\n", s.width));
        header.push_str(&format!("height={}\n", s.height));
        header.push_str(&format!("in_channels={}\n", s.in_channels));
        let cc = s.conv_channels;
        header.push_str(&format!("conv_channels={},{},{}\n", cc[0], cc[1], cc[2]));
        header.push_str(&format!("init={}\n", self.params.init));
        for (k, v) in &self.meta {
            // newlines would break the line-oriented header
            header.push_str(&format!("meta.{k}={}\n", v.replace('\n', "\\n")));
        }

        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, VERSION);
        put_u32(&mut out, header.len() as u32);
        out.extend_from_slice(header.as_bytes());
        put_u32(&mut out, self.params.tensors.len() as u32);
        for (name, t) in PARAM_NAMES.iter().zip(&self.params.tensors) {
            put_u32(&mut out, name.len() as u32);
            out.extend_from_slice(name.as_bytes());
            put_u32(&mut out, t.shape.len() as u32);
            for &d in &t.shape {
                put_u32(&mut out, d as u32);
            }
        }
        for t in &self.params.tensors {
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = bytes;
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| CheckpointError::BadMagic)?;
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let u32_of = |r: &mut &[u8]| -> Result<u32, CheckpointError> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b).map_err(|_| corrupt("truncated"))?;
            Ok(u32::from_le_bytes(b))
        };
        let version = u32_of(&mut r)?;
        if version != VERSION {
            return Err(CheckpointError::Version(version));
        }
        let header_len = u32_of(&mut r)? as usize;
        if r.len() < header_len {
            return Err(corrupt("truncated header"));
        }
        let header =
            std::str::from_utf8(&r[..header_len]).map_err(|_| corrupt("header is not UTF-8"))?;
        r = &r[header_len..];

        let mut fields = BTreeMap::new();
        let mut meta = BTreeMap::new();
        for line in header.lines() {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| corrupt(format!("header line {line:?}")))?;
            match k.strip_prefix("meta.") {
                Some(mk) => meta.insert(mk.to_string(), v.replace("\\n", "\n")),
                None => fields.insert(k.to_string(), v.to_string()),
            };
        }
        let field = |k: &str| {
            fields
                .get(k)
                .ok_or_else(|| corrupt(format!("missing header field {k}")))
        };
        let num = |k: &str| -> Result<usize, CheckpointError> {
            field(k)?.parse().map_err(|_| corrupt(format!("bad {k}")))
        };
        let legend = ChannelLegend(field("legend")?.split(',').map(str::to_string).collect());
        let cc: Vec<usize> = field("conv_channels")?
            .split(',')
            .map(|x| x.parse().map_err(|_| corrupt("bad conv_channels")))
            .collect::<Result<_, _>>()?;
        let cc: [usize; 3] = cc
            .try_into()
            .map_err(|_| corrupt("conv_channels needs 3 values"))?;
        let shape = NetShape::new(num("width")?, num("height")?, num("in_channels")?)
            .with_conv_channels(cc);
        if legend.channels() != shape.in_channels {
            return Err(corrupt("legend length differs from input channels"));
        }
        let init = field("init")?.clone();

        let count = u32_of(&mut r)? as usize;
        let expected = shape.param_shapes();
        if count != expected.len() {
            return Err(corrupt(format!(
                "{count} tensors, expected {}",
                expected.len()
            )));
        }
        for (name, want) in PARAM_NAMES.iter().zip(&expected) {
            let n = u32_of(&mut r)? as usize;
            if r.len() < n {
                return Err(corrupt("truncated tensor table"));
            }
            if &r[..n] != name.as_bytes() {
                return Err(corrupt(format!("expected tensor {name}")));
            }
            r = &r[n..];
            let rank = u32_of(&mut r)? as usize;
            let dims = (0..rank)
                .map(|_| u32_of(&mut r).map(|d| d as usize))
                .collect::<Result<Vec<_>, _>>()?;
            if &dims != want {
                return Err(corrupt(format!(
                    "tensor {name} has shape {dims:?}, expected {want:?}"
                )));
            }
        }
        let mut tensors = Vec::with_capacity(count);
        for want in &expected {
            let n: usize = want.iter().product();
            if r.len() < n * 4 {
                return Err(corrupt("truncated tensor data"));
            }
            let data = r[..n * 4]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            r = &r[n * 4..];
            tensors.push(Tensor::from_vec(want, data).map_err(|e| corrupt(e.to_string()))?);
        }
        if !r.is_empty() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Checkpoint {
            legend,
            params: NetworkParams {
                shape,
                init,
                tensors,
            },
            meta,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_bytes(&fs::read(path)?)
    }
}
