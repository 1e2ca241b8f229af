//! Binary checkpoint format, little-endian throughout:
//!
//! | field        | type          |
//! |--------------|---------------|
//! | magic        | `b"GNAVCKPT"` |
//! | version      | u32           |
//! | arch         | 7 × u32       |
//! | adam_t       | u64           |
//! | weights      | f64 arrays    |
//! | adam_m       | f64 arrays    |
//! | adam_v       | f64 arrays    |
//!
//! Arrays are stored in the order conv_w, conv_b, fc_w, fc_b with lengths
//! implied by the architecture.

use std::fs;
use std::path::Path;

use super::{NetworkArch, NetworkParams, Weights};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"GNAVCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

impl NetworkParams {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 3 * 8 * self.weights.len());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        let a = &self.arch;
        for dim in [
            a.input_h,
            a.input_w,
            a.conv_filters,
            a.conv_kernel,
            a.conv_stride,
            a.conv_padding,
            a.output_dim,
        ] {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.adam_t.to_le_bytes());
        for w in [&self.weights, &self.adam_m, &self.adam_v] {
            for v in w.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let mut dims = [0usize; 7];
        for d in &mut dims {
            *d = r.u32()? as usize;
        }
        let arch = NetworkArch {
            input_h: dims[0],
            input_w: dims[1],
            conv_filters: dims[2],
            conv_kernel: dims[3],
            conv_stride: dims[4],
            conv_padding: dims[5],
            output_dim: dims[6],
        };
        arch.validate()
            .map_err(|e| Error::Checkpoint(format!("bad architecture: {e}")))?;
        let adam_t = r.u64()?;
        let mut read_weights = || -> Result<Weights> {
            let mut w = Weights::zeros(&arch);
            for s in w.slices_mut() {
                for v in s.iter_mut() {
                    *v = r.f64()?;
                }
            }
            Ok(w)
        };
        let weights = read_weights()?;
        let adam_m = read_weights()?;
        let adam_v = read_weights()?;
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(NetworkParams {
            arch,
            weights,
            adam_m,
            adam_v,
            adam_t,
        })
    }
}

pub fn save_checkpoint(path: impl AsRef<Path>, params: &NetworkParams) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, params.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<NetworkParams> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    NetworkParams::from_bytes(&bytes)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Checkpoint("truncated file".into()))?;
        self.pos = end;
        Ok(chunk)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
