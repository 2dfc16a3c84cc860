//! Self-describing model checkpoint.
//!
//! Layout, all integers `u32` and all reals `f64`, little-endian:
//!
//! ```text
//! magic "SIGCLSNN" | version | flags (bit 0: rows normalized)
//! layer sizes d, d, c
//! mask length, mask bins...
//! vocab length, then per label: byte length, UTF-8 bytes
//! per layer: rows, cols, row-major weights, bias
//! ```

use std::path::Path;

use super::matrix::Matrix;
use super::network::{DnnParams, LayerParams};
use crate::error::{Error, Result};
use crate::fuse_select::FeatureMask;

const MAGIC: &[u8; 8] = b"SIGCLSNN";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: DnnParams,
    pub mask: FeatureMask,
    pub vocab: Vec<String>,
    pub normalize_rows: bool,
}

impl Checkpoint {
    pub fn new(params: DnnParams, mask: FeatureMask, vocab: Vec<String>, normalize_rows: bool) -> Result<Self> {
        if params.input_dim() != mask.len() {
            return Err(Error::Validation(format!(
                "network input {} does not match mask of {} bins",
                params.input_dim(),
                mask.len()
            )));
        }
        if params.classes() != vocab.len() {
            return Err(Error::Validation(format!(
                "network has {} outputs for {} labels",
                params.classes(),
                vocab.len()
            )));
        }
        Ok(Self {
            params,
            mask,
            vocab,
            normalize_rows,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, CHECKPOINT_VERSION);
        put_u32(&mut out, u32::from(self.normalize_rows));
        let (d, h, c) = self.params.layer_sizes();
        for n in [d, h, c] {
            put_u32(&mut out, n as u32);
        }
        put_u32(&mut out, self.mask.len() as u32);
        for &b in self.mask.kept() {
            put_u32(&mut out, b as u32);
        }
        put_u32(&mut out, self.vocab.len() as u32);
        for label in &self.vocab {
            put_u32(&mut out, label.len() as u32);
            out.extend_from_slice(label.as_bytes());
        }
        for layer in &self.params.layers {
            put_u32(&mut out, layer.weight.rows() as u32);
            put_u32(&mut out, layer.weight.cols() as u32);
            for v in layer.weight.as_slice().iter().chain(&layer.bias) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let normalize_rows = r.u32()? & 1 == 1;
        let sizes = [r.u32()? as usize, r.u32()? as usize, r.u32()? as usize];
        let mask_len = r.u32()? as usize;
        let kept = (0..mask_len)
            .map(|_| r.u32().map(|b| b as usize))
            .collect::<Result<Vec<_>>>()?;
        let mask = FeatureMask::new(kept).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let vocab_len = r.u32()? as usize;
        let mut vocab = Vec::with_capacity(vocab_len.min(1024));
        for _ in 0..vocab_len {
            let n = r.u32()? as usize;
            let s = std::str::from_utf8(r.take(n)?)
                .map_err(|_| Error::Checkpoint("label is not UTF-8".into()))?;
            vocab.push(s.to_string());
        }
        let mut layer = || -> Result<LayerParams> {
            let rows = r.u32()? as usize;
            let cols = r.u32()? as usize;
            let weight = (0..rows * cols).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            let bias = (0..rows).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            Ok(LayerParams {
                weight: Matrix::from_vec(rows, cols, weight)?,
                bias,
            })
        };
        let layers = [layer()?, layer()?, layer()?];
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        let params = DnnParams::from_layers(layers).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let (d, h, c) = params.layer_sizes();
        if [d, h, c] != sizes {
            return Err(Error::Checkpoint("layer sizes disagree with header".into()));
        }
        Checkpoint::new(params, mask, vocab, normalize_rows).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint("truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
