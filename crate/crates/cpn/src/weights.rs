//! Fusion weight files and seeded weight generation.
//!
//! Layout: the magic `CPNW0001`, then per layer a u32 name length, the UTF-8
//! name, a u32 rank, `rank` u32 dims and the f32 data, all little-endian.
//! A convolution `p` is stored as `p.weight` with dims
//! `[out, in, kh, kw]` followed by `p.bias` with dims `[out]`.

use std::path::Path;

use cpn_core::features::{IfaBranchWeights, IfaWeights};
use cpn_core::features::{ConvWeights, KERNEL_TAPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CpnError, Result};
use crate::fsutil;

pub const MAGIC: &[u8; 8] = b"CPNW0001";

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

pub fn encode_layers(layers: &[Layer]) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    for l in layers {
        out.extend_from_slice(&(l.name.len() as u32).to_le_bytes());
        out.extend_from_slice(l.name.as_bytes());
        out.extend_from_slice(&(l.dims.len() as u32).to_le_bytes());
        for &d in &l.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &l.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(CpnError::format(self.path, format!("truncated at byte {}", self.pos)));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }
}

pub fn decode_layers(data: &[u8], path: &Path) -> Result<Vec<Layer>> {
    if !data.starts_with(MAGIC) {
        return Err(CpnError::format(path, "missing CPNW0001 magic"));
    }
    let mut c = Cursor { data, pos: MAGIC.len(), path };
    let mut layers = Vec::new();
    while c.pos < data.len() {
        let n = c.u32()?;
        let name = std::str::from_utf8(c.take(n)?)
            .map_err(|_| CpnError::format(path, "layer name is not UTF-8"))?
            .to_string();
        let rank = c.u32()?;
        if rank > 8 {
            return Err(CpnError::format(path, format!("layer `{name}` has rank {rank}")));
        }
        let dims = (0..rank).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
        let count = dims
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .filter(|&n| n <= data.len() / 4)
            .ok_or_else(|| CpnError::format(path, format!("layer `{name}` is larger than the file")))?;
        let raw = c.take(count * 4)?;
        let data = raw.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        layers.push(Layer { name, dims, data });
    }
    Ok(layers)
}

const CONVS: [&str; 5] = ["offset", "deform_own", "deform_cross", "gate_own", "gate_cross"];

fn branch_convs(b: &IfaBranchWeights) -> [&ConvWeights; 5] {
    [&b.offset, &b.deform_own, &b.deform_cross, &b.gate_own, &b.gate_cross]
}

pub fn ifa_to_layers(w: &IfaWeights) -> Vec<Layer> {
    let mut layers = Vec::new();
    for (branch, b) in [("semantic", &w.semantic), ("geometric", &w.geometric)] {
        for (name, conv) in CONVS.iter().zip(branch_convs(b)) {
            let (kh, kw) = conv.kernel();
            layers.push(Layer {
                name: format!("{branch}.{name}.weight"),
                dims: vec![conv.out_channels(), conv.in_channels(), kh, kw],
                data: conv.weights().iter().map(|&v| v as f32).collect(),
            });
            layers.push(Layer {
                name: format!("{branch}.{name}.bias"),
                dims: vec![conv.out_channels()],
                data: conv.bias().iter().map(|&v| v as f32).collect(),
            });
        }
    }
    layers
}

pub fn ifa_from_layers(layers: &[Layer], path: &Path) -> Result<IfaWeights> {
    let find = |name: &str| {
        layers
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| CpnError::format(path, format!("missing layer `{name}`")))
    };
    let conv = |prefix: &str| -> Result<ConvWeights> {
        let w = find(&format!("{prefix}.weight"))?;
        let b = find(&format!("{prefix}.bias"))?;
        if w.dims.len() != 4 || b.dims.len() != 1 {
            return Err(CpnError::format(path, format!("`{prefix}` needs a rank-4 weight and a rank-1 bias")));
        }
        let widen = |v: &[f32]| v.iter().map(|&x| x as f64).collect();
        ConvWeights::new(w.dims[0], w.dims[1], w.dims[2], w.dims[3], widen(&w.data), widen(&b.data))
            .map_err(|e| CpnError::format(path, format!("`{prefix}`: {e}")))
    };
    let branch = |name: &str| -> Result<IfaBranchWeights> {
        Ok(IfaBranchWeights {
            offset: conv(&format!("{name}.offset"))?,
            deform_own: conv(&format!("{name}.deform_own"))?,
            deform_cross: conv(&format!("{name}.deform_cross"))?,
            gate_own: conv(&format!("{name}.gate_own"))?,
            gate_cross: conv(&format!("{name}.gate_cross"))?,
        })
    };
    Ok(IfaWeights { semantic: branch("semantic")?, geometric: branch("geometric")? })
}

pub fn read_ifa(path: &Path) -> Result<IfaWeights> {
    ifa_from_layers(&decode_layers(&fsutil::read(path)?, path)?, path)
}

pub fn write_ifa(path: &Path, w: &IfaWeights) -> Result<()> {
    fsutil::atomic_write(path, &encode_layers(&ifa_to_layers(w)))
}

/// Uniform weights scaled by fan-in. Offset predictors start an order of
/// magnitude smaller so that initial sampling stays near the grid.
/// Values are rounded through f32 so a written and reloaded set compares
/// equal to the generated one.
pub fn random_ifa(c_in: usize, c_out: usize, seed: u64) -> Result<IfaWeights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conv = |o: usize, i: usize, k: usize, gain: f64| {
        let bound = gain / ((i * k * k) as f64).sqrt();
        ConvWeights::from_fn(o, i, k, k, || rng.gen_range(-bound..bound) as f32 as f64)
    };
    let mut branch = || -> Result<IfaBranchWeights> {
        Ok(IfaBranchWeights {
            offset: conv(2 * KERNEL_TAPS, c_in, 3, 0.1)?,
            deform_own: conv(c_out, c_in, 3, 1.0)?,
            deform_cross: conv(c_out, c_in, 3, 1.0)?,
            gate_own: conv(c_out, c_out, 1, 1.0)?,
            gate_cross: conv(c_out, c_out, 1, 1.0)?,
        })
    };
    let semantic = branch()?;
    let geometric = branch()?;
    Ok(IfaWeights { semantic, geometric })
}
