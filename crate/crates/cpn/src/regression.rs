//! Flat regression files: little-endian f32, seven values per anchor in
//! generation order (score, then the six midpoint deltas).

use std::path::Path;

use cpn_core::anchors::RegressionOutput;

use crate::error::{CpnError, Result};
use crate::fsutil;

pub const VALUES_PER_ANCHOR: usize = 7;

pub fn encode(outputs: &[RegressionOutput]) -> Vec<u8> {
    let mut out = Vec::with_capacity(outputs.len() * VALUES_PER_ANCHOR * 4);
    for o in outputs {
        for v in o.to_values() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode(data: &[u8], path: &Path) -> Result<Vec<RegressionOutput>> {
    let stride = VALUES_PER_ANCHOR * 4;
    if data.len() % stride != 0 {
        return Err(CpnError::format(path, format!("length {} is not a multiple of {stride}", data.len())));
    }
    Ok(data
        .chunks_exact(stride)
        .map(|rec| {
            let mut v = [0.0; VALUES_PER_ANCHOR];
            for (dst, b) in v.iter_mut().zip(rec.chunks_exact(4)) {
                *dst = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
            }
            RegressionOutput::from_values(v)
        })
        .collect())
}

pub fn read(path: &Path) -> Result<Vec<RegressionOutput>> {
    decode(&fsutil::read(path)?, path)
}

pub fn write(path: &Path, outputs: &[RegressionOutput]) -> Result<()> {
    fsutil::atomic_write(path, &encode(outputs))
}
