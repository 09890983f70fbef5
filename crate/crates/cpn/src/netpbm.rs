//! PFM for real-valued maps, binary PGM for masks and label maps.
//!
//! PFM rows are stored bottom to top and written little-endian (negative
//! scale). PGM samples above 255 use two bytes, most significant first.

use std::path::Path;

use cpn_core::{BinaryMask, GridMap, LabelMap};

use crate::error::{CpnError, Result};
use crate::fsutil;

/// Splits `n` whitespace-separated header tokens off `data`, skipping `#`
/// comments. Returns the tokens and the offset of the first data byte.
fn header_tokens(data: &[u8], n: usize) -> Option<(Vec<String>, usize)> {
    let mut tokens = Vec::with_capacity(n);
    let mut i = 0;
    while tokens.len() < n {
        while i < data.len() && (data[i].is_ascii_whitespace() || data[i] == b'#') {
            if data[i] == b'#' {
                while i < data.len() && data[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < data.len() && !data[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return None;
        }
        tokens.push(String::from_utf8_lossy(&data[start..i]).into_owned());
    }
    // exactly one whitespace byte separates the header from the samples
    if i >= data.len() || !data[i].is_ascii_whitespace() {
        return None;
    }
    Some((tokens, i + 1))
}

fn parse_dims(path: &Path, w: &str, h: &str) -> Result<(usize, usize)> {
    let parse = |s: &str| s.parse::<usize>().ok().filter(|&v| v > 0);
    match (parse(w), parse(h)) {
        (Some(w), Some(h)) => Ok((w, h)),
        _ => Err(CpnError::format(path, format!("bad image size `{w} {h}`"))),
    }
}

pub fn encode_pfm(map: &GridMap) -> Vec<u8> {
    let (w, h) = map.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    for y in (0..h).rev() {
        for x in 0..w {
            out.extend_from_slice(&(map.get(x, y) as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode_pfm(data: &[u8], path: &Path) -> Result<GridMap> {
    let (t, off) = header_tokens(data, 4).ok_or_else(|| CpnError::format(path, "truncated PFM header"))?;
    if t[0] != "Pf" {
        return Err(CpnError::format(path, format!("expected grayscale PFM `Pf`, found `{}`", t[0])));
    }
    let (w, h) = parse_dims(path, &t[1], &t[2])?;
    let scale: f32 = t[3].parse().map_err(|_| CpnError::format(path, format!("bad PFM scale `{}`", t[3])))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(CpnError::format(path, "PFM scale must be nonzero"));
    }
    let body = &data[off..];
    if body.len() < w * h * 4 {
        return Err(CpnError::format(path, format!("PFM needs {} data bytes, found {}", w * h * 4, body.len())));
    }
    let mut values = vec![0.0; w * h];
    for (k, chunk) in body.chunks_exact(4).take(w * h).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if scale < 0.0 { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        let (row, x) = (k / w, k % w);
        values[(h - 1 - row) * w + x] = v as f64;
    }
    GridMap::new(w, h, values).map_err(|e| CpnError::format(path, e.to_string()))
}

pub fn write_pfm(path: &Path, map: &GridMap) -> Result<()> {
    fsutil::atomic_write(path, &encode_pfm(map))
}

pub fn read_pfm(path: &Path) -> Result<GridMap> {
    decode_pfm(&fsutil::read(path)?, path)
}

/// Raw PGM raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

pub fn encode_pgm(pgm: &Pgm) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", pgm.width, pgm.height, pgm.maxval).into_bytes();
    if pgm.maxval > 255 {
        for &s in &pgm.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(pgm.samples.iter().map(|&s| s as u8));
    }
    out
}

pub fn decode_pgm(data: &[u8], path: &Path) -> Result<Pgm> {
    let (t, off) = header_tokens(data, 4).ok_or_else(|| CpnError::format(path, "truncated PGM header"))?;
    if t[0] != "P5" {
        return Err(CpnError::format(path, format!("expected binary PGM `P5`, found `{}`", t[0])));
    }
    let (width, height) = parse_dims(path, &t[1], &t[2])?;
    let maxval: u16 = t[3]
        .parse()
        .ok()
        .filter(|&m| m > 0)
        .ok_or_else(|| CpnError::format(path, format!("bad PGM maxval `{}`", t[3])))?;
    let n = width * height;
    let bytes = if maxval > 255 { 2 } else { 1 };
    let body = &data[off..];
    if body.len() < n * bytes {
        return Err(CpnError::format(path, format!("PGM needs {} data bytes, found {}", n * bytes, body.len())));
    }
    let samples: Vec<u16> = if bytes == 2 {
        body.chunks_exact(2).take(n).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    } else {
        body[..n].iter().map(|&b| b as u16).collect()
    };
    if samples.iter().any(|&s| s > maxval) {
        return Err(CpnError::format(path, "PGM sample exceeds maxval"));
    }
    Ok(Pgm { width, height, maxval, samples })
}

/// Label maps use 8-bit samples when every label fits, 16-bit otherwise.
pub fn labels_to_pgm(labels: &LabelMap) -> Result<Pgm> {
    let max = labels.max_label();
    if max > u16::MAX as u32 {
        return Err(CpnError::Usage(format!("label {max} does not fit a 16-bit PGM")));
    }
    let (width, height) = labels.dims();
    let maxval = if max > 255 { u16::MAX } else { 255 };
    Ok(Pgm { width, height, maxval, samples: labels.labels().iter().map(|&l| l as u16).collect() })
}

pub fn pgm_to_labels(pgm: &Pgm) -> Result<LabelMap> {
    Ok(LabelMap::new(pgm.width, pgm.height, pgm.samples.iter().map(|&s| s as u32).collect())?)
}

/// Set pixels become `maxval`.
pub fn mask_to_pgm(mask: &BinaryMask) -> Pgm {
    let (width, height) = mask.dims();
    Pgm { width, height, maxval: 255, samples: mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect() }
}

pub fn pgm_to_mask(pgm: &Pgm) -> Result<BinaryMask> {
    Ok(BinaryMask::new(pgm.width, pgm.height, pgm.samples.iter().map(|&s| s != 0).collect())?)
}

pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<()> {
    fsutil::atomic_write(path, &encode_pgm(&labels_to_pgm(labels)?))
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    pgm_to_labels(&decode_pgm(&fsutil::read(path)?, path)?)
}
