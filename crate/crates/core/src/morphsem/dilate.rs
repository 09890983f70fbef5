//! Deformable morphological dilation: a max-pool whose disk radius is read
//! per destination pixel.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::math::{self, max_total};
use crate::raster::{GridMap, LabelMap};
use crate::{Error, Result};

/// Score map `S` and per-pixel radius map `D` of one dilation.
#[derive(Debug, Clone, Copy)]
pub struct DilationInput<'a> {
    scores: &'a GridMap,
    radii: &'a GridMap,
}

impl<'a> DilationInput<'a> {
    pub fn new(scores: &'a GridMap, radii: &'a GridMap) -> Result<Self> {
        if scores.dims() != radii.dims() {
            return Err(Error::invalid("score and kernel maps differ in size"));
        }
        if radii.values().iter().any(|&d| d < 0.0) {
            return Err(Error::invalid("kernel map has negative radii"));
        }
        Ok(Self { scores, radii })
    }

    pub fn scores(&self) -> &'a GridMap {
        self.scores
    }

    pub fn radii(&self) -> &'a GridMap {
        self.radii
    }

    pub fn dims(&self) -> (usize, usize) {
        self.scores.dims()
    }
}

/// Integer disk radius `ceil(d)`. Any disk wider than the grid diagonal
/// covers the same pixels, so radii are capped there.
pub(crate) fn disk_radius(d: f64, width: usize, height: usize) -> i64 {
    let cap = (width + height) as f64;
    math::ceil(d.min(cap)) as i64
}

/// Largest `h >= 0` with `h^2 + dy^2 < r^2`, for `|dy| < r`.
fn half_width(r: i64, dy: i64) -> i64 {
    let lim = r * r - 1 - dy * dy;
    let mut h = math::sqrt(lim as f64) as i64;
    while h * h > lim {
        h -= 1;
    }
    while (h + 1) * (h + 1) <= lim {
        h += 1;
    }
    h
}

/// Reference implementation: a direct scan of every disk.
pub fn deformable_dilate_naive(input: &DilationInput<'_>) -> GridMap {
    let (w, h) = input.dims();
    let (s, d) = (input.scores.values(), input.radii.values());
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let r = disk_radius(d[y * w + x], w, h);
            let mut m = s[y * w + x];
            for dy in -(r - 1)..r {
                let yy = y as i64 + dy;
                if yy < 0 || yy >= h as i64 {
                    continue;
                }
                for dx in -(r - 1)..r {
                    let xx = x as i64 + dx;
                    if xx < 0 || xx >= w as i64 || dx * dx + dy * dy >= r * r {
                        continue;
                    }
                    m = max_total(m, s[yy as usize * w + xx as usize]);
                }
            }
            out[y * w + x] = m;
        }
    }
    GridMap::new(w, h, out).expect("maxima of finite values are finite")
}

/// Radii up to this use per-row sparse tables; larger disks are scanned.
const TABLE_MAX_RADIUS: i64 = 32;
/// Output rows per band, bounding the sparse-table working set.
const BAND_ROWS: usize = 64;

/// Order-preserving integer image of an `f64` under `total_cmp`. The map is
/// its own inverse, so integer maxima convert back to the exact float.
#[inline]
fn flip(i: i64) -> i64 {
    i ^ ((((i >> 63) as u64) >> 1) as i64)
}

#[inline]
fn total_key(v: f64) -> i64 {
    flip(v.to_bits() as i64)
}

#[inline]
fn from_key(k: i64) -> f64 {
    f64::from_bits(flip(k) as u64)
}

/// Range-maximum tables along each row of a horizontal strip, over
/// [`total_key`] values.
struct RowTables {
    width: usize,
    first_row: usize,
    /// `levels[k][(row - first_row) * width + x]` = max over `x .. x + 2^k`.
    levels: Vec<Vec<i64>>,
}

impl RowTables {
    fn build(s: &[f64], width: usize, rows: Range<usize>, n_levels: usize) -> Self {
        let n = rows.len();
        let mut levels: Vec<Vec<i64>> = Vec::with_capacity(n_levels);
        levels.push(s[rows.start * width..rows.end * width].iter().map(|&v| total_key(v)).collect());
        for k in 1..n_levels {
            let half = 1usize << (k - 1);
            let prev = &levels[k - 1];
            let mut next = prev.clone();
            for r in 0..n {
                let row = &mut next[r * width..(r + 1) * width];
                let p = &prev[r * width..(r + 1) * width];
                let m = width.saturating_sub(half);
                for (o, (&u, &v)) in row[..m].iter_mut().zip(p[..m].iter().zip(&p[half.min(width)..])) {
                    *o = u.max(v);
                }
            }
            levels.push(next);
        }
        Self { width, first_row: rows.start, levels }
    }

    /// Row `y` of level `k`.
    #[inline]
    fn row(&self, k: usize, y: usize) -> &[i64] {
        let base = (y - self.first_row) * self.width;
        &self.levels[k][base..base + self.width]
    }
}

/// `floor(log2(len))` for `len >= 1`.
#[inline]
fn log2(len: usize) -> usize {
    (usize::BITS - 1 - len.leading_zeros()) as usize
}

/// Computes rows `rows` of the dilation into `out`, which holds exactly
/// those rows. Rows can be computed independently and in any order; the
/// result equals [`deformable_dilate_naive`] bit for bit.
pub fn deformable_dilate_rows(input: &DilationInput<'_>, rows: Range<usize>, out: &mut [f64]) {
    let (w, h) = input.dims();
    assert!(rows.end <= h, "row range outside the grid");
    assert_eq!(out.len(), rows.len() * w, "output slice does not match the row range");
    let (s, d) = (input.scores.values(), input.radii.values());

    let max_r = TABLE_MAX_RADIUS.min((w + h) as i64);
    // hw[r][|dy|] for every tabled radius
    let half_widths: Vec<Vec<usize>> =
        (0..=max_r).map(|r| (0..r.max(0)).map(|dy| half_width(r, dy) as usize).collect()).collect();

    let mut radii = Vec::new();
    let mut band = rows.start;
    while band < rows.end {
        let band_end = (band + BAND_ROWS).min(rows.end);
        radii.clear();
        radii.extend(d[band * w..band_end * w].iter().map(|&v| disk_radius(v, w, h)));
        let band_r = radii.iter().copied().filter(|&r| r <= max_r).max().unwrap_or(0);
        let reach = (band_r - 1).max(0) as usize;
        let strip = band.saturating_sub(reach)..(band_end + reach).min(h);
        let widest = 2 * reach + 1;
        let tables = RowTables::build(s, w, strip, log2(widest) + 1);

        for y in band..band_end {
            let out_row = &mut out[(y - rows.start) * w..(y - rows.start + 1) * w];
            let row_radii = &radii[(y - band) * w..(y - band + 1) * w];
            for (x, (o, &r)) in out_row.iter_mut().zip(row_radii).enumerate() {
                *o = if r < 1 {
                    s[y * w + x]
                } else if r <= max_r {
                    let hw = &half_widths[r as usize];
                    let r = r as usize;
                    let mut m = total_key(s[y * w + x]);
                    let lo = y.saturating_sub(r - 1);
                    let hi = (y + r - 1).min(h - 1);
                    for yy in lo..=hi {
                        let half = hw[yy.abs_diff(y)];
                        let a = x.saturating_sub(half);
                        let b = (x + half).min(w - 1);
                        let k = log2(b - a + 1);
                        let t = tables.row(k, yy);
                        m = m.max(t[a]).max(t[b + 1 - (1 << k)]);
                    }
                    from_key(m)
                } else {
                    disk_scan(s, w, h, x, y, r)
                };
            }
        }
        band = band_end;
    }
}

fn disk_scan(s: &[f64], w: usize, h: usize, x: usize, y: usize, r: i64) -> f64 {
    let mut m = s[y * w + x];
    let lo = y.saturating_sub(r as usize - 1);
    let hi = (y + r as usize - 1).min(h - 1);
    for yy in lo..=hi {
        let dy = yy.abs_diff(y) as i64;
        let half = half_width(r, dy) as usize;
        let a = x.saturating_sub(half);
        let b = (x + half).min(w - 1);
        for &v in &s[yy * w + a..=yy * w + b] {
            m = max_total(m, v);
        }
    }
    m
}

/// `dst(x, y) = max S` over the open disk of radius `ceil(D(x, y))` around
/// `(x, y)`, clipped to the grid. Where `ceil(D) < 1` the disk is empty and
/// the score passes through unchanged.
pub fn deformable_dilate(input: &DilationInput<'_>) -> GridMap {
    let (w, h) = input.dims();
    let mut out = vec![0.0; w * h];
    deformable_dilate_rows(input, 0..h, &mut out);
    GridMap::new(w, h, out).expect("maxima of finite values are finite")
}

/// Offsets inside the disk of radius `r_max`, ordered by squared length.
fn sorted_offsets(r_max: i64) -> Vec<(i64, i32, i32)> {
    let mut v = Vec::new();
    for dy in -(r_max - 1)..r_max {
        for dx in -(r_max - 1)..r_max {
            let d2 = dx * dx + dy * dy;
            if d2 < r_max * r_max {
                v.push((d2, dy as i32, dx as i32));
            }
        }
    }
    v.sort_unstable();
    v
}

/// Precomputed state shared by every row of one label dilation.
pub struct LabelDilation<'a> {
    labels: &'a LabelMap,
    radii: &'a GridMap,
    offsets: Vec<(i64, i32, i32)>,
}

impl<'a> LabelDilation<'a> {
    pub fn new(labels: &'a LabelMap, radii: &'a GridMap) -> Result<Self> {
        if labels.dims() != radii.dims() {
            return Err(Error::invalid("label and kernel maps differ in size"));
        }
        if radii.values().iter().any(|&d| d < 0.0) {
            return Err(Error::invalid("kernel map has negative radii"));
        }
        let (w, h) = labels.dims();
        let r_max = radii.values().iter().map(|&d| disk_radius(d, w, h)).max().unwrap_or(0);
        Ok(Self { labels, radii, offsets: sorted_offsets(r_max.max(1)) })
    }

    /// Computes rows `rows` of the dilated label map into `out`.
    pub fn rows(&self, rows: Range<usize>, out: &mut [u32]) {
        let (w, h) = self.labels.dims();
        assert!(rows.end <= h, "row range outside the grid");
        assert_eq!(out.len(), rows.len() * w, "output slice does not match the row range");
        let (lab, d) = (self.labels.labels(), self.radii.values());
        for y in rows.clone() {
            for x in 0..w {
                let r = disk_radius(d[y * w + x], w, h);
                let own = lab[y * w + x];
                out[(y - rows.start) * w + x] = if r < 1 || own != 0 { own } else { self.nearest(x, y, r) };
            }
        }
    }

    fn nearest(&self, x: usize, y: usize, r: i64) -> u32 {
        let (w, h) = self.labels.dims();
        let lab = self.labels.labels();
        let mut found: Option<(i64, u32)> = None;
        for &(d2, dy, dx) in &self.offsets {
            if d2 >= r * r {
                break;
            }
            if let Some((best_d2, _)) = found {
                if d2 > best_d2 {
                    break;
                }
            }
            let (xx, yy) = (x as i64 + dx as i64, y as i64 + dy as i64);
            if xx < 0 || yy < 0 || xx >= w as i64 || yy >= h as i64 {
                continue;
            }
            let l = lab[yy as usize * w + xx as usize];
            if l != 0 {
                found = Some(match found {
                    Some((bd, bl)) if bl <= l => (bd, bl),
                    _ => (d2, l),
                });
            }
        }
        found.map_or(0, |(_, l)| l)
    }
}

/// Grows every labeled seed: each destination pixel takes the label of the
/// nearest seed pixel inside its own disk (ties go to the smaller label).
/// Seed pixels keep their label.
pub fn dilate_labels(labels: &LabelMap, radii: &GridMap) -> Result<LabelMap> {
    let ld = LabelDilation::new(labels, radii)?;
    let (w, h) = labels.dims();
    let mut out = vec![0; w * h];
    ld.rows(0..h, &mut out);
    LabelMap::new(w, h, out)
}
