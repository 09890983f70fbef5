//! Exact Euclidean distance transform.
//!
//! Separable lower-envelope-of-parabolas algorithm: one 1-D pass down every
//! column, then one along every row, on squared distances. All intermediate
//! values are integers or exact ratios of integers, so the squared output is
//! exact.

use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, GridMap};
use crate::math;

/// Distance reported everywhere when the mask has no set pixel.
pub const EMPTY_DISTANCE: f64 = 1e30;

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn new(n: usize) -> Self {
        Self { sites: vec![0; n], bounds: vec![0.0; n + 1] }
    }

    /// `out[q] = min_p (q - p)² + f[p]` over finite `f[p]`. Returns `false`
    /// if there are no finite entries (then `out` is untouched).
    fn transform(&mut self, f: &[f64], out: &mut [f64]) -> bool {
        let (v, z) = (&mut self.sites, &mut self.bounds);
        let mut count = 0usize;
        for q in 0..f.len() {
            if !f[q].is_finite() {
                continue;
            }
            let fq = f[q] + (q * q) as f64;
            if count == 0 {
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                count = 1;
                continue;
            }
            let mut s;
            loop {
                let p = v[count - 1];
                s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
                if s <= z[count - 1] {
                    count -= 1;
                } else {
                    break;
                }
            }
            v[count] = q;
            z[count] = s;
            z[count + 1] = f64::INFINITY;
            count += 1;
        }
        if count == 0 {
            return false;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let p = v[k];
            let d = q.abs_diff(p);
            *o = (d * d) as f64 + f[p];
        }
        true
    }
}

/// Squared distance from each pixel to the nearest set pixel, `None` if the
/// mask is empty.
pub fn squared_distance_to_nearest(mask: &BinaryMask) -> Option<Vec<f64>> {
    let (w, h) = mask.dims();
    let mut cols = vec![f64::INFINITY; w * h];
    let mut env = Envelope::new(w.max(h));
    let mut f = vec![0.0; h];
    let mut out = vec![0.0; h];
    let mut any = false;
    for x in 0..w {
        for y in 0..h {
            f[y] = if mask.get(x, y) { 0.0 } else { f64::INFINITY };
        }
        if env.transform(&f, &mut out) {
            any = true;
            for y in 0..h {
                cols[y * w + x] = out[y];
            }
        }
    }
    if !any {
        return None;
    }
    let mut result = vec![0.0; w * h];
    for y in 0..h {
        let row = &cols[y * w..(y + 1) * w];
        let filled = env.transform(row, &mut result[y * w..(y + 1) * w]);
        debug_assert!(filled, "every row sees a site after the column pass");
    }
    Some(result)
}

/// Euclidean distance from each pixel to the nearest set pixel, or
/// [`EMPTY_DISTANCE`] everywhere for an empty mask.
pub fn distance_to_nearest(mask: &BinaryMask) -> GridMap {
    let (w, h) = mask.dims();
    let values = match squared_distance_to_nearest(mask) {
        Some(sq) => sq.into_iter().map(math::sqrt).collect(),
        None => vec![EMPTY_DISTANCE; w * h],
    };
    GridMap::new(w, h, values).expect("dimensions come from a valid mask")
}
