use alloc::vec::Vec;

use super::BinaryMask;
use crate::geometry::Polygon;
use crate::math;
use crate::Result;

/// Marks every pixel whose center lies strictly inside `p` (even-odd rule).
///
/// Centers exactly on the boundary are left unset, so a polygon too small to
/// contain any pixel center rasterizes to an empty mask.
pub fn rasterize_polygon(p: &Polygon, width: usize, height: usize) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height)?;
    let verts = p.vertices();
    let n = verts.len();
    let (_, min_y, _, max_y) = p.bounds();
    let row_lo = math::floor(min_y - 0.5).max(0.0) as usize;
    let row_hi = (math::ceil(max_y - 0.5).max(0.0) as usize).min(height - 1);
    let mut xs: Vec<f64> = Vec::with_capacity(n);

    for row in row_lo..=row_hi {
        let yc = row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            if (a.y <= yc) != (b.y <= yc) {
                xs.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(f64::total_cmp);
        let bits = &mut mask.bits_mut()[row * width..(row + 1) * width];
        for span in xs.chunks_exact(2) {
            // strict: x0 < col + 0.5 < x1
            let first = math::floor(span[0] - 0.5) + 1.0;
            let last = math::ceil(span[1] - 0.5) - 1.0;
            if last < 0.0 || first > (width - 1) as f64 || first > last {
                continue;
            }
            let (c0, c1) = (first.max(0.0) as usize, (last as usize).min(width - 1));
            for b in &mut bits[c0..=c1] {
                *b = true;
            }
        }
        // Horizontal edges and vertices on the scanline are boundary too; the
        // crossing rule alone misses a vertex whose neighbors are both below.
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            if a.y == yc {
                let c = a.x - 0.5;
                if c >= 0.0 && c < width as f64 && math::floor(c) == c {
                    bits[c as usize] = false;
                }
            }
            if a.y == yc && b.y == yc {
                let (lo, hi) = (a.x.min(b.x), a.x.max(b.x));
                let first = math::ceil(lo - 0.5).max(0.0);
                let last = math::floor(hi - 0.5);
                if last < 0.0 || first > last {
                    continue;
                }
                for c in (first as usize)..=(last as usize).min(width - 1) {
                    bits[c] = false;
                }
            }
        }
    }
    Ok(mask)
}
