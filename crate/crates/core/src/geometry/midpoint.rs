//! Midpoint-offset representation of oriented boxes.
//!
//! An oriented box is described by its external horizontal box
//! `(x, y, w, h)` plus two offsets. The box vertex lying on the top edge of
//! the external box sits at `(x + dalpha·w, y − h/2)`, the vertex on the
//! right edge at `(x + w/2, y + dbeta·h)`; the bottom and left vertices are
//! their mirror images through the center. With `|dalpha|, |dbeta| ≤ 0.5`
//! every vertex stays on its edge. An axis-aligned box is
//! `dalpha = dbeta = 0.5` (top-right and bottom-right corners), zero offsets
//! give the rhombus through the four edge midpoints.

use super::{convex_hull, min_area_rect, Point2, RotatedRect};
use crate::math;
use crate::{Error, Result};

/// Largest magnitude allowed for log-space size deltas, `ln(1000 / 16)`.
pub const MAX_LOG_SCALE: f64 = 4.135_166_556_742_356;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointOffsetBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub dalpha: f64,
    pub dbeta: f64,
}

impl MidpointOffsetBox {
    /// The four vertices (top, right, bottom, left) after clamping offsets.
    pub fn vertices(&self) -> [Point2; 4] {
        let da = self.dalpha.clamp(-0.5, 0.5) * self.w;
        let db = self.dbeta.clamp(-0.5, 0.5) * self.h;
        let (hw, hh) = (0.5 * self.w, 0.5 * self.h);
        [
            Point2::new(self.x + da, self.y - hh),
            Point2::new(self.x + hw, self.y + db),
            Point2::new(self.x - da, self.y + hh),
            Point2::new(self.x - hw, self.y - db),
        ]
    }
}

/// Regression deltas of a target box relative to an axis-aligned anchor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MidpointDeltas {
    pub dx: f64,
    pub dy: f64,
    pub dw: f64,
    pub dh: f64,
    pub dalpha: f64,
    pub dbeta: f64,
}

impl MidpointDeltas {
    pub fn from_array(a: [f64; 6]) -> Self {
        Self { dx: a[0], dy: a[1], dw: a[2], dh: a[3], dalpha: a[4], dbeta: a[5] }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.dx, self.dy, self.dw, self.dh, self.dalpha, self.dbeta]
    }

    /// Applies the deltas to an anchor box given as `(cx, cy, w, h)`.
    /// Center shifts are relative to the anchor size, sizes are log-space.
    pub fn apply(&self, cx: f64, cy: f64, w: f64, h: f64) -> MidpointOffsetBox {
        let dw = self.dw.clamp(-MAX_LOG_SCALE, MAX_LOG_SCALE);
        let dh = self.dh.clamp(-MAX_LOG_SCALE, MAX_LOG_SCALE);
        MidpointOffsetBox {
            x: cx + self.dx * w,
            y: cy + self.dy * h,
            w: w * math::exp(dw),
            h: h * math::exp(dh),
            dalpha: self.dalpha,
            dbeta: self.dbeta,
        }
    }
}

/// Turns a midpoint-offset box into the minimum-area rectangle enclosing
/// its parallelogram.
///
/// Non-finite fields or non-positive sizes are `InvalidInput`; offsets that
/// collapse the parallelogram onto a segment are `DegenerateGeometry`.
pub fn decode_midpoint_offsets(b: &MidpointOffsetBox) -> Result<RotatedRect> {
    let fields = [b.x, b.y, b.w, b.h, b.dalpha, b.dbeta];
    if fields.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("midpoint-offset box has non-finite fields"));
    }
    if b.w <= 0.0 || b.h <= 0.0 {
        return Err(Error::invalid("midpoint-offset box needs positive size"));
    }
    let hull = convex_hull(&b.vertices())?;
    min_area_rect(&hull)
}

/// Encodes `target` against an axis-aligned `anchor`.
///
/// The top vertex is the target corner with the smallest `y` (ties: larger
/// `x`), the right vertex is whichever of its two neighbours has the larger
/// `x` (ties: larger `y`).
pub fn encode_midpoint_targets(anchor: &RotatedRect, target: &RotatedRect) -> Result<MidpointDeltas> {
    if !anchor.is_valid() {
        return Err(Error::invalid("anchor box is not valid"));
    }
    if anchor.theta.abs() > 1e-12 {
        return Err(Error::invalid("anchor must be axis-aligned"));
    }
    if !target.is_valid() || target.area() < super::AREA_EPS {
        return Err(Error::degenerate("target box is degenerate"));
    }
    let c = target.corners();
    let (mut x0, mut y0, mut x1, mut y1) =
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &c {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let (gx, gy, gw, gh) = (0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0);

    let mut top = 0;
    for i in 1..4 {
        if c[i].y < c[top].y || (c[i].y == c[top].y && c[i].x > c[top].x) {
            top = i;
        }
    }
    let (n0, n1) = (c[(top + 1) % 4], c[(top + 3) % 4]);
    let right = if n0.x > n1.x || (n0.x == n1.x && n0.y > n1.y) { n0 } else { n1 };

    Ok(MidpointDeltas {
        dx: (gx - anchor.cx) / anchor.w,
        dy: (gy - anchor.cy) / anchor.h,
        dw: math::ln(gw / anchor.w),
        dh: math::ln(gh / anchor.h),
        dalpha: (c[top].x - gx) / gw,
        dbeta: (right.y - gy) / gh,
    })
}
