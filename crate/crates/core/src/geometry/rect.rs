use core::f64::consts::{FRAC_PI_2, PI};

use super::{Point2, Polygon};
use crate::math;

/// Orientation ties closer than this are resolved towards `theta >= 0`.
const ANGLE_TIE_EPS: f64 = 1e-12;

/// A rotated rectangle. `w` is the extent along direction `theta`, `h` the
/// extent along the perpendicular.
///
/// [`RotatedRect::new`] canonicalizes the angle: of the two representations
/// `(w, h, theta)` and `(h, w, theta ± π/2)` the one with the smaller
/// `|theta|` is kept, ties go to `theta >= 0`. The canonical angle therefore
/// lies in `(-π/4, π/4]`. Struct literals bypass this and are accepted
/// everywhere that only needs a valid box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedRect {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub theta: f64,
}

impl RotatedRect {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, theta: f64) -> Self {
        // Reduce modulo π into [-π/2, π/2).
        let mut t = theta - PI * math::floor((theta + FRAC_PI_2) / PI);
        if t >= FRAC_PI_2 {
            t -= PI;
        }
        let alt = if t >= 0.0 { t - FRAC_PI_2 } else { t + FRAC_PI_2 };
        let (w, h, t) = if (t.abs() - alt.abs()).abs() <= ANGLE_TIE_EPS {
            if t >= 0.0 {
                (w, h, t)
            } else {
                (h, w, alt)
            }
        } else if t.abs() < alt.abs() {
            (w, h, t)
        } else {
            (h, w, alt)
        };
        // Avoid a stray negative zero.
        let t = if t == 0.0 { 0.0 } else { t };
        Self { cx, cy, w, h, theta: t }
    }

    pub fn axis_aligned(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self { cx, cy, w, h, theta: 0.0 }
    }

    pub fn canonical(&self) -> Self {
        Self::new(self.cx, self.cy, self.w, self.h, self.theta)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.cx, self.cy)
    }

    pub fn is_valid(&self) -> bool {
        self.cx.is_finite()
            && self.cy.is_finite()
            && self.theta.is_finite()
            && self.w.is_finite()
            && self.h.is_finite()
            && self.w > 0.0
            && self.h > 0.0
    }

    /// Unit vectors along the `w` and `h` axes.
    pub fn axes(&self) -> (Point2, Point2) {
        let (s, c) = math::sin_cos(self.theta);
        (Point2::new(c, s), Point2::new(-s, c))
    }

    /// Corners in counter-clockwise (positive shoelace) order.
    pub fn corners(&self) -> [Point2; 4] {
        let (u, v) = self.axes();
        let (hw, hh) = (0.5 * self.w, 0.5 * self.h);
        let a = Point2::new(u.x * hw, u.y * hw);
        let b = Point2::new(v.x * hh, v.y * hh);
        let c = self.center();
        [
            Point2::new(c.x - a.x - b.x, c.y - a.y - b.y),
            Point2::new(c.x + a.x - b.x, c.y + a.y - b.y),
            Point2::new(c.x + a.x + b.x, c.y + a.y + b.y),
            Point2::new(c.x - a.x + b.x, c.y - a.y + b.y),
        ]
    }

    pub fn to_polygon(&self) -> crate::Result<Polygon> {
        Polygon::new_unchecked_simple(self.corners().to_vec())
    }

    /// Whether `p` lies inside the rectangle grown by `tol` on every side.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let (u, v) = self.axes();
        let d = p.sub(self.center());
        d.dot(u).abs() <= 0.5 * self.w + tol && d.dot(v).abs() <= 0.5 * self.h + tol
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self { cx: self.cx + dx, cy: self.cy + dy, ..*self }
    }
}
