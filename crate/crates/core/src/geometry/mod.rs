//! Polygon and rotated-box geometry.
//!
//! Coordinates are image pixels: `x` grows to the right, `y` grows downwards.
//! "Counter-clockwise" always refers to the sign of the shoelace sum, so a
//! polygon is stored in the vertex order that makes [`Polygon::signed_area`]
//! positive.

mod hull;
mod iou;
pub mod midpoint;
mod nms;
mod rect;

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

pub use hull::{convex_hull, min_area_rect, min_area_rect_of_points};
pub use iou::{rotated_intersection_area, rotated_iou, CLIP_EPS};
pub use midpoint::{decode_midpoint_offsets, encode_midpoint_targets, MidpointDeltas, MidpointOffsetBox};
pub use nms::{rotated_nms, rotated_nms_indices, Proposal, ProposalSource};
pub use rect::RotatedRect;

/// Areas below this are treated as degenerate.
pub const AREA_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub(crate) fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub(crate) fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn distance(self, o: Point2) -> f64 {
        math::hypot(self.x - o.x, self.y - o.y)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`.
pub(crate) fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// A simple polygon with at least three vertices, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Validates and normalizes a vertex ring.
    ///
    /// Rejects non-finite coordinates (`InvalidInput`), rings with fewer than
    /// three vertices, near-zero area, or self-intersections
    /// (`DegenerateGeometry`). Clockwise rings are reversed.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let poly = Self::new_unchecked_simple(vertices)?;
        if let Some((i, j)) = poly.first_self_intersection() {
            return Err(Error::degenerate(alloc::format!(
                "polygon edges {i} and {j} intersect"
            )));
        }
        Ok(poly)
    }

    /// Like [`Polygon::new`] but skips the O(n²) simplicity test. Used for
    /// rings that are simple by construction (hulls, rectangle corners).
    pub(crate) fn new_unchecked_simple(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("polygon has non-finite coordinates"));
        }
        if vertices.len() < 3 {
            return Err(Error::degenerate(alloc::format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let area = shoelace(&vertices);
        if area.abs() < AREA_EPS {
            return Err(Error::degenerate("polygon area is zero"));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    /// Positive for every constructed polygon.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Axis-aligned bounds `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            b.0 = b.0.min(p.x);
            b.1 = b.1.min(p.y);
            b.2 = b.2.max(p.x);
            b.3 = b.3.max(p.y);
        }
        b
    }

    /// Even-odd point containment. Points on the boundary may go either way.
    pub fn contains(&self, p: Point2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            let (a0, a1) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (b0, b1) = (v[j], v[(j + 1) % n]);
                if adjacent {
                    // Adjacent edges share one vertex; they only conflict if
                    // they fold back onto each other.
                    let shared = if j == i + 1 { a1 } else { a0 };
                    let (p, q) = if j == i + 1 { (a0, b1) } else { (a1, b0) };
                    if orient(p, shared, q).abs() <= AREA_EPS
                        && p.sub(shared).dot(q.sub(shared)) > 0.0
                    {
                        return Some((i, j));
                    }
                    continue;
                }
                if segments_intersect(a0, a1, b0, b1) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn shoelace(v: &[Point2]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * acc
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(b0, b1, a0))
        || (d2 == 0.0 && on_segment(b0, b1, a1))
        || (d3 == 0.0 && on_segment(a0, a1, b0))
        || (d4 == 0.0 && on_segment(a0, a1, b1))
}

/// Shoelace area. Always positive for a valid polygon.
pub fn polygon_area(p: &Polygon) -> Result<f64> {
    let area = p.signed_area();
    if area < AREA_EPS {
        return Err(Error::degenerate("polygon area below epsilon"));
    }
    Ok(area)
}

pub fn polygon_perimeter(p: &Polygon) -> f64 {
    p.edges().map(|(a, b)| a.distance(b)).sum()
}

pub(crate) fn math_len(p: Point2) -> f64 {
    math::hypot(p.x, p.y)
}
