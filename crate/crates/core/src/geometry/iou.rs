use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Point2, RotatedRect};

/// Tolerance of the half-plane test during clipping.
pub const CLIP_EPS: f64 = 1e-9;

/// Sutherland–Hodgman clip of a convex subject against a convex CCW clip
/// polygon. Returns the intersection polygon (possibly empty).
fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = subject.to_vec();
    let mut buf: Vec<Point2> = Vec::with_capacity(subject.len() + clip.len());
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (e0, e1) = (clip[i], clip[(i + 1) % n]);
        let edge = e1.sub(e0);
        let len = super::math_len(edge);
        let side = |p: Point2| edge.cross(p.sub(e0)) / len;
        buf.clear();
        let m = out.len();
        for j in 0..m {
            let cur = out[j];
            let prev = out[(j + m - 1) % m];
            let (sc, sp) = (side(cur), side(prev));
            let cur_in = sc >= -CLIP_EPS;
            let prev_in = sp >= -CLIP_EPS;
            if cur_in != prev_in {
                let t = sp / (sp - sc);
                buf.push(Point2::new(prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)));
            }
            if cur_in {
                buf.push(cur);
            }
        }
        core::mem::swap(&mut out, &mut buf);
    }
    out
}

fn ring_area(v: &[Point2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += v[i].cross(v[(i + 1) % n]);
    }
    (0.5 * acc).abs()
}

fn total_order(a: &RotatedRect, b: &RotatedRect) -> Ordering {
    a.cx.total_cmp(&b.cx)
        .then(a.cy.total_cmp(&b.cy))
        .then(a.w.total_cmp(&b.w))
        .then(a.h.total_cmp(&b.h))
        .then(a.theta.total_cmp(&b.theta))
}

/// Area of the intersection of two rotated rectangles.
///
/// The pair is put into a fixed order before clipping, which makes the result
/// bitwise symmetric in its arguments.
pub fn rotated_intersection_area(a: &RotatedRect, b: &RotatedRect) -> f64 {
    if !a.is_valid() || !b.is_valid() {
        return 0.0;
    }
    let (first, second) = if total_order(a, b) == Ordering::Greater { (b, a) } else { (a, b) };
    // Quick reject on circumscribed circles.
    let r1 = 0.5 * super::math_len(Point2::new(first.w, first.h));
    let r2 = 0.5 * super::math_len(Point2::new(second.w, second.h));
    if first.center().distance(second.center()) > r1 + r2 {
        return 0.0;
    }
    let inter = ring_area(&clip_convex(&first.corners(), &second.corners()));
    inter.clamp(0.0, first.area().min(second.area()))
}

/// Intersection over union of two rotated rectangles, in `[0, 1]`.
pub fn rotated_iou(a: &RotatedRect, b: &RotatedRect) -> f64 {
    if !a.is_valid() || !b.is_valid() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let inter = rotated_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}
