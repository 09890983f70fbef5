use alloc::vec::Vec;

use super::{orient, Point2, Polygon, RotatedRect};
use crate::math;
use crate::{Error, Result};

/// Convex hull by Andrew's monotone chain. Collinear boundary points are
/// dropped, so every hull vertex is a strict corner.
pub fn convex_hull(points: &[Point2]) -> Result<Polygon> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("hull input has non-finite coordinates"));
    }
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::degenerate("hull needs at least 3 distinct points"));
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::degenerate("all hull input points are collinear"));
    }
    Polygon::new_unchecked_simple(hull)
}

/// Minimum-area enclosing rectangle of a polygon.
///
/// One side of the optimal rectangle is collinear with an edge of the convex
/// hull, so it is enough to try the bounding box aligned with each hull edge.
/// Among equal areas the first hull edge wins.
pub fn min_area_rect(p: &Polygon) -> Result<RotatedRect> {
    min_area_rect_of_points(p.vertices())
}

pub fn min_area_rect_of_points(points: &[Point2]) -> Result<RotatedRect> {
    let hull = convex_hull(points)?;
    let v = hull.vertices();
    let n = v.len();

    let mut best: Option<(f64, RotatedRect)> = None;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let e = b.sub(a);
        let len = math::hypot(e.x, e.y);
        if len == 0.0 {
            continue;
        }
        let u = Point2::new(e.x / len, e.y / len);
        let nrm = Point2::new(-u.y, u.x);
        let (mut umin, mut umax, mut nmin, mut nmax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &q in v {
            let d = q.sub(a);
            let pu = d.dot(u);
            let pn = d.dot(nrm);
            umin = umin.min(pu);
            umax = umax.max(pu);
            nmin = nmin.min(pn);
            nmax = nmax.max(pn);
        }
        let (w, h) = (umax - umin, nmax - nmin);
        let area = w * h;
        if best.as_ref().is_none_or(|(ba, _)| area < *ba) {
            let mu = 0.5 * (umin + umax);
            let mn = 0.5 * (nmin + nmax);
            let cx = a.x + mu * u.x + mn * nrm.x;
            let cy = a.y + mu * u.y + mn * nrm.y;
            let theta = math::atan2(u.y, u.x);
            best = Some((area, RotatedRect::new(cx, cy, w, h, theta)));
        }
    }
    match best {
        Some((area, rect)) if area > 0.0 => Ok(rect),
        _ => Err(Error::degenerate("enclosing rectangle has zero area")),
    }
}
