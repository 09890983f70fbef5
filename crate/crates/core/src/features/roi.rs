//! Rotated RoI align.

use alloc::vec;

use super::{bilinear_sample, FeatureTensor};
use crate::geometry::RotatedRect;
use crate::math;
use crate::sum::pairwise_sum;
use crate::{Error, Result};

/// Pools `roi` into a `C × bh × bw` grid. Bins tile the box in its own frame
/// (columns along `theta`, rows across it); each bin averages an `s × s`
/// sub-grid of bilinear samples. Box coordinates are continuous with pixel
/// `(x, y)` centered at `(x + 0.5, y + 0.5)`.
pub fn rotated_roi_align(
    feature: &FeatureTensor,
    roi: &RotatedRect,
    bins: (usize, usize),
    samples_per_bin: usize,
) -> Result<FeatureTensor> {
    let (bh, bw) = bins;
    if bh == 0 || bw == 0 || samples_per_bin == 0 {
        return Err(Error::invalid("rotated RoI align needs at least one bin and one sample"));
    }
    if !roi.is_valid() || roi.area() < crate::geometry::AREA_EPS {
        return Err(Error::degenerate("RoI is degenerate"));
    }
    let s = samples_per_bin;
    let (sin, cos) = math::sin_cos(roi.theta);
    let mut out = vec![0.0; feature.channels() * bh * bw];
    let mut acc = vec![0.0; s * s];
    for i in 0..bh {
        for j in 0..bw {
            let mut pts = alloc::vec::Vec::with_capacity(s * s);
            for si in 0..s {
                for sj in 0..s {
                    let u = roi.w * ((j as f64 + (sj as f64 + 0.5) / s as f64) / bw as f64 - 0.5);
                    let v = roi.h * ((i as f64 + (si as f64 + 0.5) / s as f64) / bh as f64 - 0.5);
                    let x = roi.cx + u * cos - v * sin;
                    let y = roi.cy + u * sin + v * cos;
                    pts.push((y - 0.5, x - 0.5));
                }
            }
            for c in 0..feature.channels() {
                for (a, &(y, x)) in acc.iter_mut().zip(&pts) {
                    *a = bilinear_sample(feature, y, x, c);
                }
                out[(c * bh + i) * bw + j] = pairwise_sum(&acc) / (s * s) as f64;
            }
        }
    }
    FeatureTensor::new(feature.channels(), bh, bw, out)
}
