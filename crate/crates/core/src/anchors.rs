//! Anchor policy of the geometric branch and decoding of its regression
//! outputs into oriented proposals.

use alloc::vec::Vec;

use crate::geometry::{decode_midpoint_offsets, rotated_nms, MidpointDeltas, Proposal, ProposalSource, RotatedRect};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorConfig {
    /// Height-over-width ratios, one anchor per ratio and location.
    pub ratios: Vec<f64>,
    /// Anchor side in units of the level stride.
    pub base_scale: f64,
    /// Pixels per feature cell, one entry per pyramid level.
    pub strides: Vec<f64>,
}

impl Default for AnchorConfig {
    fn default() -> Self {
        Self { ratios: alloc::vec![0.5, 1.0, 3.0], base_scale: 5.0, strides: alloc::vec![4.0, 8.0, 16.0, 32.0, 64.0] }
    }
}

impl AnchorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ratios.is_empty() || self.ratios.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::invalid("anchor ratios must be positive"));
        }
        if !(self.base_scale > 0.0 && self.base_scale.is_finite()) {
            return Err(Error::invalid("anchor base scale must be positive"));
        }
        if self.strides.is_empty() || self.strides.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("anchor strides must be positive"));
        }
        if self.strides.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("anchor strides must be strictly increasing"));
        }
        Ok(())
    }

    /// Feature-map size of every level for an image, rounding up.
    pub fn level_sizes(&self, image_width: usize, image_height: usize) -> Vec<(usize, usize)> {
        self.strides
            .iter()
            .map(|&s| (math::ceil(image_width as f64 / s) as usize, math::ceil(image_height as f64 / s) as usize))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub level: usize,
}

impl Anchor {
    pub fn to_rect(&self) -> RotatedRect {
        RotatedRect::axis_aligned(self.cx, self.cy, self.w, self.h)
    }
}

/// Anchors of every level in generation order: level, then row, then
/// column, then ratio.
pub fn generate_anchors(config: &AnchorConfig, level_sizes: &[(usize, usize)]) -> Result<Vec<Anchor>> {
    config.validate()?;
    if level_sizes.len() != config.strides.len() {
        return Err(Error::invalid(alloc::format!(
            "{} level sizes given for {} strides",
            level_sizes.len(),
            config.strides.len()
        )));
    }
    let total: usize = level_sizes.iter().map(|&(w, h)| w * h * config.ratios.len()).sum();
    let mut out = Vec::with_capacity(total);
    for (level, (&stride, &(lw, lh))) in config.strides.iter().zip(level_sizes).enumerate() {
        let side = config.base_scale * stride;
        let shapes: Vec<(f64, f64)> = config
            .ratios
            .iter()
            .map(|&r| {
                let q = math::sqrt(r);
                (side / q, side * q)
            })
            .collect();
        for j in 0..lh {
            for i in 0..lw {
                let (cx, cy) = ((i as f64 + 0.5) * stride, (j as f64 + 0.5) * stride);
                for &(w, h) in &shapes {
                    out.push(Anchor { cx, cy, w, h, level });
                }
            }
        }
    }
    Ok(out)
}

/// Score and box deltas predicted for one anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionOutput {
    pub score: f64,
    pub deltas: MidpointDeltas,
}

impl RegressionOutput {
    pub fn from_values(v: [f64; 7]) -> Self {
        Self { score: v[0], deltas: MidpointDeltas::from_array([v[1], v[2], v[3], v[4], v[5], v[6]]) }
    }

    pub fn to_values(&self) -> [f64; 7] {
        let d = self.deltas.to_array();
        [self.score, d[0], d[1], d[2], d[3], d[4], d[5]]
    }

    pub fn is_finite(&self) -> bool {
        self.to_values().iter().all(|v| v.is_finite())
    }
}

/// Indices of the `k` best-scoring outputs, best first; equal scores keep
/// index order.
pub fn select_balanced(outputs: &[RegressionOutput], k: usize) -> Vec<usize> {
    let cmp = |&a: &usize, &b: &usize| outputs[b].score.total_cmp(&outputs[a].score).then(a.cmp(&b));
    let mut idx: Vec<usize> = (0..outputs.len()).collect();
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Geometric proposals: the `k` best anchors are refined by their deltas,
/// turned into oriented boxes and thinned by rotated NMS.
///
/// Deltas that collapse a box onto a line produce no proposal.
pub fn decode_geometric_proposals(
    anchors: &[Anchor],
    outputs: &[RegressionOutput],
    k: usize,
    nms_threshold: f64,
) -> Result<Vec<Proposal>> {
    if anchors.len() != outputs.len() {
        return Err(Error::invalid(alloc::format!(
            "{} anchors but {} regression outputs",
            anchors.len(),
            outputs.len()
        )));
    }
    if let Some(i) = outputs.iter().position(|o| !o.is_finite()) {
        return Err(Error::invalid(alloc::format!("regression output {i} is not finite")));
    }
    let mut cands = Vec::with_capacity(k.min(outputs.len()));
    for i in select_balanced(outputs, k) {
        let a = &anchors[i];
        let b = outputs[i].deltas.apply(a.cx, a.cy, a.w, a.h);
        match decode_midpoint_offsets(&b) {
            Ok(rect) => cands.push(Proposal::new(rect, outputs[i].score.clamp(0.0, 1.0), ProposalSource::Geometric)),
            Err(Error::DegenerateGeometry(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(rotated_nms(&cands, nms_threshold))
}
