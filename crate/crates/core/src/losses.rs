//! Training objectives with analytic gradients.
//!
//! Reductions go through [`crate::sum`], so values do not depend on how the
//! per-pixel terms were scheduled.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::MidpointDeltas;
use crate::math;
use crate::raster::{BinaryMask, GridMap};
use crate::sum::{pairwise_sum, pairwise_sum_by};
use crate::{Error, Result};

/// Lower bound applied to predicted radii inside the log-ratio term.
pub const MIN_KERNEL_RADIUS: f64 = 1e-3;
/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before the log.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Weight of the log-ratio term of the kernel-map loss.
    pub beta: f64,
    /// Dice smoothing, in pixels.
    pub epsilon: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { alpha1: 1.0, alpha2: 1.0, alpha3: 1.0, beta: 0.25, epsilon: 1.0 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let w = [self.alpha1, self.alpha2, self.alpha3, self.beta];
        if w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid("loss weights must be finite and >= 0"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("dice smoothing must be positive"));
        }
        Ok(())
    }
}

/// Loss value and its gradient with respect to the differentiated input,
/// laid out like that input.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Set when the loss had nothing to average over and returned 0.
    pub empty_support: bool,
}

pub fn smooth_l1(x: f64) -> f64 {
    if x.abs() < 1.0 {
        0.5 * x * x
    } else {
        x.abs() - 0.5
    }
}

pub fn smooth_l1_grad(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x
    } else {
        x.signum()
    }
}

/// `1 - (2 Σ Ŝ·S* + ε) / (Σ Ŝ² + Σ S*² + ε)`.
pub fn dice_loss(pred: &GridMap, target: &BinaryMask, epsilon: f64) -> Result<LossResult> {
    if pred.dims() != target.dims() {
        return Err(Error::invalid("prediction and target differ in size"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("dice smoothing must be positive"));
    }
    let (p, t) = (pred.values(), target.bits());
    let tv = |i: usize| if t[i] { 1.0 } else { 0.0 };
    let inter = pairwise_sum_by(p.len(), &|i| p[i] * tv(i));
    let pp = pairwise_sum_by(p.len(), &|i| p[i] * p[i]);
    let tt = target.count() as f64;
    let num = 2.0 * inter + epsilon;
    let den = pp + tt + epsilon;
    let gradient = (0..p.len()).map(|i| -(2.0 * tv(i) * den - num * 2.0 * p[i]) / (den * den)).collect();
    Ok(LossResult { value: 1.0 - num / den, gradient, empty_support: false })
}

/// Mean over the positive set `{D* > 0}` of
/// `SL1(D̂ − D*) + β·ln(max(D̂, D*) / min(D̂, D*))`, with `D̂` clamped to
/// [`MIN_KERNEL_RADIUS`] inside the log.
pub fn kernel_map_loss(pred: &GridMap, target: &GridMap, beta: f64) -> Result<LossResult> {
    if pred.dims() != target.dims() {
        return Err(Error::invalid("prediction and target differ in size"));
    }
    let (p, t) = (pred.values(), target.values());
    let pos: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).collect();
    let mut gradient = vec![0.0; p.len()];
    if pos.is_empty() {
        return Ok(LossResult { value: 0.0, gradient, empty_support: true });
    }
    let n = pos.len() as f64;
    let mut terms = Vec::with_capacity(pos.len());
    for &i in &pos {
        let (dh, ds) = (p[i], t[i]);
        let dc = dh.max(MIN_KERNEL_RADIUS);
        let ratio = math::ln(dc.max(ds) / dc.min(ds));
        terms.push(smooth_l1(dh - ds) + beta * ratio);
        // d/dD̂ of |ln D̂ − ln D*|, zero where the clamp is active
        let g_ratio = if dh < MIN_KERNEL_RADIUS {
            0.0
        } else if dh > ds {
            1.0 / dh
        } else if dh < ds {
            -1.0 / dh
        } else {
            0.0
        };
        gradient[i] = (smooth_l1_grad(dh - ds) + beta * g_ratio) / n;
    }
    Ok(LossResult { value: pairwise_sum(&terms) / n, gradient, empty_support: false })
}

/// Anchor-level loss of the geometric branch. The gradient holds seven
/// entries per anchor: d/d(prob), then d/d(each predicted delta).
pub fn rpn_loss(
    labels: &[u8],
    probs: &[f64],
    reg_pred: &[MidpointDeltas],
    reg_target: &[MidpointDeltas],
) -> Result<LossResult> {
    let n = labels.len();
    if probs.len() != n || reg_pred.len() != n || reg_target.len() != n {
        return Err(Error::invalid("rpn loss inputs have different lengths"));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::invalid("rpn labels must be 0 or 1"));
    }
    let mut gradient = vec![0.0; 7 * n];
    if n == 0 {
        return Ok(LossResult { value: 0.0, gradient, empty_support: true });
    }
    let nf = n as f64;
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let raw = probs[i];
        let q = raw.clamp(PROB_EPS, 1.0 - PROB_EPS);
        let clamped = raw != q;
        let (ce, dce) = if labels[i] == 1 { (-math::ln(q), -1.0 / q) } else { (-math::ln(1.0 - q), 1.0 / (1.0 - q)) };
        gradient[7 * i] = if clamped { 0.0 } else { dce / nf };
        let mut reg = 0.0;
        if labels[i] == 1 {
            let (a, b) = (reg_pred[i].to_array(), reg_target[i].to_array());
            let mut parts = [0.0; 6];
            for d in 0..6 {
                parts[d] = smooth_l1(a[d] - b[d]);
                gradient[7 * i + 1 + d] = smooth_l1_grad(a[d] - b[d]) / nf;
            }
            reg = pairwise_sum(&parts);
        }
        terms.push(ce + reg);
    }
    Ok(LossResult { value: pairwise_sum(&terms) / nf, gradient, empty_support: false })
}

/// `L_t + α1·L_e + α2·L_geo + α3·L_rcnn`.
pub fn total_loss(lt: f64, le: f64, lgeo: f64, lrcnn: f64, cfg: &LossConfig) -> f64 {
    lt + cfg.alpha1 * le + cfg.alpha2 * lgeo + cfg.alpha3 * lrcnn
}
