use alloc::vec::Vec;

use super::{rotated_iou, RotatedRect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProposalSource {
    Semantic,
    Geometric,
}

impl ProposalSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ProposalSource::Semantic => "semantic",
            ProposalSource::Geometric => "geometric",
        }
    }
}

/// A scored rotated box tagged with the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub rect: RotatedRect,
    pub score: f64,
    pub source: ProposalSource,
}

impl Proposal {
    pub fn new(rect: RotatedRect, score: f64, source: ProposalSource) -> Self {
        Self { rect, score, source }
    }
}

/// Indices of `proposals` sorted by descending score, ties by input index.
pub(crate) fn score_order(proposals: &[Proposal]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..proposals.len()).collect();
    order.sort_by(|&a, &b| proposals[b].score.total_cmp(&proposals[a].score).then(a.cmp(&b)));
    order
}

/// Greedy rotated NMS; returns surviving input indices in descending score
/// order. A box is suppressed when its IoU with a kept box exceeds
/// `iou_threshold`.
pub fn rotated_nms_indices(proposals: &[Proposal], iou_threshold: f64) -> Vec<usize> {
    let order = score_order(proposals);
    let mut suppressed = alloc::vec![false; proposals.len()];
    let mut keep = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if suppressed[i] {
            continue;
        }
        keep.push(i);
        for &j in &order[pos + 1..] {
            if !suppressed[j] && rotated_iou(&proposals[i].rect, &proposals[j].rect) > iou_threshold {
                suppressed[j] = true;
            }
        }
    }
    keep
}

pub fn rotated_nms(proposals: &[Proposal], iou_threshold: f64) -> Vec<Proposal> {
    rotated_nms_indices(proposals, iou_threshold)
        .into_iter()
        .map(|i| proposals[i])
        .collect()
}
