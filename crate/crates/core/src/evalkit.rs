//! Detection evaluation with rotated IoU: greedy matching, micro-averaged
//! precision/recall/F, recall-vs-IoU curves and branch complementarity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::geometry::{rotated_intersection_area, rotated_iou, Proposal, RotatedRect};

/// A detection overlapping a don't-care region by more than this fraction
/// of its own area is dropped before matching.
pub const DONT_CARE_OVERLAP: f64 = 0.5;

/// IoU thresholds `0.50, 0.55, ..., 0.95`.
pub fn default_thresholds() -> Vec<f64> {
    (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

/// Ground truth of one image.
#[derive(Debug, Clone, Copy)]
pub struct Scene<'a> {
    pub dets: &'a [Proposal],
    pub gts: &'a [RotatedRect],
    /// Regions marked as illegible; excluded from recall.
    pub dont_care: &'a [RotatedRect],
}

impl<'a> Scene<'a> {
    pub fn new(dets: &'a [Proposal], gts: &'a [RotatedRect]) -> Self {
        Self { dets, gts, dont_care: &[] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalRecord {
    pub image_id: String,
    pub matches: Vec<Match>,
    pub unmatched_gt: usize,
    /// Detections that matched nothing and were not absorbed by a don't-care
    /// region.
    pub unmatched_det: usize,
    /// Detections absorbed by don't-care regions.
    pub ignored_det: usize,
}

impl EvalRecord {
    pub fn num_gt(&self) -> usize {
        self.matches.len() + self.unmatched_gt
    }

    pub fn num_det(&self) -> usize {
        self.matches.len() + self.unmatched_det
    }
}

/// Detection indices by descending score, ties by index.
fn score_order(dets: &[Proposal]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dets.len()).collect();
    idx.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score).then(a.cmp(&b)));
    idx
}

fn absorbed(det: &RotatedRect, dont_care: &[RotatedRect]) -> bool {
    let area = det.area();
    area > 0.0 && dont_care.iter().any(|d| rotated_intersection_area(det, d) > DONT_CARE_OVERLAP * area)
}

/// Greedy matching: detections in score order each take the unmatched
/// ground truth of highest IoU (ties: lower index) if it reaches
/// `iou_threshold`.
pub fn match_scene(scene: &Scene<'_>, iou_threshold: f64) -> EvalRecord {
    let ious = iou_table(scene);
    match_with_table(scene, &ious, iou_threshold)
}

pub fn match_detections(dets: &[Proposal], gts: &[RotatedRect], iou_threshold: f64) -> EvalRecord {
    match_scene(&Scene::new(dets, gts), iou_threshold)
}

/// IoU of every (detection, gt) pair, row-major by detection; `None` marks
/// detections absorbed by don't-care regions.
fn iou_table(scene: &Scene<'_>) -> Vec<Option<Vec<f64>>> {
    scene
        .dets
        .iter()
        .map(|d| {
            if absorbed(&d.rect, scene.dont_care) {
                None
            } else {
                Some(scene.gts.iter().map(|g| rotated_iou(&d.rect, g)).collect())
            }
        })
        .collect()
}

fn match_with_table(scene: &Scene<'_>, ious: &[Option<Vec<f64>>], thr: f64) -> EvalRecord {
    let mut taken = vec![false; scene.gts.len()];
    let mut rec = EvalRecord::default();
    for d in score_order(scene.dets) {
        let Some(row) = &ious[d] else {
            rec.ignored_det += 1;
            continue;
        };
        let mut best: Option<(usize, f64)> = None;
        for (g, &iou) in row.iter().enumerate() {
            if !taken[g] && iou >= thr && best.is_none_or(|(_, b)| iou > b) {
                best = Some((g, iou));
            }
        }
        match best {
            Some((g, iou)) => {
                taken[g] = true;
                rec.matches.push(Match { det: d, gt: g, iou });
            }
            None => rec.unmatched_det += 1,
        }
    }
    rec.unmatched_gt = taken.iter().filter(|&&t| !t).count();
    rec
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub recall: f64,
    pub precision: f64,
    pub fmeasure: f64,
}

/// Micro-averaged over all records. Recall with no ground truth and
/// precision with no detections are 0.
pub fn prf(records: &[EvalRecord]) -> Prf {
    let matched: usize = records.iter().map(|r| r.matches.len()).sum();
    let gt: usize = records.iter().map(EvalRecord::num_gt).sum();
    let det: usize = records.iter().map(EvalRecord::num_det).sum();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (recall, precision) = (ratio(matched, gt), ratio(matched, det));
    Prf { recall, precision, fmeasure: fmeasure(precision, recall) }
}

pub fn fmeasure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecallCurve {
    pub thresholds: Vec<f64>,
    pub recalls: Vec<f64>,
}

/// Corpus recall at every threshold.
pub fn recall_curve_scenes(scenes: &[Scene<'_>], thresholds: &[f64]) -> RecallCurve {
    let tables: Vec<_> = scenes.iter().map(iou_table).collect();
    let recalls = thresholds
        .iter()
        .map(|&t| {
            let recs: Vec<EvalRecord> = scenes.iter().zip(&tables).map(|(s, tab)| match_with_table(s, tab, t)).collect();
            prf(&recs).recall
        })
        .collect();
    RecallCurve { thresholds: thresholds.to_vec(), recalls }
}

pub fn recall_curve(dets: &[Proposal], gts: &[RotatedRect], thresholds: &[f64]) -> RecallCurve {
    recall_curve_scenes(&[Scene::new(dets, gts)], thresholds)
}

/// Recall curves of two proposal sets and of their concatenation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementarityReport {
    pub thresholds: Vec<f64>,
    pub semantic: Vec<f64>,
    pub geometric: Vec<f64>,
    pub merged: Vec<f64>,
}

impl ComplementarityReport {
    /// `merged − max(semantic, geometric)` per threshold.
    pub fn gains(&self) -> Vec<f64> {
        (0..self.thresholds.len()).map(|i| self.merged[i] - self.semantic[i].max(self.geometric[i])).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,recall_sem,recall_geo,recall_merged\n");
        for i in 0..self.thresholds.len() {
            let _ = writeln!(
                s,
                "{:.2},{:.6},{:.6},{:.6}",
                self.thresholds[i], self.semantic[i], self.geometric[i], self.merged[i]
            );
        }
        s
    }
}

/// Per-image semantic and geometric proposals with their ground truth.
#[derive(Debug, Clone, Copy)]
pub struct BranchScene<'a> {
    pub semantic: &'a [Proposal],
    pub geometric: &'a [Proposal],
    pub gts: &'a [RotatedRect],
    pub dont_care: &'a [RotatedRect],
}

pub fn complementarity_report_scenes(scenes: &[BranchScene<'_>], thresholds: &[f64]) -> ComplementarityReport {
    let merged_sets: Vec<Vec<Proposal>> =
        scenes.iter().map(|s| s.semantic.iter().chain(s.geometric).copied().collect()).collect();
    let curve = |sets: Vec<&[Proposal]>| {
        let v: Vec<Scene<'_>> = scenes
            .iter()
            .zip(sets)
            .map(|(s, dets)| Scene { dets, gts: s.gts, dont_care: s.dont_care })
            .collect();
        recall_curve_scenes(&v, thresholds).recalls
    };
    ComplementarityReport {
        thresholds: thresholds.to_vec(),
        semantic: curve(scenes.iter().map(|s| s.semantic).collect()),
        geometric: curve(scenes.iter().map(|s| s.geometric).collect()),
        merged: curve(merged_sets.iter().map(Vec::as_slice).collect()),
    }
}

pub fn complementarity_report(
    semantic: &[Proposal],
    geometric: &[Proposal],
    gts: &[RotatedRect],
    thresholds: &[f64],
) -> ComplementarityReport {
    complementarity_report_scenes(&[BranchScene { semantic, geometric, gts, dont_care: &[] }], thresholds)
}
