use std::collections::BTreeMap;
use std::path::Path;

use cpn_core::evalkit::{
    complementarity_report_scenes, default_thresholds, match_scene, prf, BranchScene, ComplementarityReport, Scene,
};
use cpn_core::{Proposal, RotatedRect};
use serde::{Deserialize, Serialize};

use crate::annotations::{load_dir, AnnotationSet};
use crate::error::{CpnError, Result};
use crate::pipeline::{self, ImageProposals};
use crate::{fsutil, parallel};

use super::Report;

/// Image ids present on only one side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub missing_annotations: Vec<String>,
    pub missing_proposals: Vec<String>,
}

impl Mismatch {
    pub fn is_empty(&self) -> bool {
        self.missing_annotations.is_empty() && self.missing_proposals.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub iou_threshold: f64,
    pub images: usize,
    pub num_gt: usize,
    pub num_det: usize,
    pub recall: f64,
    pub precision: f64,
    pub fmeasure: f64,
    pub mismatch: Mismatch,
}

struct Prepared {
    semantic: Vec<Proposal>,
    geometric: Vec<Proposal>,
    all: Vec<Proposal>,
    gts: Vec<RotatedRect>,
    dont_care: Vec<RotatedRect>,
}

/// Scores proposals against annotations on their common image ids: P/R/F at
/// IoU `0.5` over all proposals and recall curves per source.
pub fn evaluate(
    proposals: &[(String, Vec<Proposal>)],
    annotations: &[AnnotationSet],
    threads: usize,
) -> Result<(EvalSummary, ComplementarityReport)> {
    let ann: BTreeMap<&str, &AnnotationSet> = annotations.iter().map(|a| (a.image_id.as_str(), a)).collect();
    let props: BTreeMap<&str, &Vec<Proposal>> = proposals.iter().map(|(id, p)| (id.as_str(), p)).collect();
    let mismatch = Mismatch {
        missing_annotations: props.keys().filter(|k| !ann.contains_key(*k)).map(|k| k.to_string()).collect(),
        missing_proposals: ann.keys().filter(|k| !props.contains_key(*k)).map(|k| k.to_string()).collect(),
    };
    let common: Vec<(&str, &Vec<Proposal>, &AnnotationSet)> =
        props.iter().filter_map(|(id, p)| ann.get(id).map(|a| (*id, *p, *a))).collect();
    let prepared = parallel::par_map(&common, threads, |(_, p, a)| -> Result<Prepared> {
        let (gts, dont_care) = pipeline::gt_rects(a)?;
        let (semantic, geometric) = pipeline::split_sources(p);
        Ok(Prepared { semantic, geometric, all: p.to_vec(), gts, dont_care })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let records: Vec<_> = parallel::par_map(&prepared, threads, |s| {
        match_scene(&Scene { dets: &s.all, gts: &s.gts, dont_care: &s.dont_care }, 0.5)
    });
    let totals = prf(&records);
    let scenes: Vec<BranchScene<'_>> = prepared
        .iter()
        .map(|s| BranchScene { semantic: &s.semantic, geometric: &s.geometric, gts: &s.gts, dont_care: &s.dont_care })
        .collect();
    let report = complementarity_report_scenes(&scenes, &default_thresholds());
    let summary = EvalSummary {
        iou_threshold: 0.5,
        images: common.len(),
        num_gt: records.iter().map(|r| r.num_gt()).sum(),
        num_det: records.iter().map(|r| r.num_det()).sum(),
        recall: totals.recall,
        precision: totals.precision,
        fmeasure: totals.fmeasure,
        mismatch,
    };
    Ok((summary, report))
}

pub fn read_proposals(path: &Path) -> Result<Vec<(String, Vec<Proposal>)>> {
    let text = fsutil::read_to_string(path)?;
    let recs: Vec<ImageProposals> =
        serde_json::from_str(&text).map_err(|e| CpnError::Parse { path: path.into(), line: e.line(), msg: e.to_string() })?;
    recs.iter()
        .map(|r| Ok((r.image_id.clone(), r.to_proposals().map_err(|e| CpnError::format(path, format!("{}: {e}", r.image_id)))?)))
        .collect()
}

/// Writes `recall.csv` (recall per IoU threshold for each source and the
/// merged set) and `summary.json` into `out`.
pub fn cmd_eval(proposals: &Path, ann: &Path, out: &Path, threads: usize) -> Result<Report> {
    let props = read_proposals(proposals)?;
    let mut report = Report::default();
    let mut sets = Vec::new();
    for f in load_dir(ann)? {
        match f.result {
            Ok(s) => sets.push(s),
            Err(e) => report.fail(e),
        }
    }
    let (summary, curves) = evaluate(&props, &sets, threads)?;
    for id in &summary.mismatch.missing_annotations {
        report.fail(format!("{id}: proposals without annotations, skipped"));
    }
    for id in &summary.mismatch.missing_proposals {
        report.fail(format!("{id}: annotations without proposals, skipped"));
    }
    fsutil::atomic_write(&out.join("recall.csv"), curves.to_csv().as_bytes())?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CpnError::Usage(e.to_string()))?;
    fsutil::atomic_write(&out.join("summary.json"), format!("{json}\n").as_bytes())?;
    log::info!(
        "eval: {} images, R={:.4} P={:.4} F={:.4}",
        summary.images,
        summary.recall,
        summary.precision,
        summary.fmeasure
    );
    Ok(report)
}
