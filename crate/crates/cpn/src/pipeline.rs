//! Per-image steps behind the commands, free of file handling.

use cpn_core::anchors::{decode_geometric_proposals, generate_anchors, RegressionOutput};
use cpn_core::geometry::{min_area_rect, rotated_nms};
use cpn_core::morphsem::generate_semantic_proposals;
use cpn_core::raster::{label_targets, InstanceLabelSpec, LabelTargets};
use cpn_core::{GridMap, Proposal, ProposalSource, RotatedRect};
use serde::{Deserialize, Serialize};

use crate::annotations::AnnotationSet;
use crate::config::RunConfig;
use crate::error::{CpnError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    /// Line position in the annotation file.
    pub index: usize,
    /// Value of the instance in `L.pgm`.
    pub label: u32,
    pub e_t: f64,
    pub transcription: String,
    pub vanished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMeta {
    pub image_id: String,
    pub width: usize,
    pub height: usize,
    pub shrink_k: f64,
    pub kernel_norm_k: f64,
    pub num_instances: usize,
    pub num_ignored: usize,
    pub instances: Vec<InstanceMeta>,
    pub warnings: Vec<String>,
}

/// Training targets of one annotated image. Don't-care instances are left
/// out of every map.
pub fn labelgen(set: &AnnotationSet, width: usize, height: usize, cfg: &RunConfig) -> Result<(LabelTargets, LabelMeta)> {
    let mut specs = Vec::new();
    let mut positions = Vec::new();
    for (i, inst) in set.instances.iter().enumerate() {
        if inst.ignore {
            continue;
        }
        specs.push(InstanceLabelSpec::from_polygon(i, inst.polygon.clone(), cfg.shrink_k)?);
        positions.push(i);
    }
    let targets = label_targets(&specs, width, height, cfg.kernel_norm_k)?;
    let mut warnings = Vec::new();
    let instances = specs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let vanished = targets.vanished.contains(&k);
            if vanished {
                warnings.push(format!(
                    "instance {} (label {}) has no pixels left after erosion by {:.3} px",
                    positions[k],
                    k + 1,
                    s.erosion_radius
                ));
            }
            InstanceMeta {
                index: positions[k],
                label: k as u32 + 1,
                e_t: s.erosion_radius,
                transcription: set.instances[positions[k]].transcription.clone(),
                vanished,
            }
        })
        .collect();
    let meta = LabelMeta {
        image_id: set.image_id.clone(),
        width,
        height,
        shrink_k: cfg.shrink_k,
        kernel_norm_k: cfg.kernel_norm_k,
        num_instances: specs.len(),
        num_ignored: set.instances.len() - specs.len(),
        instances,
        warnings,
    };
    Ok((targets, meta))
}

/// Semantic proposals from the maps and, with regression outputs, the
/// geometric ones; semantic first. `merge_nms` thins the concatenation with
/// one rotated NMS across both sources.
pub fn propose(
    s_hat: &GridMap,
    d_hat: &GridMap,
    regression: Option<&[RegressionOutput]>,
    cfg: &RunConfig,
    merge_nms: bool,
) -> Result<Vec<Proposal>> {
    let mut out = generate_semantic_proposals(s_hat, d_hat, &cfg.semantic_config())?;
    if let Some(reg) = regression {
        let (w, h) = s_hat.dims();
        let acfg = cfg.anchor_config();
        let anchors = generate_anchors(&acfg, &acfg.level_sizes(w, h))?;
        if anchors.len() != reg.len() {
            return Err(CpnError::Usage(format!(
                "a {w}x{h} image has {} anchors but the regression file holds {} records",
                anchors.len(),
                reg.len()
            )));
        }
        out.extend(decode_geometric_proposals(&anchors, reg, cfg.balanced_k, cfg.nms_threshold)?);
    }
    if merge_nms {
        out = rotated_nms(&out, cfg.nms_threshold);
    }
    Ok(out)
}

/// Ground-truth rectangles of the cared instances and don't-care regions.
pub fn gt_rects(set: &AnnotationSet) -> Result<(Vec<RotatedRect>, Vec<RotatedRect>)> {
    let rects = |ignore: bool| -> Result<Vec<RotatedRect>> {
        set.instances.iter().filter(|i| i.ignore == ignore).map(|i| Ok(min_area_rect(&i.polygon)?)).collect()
    };
    Ok((rects(false)?, rects(true)?))
}

pub fn split_sources(props: &[Proposal]) -> (Vec<Proposal>, Vec<Proposal>) {
    props.iter().partition(|p| p.source == ProposalSource::Semantic)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalRecord {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub theta: f64,
    pub score: f64,
    pub source: String,
}

impl ProposalRecord {
    pub fn from_proposal(p: &Proposal) -> Self {
        let r = p.rect;
        Self { cx: r.cx, cy: r.cy, w: r.w, h: r.h, theta: r.theta, score: p.score, source: p.source.as_str().to_string() }
    }

    pub fn to_proposal(&self) -> Result<Proposal> {
        let source = match self.source.as_str() {
            "semantic" => ProposalSource::Semantic,
            "geometric" => ProposalSource::Geometric,
            other => return Err(CpnError::Usage(format!("unknown proposal source `{other}`"))),
        };
        let rect = RotatedRect::new(self.cx, self.cy, self.w, self.h, self.theta);
        if !rect.is_valid() || !self.score.is_finite() {
            return Err(CpnError::Usage("proposal has a degenerate box or a non-finite score".into()));
        }
        Ok(Proposal::new(rect, self.score, source))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageProposals {
    pub image_id: String,
    pub proposals: Vec<ProposalRecord>,
}

impl ImageProposals {
    pub fn new(image_id: &str, props: &[Proposal]) -> Self {
        Self { image_id: image_id.to_string(), proposals: props.iter().map(ProposalRecord::from_proposal).collect() }
    }

    pub fn to_proposals(&self) -> Result<Vec<Proposal>> {
        self.proposals.iter().map(ProposalRecord::to_proposal).collect()
    }
}
