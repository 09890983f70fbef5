//! Semantic proposal path: seeds from the predicted erosion map are grown
//! back to full text instances by deformable dilation and boxed.

mod dilate;

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{min_area_rect_of_points, Point2, Proposal, ProposalSource};
use crate::raster::{connected_components, BinaryMask, GridMap, LabelMap};
use crate::sum::pairwise_sum;
use crate::{Error, Result};

pub use dilate::{
    deformable_dilate, deformable_dilate_naive, deformable_dilate_rows, dilate_labels, DilationInput,
    LabelDilation,
};

/// Pixels with `value >= threshold`.
pub fn binarize(map: &GridMap, threshold: f64) -> BinaryMask {
    let (w, h) = map.dims();
    BinaryMask::new(w, h, map.values().iter().map(|&v| v >= threshold).collect())
        .expect("dimensions come from a valid grid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemanticConfig {
    pub threshold: f64,
    pub max_proposals: usize,
    /// Dilated regions smaller than this are dropped as noise.
    pub min_region_px: usize,
}

impl Default for SemanticConfig {
    fn default() -> Self {
        Self { threshold: 0.5, max_proposals: 100, min_region_px: 4 }
    }
}

impl SemanticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid("binarization threshold must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Seeds and grown instances of one image, before boxing.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub seeds: LabelMap,
    pub instances: LabelMap,
}

pub fn reconstruct_instances(s_hat: &GridMap, d_hat: &GridMap, threshold: f64) -> Result<Reconstruction> {
    if s_hat.dims() != d_hat.dims() {
        return Err(Error::invalid("score and kernel maps differ in size"));
    }
    let seeds = connected_components(&binarize(s_hat, threshold));
    let instances = dilate_labels(&seeds, d_hat)?;
    Ok(Reconstruction { seeds, instances })
}

/// Boxes each grown instance and scores it by its mean seed confidence.
pub fn proposals_from_reconstruction(
    rec: &Reconstruction,
    s_hat: &GridMap,
    cfg: &SemanticConfig,
) -> Result<Vec<Proposal>> {
    let (w, h) = rec.instances.dims();
    let n = rec.seeds.max_label() as usize;
    // per-label row extents of the grown region, and its pixel count
    let mut extents: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n + 1];
    let mut area = vec![0usize; n + 1];
    for y in 0..h {
        let row = &rec.instances.labels()[y * w..(y + 1) * w];
        let mut x = 0;
        while x < w {
            let l = row[x] as usize;
            if l == 0 {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && row[x] as usize == l {
                x += 1;
            }
            area[l] += x - start;
            match extents[l].last_mut() {
                Some(e) if e.0 == y => {
                    e.1 = e.1.min(start);
                    e.2 = e.2.max(x);
                }
                _ => extents[l].push((y, start, x)),
            }
        }
    }
    let mut seed_scores: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for (&l, &v) in rec.seeds.labels().iter().zip(s_hat.values()) {
        if l != 0 {
            seed_scores[l as usize].push(v);
        }
    }

    let mut out = Vec::new();
    for l in 1..=n {
        if area[l] < cfg.min_region_px.max(1) {
            continue;
        }
        // corners of the outermost pixel squares on every row
        let mut pts = Vec::with_capacity(extents[l].len() * 4);
        for &(y, x0, x1) in &extents[l] {
            let (y0, y1) = (y as f64, (y + 1) as f64);
            pts.push(Point2::new(x0 as f64, y0));
            pts.push(Point2::new(x0 as f64, y1));
            pts.push(Point2::new(x1 as f64, y0));
            pts.push(Point2::new(x1 as f64, y1));
        }
        let rect = min_area_rect_of_points(&pts)?;
        let scores = &seed_scores[l];
        let mean = pairwise_sum(scores) / scores.len() as f64;
        out.push(Proposal::new(rect, mean.clamp(0.0, 1.0), ProposalSource::Semantic));
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    out.truncate(cfg.max_proposals);
    Ok(out)
}

/// Binarize, label, dilate and box: oriented proposals from predicted
/// erosion and kernel maps, best first.
pub fn generate_semantic_proposals(s_hat: &GridMap, d_hat: &GridMap, cfg: &SemanticConfig) -> Result<Vec<Proposal>> {
    cfg.validate()?;
    let rec = reconstruct_instances(s_hat, d_hat, cfg.threshold)?;
    proposals_from_reconstruction(&rec, s_hat, cfg)
}
