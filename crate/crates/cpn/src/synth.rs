//! Synthetic corpora with known branch strengths.
//!
//! Every image holds long rotated text lines and one tight cluster of short
//! words. The simulated maps recover the lines exactly but fuse the cluster
//! into a single blob; the simulated regression output fits the cluster words
//! and has nothing useful for the lines. Background anchors get random
//! scores below most of the fitted ones.

use std::path::Path;

use cpn_core::anchors::{generate_anchors, RegressionOutput};
use cpn_core::geometry::{
    encode_midpoint_targets, min_area_rect, min_area_rect_of_points, rotated_intersection_area, rotated_iou, MidpointDeltas,
};
use cpn_core::raster::rasterize_polygon;
use cpn_core::{GridMap, Point2, Polygon, RotatedRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotations::{write_icdar, AnnotationSet, Instance, IGNORE_TRANSCRIPTION};
use crate::config::RunConfig;
use crate::error::Result;
use crate::{fsutil, netpbm, pipeline, regression};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub images: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { images: 12, width: 256, height: 256, seed: 7 }
    }
}

/// Settings the synthetic regression output is generated for.
pub fn corpus_config() -> RunConfig {
    RunConfig { anchor_strides: vec![8.0, 16.0, 32.0, 64.0], anchor_base_scale: 2.0, ..RunConfig::default() }
}

#[derive(Debug, Clone)]
pub struct SynthImage {
    pub annotations: AnnotationSet,
    pub s_hat: GridMap,
    pub d_hat: GridMap,
    pub regression: Vec<RegressionOutput>,
}

fn rounded_polygon(r: &RotatedRect) -> Result<Polygon> {
    let pts = r.corners().iter().map(|p| Point2::new(p.x.round(), p.y.round())).collect();
    Ok(Polygon::new(pts)?)
}

struct Placer {
    width: f64,
    height: f64,
    taken: Vec<RotatedRect>,
}

impl Placer {
    fn fits(&self, r: &RotatedRect, margin: f64) -> bool {
        let inside = r.corners().iter().all(|p| {
            p.x >= margin && p.y >= margin && p.x <= self.width - margin && p.y <= self.height - margin
        });
        let padded = RotatedRect::new(r.cx, r.cy, r.w + 2.0 * margin, r.h + 2.0 * margin, r.theta);
        inside && self.taken.iter().all(|t| rotated_intersection_area(&padded, t) == 0.0)
    }
}

/// Rectangles of one cluster laid out along a common axis.
fn cluster(rng: &mut ChaCha8Rng, cx: f64, cy: f64) -> Vec<RotatedRect> {
    let n = rng.gen_range(3..=4);
    let theta: f64 = rng.gen_range(-0.2..0.2);
    let h = rng.gen_range(12.0..16.0);
    let widths: Vec<f64> = (0..n).map(|_| rng.gen_range(16.0..24.0)).collect();
    let gap = 3.0;
    let total = widths.iter().sum::<f64>() + gap * (n - 1) as f64;
    let (c, s) = (theta.cos(), theta.sin());
    let mut t = -total / 2.0;
    widths
        .iter()
        .map(|&w| {
            let mid = t + w / 2.0;
            t += w + gap;
            RotatedRect::new(cx + mid * c, cy + mid * s, w, h, theta)
        })
        .collect()
}

pub fn generate_image(id: &str, opts: &SynthOptions, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<SynthImage> {
    let (w, h) = (opts.width as f64, opts.height as f64);
    let mut placer = Placer { width: w, height: h, taken: Vec::new() };
    let mut instances = Vec::new();
    let mut lines = Vec::new();
    let mut words = Vec::new();

    let n_lines = rng.gen_range(1..=2);
    for _ in 0..200 {
        if lines.len() == n_lines {
            break;
        }
        let r = RotatedRect::new(
            rng.gen_range(0.2 * w..0.8 * w),
            rng.gen_range(0.2 * h..0.8 * h),
            rng.gen_range(0.45 * w..0.7 * w),
            rng.gen_range(14.0..20.0),
            rng.gen_range(-0.5..0.5),
        );
        if placer.fits(&r, 6.0) {
            placer.taken.push(r);
            lines.push(rounded_polygon(&r)?);
        }
    }
    for _ in 0..200 {
        let (cx, cy) = (rng.gen_range(0.2 * w..0.8 * w), rng.gen_range(0.15 * h..0.85 * h));
        let group = cluster(rng, cx, cy);
        let pts: Vec<Point2> = group.iter().flat_map(|r| r.corners()).collect();
        let hull = min_area_rect_of_points(&pts)?;
        if placer.fits(&hull, 6.0) {
            placer.taken.push(hull);
            for r in &group {
                words.push(rounded_polygon(r)?);
            }
            break;
        }
    }
    let mut ignored = None;
    if rng.gen_bool(0.5) {
        for _ in 0..100 {
            let r = RotatedRect::new(rng.gen_range(0.1 * w..0.9 * w), rng.gen_range(0.1 * h..0.9 * h), 18.0, 12.0, 0.0);
            if placer.fits(&r, 4.0) {
                placer.taken.push(r);
                ignored = Some(rounded_polygon(&r)?);
                break;
            }
        }
    }

    for (i, p) in lines.iter().enumerate() {
        instances.push(Instance { polygon: p.clone(), transcription: format!("line{i}"), ignore: false });
    }
    for (i, p) in words.iter().enumerate() {
        instances.push(Instance { polygon: p.clone(), transcription: format!("word{i}"), ignore: false });
    }
    if let Some(p) = ignored {
        instances.push(Instance { polygon: p, transcription: IGNORE_TRANSCRIPTION.into(), ignore: true });
    }
    let annotations = AnnotationSet { image_id: id.to_string(), instances };

    // maps: exact targets with the cluster seeds bridged into one blob
    let (targets, _) = pipeline::labelgen(&annotations, opts.width, opts.height, cfg)?;
    let mut s_hat = targets.erosion.to_grid();
    if !words.is_empty() {
        let pts: Vec<Point2> = words.iter().flat_map(|p| p.vertices().to_vec()).collect();
        let blob = min_area_rect_of_points(&pts)?;
        let inner = RotatedRect::new(blob.cx, blob.cy, blob.w - 4.0, blob.h - 4.0, blob.theta);
        let mask = rasterize_polygon(&inner.to_polygon()?, opts.width, opts.height)?;
        for (v, &b) in s_hat.values_mut().iter_mut().zip(mask.bits()) {
            if b {
                *v = 1.0;
            }
        }
    }

    // regression: fitted outputs for the words, noise elsewhere
    let acfg = cfg.anchor_config();
    let anchors = generate_anchors(&acfg, &acfg.level_sizes(opts.width, opts.height))?;
    let mut regression: Vec<RegressionOutput> = anchors
        .iter()
        .map(|_| {
            RegressionOutput::from_values([
                rng.gen_range(0.0..0.62),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
                0.5 + rng.gen_range(-0.05..0.05),
                0.5 + rng.gen_range(-0.05..0.05),
            ])
        })
        .collect();
    for p in &words {
        let gt = min_area_rect(p)?;
        let best = anchors
            .iter()
            .enumerate()
            .map(|(i, a)| (i, rotated_iou(&a.to_rect(), &gt)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("at least one anchor");
        let mut d = encode_midpoint_targets(&anchors[best].to_rect(), &gt)?.to_array();
        let noise = [0.02, 0.02, 0.03, 0.03, 0.01, 0.01];
        for (v, n) in d.iter_mut().zip(noise) {
            *v += rng.gen_range(-n..n);
        }
        regression[best] = RegressionOutput { score: rng.gen_range(0.5..1.0), deltas: MidpointDeltas::from_array(d) };
    }
    Ok(SynthImage { annotations, s_hat, d_hat: targets.kernel, regression })
}

pub fn generate(opts: &SynthOptions, cfg: &RunConfig) -> Result<Vec<SynthImage>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.images).map(|i| generate_image(&format!("img_{:03}", i + 1), opts, cfg, &mut rng)).collect()
}

/// Writes `ann/<id>.txt`, `maps/<id>/{S,D}.pfm`, `reg/<id>.reg` and
/// `config.txt` under `dir`.
pub fn write_corpus(dir: &Path, images: &[SynthImage], cfg: &RunConfig) -> Result<()> {
    for img in images {
        let id = &img.annotations.image_id;
        fsutil::atomic_write(&dir.join("ann").join(format!("{id}.txt")), write_icdar(&img.annotations)?.as_bytes())?;
        netpbm::write_pfm(&dir.join("maps").join(id).join("S.pfm"), &img.s_hat)?;
        netpbm::write_pfm(&dir.join("maps").join(id).join("D.pfm"), &img.d_hat)?;
        regression::write(&dir.join("reg").join(format!("{id}.reg")), &img.regression)?;
    }
    fsutil::atomic_write(&dir.join("config.txt"), cfg.to_text().as_bytes())
}
