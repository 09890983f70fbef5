//! Training targets of the semantic branch: the shrunk text map and the
//! per-pixel structuring-kernel map.

use alloc::vec;
use alloc::vec::Vec;

use super::{circular_erode, rasterize_polygon, squared_distance_to_nearest};
use super::{BinaryMask, GridMap, LabelMap};
use crate::geometry::{polygon_area, polygon_perimeter, Polygon};
use crate::math;
use crate::{Error, Result};

/// Erosion radius of one text instance: `k · area / perimeter`.
pub fn erosion_kernel_size(p: &Polygon, k: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid("shrink factor k must be positive"));
    }
    let area = polygon_area(p)?;
    Ok(k * area / polygon_perimeter(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceLabelSpec {
    pub instance_id: usize,
    pub polygon: Polygon,
    /// Erosion radius in pixels, `>= 0`.
    pub erosion_radius: f64,
}

impl InstanceLabelSpec {
    pub fn from_polygon(instance_id: usize, polygon: Polygon, shrink_k: f64) -> Result<Self> {
        let erosion_radius = erosion_kernel_size(&polygon, shrink_k)?;
        Ok(Self { instance_id, polygon, erosion_radius })
    }
}

fn owner_label(index: usize) -> Result<u32> {
    u32::try_from(index + 1).map_err(|_| Error::invalid("too many instances"))
}

/// Rasterizes every instance; a pixel belongs to the last instance in the
/// list that covers it. Labels are list position + 1.
pub fn rasterize_instances(instances: &[InstanceLabelSpec], width: usize, height: usize) -> Result<LabelMap> {
    let mut owner = LabelMap::background(width, height)?;
    for (i, inst) in instances.iter().enumerate() {
        let label = owner_label(i)?;
        let m = rasterize_polygon(&inst.polygon, width, height)?;
        for (o, &b) in owner.labels_mut().iter_mut().zip(m.bits()) {
            if b {
                *o = label;
            }
        }
    }
    Ok(owner)
}

/// Shrunk text map: each instance is rasterized on its own, eroded with a
/// disk of its erosion radius, and the results are unioned. The label map
/// records which instance each surviving pixel belongs to (later instances
/// win on overlap).
pub fn make_erosion_map(
    instances: &[InstanceLabelSpec],
    width: usize,
    height: usize,
) -> Result<(BinaryMask, LabelMap)> {
    let mut mask = BinaryMask::empty(width, height)?;
    let mut owner = LabelMap::background(width, height)?;
    for (i, inst) in instances.iter().enumerate() {
        let label = owner_label(i)?;
        let text = rasterize_polygon(&inst.polygon, width, height)?;
        let shrunk = circular_erode(&text, inst.erosion_radius);
        for ((m, o), &b) in mask.bits_mut().iter_mut().zip(owner.labels_mut().iter_mut()).zip(shrunk.bits()) {
            if b {
                *m = true;
                *o = label;
            }
        }
    }
    Ok((mask, owner))
}

/// Structuring-kernel map together with the text labels that had no
/// surviving seed (their pixels are left at zero).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMap {
    pub map: GridMap,
    pub skipped: Vec<u32>,
}

#[derive(Clone, Copy)]
struct Bbox {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

impl Bbox {
    const EMPTY: Bbox = Bbox { x0: usize::MAX, y0: usize::MAX, x1: 0, y1: 0 };

    fn add(&mut self, x: usize, y: usize) {
        self.x0 = self.x0.min(x);
        self.y0 = self.y0.min(y);
        self.x1 = self.x1.max(x);
        self.y1 = self.y1.max(y);
    }

    fn is_empty(&self) -> bool {
        self.x0 == usize::MAX
    }
}

/// `D(p) = k_norm · |p − S_p|` for every text pixel `p`, where `S_p` is the
/// nearest seed pixel of the same instance; `0` off text.
///
/// `text` gives the instance of every text pixel, `seeds` the instance of
/// every surviving erosion-map pixel, with matching label values.
pub fn make_structuring_kernel_map(text: &LabelMap, seeds: &LabelMap, k_norm: f64) -> Result<KernelMap> {
    if text.dims() != seeds.dims() {
        return Err(Error::invalid("text and seed label maps differ in size"));
    }
    if !(k_norm >= 0.0) || !k_norm.is_finite() {
        return Err(Error::invalid("kernel normalization must be finite and >= 0"));
    }
    let (w, h) = text.dims();
    let n_labels = text.max_label().max(seeds.max_label()) as usize;
    let mut text_box = vec![Bbox::EMPTY; n_labels + 1];
    let mut seed_box = vec![Bbox::EMPTY; n_labels + 1];
    for y in 0..h {
        for x in 0..w {
            let (t, s) = (text.get(x, y) as usize, seeds.get(x, y) as usize);
            if t != 0 {
                text_box[t].add(x, y);
            }
            if s != 0 {
                seed_box[s].add(x, y);
            }
        }
    }

    let mut map = vec![0.0; w * h];
    let mut skipped = Vec::new();
    for label in 1..=n_labels {
        let tb = text_box[label];
        if tb.is_empty() {
            continue;
        }
        let sb = seed_box[label];
        if sb.is_empty() {
            skipped.push(label as u32);
            continue;
        }
        // The window holds every seed of this instance, so distances computed
        // inside it are exact.
        let (x0, y0) = (tb.x0.min(sb.x0), tb.y0.min(sb.y0));
        let (x1, y1) = (tb.x1.max(sb.x1), tb.y1.max(sb.y1));
        let (ww, wh) = (x1 - x0 + 1, y1 - y0 + 1);
        let window = BinaryMask::from_fn(ww, wh, |x, y| seeds.get(x0 + x, y0 + y) == label as u32)?;
        let sq = squared_distance_to_nearest(&window).expect("window contains a seed");
        for y in 0..wh {
            for x in 0..ww {
                if text.get(x0 + x, y0 + y) == label as u32 {
                    map[(y0 + y) * w + x0 + x] = k_norm * math::sqrt(sq[y * ww + x]);
                }
            }
        }
    }
    Ok(KernelMap { map: GridMap::new(w, h, map)?, skipped })
}

/// Every per-pixel target for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTargets {
    /// Shrunk text map.
    pub erosion: BinaryMask,
    /// Instance of every shrunk-text pixel.
    pub seeds: LabelMap,
    /// Instance of every text pixel.
    pub text: LabelMap,
    /// Structuring-kernel map.
    pub kernel: GridMap,
    /// Positions (in `instances`) of instances that kept no seed pixel,
    /// including ones too thin to cover any pixel center.
    pub vanished: Vec<usize>,
}

pub fn label_targets(
    instances: &[InstanceLabelSpec],
    width: usize,
    height: usize,
    k_norm: f64,
) -> Result<LabelTargets> {
    let (erosion, seeds) = make_erosion_map(instances, width, height)?;
    let text = rasterize_instances(instances, width, height)?;
    let kernel = make_structuring_kernel_map(&text, &seeds, k_norm)?;
    let mut has_seed = vec![false; instances.len() + 1];
    for &l in seeds.labels() {
        has_seed[l as usize] = true;
    }
    let vanished = (0..instances.len()).filter(|&i| !has_seed[i + 1]).collect();
    Ok(LabelTargets { erosion, seeds, text, kernel: kernel.map, vanished })
}
