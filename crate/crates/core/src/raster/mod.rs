//! Dense-grid kernels and the training-target generators of the semantic
//! branch.
//!
//! All grids are row-major with `index = y * width + x`; pixel `(x, y)` has
//! its center at `(x + 0.5, y + 0.5)` in polygon coordinates.

mod edt;
mod label;
mod morphology;
mod rasterize;
mod targets;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use edt::{distance_to_nearest, squared_distance_to_nearest, EMPTY_DISTANCE};
pub use label::connected_components;
pub use morphology::circular_erode;
pub use rasterize::rasterize_polygon;
pub use targets::{
    erosion_kernel_size, label_targets, make_erosion_map, make_structuring_kernel_map,
    rasterize_instances, InstanceLabelSpec, KernelMap, LabelTargets,
};

fn check_dims(width: usize, height: usize) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("grid dimensions must be at least 1x1"));
    }
    width
        .checked_mul(height)
        .ok_or_else(|| Error::invalid("grid dimensions overflow"))
}

/// Real-valued raster with finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let n = check_dims(width, height)?;
        if values.len() != n {
            return Err(Error::invalid(alloc::format!(
                "grid {width}x{height} needs {n} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        let n = check_dims(width, height)?;
        Self::new(width, height, vec![value; n])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(width, height)?;
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access for kernels that keep values finite.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        let n = check_dims(width, height)?;
        if bits.len() != n {
            return Err(Error::invalid(alloc::format!(
                "mask {width}x{height} needs {n} bits, got {}",
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        let n = check_dims(width, height)?;
        Ok(Self { width, height, bits: vec![false; n] })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::empty(width, height)?;
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y);
            }
        }
        Ok(m)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self { width: self.width, height: self.height, bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// Whether every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// 0.0 / 1.0 grid.
    pub fn to_grid(&self) -> GridMap {
        GridMap {
            width: self.width,
            height: self.height,
            values: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Integer labels per pixel, `0` is background.
///
/// Maps returned by [`connected_components`] use the contiguous range
/// `1..=N`; ownership maps built from instance lists use the instance's
/// position in the list plus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        let n = check_dims(width, height)?;
        if labels.len() != n {
            return Err(Error::invalid(alloc::format!(
                "label map {width}x{height} needs {n} labels, got {}",
                labels.len()
            )));
        }
        Ok(Self { width, height, labels })
    }

    pub fn background(width: usize, height: usize) -> Result<Self> {
        let n = check_dims(width, height)?;
        Ok(Self { width, height, labels: vec![0; n] })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u32] {
        &mut self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u32) {
        self.labels[y * self.width + x] = v;
    }

    pub fn max_label(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Pixels carrying `label`.
    pub fn mask_of(&self, label: u32) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l == label).collect(),
        }
    }

    /// Pixels with any non-zero label.
    pub fn foreground(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l != 0).collect(),
        }
    }
}
