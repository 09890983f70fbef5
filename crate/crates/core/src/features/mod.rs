//! Small dense forward passes: convolution, bilinear and deformable
//! sampling, channel gating, the interleaved two-branch fusion, and rotated
//! RoI pooling.

mod ifa;
mod roi;

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

pub use ifa::{ifa_forward, ifa_forward_frozen, ifa_forward_traced, IfaBranchWeights, IfaState, IfaWeights, BranchState};
pub use roi::rotated_roi_align;

/// Taps of the 3×3 sampling kernel.
pub const KERNEL_TAPS: usize = 9;

/// `C × H × W` tensor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    channels: usize,
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(channels: usize, height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::invalid("feature tensor dimensions must be at least 1"));
        }
        if values.len() != channels * height * width {
            return Err(Error::invalid(alloc::format!(
                "feature tensor {channels}x{height}x{width} needs {} values, got {}",
                channels * height * width,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature tensor values must be finite"));
        }
        Ok(Self { channels, height, width, values })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(channels, height, width, vec![0.0; channels * height * width])
    }

    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut v = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    v.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, v)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.values[(c * self.height + y) * self.width + x]
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.values[c * n..(c + 1) * n]
    }

    /// Elementwise `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &FeatureTensor, b: f64) -> Result<FeatureTensor> {
        if self.shape() != other.shape() {
            return Err(Error::invalid("feature tensors differ in shape"));
        }
        let v = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        FeatureTensor::new(self.channels, self.height, self.width, v)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &FeatureTensor) -> f64 {
        assert_eq!(self.shape(), other.shape(), "feature tensors differ in shape");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Convolution weights `[out][in][ky][kx]` plus one bias per output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeights {
    out_channels: usize,
    in_channels: usize,
    kh: usize,
    kw: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ConvWeights {
    /// Kernel sides must be odd so that "same" padding is symmetric.
    pub fn new(
        out_channels: usize,
        in_channels: usize,
        kh: usize,
        kw: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if out_channels == 0 || in_channels == 0 || kh % 2 == 0 || kw % 2 == 0 {
            return Err(Error::invalid("conv weights need nonzero channels and odd kernel sides"));
        }
        if weights.len() != out_channels * in_channels * kh * kw || bias.len() != out_channels {
            return Err(Error::invalid("conv weight or bias length does not match the shape"));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::invalid("conv weights must be finite"));
        }
        Ok(Self { out_channels, in_channels, kh, kw, weights, bias })
    }

    pub fn zeros(out_channels: usize, in_channels: usize, kh: usize, kw: usize) -> Result<Self> {
        Self::new(out_channels, in_channels, kh, kw, vec![0.0; out_channels * in_channels * kh * kw], vec![0.0; out_channels])
    }

    /// 1×1 identity on `channels` channels.
    pub fn identity(channels: usize) -> Self {
        let mut w = vec![0.0; channels * channels];
        for c in 0..channels {
            w[c * channels + c] = 1.0;
        }
        Self::new(channels, channels, 1, 1, w, vec![0.0; channels]).expect("identity shape is consistent")
    }

    pub fn from_fn(
        out_channels: usize,
        in_channels: usize,
        kh: usize,
        kw: usize,
        mut f: impl FnMut() -> f64,
    ) -> Result<Self> {
        let w = (0..out_channels * in_channels * kh * kw).map(|_| f()).collect();
        let b = (0..out_channels).map(|_| f()).collect();
        Self::new(out_channels, in_channels, kh, kw, w, b)
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn kernel(&self) -> (usize, usize) {
        (self.kh, self.kw)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn with_bias(mut self, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != self.out_channels {
            return Err(Error::invalid("bias length does not match the output channels"));
        }
        self.bias = bias;
        Ok(self)
    }

    #[inline]
    fn w(&self, o: usize, i: usize, ky: usize, kx: usize) -> f64 {
        self.weights[((o * self.in_channels + i) * self.kh + ky) * self.kw + kx]
    }
}

/// Stride-1 cross-correlation with zero "same" padding.
pub fn conv2d(input: &FeatureTensor, w: &ConvWeights) -> Result<FeatureTensor> {
    if input.channels != w.in_channels {
        return Err(Error::invalid(alloc::format!(
            "conv expects {} input channels, got {}",
            w.in_channels,
            input.channels
        )));
    }
    let (h, wd) = (input.height, input.width);
    let (ph, pw) = (w.kh / 2, w.kw / 2);
    let mut out = Vec::with_capacity(w.out_channels * h * wd);
    for o in 0..w.out_channels {
        for y in 0..h {
            for x in 0..wd {
                let mut acc = w.bias[o];
                for i in 0..w.in_channels {
                    let plane = input.plane(i);
                    for ky in 0..w.kh {
                        let yy = y as isize + ky as isize - ph as isize;
                        if yy < 0 || yy >= h as isize {
                            continue;
                        }
                        for kx in 0..w.kw {
                            let xx = x as isize + kx as isize - pw as isize;
                            if xx < 0 || xx >= wd as isize {
                                continue;
                            }
                            acc += w.w(o, i, ky, kx) * plane[yy as usize * wd + xx as usize];
                        }
                    }
                }
                out.push(acc);
            }
        }
    }
    FeatureTensor::new(w.out_channels, h, wd, out)
}

/// Corner indices and weights of one bilinear sample; corners outside the
/// grid get weight zero.
#[derive(Clone, Copy)]
struct Bilinear {
    idx: [usize; 4],
    wt: [f64; 4],
}

impl Bilinear {
    fn at(height: usize, width: usize, y: f64, x: f64) -> Self {
        let (y0, x0) = (math::floor(y), math::floor(x));
        let (fy, fx) = (y - y0, x - x0);
        let mut b = Bilinear { idx: [0; 4], wt: [0.0; 4] };
        let corners = [(y0, x0, (1.0 - fy) * (1.0 - fx)), (y0, x0 + 1.0, (1.0 - fy) * fx), (y0 + 1.0, x0, fy * (1.0 - fx)), (y0 + 1.0, x0 + 1.0, fy * fx)];
        for (k, &(cy, cx, wt)) in corners.iter().enumerate() {
            if cy >= 0.0 && cx >= 0.0 && cy < height as f64 && cx < width as f64 {
                b.idx[k] = cy as usize * width + cx as usize;
                b.wt[k] = wt;
            }
        }
        b
    }

    #[inline]
    fn sample(&self, plane: &[f64]) -> f64 {
        self.wt[0] * plane[self.idx[0]]
            + self.wt[1] * plane[self.idx[1]]
            + self.wt[2] * plane[self.idx[2]]
            + self.wt[3] * plane[self.idx[3]]
    }
}

/// Bilinear interpolation of channel `c` at row `y`, column `x` (pixel
/// indices, not centers); zero outside the grid.
pub fn bilinear_sample(input: &FeatureTensor, y: f64, x: f64, c: usize) -> f64 {
    if !(y.is_finite() && x.is_finite()) || y <= -1.0 || x <= -1.0 || y >= input.height as f64 || x >= input.width as f64 {
        return 0.0;
    }
    Bilinear::at(input.height, input.width, y, x).sample(input.plane(c))
}

/// Per-pixel `(dy, dx)` displacement of every kernel tap.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetField {
    height: usize,
    width: usize,
    /// `offsets[(y * width + x) * KERNEL_TAPS + k]`
    offsets: Vec<(f64, f64)>,
}

impl OffsetField {
    pub fn new(height: usize, width: usize, offsets: Vec<(f64, f64)>) -> Result<Self> {
        if offsets.len() != height * width * KERNEL_TAPS {
            return Err(Error::invalid("offset field length does not match its size"));
        }
        if offsets.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(Error::invalid("offsets must be finite"));
        }
        Ok(Self { height, width, offsets })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self { height, width, offsets: vec![(0.0, 0.0); height * width * KERNEL_TAPS] }
    }

    pub fn uniform(height: usize, width: usize, dy: f64, dx: f64) -> Self {
        Self { height, width, offsets: vec![(dy, dx); height * width * KERNEL_TAPS] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn get(&self, y: usize, x: usize, k: usize) -> (f64, f64) {
        self.offsets[(y * self.width + x) * KERNEL_TAPS + k]
    }

    pub fn offsets(&self) -> &[(f64, f64)] {
        &self.offsets
    }
}

/// Offset generator: a 3×3 convolution with `2·KERNEL_TAPS` outputs,
/// channel `2k` holding `dy` and `2k + 1` holding `dx` of tap `k`.
pub fn offset_field(feature: &FeatureTensor, w: &ConvWeights) -> Result<OffsetField> {
    if w.out_channels != 2 * KERNEL_TAPS || w.kernel() != (3, 3) {
        return Err(Error::invalid("offset generator must be a 3x3 conv with 18 outputs"));
    }
    let raw = conv2d(feature, w)?;
    let (h, wd) = (feature.height, feature.width);
    let mut off = Vec::with_capacity(h * wd * KERNEL_TAPS);
    for y in 0..h {
        for x in 0..wd {
            for k in 0..KERNEL_TAPS {
                off.push((raw.get(2 * k, y, x), raw.get(2 * k + 1, y, x)));
            }
        }
    }
    OffsetField::new(h, wd, off)
}

/// 3×3 deformable convolution: tap `k` of output pixel `(y, x)` reads the
/// input at `(y + ky − 1 + dy_k, x + kx − 1 + dx_k)` bilinearly.
pub fn deformable_conv(input: &FeatureTensor, w: &ConvWeights, offsets: &OffsetField) -> Result<FeatureTensor> {
    if w.kernel() != (3, 3) {
        return Err(Error::invalid("deformable convolution needs a 3x3 kernel"));
    }
    if input.channels != w.in_channels {
        return Err(Error::invalid("deformable convolution input channels do not match the weights"));
    }
    if offsets.dims() != (input.height, input.width) {
        return Err(Error::invalid("offset field size does not match the input"));
    }
    let (h, wd) = (input.height, input.width);
    let (cin, cout) = (w.in_channels, w.out_channels);
    let mut out = vec![0.0; cout * h * wd];
    let mut samples = vec![0.0; cin * KERNEL_TAPS];
    for y in 0..h {
        for x in 0..wd {
            for k in 0..KERNEL_TAPS {
                let (dy, dx) = offsets.get(y, x, k);
                let sy = y as f64 + (k / 3) as f64 - 1.0 + dy;
                let sx = x as f64 + (k % 3) as f64 - 1.0 + dx;
                for i in 0..cin {
                    samples[i * KERNEL_TAPS + k] = bilinear_sample(input, sy, sx, i);
                }
            }
            for o in 0..cout {
                let wrow = &w.weights[o * cin * KERNEL_TAPS..(o + 1) * cin * KERNEL_TAPS];
                let mut acc = w.bias[o];
                for (a, b) in wrow.iter().zip(&samples) {
                    acc += a * b;
                }
                out[(o * h + y) * wd + x] = acc;
            }
        }
    }
    FeatureTensor::new(cout, h, wd, out)
}

/// `max(0, min(1, (x + 1) / 2))`.
pub fn hard_sigmoid(x: f64) -> f64 {
    ((x + 1.0) * 0.5).clamp(0.0, 1.0)
}

/// Channel gate `ρ(f(mean over H×W of F))`, one value per channel.
pub fn scale_gate(feature: &FeatureTensor, f: &ConvWeights) -> Result<Vec<f64>> {
    let c = feature.channels;
    if f.kernel() != (1, 1) || f.in_channels != c || f.out_channels != c {
        return Err(Error::invalid("scale attention needs a 1x1 map from C to C channels"));
    }
    let n = (feature.height * feature.width) as f64;
    let pooled: Vec<f64> = (0..c).map(|i| crate::sum::pairwise_sum(feature.plane(i)) / n).collect();
    Ok((0..c)
        .map(|o| {
            let mut acc = f.bias[o];
            for i in 0..c {
                acc += f.w(o, i, 0, 0) * pooled[i];
            }
            hard_sigmoid(acc)
        })
        .collect())
}

/// Scales every channel of `feature` by its gate.
pub fn apply_gate(feature: &FeatureTensor, gate: &[f64]) -> Result<FeatureTensor> {
    if gate.len() != feature.channels {
        return Err(Error::invalid("gate length does not match the channels"));
    }
    let n = feature.height * feature.width;
    let v = feature.values.iter().enumerate().map(|(i, &x)| gate[i / n] * x).collect();
    FeatureTensor::new(feature.channels, feature.height, feature.width, v)
}

/// `S(F) = ρ(f(GAP(F))) · F`.
pub fn scale_attention(feature: &FeatureTensor, f: &ConvWeights) -> Result<FeatureTensor> {
    apply_gate(feature, &scale_gate(feature, f)?)
}
