//! Interleaved fusion of the semantic and geometric branch features.
//!
//! Each branch computes its own offset field from its own feature and uses
//! it to sample both features:
//! `F_b' = ½ [S_own(D_own(F_b, Δ_b)) + S_cross(D_cross(F_other, Δ_b))]`.

use alloc::vec::Vec;

use super::{apply_gate, deformable_conv, offset_field, scale_gate, ConvWeights, FeatureTensor, OffsetField};
use crate::{Error, Result};

/// Weights of one output branch.
#[derive(Debug, Clone, PartialEq)]
pub struct IfaBranchWeights {
    /// 3×3, `C_in → 18`.
    pub offset: ConvWeights,
    /// 3×3 deformable, `C_in → C_out`, applied to this branch's feature.
    pub deform_own: ConvWeights,
    /// 3×3 deformable, `C_in → C_out`, applied to the other branch's feature.
    pub deform_cross: ConvWeights,
    /// 1×1 gate generators, `C_out → C_out`.
    pub gate_own: ConvWeights,
    pub gate_cross: ConvWeights,
}

impl IfaBranchWeights {
    fn validate(&self, c_in: usize) -> Result<usize> {
        let c_out = self.deform_own.out_channels();
        let ok = self.offset.in_channels() == c_in
            && self.deform_own.in_channels() == c_in
            && self.deform_cross.in_channels() == c_in
            && self.deform_cross.out_channels() == c_out
            && self.gate_own.in_channels() == c_out
            && self.gate_cross.in_channels() == c_out;
        if !ok {
            return Err(Error::invalid("fusion weights do not agree on channel counts"));
        }
        Ok(c_out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfaWeights {
    pub semantic: IfaBranchWeights,
    pub geometric: IfaBranchWeights,
}

impl IfaWeights {
    /// Output channels of the fusion.
    pub fn out_channels(&self) -> usize {
        self.semantic.deform_own.out_channels()
    }
}

/// Offsets and gate values of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub offsets: OffsetField,
    pub gate_own: Vec<f64>,
    pub gate_cross: Vec<f64>,
}

/// Everything a forward pass derived from its inputs besides the linear
/// sampling itself. Replaying it with [`ifa_forward_frozen`] makes the
/// fusion affine in the features.
#[derive(Debug, Clone, PartialEq)]
pub struct IfaState {
    pub semantic: BranchState,
    pub geometric: BranchState,
}

fn check_inputs(fs: &FeatureTensor, fg: &FeatureTensor) -> Result<()> {
    if fs.shape() != fg.shape() {
        return Err(Error::invalid("branch features differ in shape"));
    }
    Ok(())
}

fn fuse(own: &FeatureTensor, other: &FeatureTensor, w: &IfaBranchWeights, state: &BranchState) -> Result<FeatureTensor> {
    let a = apply_gate(&deformable_conv(own, &w.deform_own, &state.offsets)?, &state.gate_own)?;
    let b = apply_gate(&deformable_conv(other, &w.deform_cross, &state.offsets)?, &state.gate_cross)?;
    a.axpby(0.5, &b, 0.5)
}

fn branch(own: &FeatureTensor, other: &FeatureTensor, w: &IfaBranchWeights) -> Result<(FeatureTensor, BranchState)> {
    w.validate(own.channels())?;
    let offsets = offset_field(own, &w.offset)?;
    let d_own = deformable_conv(own, &w.deform_own, &offsets)?;
    let d_cross = deformable_conv(other, &w.deform_cross, &offsets)?;
    let gate_own = scale_gate(&d_own, &w.gate_own)?;
    let gate_cross = scale_gate(&d_cross, &w.gate_cross)?;
    let out = apply_gate(&d_own, &gate_own)?.axpby(0.5, &apply_gate(&d_cross, &gate_cross)?, 0.5)?;
    Ok((out, BranchState { offsets, gate_own, gate_cross }))
}

/// Forward pass that also returns the derived offsets and gates.
pub fn ifa_forward_traced(
    fs: &FeatureTensor,
    fg: &FeatureTensor,
    w: &IfaWeights,
) -> Result<(FeatureTensor, FeatureTensor, IfaState)> {
    check_inputs(fs, fg)?;
    let (s_out, semantic) = branch(fs, fg, &w.semantic)?;
    let (g_out, geometric) = branch(fg, fs, &w.geometric)?;
    Ok((s_out, g_out, IfaState { semantic, geometric }))
}

pub fn ifa_forward(fs: &FeatureTensor, fg: &FeatureTensor, w: &IfaWeights) -> Result<(FeatureTensor, FeatureTensor)> {
    let (a, b, _) = ifa_forward_traced(fs, fg, w)?;
    Ok((a, b))
}

/// Forward pass with offsets and gates taken from `state` instead of being
/// recomputed from the inputs.
pub fn ifa_forward_frozen(
    fs: &FeatureTensor,
    fg: &FeatureTensor,
    w: &IfaWeights,
    state: &IfaState,
) -> Result<(FeatureTensor, FeatureTensor)> {
    check_inputs(fs, fg)?;
    w.semantic.validate(fs.channels())?;
    w.geometric.validate(fs.channels())?;
    Ok((fuse(fs, fg, &w.semantic, &state.semantic)?, fuse(fg, fs, &w.geometric, &state.geometric)?))
}
