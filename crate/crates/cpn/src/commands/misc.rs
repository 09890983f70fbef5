use std::path::Path;

use cpn_core::features::ifa_forward_traced;
use cpn_core::features::FeatureTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::Result;
use crate::gradcheck::{check_dice, check_kernel};
use crate::synth::{self, SynthOptions};
use crate::weights;

use super::Report;

/// Writes a synthetic corpus (see [`crate::synth`]) under `out`.
pub fn cmd_synth(out: &Path, opts: &SynthOptions) -> Result<Report> {
    let cfg = synth::corpus_config();
    let images = synth::generate(opts, &cfg)?;
    synth::write_corpus(out, &images, &cfg)?;
    let gts: usize = images.iter().map(|i| i.annotations.cared().count()).sum();
    log::info!("synth: {} images, {gts} text instances", images.len());
    Ok(Report::default())
}

/// Finite-difference checks of both map losses; one line per loss on stdout.
pub fn cmd_losscheck(cfg: &RunConfig, cases: usize) -> Result<Report> {
    let mut report = Report::default();
    for r in [check_dice(cases, cfg.seed, cfg.dice_epsilon)?, check_kernel(cases, cfg.seed, cfg.beta)?] {
        let ok = r.passes(1e-4);
        println!(
            "{}: {} cases, {} points, max relative error {:.3e} {}",
            r.name,
            r.cases,
            r.points,
            r.max_rel_err,
            if ok { "ok" } else { "FAILED" }
        );
        if !ok {
            report.fail(format!("{} gradient check failed", r.name));
        }
    }
    Ok(report)
}

/// Seeded fusion weights for `in_channels` inputs and `ifa_channels` outputs.
pub fn cmd_gen_weights(cfg: &RunConfig, in_channels: usize, out: &Path) -> Result<Report> {
    weights::write_ifa(out, &weights::random_ifa(in_channels, cfg.ifa_channels, cfg.seed)?)?;
    Ok(Report::default())
}

/// Runs the fusion block on seeded random features and prints output shapes
/// and gate ranges.
pub fn cmd_ifa(cfg: &RunConfig, weights_path: Option<&Path>, in_channels: usize, size: (usize, usize)) -> Result<Report> {
    let w = match weights_path {
        Some(p) => weights::read_ifa(p)?,
        None => weights::random_ifa(in_channels, cfg.ifa_channels, cfg.seed)?,
    };
    let c_in = w.semantic.offset.in_channels();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let (fw, fh) = size;
    let fs = FeatureTensor::from_fn(c_in, fh, fw, |_, _, _| rng.gen_range(-1.0..1.0))?;
    let fg = FeatureTensor::from_fn(c_in, fh, fw, |_, _, _| rng.gen_range(-1.0..1.0))?;
    let (os, og, state) = ifa_forward_traced(&fs, &fg, &w)?;
    for (name, out, b) in [("semantic", &os, &state.semantic), ("geometric", &og, &state.geometric)] {
        let gates = b.gate_own.iter().chain(&b.gate_cross);
        let (lo, hi) = gates.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
        let (c, h, w) = out.shape();
        println!("{name}: {c_in}x{fh}x{fw} -> {c}x{h}x{w}, gates in [{lo:.4}, {hi:.4}]");
    }
    Ok(Report::default())
}
