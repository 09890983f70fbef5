//! Central finite-difference checks of the analytic loss gradients on
//! seeded random instances.

use cpn_core::losses::{dice_loss, kernel_map_loss, MIN_KERNEL_RADIUS};
use cpn_core::{BinaryMask, GridMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Step of the central differences.
pub const STEP: f64 = 1e-5;
/// Points closer than this to a kink of the loss are not compared.
pub const KINK_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct GradReport {
    pub name: &'static str,
    pub cases: usize,
    pub points: usize,
    pub max_rel_err: f64,
}

impl GradReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.points > 0 && self.max_rel_err <= tol
    }
}

/// Relative error with an absolute floor for gradients that vanish.
pub fn rel_err(numeric: f64, analytic: f64) -> f64 {
    let diff = (numeric - analytic).abs();
    if diff < 1e-10 {
        return 0.0;
    }
    diff / numeric.abs().max(analytic.abs())
}

fn central_difference(p: &GridMap, i: usize, f: &impl Fn(&GridMap) -> Result<f64>) -> Result<f64> {
    let mut a = p.clone();
    a.values_mut()[i] += STEP;
    let mut b = p.clone();
    b.values_mut()[i] -= STEP;
    Ok((f(&a)? - f(&b)?) / (2.0 * STEP))
}

fn random_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(3..14), rng.gen_range(3..14))
}

pub fn check_dice(cases: usize, seed: u64, epsilon: f64) -> Result<GradReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradReport { name: "dice_loss", cases, points: 0, max_rel_err: 0.0 };
    for _ in 0..cases {
        let (w, h) = random_dims(&mut rng);
        let density = rng.gen_range(0.1..0.9);
        let t = BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))?;
        let p = GridMap::from_fn(w, h, |_, _| rng.gen_range(0.0..1.0))?;
        let g = dice_loss(&p, &t, epsilon)?.gradient;
        let f = |q: &GridMap| Ok(dice_loss(q, &t, epsilon)?.value);
        for (i, &gi) in g.iter().enumerate() {
            report.max_rel_err = report.max_rel_err.max(rel_err(central_difference(&p, i, &f)?, gi));
            report.points += 1;
        }
    }
    Ok(report)
}

pub fn check_kernel(cases: usize, seed: u64, beta: f64) -> Result<GradReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradReport { name: "kernel_map_loss", cases, points: 0, max_rel_err: 0.0 };
    for _ in 0..cases {
        let (w, h) = random_dims(&mut rng);
        let t = GridMap::from_fn(w, h, |_, _| if rng.gen_bool(0.7) { rng.gen_range(0.5..12.0) } else { 0.0 })?;
        let p = GridMap::from_fn(w, h, |_, _| rng.gen_range(0.0..14.0))?;
        let g = kernel_map_loss(&p, &t, beta)?.gradient;
        let f = |q: &GridMap| Ok(kernel_map_loss(q, &t, beta)?.value);
        for (i, &gi) in g.iter().enumerate() {
            let (dh, ds) = (p.values()[i], t.values()[i]);
            // kinks: |D̂ − D*| = 1 (smooth L1), D̂ = D* (ratio), the clamp
            let near_kink = ds > 0.0
                && ((dh - ds).abs() < KINK_MARGIN
                    || ((dh - ds).abs() - 1.0).abs() < KINK_MARGIN
                    || dh < MIN_KERNEL_RADIUS + KINK_MARGIN);
            if near_kink {
                continue;
            }
            report.max_rel_err = report.max_rel_err.max(rel_err(central_difference(&p, i, &f)?, gi));
            report.points += 1;
        }
    }
    Ok(report)
}
