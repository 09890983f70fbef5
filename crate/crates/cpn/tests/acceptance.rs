//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p cpn --test acceptance`. The process exits nonzero
//! when a criterion fails, except for the multi-worker speedup when the
//! machine has fewer than four CPUs; that line is still printed as FAIL.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use cpn::annotations::{AnnotationSet, Instance};
use cpn::commands::{evaluate, propose_dir, sweep, ProposeOptions, DEFAULT_K_LIST};
use cpn::gradcheck::{check_dice, check_kernel};
use cpn::parallel::{default_threads, par_deformable_dilate};
use cpn::synth::{self, SynthOptions};
use cpn::{pipeline, RunConfig};
use cpn_core::anchors::Anchor;
use cpn_core::features::{
    conv2d, deformable_conv, hard_sigmoid, ifa_forward, scale_gate, ConvWeights, FeatureTensor, OffsetField,
};
use cpn_core::geometry::{
    convex_hull, decode_midpoint_offsets, encode_midpoint_targets, min_area_rect, rotated_iou,
};
use cpn_core::morphsem::{deformable_dilate, deformable_dilate_naive, generate_semantic_proposals, DilationInput};
use cpn_core::raster::squared_distance_to_nearest;
use cpn_core::{BinaryMask, GridMap, Point2, Polygon, RotatedRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure explained by the machine rather than the code.
    hardware_limited: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, hardware_limited: false }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random text-like outline of aspect ratio at least 2, rotated and placed
/// near the image center: a superellipse when convex, otherwise a band bent
/// along a shallow arc.
fn text_polygon(r: &mut ChaCha8Rng, concave: bool) -> Polygon {
    let t: f64 = r.gen_range(14.0..36.0);
    let len = t * r.gen_range(2.0..5.0);
    let rot = r.gen_range(-PI..PI);
    let (cx, cy) = (r.gen_range(110.0..146.0), r.gen_range(110.0..146.0));
    let local: Vec<(f64, f64)> = if concave {
        // sagitta of the centerline, at most a quarter of the thickness
        let sag = r.gen_range(0.1..0.25) * t;
        let radius = (len * len / 4.0 + sag * sag) / (2.0 * sag);
        let half = (len / 2.0 / radius).asin();
        let k = r.gen_range(4..=8);
        let arc = |rad: f64, i: usize| {
            let a = -half + 2.0 * half * i as f64 / (k - 1) as f64;
            (rad * a.sin(), radius - rad * a.cos() - sag / 2.0)
        };
        let outer = (0..k).map(|i| arc(radius + t / 2.0, i));
        let inner = (0..k).rev().map(|i| arc(radius - t / 2.0, i));
        outer.chain(inner).collect()
    } else {
        let p = r.gen_range(3.0..8.0);
        let n = r.gen_range(12..=24);
        (0..n)
            .map(|i| {
                let a = (i as f64 + r.gen_range(-0.2..0.2)) * TAU / n as f64;
                let (c, s) = (a.cos(), a.sin());
                (len / 2.0 * c.signum() * c.abs().powf(2.0 / p), t / 2.0 * s.signum() * s.abs().powf(2.0 / p))
            })
            .collect()
    };
    let pts = local
        .into_iter()
        .map(|(x, y)| Point2::new(cx + x * rot.cos() - y * rot.sin(), cy + x * rot.sin() + y * rot.cos()))
        .collect();
    Polygon::new(pts).expect("generated outlines are simple")
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.x - a.x - t * dx).powi(2) + (p.y - a.y - t * dy).powi(2)).sqrt()
}

/// Largest distance from an interior grid point to the boundary, on a
/// quarter-pixel grid.
fn inradius(p: &Polygon) -> f64 {
    let (x0, y0, x1, y1) = p.bounds();
    let mut best = 0.0f64;
    let mut y = y0;
    while y <= y1 {
        let mut x = x0;
        while x <= x1 {
            let q = Point2::new(x, y);
            if p.contains(q) {
                let d = p.edges().map(|(a, b)| point_segment_distance(q, a, b)).fold(f64::INFINITY, f64::min);
                best = best.max(d);
            }
            x += 0.25;
        }
        y += 0.25;
    }
    best
}

fn c1_round_trip() -> Outcome {
    let cfg = RunConfig::default();
    let mut r = rng(1);
    let mut polys = Vec::new();
    while polys.len() < 500 {
        let p = text_polygon(&mut r, polys.len() % 2 == 1);
        let e = cpn_core::raster::erosion_kernel_size(&p, cfg.shrink_k).unwrap();
        if inradius(&p) >= 2.0 * e {
            polys.push(p);
        }
    }
    let start = Instant::now();
    let mut good = 0;
    let mut worst = 1.0f64;
    for p in &polys {
        let set = AnnotationSet {
            image_id: "p".into(),
            instances: vec![Instance { polygon: p.clone(), transcription: "t".into(), ignore: false }],
        };
        let (t, _) = pipeline::labelgen(&set, 256, 256, &cfg).unwrap();
        let props = generate_semantic_proposals(&t.erosion.to_grid(), &t.kernel, &cfg.semantic_config()).unwrap();
        let iou = if props.len() == 1 { rotated_iou(&props[0].rect, &min_area_rect(p).unwrap()) } else { 0.0 };
        worst = worst.min(iou);
        if iou >= 0.9 {
            good += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let frac = good as f64 / polys.len() as f64;
    Outcome::new(
        frac >= 0.98 && secs < 60.0,
        format!("{good}/500 with one proposal at IoU >= 0.9 ({:.1}%), worst IoU {worst:.3}, {secs:.2} s", 100.0 * frac),
    )
}

fn c2_dilation_oracle() -> Outcome {
    let mut r = rng(2);
    let mut equal = 0;
    for _ in 0..200 {
        let (w, h) = (r.gen_range(1..=128), r.gen_range(1..=128));
        let s = GridMap::from_fn(w, h, |_, _| r.gen_range(-1.0..1.0)).unwrap();
        let d = GridMap::from_fn(w, h, |_, _| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..=12.0) }).unwrap();
        let input = DilationInput::new(&s, &d).unwrap();
        let naive = deformable_dilate_naive(&input);
        let fast = deformable_dilate(&input);
        let bits = |g: &GridMap| g.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        if bits(&naive) == bits(&fast) {
            equal += 1;
        }
    }
    Outcome::new(equal == 200, format!("{equal}/200 pairs bitwise equal"))
}

fn c3_distance_transform() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let density = [0.002, 0.01, 0.05, 0.3][i % 4];
        let m = BinaryMask::from_fn(64, 64, |_, _| r.gen_bool(density)).unwrap();
        let fast = squared_distance_to_nearest(&m);
        let set: Vec<(i64, i64)> =
            (0..64 * 64).filter(|&k| m.bits()[k]).map(|k| ((k % 64) as i64, (k / 64) as i64)).collect();
        match fast {
            None => {
                if !set.is_empty() {
                    worst = f64::INFINITY;
                }
            }
            Some(sq) => {
                for k in 0..64 * 64 {
                    let (x, y) = ((k % 64) as i64, (k / 64) as i64);
                    let brute = set.iter().map(|&(a, b)| (a - x).pow(2) + (b - y).pow(2)).min().unwrap() as f64;
                    worst = worst.max((sq[k].sqrt() - brute.sqrt()).abs());
                }
            }
        }
    }
    Outcome::new(worst <= 1e-6, format!("max |EDT - brute force| = {worst:.2e} over 100 masks"))
}

fn random_rect(r: &mut ChaCha8Rng) -> RotatedRect {
    RotatedRect::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0), r.gen_range(1.0..12.0), r.gen_range(1.0..12.0), r.gen_range(-PI..PI))
}

fn monte_carlo_iou(a: &RotatedRect, b: &RotatedRect, samples: usize, r: &mut ChaCha8Rng) -> f64 {
    let corners: Vec<Point2> = a.corners().into_iter().chain(b.corners()).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &corners {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let frame = |q: &RotatedRect| (q.cx, q.cy, q.theta.cos(), q.theta.sin(), q.w / 2.0, q.h / 2.0);
    let inside = |(cx, cy, c, s, hw, hh): (f64, f64, f64, f64, f64, f64), p: Point2| {
        let (dx, dy) = (p.x - cx, p.y - cy);
        (dx * c + dy * s).abs() <= hw && (dy * c - dx * s).abs() <= hh
    };
    let (fa, fb) = (frame(a), frame(b));
    let (mut both, mut either) = (0u64, 0u64);
    for _ in 0..samples {
        let bits: u64 = r.gen();
        let (u, v) = ((bits >> 32) as f64 / 4294967296.0, (bits & 0xffff_ffff) as f64 / 4294967296.0);
        let p = Point2::new(x0 + u * (x1 - x0), y0 + v * (y1 - y0));
        let (ia, ib) = (inside(fa, p), inside(fb, p));
        both += (ia && ib) as u64;
        either += (ia || ib) as u64;
    }
    if either == 0 {
        0.0
    } else {
        both as f64 / either as f64
    }
}

fn c4_rotated_iou() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    let mut exact = true;
    for _ in 0..1000 {
        let a = random_rect(&mut r);
        let b = random_rect(&mut r);
        let iou = rotated_iou(&a, &b);
        let mc = monte_carlo_iou(&a, &b, 1_000_000, &mut r);
        worst = worst.max((iou - mc).abs());
        exact &= rotated_iou(&b, &a).to_bits() == iou.to_bits();
        exact &= rotated_iou(&a, &a) == 1.0 && rotated_iou(&b, &b) == 1.0;
    }
    Outcome::new(
        worst <= 0.02 && exact,
        format!("max |IoU - MC(1e6)| = {worst:.4} over 1000 pairs, symmetry/identity exact: {exact}"),
    )
}

fn c5_min_area_rect() -> Outcome {
    let mut r = rng(5);
    let mut violations = 0;
    let mut contained = true;
    for _ in 0..300 {
        let n = r.gen_range(3..60);
        let (sx, sy) = (r.gen_range(1.0..50.0), r.gen_range(1.0..50.0));
        let pts: Vec<Point2> = (0..n).map(|_| Point2::new(r.gen_range(-sx..sx), r.gen_range(-sy..sy))).collect();
        let Ok(hull) = convex_hull(&pts) else { continue };
        let rect = min_area_rect(&hull).unwrap();
        let area = rect.area();
        for k in 0..3600 {
            let t = PI * k as f64 / 3600.0;
            let (c, s) = (t.cos(), t.sin());
            let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in hull.vertices() {
                let (u, v) = (p.x * c + p.y * s, -p.x * s + p.y * c);
                u0 = u0.min(u);
                u1 = u1.max(u);
                v0 = v0.min(v);
                v1 = v1.max(v);
            }
            if area > (u1 - u0) * (v1 - v0) * (1.0 + 1e-6) {
                violations += 1;
            }
        }
        let tol = 1e-9 * (sx + sy);
        contained &= hull.vertices().iter().all(|&p| rect.contains(p, tol));
    }
    Outcome::new(
        violations == 0 && contained,
        format!("{violations} of 300x3600 orientation samples beat the computed area, vertices contained: {contained}"),
    )
}

fn c6_gradients() -> Outcome {
    let cfg = RunConfig::default();
    let d = check_dice(50, 6, cfg.dice_epsilon).unwrap();
    let k = check_kernel(50, 6, cfg.beta).unwrap();
    Outcome::new(
        d.passes(1e-4) && k.passes(1e-4),
        format!(
            "dice max rel err {:.2e} ({} points), kernel max rel err {:.2e} ({} points)",
            d.max_rel_err, d.points, k.max_rel_err, k.points
        ),
    )
}

fn c7_midpoint_round_trip() -> Outcome {
    let mut r = rng(7);
    let (mut n, mut good, mut worst) = (0, 0, 1.0f64);
    while n < 1000 {
        let a = Anchor {
            cx: r.gen_range(0.0..500.0),
            cy: r.gen_range(0.0..500.0),
            w: r.gen_range(8.0..200.0),
            h: r.gen_range(8.0..200.0),
            level: 0,
        };
        let target = RotatedRect::new(
            a.cx + r.gen_range(-0.5..0.5) * a.w,
            a.cy + r.gen_range(-0.5..0.5) * a.h,
            a.w * r.gen_range(0.3..3.0),
            a.h * r.gen_range(0.3..3.0),
            r.gen_range(-PI..PI),
        );
        let d = encode_midpoint_targets(&a.to_rect(), &target).unwrap();
        if d.dalpha.abs() > 0.4 || d.dbeta.abs() > 0.4 {
            continue;
        }
        n += 1;
        let back = decode_midpoint_offsets(&d.apply(a.cx, a.cy, a.w, a.h)).unwrap();
        let iou = rotated_iou(&back, &target);
        worst = worst.min(iou);
        if iou >= 0.99 {
            good += 1;
        }
    }
    Outcome::new(good == 1000, format!("{good}/1000 pairs at IoU >= 0.99, worst {worst:.6}"))
}

fn corpus(dir: &std::path::Path, images: usize, seed: u64) -> (RunConfig, Vec<AnnotationSet>, ProposeOptions) {
    let cfg = synth::corpus_config();
    let imgs = synth::generate(&SynthOptions { images, seed, ..SynthOptions::default() }, &cfg).unwrap();
    synth::write_corpus(dir, &imgs, &cfg).unwrap();
    let sets = imgs.into_iter().map(|i| i.annotations).collect();
    let opts = ProposeOptions { maps: dir.join("maps"), reg: Some(dir.join("reg")), merge_nms: false, threads: 0 };
    (cfg, sets, opts)
}

fn c8_complementarity() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, sets, opts) = corpus(dir.path(), 20, 8);
    let (props, rep) = propose_dir(&cfg, &opts).unwrap();
    let (_, report) = evaluate(&props, &sets, 0).unwrap();
    let never_below = report.gains().iter().all(|&g| g >= 0.0);
    let differ = report.semantic != report.geometric;
    let strict = report.gains().iter().filter(|&&g| g > 0.0).count();
    let at = |i: usize| format!("{:.3}/{:.3}/{:.3}", report.semantic[i], report.geometric[i], report.merged[i]);
    Outcome::new(
        rep.ok() && never_below && (!differ || strict >= 1),
        format!(
            "merged >= max(sem, geo) at all 10 thresholds: {never_below}, strictly greater at {strict}; sem/geo/merged recall {} at 0.50, {} at 0.95",
            at(0),
            at(9)
        ),
    )
}

fn c9_sweep() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, sets, opts) = corpus(dir.path(), 40, 9);
    let n_gt: usize = sets.iter().map(|s| s.cared().count()).sum();
    let (rows, rep) = sweep(&cfg, &opts, &sets, &DEFAULT_K_LIST).unwrap();
    let monotone = rows.windows(2).all(|w| w[1].recall >= w[0].recall);
    let last = rows.len() - 1;
    let delta = rows[last].recall - rows[last - 1].recall;
    let curve: Vec<String> = rows.iter().map(|r| format!("{}:{:.3}", r.k, r.recall)).collect();
    Outcome::new(
        rep.ok() && n_gt <= 500 && monotone && delta.abs() < 0.001,
        format!("{n_gt} gt boxes, recall by k [{}], nondecreasing: {monotone}, last step {delta:.4}", curve.join(" ")),
    )
}

fn c10_ifa() -> Outcome {
    let mut r = rng(10);
    let expected = [(-3.0, 0.0), (-1.0, 0.0), (0.0, 0.5), (1.0, 1.0), (3.0, 1.0)];
    let hs = expected.iter().all(|&(x, y)| hard_sigmoid(x) == y);

    let mut gate_ok = true;
    for _ in 0..50 {
        let f = FeatureTensor::from_fn(6, 5, 4, |_, _, _| r.gen_range(-20.0..20.0)).unwrap();
        let g = ConvWeights::from_fn(6, 6, 1, 1, || r.gen_range(-3.0..3.0)).unwrap();
        gate_ok &= scale_gate(&f, &g).unwrap().iter().all(|v| (0.0..=1.0).contains(v));
    }

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (c, h, w) = (r.gen_range(1..6), r.gen_range(1..9), r.gen_range(1..9));
        let f = FeatureTensor::from_fn(c, h, w, |_, _, _| r.gen_range(-1.0..1.0)).unwrap();
        let k = ConvWeights::from_fn(r.gen_range(1..5), c, 3, 3, || r.gen_range(-1.0..1.0)).unwrap();
        let a = deformable_conv(&f, &k, &OffsetField::zeros(h, w)).unwrap();
        worst = worst.max(a.max_abs_diff(&conv2d(&f, &k).unwrap()));
    }

    let wts = cpn::weights::random_ifa(256, 128, 10).unwrap();
    let fs = FeatureTensor::from_fn(256, 6, 6, |_, _, _| r.gen_range(-1.0..1.0)).unwrap();
    let fg = FeatureTensor::from_fn(256, 6, 6, |_, _, _| r.gen_range(-1.0..1.0)).unwrap();
    let (os, og) = ifa_forward(&fs, &fg, &wts).unwrap();
    let shapes = os.shape() == (128, 6, 6) && og.shape() == (128, 6, 6);
    Outcome::new(
        hs && gate_ok && worst <= 1e-5 && shapes,
        format!(
            "hard_sigmoid exact: {hs}, gates in [0,1]: {gate_ok}, zero-offset deform vs conv max diff {worst:.1e}, 256 -> {:?} / {:?}",
            os.shape(),
            og.shape()
        ),
    )
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed());
        out = Some(v);
    }
    (best, out.expect("at least one run"))
}

fn c11_performance() -> Vec<(String, Outcome)> {
    let mut r = rng(11);
    let n = 1024;
    let s = GridMap::from_fn(n, n, |_, _| r.gen_range(0.0..1.0)).unwrap();
    let d = GridMap::from_fn(n, n, |_, _| r.gen_range(0.0..12.0)).unwrap();
    let mean = d.values().iter().sum::<f64>() / (n * n) as f64;
    let input = DilationInput::new(&s, &d).unwrap();
    let (t1, seq) = best_of(3, || deformable_dilate(&input));
    let (t4, par) = best_of(3, || par_deformable_dilate(&input, 4));
    let identical = seq.values().iter().zip(par.values()).all(|(a, b)| a.to_bits() == b.to_bits());
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let cpus = default_threads();
    let single = Outcome::new(
        t1 < Duration::from_millis(250),
        format!("1024x1024, mean radius {mean:.2}: {:.1} ms single-threaded", t1.as_secs_f64() * 1e3),
    );
    let mut scaling = Outcome::new(
        speedup >= 3.0 && identical,
        format!(
            "4 workers: {:.1} ms, speedup {speedup:.2}x, bitwise identical: {identical}, {cpus} CPU(s) available",
            t4.as_secs_f64() * 1e3
        ),
    );
    scaling.hardware_limited = !scaling.pass && identical && cpus < 4;
    vec![("11a deformable dilation runtime".into(), single), ("11b deformable dilation scaling".into(), scaling)]
}

fn main() {
    let checks: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 round-trip reconstruction", c1_round_trip),
        ("2 dilation oracle equivalence", c2_dilation_oracle),
        ("3 distance-transform exactness", c3_distance_transform),
        ("4 rotated IoU accuracy", c4_rotated_iou),
        ("5 min-area rectangle optimality", c5_min_area_rect),
        ("6 loss gradient checks", c6_gradients),
        ("7 midpoint-offset round trip", c7_midpoint_round_trip),
        ("8 complementarity monotonicity", c8_complementarity),
        ("9 proposal-count sweep", c9_sweep),
        ("10 fusion forward contracts", c10_ifa),
    ];
    let mut results: Vec<(String, Outcome)> = Vec::new();
    for (name, f) in checks {
        let t = Instant::now();
        let o = f();
        print_line(name, &o, t.elapsed());
        results.push((name.to_string(), o));
    }
    let t = Instant::now();
    for (name, o) in c11_performance() {
        print_line(&name, &o, t.elapsed());
        results.push((name, o));
    }
    let passed = results.iter().filter(|(_, o)| o.pass).count();
    let blocking: Vec<&str> =
        results.iter().filter(|(_, o)| !o.pass && !o.hardware_limited).map(|(n, _)| n.as_str()).collect();
    println!("{passed}/{} acceptance checks passed", results.len());
    for (n, o) in &results {
        if o.hardware_limited {
            println!("note: `{n}` cannot pass on this machine (fewer than 4 CPUs)");
        }
    }
    if !blocking.is_empty() {
        std::process::exit(1);
    }
}

fn print_line(name: &str, o: &Outcome, took: Duration) {
    println!(
        "{} [{name}] {} ({:.1} s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
}
