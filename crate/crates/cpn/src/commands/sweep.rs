use std::fmt::Write as _;
use std::path::Path;

use crate::annotations::{load_dir, AnnotationSet};
use crate::config::RunConfig;
use crate::error::{CpnError, Result};
use crate::fsutil;

use super::{evaluate, propose_dir, ProposeOptions, Report};

pub const DEFAULT_K_LIST: [usize; 6] = [0, 100, 300, 500, 1000, 2000];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub recall: f64,
    pub precision: f64,
    pub fmeasure: f64,
}

pub fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let ks: Vec<usize> = s
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| CpnError::Usage(format!("bad k `{}` in --k-list", v.trim()))))
        .collect::<Result<_>>()?;
    if ks.is_empty() {
        return Err(CpnError::Usage("--k-list is empty".into()));
    }
    Ok(ks)
}

/// Proposes and evaluates once per `k`, with `balanced_k = k`.
pub fn sweep(
    cfg: &RunConfig,
    opts: &ProposeOptions,
    annotations: &[AnnotationSet],
    ks: &[usize],
) -> Result<(Vec<SweepRow>, Report)> {
    if opts.reg.is_none() {
        return Err(CpnError::Usage("sweep needs --reg".into()));
    }
    let mut report = Report::default();
    let mut rows = Vec::with_capacity(ks.len());
    for (n, &k) in ks.iter().enumerate() {
        let run = RunConfig { balanced_k: k, ..cfg.clone() };
        let (props, r) = propose_dir(&run, opts)?;
        // failures repeat for every k, keep the first round's
        if n == 0 {
            report.failures.extend(r.failures);
        }
        let (s, _) = evaluate(&props, annotations, opts.threads)?;
        if n == 0 {
            for id in s.mismatch.missing_annotations.iter().chain(&s.mismatch.missing_proposals) {
                report.fail(format!("{id}: present on one side only, skipped"));
            }
        }
        log::info!("sweep k={k}: R={:.4}", s.recall);
        rows.push(SweepRow { k, recall: s.recall, precision: s.precision, fmeasure: s.fmeasure });
    }
    Ok((rows, report))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("k,recall,precision,f\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6}", r.k, r.recall, r.precision, r.fmeasure);
    }
    s
}

pub fn cmd_sweep(cfg: &RunConfig, opts: &ProposeOptions, ann: &Path, ks: &[usize], out: &Path) -> Result<Report> {
    let mut pre = Report::default();
    let mut sets = Vec::new();
    for f in load_dir(ann)? {
        match f.result {
            Ok(s) => sets.push(s),
            Err(e) => pre.fail(e),
        }
    }
    let (rows, mut report) = sweep(cfg, opts, &sets, ks)?;
    report.failures.splice(0..0, pre.failures);
    fsutil::atomic_write(out, sweep_csv(&rows).as_bytes())?;
    Ok(report)
}
