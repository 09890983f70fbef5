use std::path::PathBuf;

use crate::annotations::{load_dir, AnnotationSet};
use crate::config::RunConfig;
use crate::error::{CpnError, Result};
use crate::{fsutil, netpbm, parallel, pipeline};

use super::Report;

#[derive(Debug, Clone)]
pub struct LabelgenOptions {
    pub ann: PathBuf,
    pub out: PathBuf,
    /// Fixed image size; otherwise each image spans its annotations.
    pub size: Option<(usize, usize)>,
    pub threads: usize,
}

fn write_image(set: &AnnotationSet, opts: &LabelgenOptions, cfg: &RunConfig) -> Result<()> {
    let (w, h) = opts.size.unwrap_or_else(|| set.extent());
    let (t, meta) = pipeline::labelgen(set, w, h, cfg)?;
    let dir = opts.out.join(&set.image_id);
    netpbm::write_pfm(&dir.join("S.pfm"), &t.erosion.to_grid())?;
    netpbm::write_labels(&dir.join("L.pgm"), &t.text)?;
    netpbm::write_pfm(&dir.join("D.pfm"), &t.kernel)?;
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CpnError::format(dir.join("meta.json"), e.to_string()))?;
    fsutil::atomic_write(&dir.join("meta.json"), format!("{json}\n").as_bytes())?;
    for w in &meta.warnings {
        log::warn!("{}: {w}", set.image_id);
    }
    Ok(())
}

/// Writes `S.pfm`, `L.pgm`, `D.pfm` and `meta.json` for every annotation
/// file into `<out>/<image_id>/`.
pub fn cmd_labelgen(cfg: &RunConfig, opts: &LabelgenOptions) -> Result<Report> {
    let files = load_dir(&opts.ann)?;
    let results = parallel::par_map(&files, opts.threads, |f| match &f.result {
        Ok(set) => write_image(set, opts, cfg).map_err(|e| format!("{}: {e}", f.path.display())),
        Err(e) => Err(e.to_string()),
    });
    let mut report = Report::default();
    for r in results {
        if let Err(e) = r {
            report.fail(e);
        }
    }
    log::info!("labelgen: {} files, {} failed", files.len(), report.failures.len());
    Ok(report)
}

pub fn parse_size(s: &str) -> Result<(usize, usize)> {
    let parsed = s
        .split_once(['x', 'X'])
        .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
        .filter(|&(w, h): &(usize, usize)| w > 0 && h > 0);
    parsed.ok_or_else(|| CpnError::Usage(format!("size `{s}` is not WIDTHxHEIGHT")))
}
