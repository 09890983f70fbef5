use std::path::{Path, PathBuf};

use cpn_core::anchors::RegressionOutput;
use cpn_core::Proposal;

use crate::config::RunConfig;
use crate::error::{CpnError, Result};
use crate::pipeline::{self, ImageProposals};
use crate::{fsutil, netpbm, parallel, regression};

use super::Report;

#[derive(Debug, Clone)]
pub struct ProposeOptions {
    pub maps: PathBuf,
    /// A directory of `<image_id>.reg` files, or one file for a single image.
    pub reg: Option<PathBuf>,
    pub merge_nms: bool,
    pub threads: usize,
}

enum RegSource {
    None,
    Dir(PathBuf),
    File(PathBuf),
}

fn load_image(dir: &Path, id: &str, reg: &RegSource, cfg: &RunConfig, merge: bool) -> Result<Vec<Proposal>> {
    let s = netpbm::read_pfm(&dir.join("S.pfm"))?;
    let d = netpbm::read_pfm(&dir.join("D.pfm"))?;
    let outputs: Option<Vec<RegressionOutput>> = match reg {
        RegSource::None => None,
        RegSource::Dir(r) => Some(regression::read(&r.join(format!("{id}.reg")))?),
        RegSource::File(f) => Some(regression::read(f)?),
    };
    pipeline::propose(&s, &d, outputs.as_deref(), cfg, merge)
}

/// Proposals of every image directory under `opts.maps`, sorted by id.
/// Images that fail are reported and left out.
pub fn propose_dir(cfg: &RunConfig, opts: &ProposeOptions) -> Result<(Vec<(String, Vec<Proposal>)>, Report)> {
    let dirs = fsutil::list_dirs(&opts.maps)?;
    let reg = match &opts.reg {
        None => RegSource::None,
        Some(p) if p.is_dir() => RegSource::Dir(p.clone()),
        Some(p) if dirs.len() == 1 => RegSource::File(p.clone()),
        Some(p) => {
            return Err(CpnError::Usage(format!(
                "{} is a single regression file but {} holds {} images; pass a directory of <image_id>.reg files",
                p.display(),
                opts.maps.display(),
                dirs.len()
            )))
        }
    };
    let results = parallel::par_map(&dirs, opts.threads, |dir| {
        let id = fsutil::file_stem(dir);
        let r = load_image(dir, &id, &reg, cfg, opts.merge_nms);
        (id, r)
    });
    let mut report = Report::default();
    let mut out = Vec::new();
    for (id, r) in results {
        match r {
            Ok(p) => out.push((id, p)),
            Err(e) => report.fail(format!("{id}: {e}")),
        }
    }
    Ok((out, report))
}

pub fn proposals_json(images: &[(String, Vec<Proposal>)]) -> Result<String> {
    let recs: Vec<ImageProposals> = images.iter().map(|(id, p)| ImageProposals::new(id, p)).collect();
    let s = serde_json::to_string_pretty(&recs).map_err(|e| CpnError::Usage(e.to_string()))?;
    Ok(s + "\n")
}

/// Writes the proposals of every image to `out` as one JSON array.
pub fn cmd_propose(cfg: &RunConfig, opts: &ProposeOptions, out: &Path) -> Result<Report> {
    let (images, report) = propose_dir(cfg, opts)?;
    fsutil::atomic_write(out, proposals_json(&images)?.as_bytes())?;
    let n: usize = images.iter().map(|(_, p)| p.len()).sum();
    log::info!("propose: {} images, {n} proposals, {} failed", images.len(), report.failures.len());
    Ok(report)
}
