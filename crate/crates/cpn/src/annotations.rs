//! Ground-truth text annotations: ICDAR-style quadrilaterals and CTW-style
//! 14-point curved polygons.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cpn_core::{Point2, Polygon};

use crate::error::{CpnError, Result};
use crate::fsutil;

/// Transcription marking a don't-care region.
pub const IGNORE_TRANSCRIPTION: &str = "###";
pub const CTW_POINTS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub polygon: Polygon,
    pub transcription: String,
    pub ignore: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Icdar,
    Ctw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub image_id: String,
    pub instances: Vec<Instance>,
}

impl AnnotationSet {
    pub fn cared(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| !i.ignore)
    }

    pub fn ignored(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| i.ignore)
    }

    /// Smallest image that holds every vertex.
    pub fn extent(&self) -> (usize, usize) {
        let mut w = 0.0f64;
        let mut h = 0.0f64;
        for p in self.instances.iter().flat_map(|i| i.polygon.vertices()) {
            w = w.max(p.x);
            h = h.max(p.y);
        }
        (w.ceil().max(1.0) as usize, h.ceil().max(1.0) as usize)
    }
}

/// Lines of a text file without BOM, line endings and blank lines, numbered
/// from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> CpnError {
    CpnError::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

fn build_polygon(path: &Path, index: usize, coords: &[f64]) -> Result<Polygon> {
    let pts = coords.chunks_exact(2).map(|c| Point2::new(c[0], c[1])).collect();
    Polygon::new(pts).map_err(|source| CpnError::Instance { path: path.to_path_buf(), index, source })
}

pub fn parse_icdar_str(text: &str, image_id: &str, path: &Path) -> Result<AnnotationSet> {
    let mut instances = Vec::new();
    for (line_no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 9 {
            return Err(parse_err(path, line_no, format!("expected 8 coordinates and a transcription, found {} fields", fields.len())));
        }
        let mut coords = [0.0; 8];
        for (c, f) in coords.iter_mut().zip(&fields[..8]) {
            *c = f
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, line_no, format!("bad coordinate `{}`", f.trim())))?;
        }
        let transcription = fields[8..].join(",");
        let polygon = build_polygon(path, instances.len(), &coords)?;
        let ignore = transcription.trim() == IGNORE_TRANSCRIPTION;
        instances.push(Instance { polygon, transcription, ignore });
    }
    Ok(AnnotationSet { image_id: image_id.to_string(), instances })
}

pub fn parse_ctw_str(text: &str, image_id: &str, path: &Path) -> Result<AnnotationSet> {
    let mut instances = Vec::new();
    for (line_no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 * CTW_POINTS {
            return Err(parse_err(path, line_no, format!("expected {} integers, found {} fields", 2 * CTW_POINTS, fields.len())));
        }
        let mut coords = Vec::with_capacity(2 * CTW_POINTS);
        for f in &fields {
            let v: i64 = f.trim().parse().map_err(|_| parse_err(path, line_no, format!("bad integer `{}`", f.trim())))?;
            coords.push(v as f64);
        }
        let polygon = build_polygon(path, instances.len(), &coords)?;
        instances.push(Instance { polygon, transcription: String::new(), ignore: false });
    }
    Ok(AnnotationSet { image_id: image_id.to_string(), instances })
}

/// Image id of an annotation file: its stem without a leading `gt_`.
pub fn image_id_of(path: &Path) -> String {
    let stem = fsutil::file_stem(path);
    stem.strip_prefix("gt_").map(str::to_string).unwrap_or(stem)
}

pub fn parse_icdar_txt(path: &Path) -> Result<AnnotationSet> {
    parse_icdar_str(&fsutil::read_to_string(path)?, &image_id_of(path), path)
}

pub fn parse_ctw_poly(path: &Path) -> Result<AnnotationSet> {
    parse_ctw_str(&fsutil::read_to_string(path)?, &image_id_of(path), path)
}

/// A file whose every line holds exactly 28 integers is CTW; anything else
/// is read as ICDAR.
pub fn detect_format(text: &str) -> Format {
    let mut any = false;
    for (_, line) in content_lines(text) {
        any = true;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 * CTW_POINTS || fields.iter().any(|f| f.trim().parse::<i64>().is_err()) {
            return Format::Icdar;
        }
    }
    if any {
        Format::Ctw
    } else {
        Format::Icdar
    }
}

pub fn parse_file(path: &Path) -> Result<AnnotationSet> {
    let text = fsutil::read_to_string(path)?;
    let id = image_id_of(path);
    match detect_format(&text) {
        Format::Icdar => parse_icdar_str(&text, &id, path),
        Format::Ctw => parse_ctw_str(&text, &id, path),
    }
}

fn push_coord(out: &mut String, v: f64) {
    let _ = write!(out, "{v}");
}

pub fn write_icdar(set: &AnnotationSet) -> Result<String> {
    let mut out = String::new();
    for (i, inst) in set.instances.iter().enumerate() {
        let v = inst.polygon.vertices();
        if v.len() != 4 {
            return Err(CpnError::Usage(format!("instance {i} has {} vertices, ICDAR needs 4", v.len())));
        }
        for p in v {
            push_coord(&mut out, p.x);
            out.push(',');
            push_coord(&mut out, p.y);
            out.push(',');
        }
        out.push_str(if inst.ignore { IGNORE_TRANSCRIPTION } else { &inst.transcription });
        out.push('\n');
    }
    Ok(out)
}

pub fn write_ctw(set: &AnnotationSet) -> Result<String> {
    let mut out = String::new();
    for (i, inst) in set.instances.iter().enumerate() {
        let v = inst.polygon.vertices();
        if v.len() != CTW_POINTS {
            return Err(CpnError::Usage(format!("instance {i} has {} vertices, CTW needs {CTW_POINTS}", v.len())));
        }
        if v.iter().any(|p| p.x.fract() != 0.0 || p.y.fract() != 0.0) {
            return Err(CpnError::Usage(format!("instance {i} has non-integer vertices")));
        }
        let fields: Vec<String> = v.iter().flat_map(|p| [format!("{}", p.x as i64), format!("{}", p.y as i64)]).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// One parsed file of an annotation directory.
#[derive(Debug)]
pub struct LoadedFile {
    pub path: PathBuf,
    pub result: Result<AnnotationSet>,
}

/// Parses every `.txt` file of `dir`, sorted by name. Files that are
/// unreadable, malformed or repeat an earlier image id carry an error.
pub fn load_dir(dir: &Path) -> Result<Vec<LoadedFile>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for path in fsutil::list_files(dir, "txt")? {
        let mut result = parse_file(&path);
        if let Ok(set) = &result {
            if !seen.insert(set.image_id.clone()) {
                result = Err(CpnError::format(&path, format!("duplicate image id `{}`", set.image_id)));
            }
        }
        out.push(LoadedFile { path, result });
    }
    Ok(out)
}
