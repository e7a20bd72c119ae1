//! Database ingestion: filename grammars, on-disk layouts, MOS manifests,
//! CQ subsets, MOS normalisation and database fusion.
//!
//! Layouts understood by [`load_manifest`]:
//!
//! * TID: `<root>/distorted_images/iXX_YY_Z.bmp` (or the files directly in
//!   `<root>`), references in `<root>/reference_images/IXX.BMP`.
//! * CQD: `<root>/<method>/<N>colors_<id>.png`, one directory per quantizer,
//!   references in `<root>/reference/<id>.png`.
//! * Synthetic: `<root>/distorted/<N>colors_<id>.png`, references in
//!   `<root>/reference/<id>.png`.
//!
//! File and directory names are matched case-insensitively.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed name '{name}': {reason}")]
    Malformed { name: String, reason: String },
    #[error("no image files found under {0}")]
    Empty(PathBuf),
    #[error("reference for '{name}' not found (expected {expected})")]
    MissingReference { name: String, expected: PathBuf },
    #[error("no MOS for '{0}' in the manifest")]
    MissingMos(String),
    #[error("manifest lists '{0}' but no such image exists")]
    UnknownImage(String),
    #[error("manifest has two rows for '{0}'")]
    DuplicateMos(String),
    #[error("MOS {value} for '{name}' is outside [{lo}, {hi}]")]
    MosOutOfScale {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("value {value} outside normalisation range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("invalid normalisation parameters: {0}")]
    InvalidParams(String),
    #[error("selection matched no entries")]
    EmptySelection,
    #[error("duplicate distorted image {0}")]
    DuplicateEntry(PathBuf),
    #[error("entry '{0}' has no normalised MOS")]
    Unnormalized(String),
    #[error("expected {expected} entries, found {found}")]
    WrongSource { expected: Source, found: Source },
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },
    #[error("csv: {0}")]
    Csv(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Tid,
    Cqd,
    Synth,
}

impl Source {
    /// Closed interval of raw MOS values the source publishes.
    pub fn mos_scale(self) -> (f64, f64) {
        match self {
            Source::Tid | Source::Synth => (0.0, 9.0),
            Source::Cqd => (0.0, 100.0),
        }
    }

    pub fn normalization(self) -> NormalizationParams {
        let (lo, hi) = self.mos_scale();
        NormalizationParams {
            x_min: lo,
            x_max: hi,
            k: NORMALIZED_MAX,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Source::Tid => "TID",
            Source::Cqd => "CQD",
            Source::Synth => "SYNTH",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TID" => Ok(Source::Tid),
            "CQD" => Ok(Source::Cqd),
            "SYNTH" => Ok(Source::Synth),
            _ => Err(format!("unknown source '{s}'")),
        }
    }
}

/// The five CQD quantizers, in the order their sub-databases are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CqMethod {
    MedianCut,
    Kmeans,
    Octree,
    Wu,
    Som,
}

impl CqMethod {
    pub const ALL: [CqMethod; 5] = [
        CqMethod::MedianCut,
        CqMethod::Kmeans,
        CqMethod::Octree,
        CqMethod::Wu,
        CqMethod::Som,
    ];

    pub fn dir_name(self) -> &'static str {
        match self {
            CqMethod::MedianCut => "mediancut",
            CqMethod::Kmeans => "kmeans",
            CqMethod::Octree => "octree",
            CqMethod::Wu => "wu",
            CqMethod::Som => "som",
        }
    }

    pub fn database(self) -> DatabaseName {
        match self {
            CqMethod::MedianCut => DatabaseName::CqdMedian,
            CqMethod::Kmeans => DatabaseName::CqdKmeans,
            CqMethod::Octree => DatabaseName::CqdOctree,
            CqMethod::Wu => DatabaseName::CqdWu,
            CqMethod::Som => DatabaseName::CqdSom,
        }
    }
}

impl fmt::Display for CqMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir_name())
    }
}

impl FromStr for CqMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "mediancut" | "median" => Ok(CqMethod::MedianCut),
            "kmeans" => Ok(CqMethod::Kmeans),
            "octree" => Ok(CqMethod::Octree),
            "wu" => Ok(CqMethod::Wu),
            "som" => Ok(CqMethod::Som),
            _ => Err(format!("unknown CQ method '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistortionTag {
    pub source: Source,
    pub tid_type: Option<u8>,
    pub cq_method: Option<CqMethod>,
    /// TID level 1..5, or the color / level count for CQD and synthetic images.
    pub level: u32,
}

impl DistortionTag {
    pub fn tid(distortion: u8, level: u32) -> Self {
        Self {
            source: Source::Tid,
            tid_type: Some(distortion),
            cq_method: None,
            level,
        }
    }

    pub fn cqd(method: CqMethod, colors: u32) -> Self {
        Self {
            source: Source::Cqd,
            tid_type: None,
            cq_method: Some(method),
            level: colors,
        }
    }

    pub fn synth(levels: u32) -> Self {
        Self {
            source: Source::Synth,
            tid_type: None,
            cq_method: None,
            level: levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    /// Manifest key, unique within a source.
    pub name: String,
    pub reference_path: PathBuf,
    pub distorted_path: PathBuf,
    pub mos: f64,
    pub mos_std: Option<f64>,
    pub mos_normalized: Option<f64>,
    pub tag: DistortionTag,
}

/// Evaluation sets in canonical report order; ties in rankings fall back to
/// this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatabaseName {
    TidStar,
    TiddStar,
    Cqd,
    TidStarCqd,
    TiddStarCqd,
    CqdMedian,
    CqdKmeans,
    CqdOctree,
    CqdWu,
    CqdSom,
    Synth,
    /// Full TID before subset selection.
    Tid,
    /// A TID selection other than {7} or {7, 22}.
    TidSubset,
}

impl DatabaseName {
    pub const ALL: [DatabaseName; 13] = [
        DatabaseName::TidStar,
        DatabaseName::TiddStar,
        DatabaseName::Cqd,
        DatabaseName::TidStarCqd,
        DatabaseName::TiddStarCqd,
        DatabaseName::CqdMedian,
        DatabaseName::CqdKmeans,
        DatabaseName::CqdOctree,
        DatabaseName::CqdWu,
        DatabaseName::CqdSom,
        DatabaseName::Synth,
        DatabaseName::Tid,
        DatabaseName::TidSubset,
    ];

    /// The five sets the significance codewords are built over.
    pub const MAIN: [DatabaseName; 5] = [
        DatabaseName::TidStar,
        DatabaseName::TiddStar,
        DatabaseName::Cqd,
        DatabaseName::TidStarCqd,
        DatabaseName::TiddStarCqd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DatabaseName::TidStar => "TID*",
            DatabaseName::TiddStar => "TIDD*",
            DatabaseName::Cqd => "CQD",
            DatabaseName::TidStarCqd => "TID*CQD",
            DatabaseName::TiddStarCqd => "TIDD*CQD",
            DatabaseName::CqdMedian => "CQD-Median",
            DatabaseName::CqdKmeans => "CQD-Kmeans",
            DatabaseName::CqdOctree => "CQD-Octree",
            DatabaseName::CqdWu => "CQD-Wu",
            DatabaseName::CqdSom => "CQD-Som",
            DatabaseName::Synth => "SYNTH",
            DatabaseName::Tid => "TID2013",
            DatabaseName::TidSubset => "TID-subset",
        }
    }

    /// File-name friendly form of [`DatabaseName::label`].
    pub fn slug(self) -> String {
        self.label()
            .to_ascii_lowercase()
            .replace('*', "star")
            .replace('-', "_")
    }
}

impl fmt::Display for DatabaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DatabaseName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        DatabaseName::ALL
            .into_iter()
            .find(|d| d.label().eq_ignore_ascii_case(t) || d.slug() == t.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown database '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    pub name: DatabaseName,
    pub entries: Vec<DatasetEntry>,
}

impl Database {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Upper end of the common opinion scale.
pub const NORMALIZED_MAX: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    pub x_min: f64,
    pub x_max: f64,
    pub k: f64,
}

impl NormalizationParams {
    pub fn new(x_min: f64, x_max: f64, k: f64) -> Result<Self, DatasetError> {
        let p = Self { x_min, x_max, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if !(self.x_max > self.x_min && self.k > 0.0 && self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(DatasetError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

/// `K (x - x_min) / (x_max - x_min)`, exact at both endpoints.
pub fn normalize_mos(value: f64, p: &NormalizationParams) -> Result<f64, DatasetError> {
    p.validate()?;
    if !(p.x_min..=p.x_max).contains(&value) {
        return Err(DatasetError::OutOfRange {
            value,
            lo: p.x_min,
            hi: p.x_max,
        });
    }
    if value == p.x_max {
        return Ok(p.k);
    }
    Ok(p.k * (value - p.x_min) / (p.x_max - p.x_min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TidName {
    pub reference: u8,
    pub distortion: u8,
    pub level: u8,
}

impl TidName {
    pub fn render(&self) -> String {
        format!(
            "i{:02}_{:02}_{}.bmp",
            self.reference, self.distortion, self.level
        )
    }

    pub fn reference_file(&self) -> String {
        format!("I{:02}.BMP", self.reference)
    }
}

fn malformed(name: &str, reason: impl Into<String>) -> DatasetError {
    DatasetError::Malformed {
        name: name.to_string(),
        reason: reason.into(),
    }
}

fn strip_ext<'a>(name: &'a str, ext: &str) -> Option<&'a str> {
    let cut = name.len().checked_sub(ext.len())?;
    if name.is_char_boundary(cut) && name[cut..].eq_ignore_ascii_case(ext) {
        Some(&name[..cut])
    } else {
        None
    }
}

fn digits(s: &str, width: Option<usize>) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || width.is_some_and(|w| s.len() != w) {
        return None;
    }
    s.parse().ok()
}

/// Parses `iXX_YY_Z.bmp`.
pub fn parse_tid_filename(name: &str) -> Result<TidName, DatasetError> {
    let stem = strip_ext(name, ".bmp").ok_or_else(|| malformed(name, "expected .bmp"))?;
    let rest = stem
        .strip_prefix('i')
        .or_else(|| stem.strip_prefix('I'))
        .ok_or_else(|| malformed(name, "expected leading 'i'"))?;
    let parts: Vec<&str> = rest.split('_').collect();
    let [xx, yy, z] = parts[..] else {
        return Err(malformed(name, "expected iXX_YY_Z"));
    };
    let (Some(r), Some(d), Some(l)) = (digits(xx, Some(2)), digits(yy, Some(2)), digits(z, Some(1)))
    else {
        return Err(malformed(name, "expected iXX_YY_Z"));
    };
    if !(1..=25).contains(&r) || !(1..=24).contains(&d) || !(1..=5).contains(&l) {
        return Err(malformed(name, "field out of range"));
    }
    Ok(TidName {
        reference: r as u8,
        distortion: d as u8,
        level: l as u8,
    })
}

/// Color counts CQD was generated at.
pub const CQD_LEVELS: [u32; 7] = [4, 8, 16, 32, 64, 128, 256];

/// `<N>colors_<id>.png` without range checks.
fn parse_colors_name(name: &str) -> Result<(u32, u32), DatasetError> {
    let stem = strip_ext(name, ".png").ok_or_else(|| malformed(name, "expected .png"))?;
    let (n, id) = stem
        .split_once("colors_")
        .ok_or_else(|| malformed(name, "expected <N>colors_<id>"))?;
    match (digits(n, None), digits(id, None)) {
        (Some(n), Some(id)) => Ok((n, id)),
        _ => Err(malformed(name, "expected <N>colors_<id>")),
    }
}

/// Parses `<N>colors_<id>.png` into `(colors, reference id)`.
pub fn parse_cqd_filename(name: &str) -> Result<(u32, u32), DatasetError> {
    let (n, id) = parse_colors_name(name)?;
    if !CQD_LEVELS.contains(&n) {
        return Err(malformed(name, format!("{n} is not a CQD color count")));
    }
    if !(1..=25).contains(&id) {
        return Err(malformed(name, "reference id out of range 1..25"));
    }
    Ok((n, id))
}

pub fn render_cqd_filename(colors: u32, id: u32) -> String {
    format!("{colors}colors_{id}.png")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosRecord {
    pub mos: f64,
    pub std: Option<f64>,
}

/// Reads a `name,mos[,std]` manifest. Lines starting with `#` are comments.
/// The headerless `<mos> <name>` layout shipped with TID2013
/// (`mos_with_names.txt`) is accepted too.
/// Keys are lower-cased so lookups are case-insensitive.
pub fn read_mos_manifest(path: &Path) -> Result<BTreeMap<String, MosRecord>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let whitespace_layout = first.is_some_and(|l| {
        let mut it = l.split_whitespace();
        matches!((it.next().map(str::parse::<f64>), it.next(), it.next()), (Some(Ok(_)), Some(_), None))
    });
    if whitespace_layout {
        parse_tid_mos_list(&text, path)
    } else {
        parse_mos_manifest(text.as_bytes(), path)
    }
}

fn parse_tid_mos_list(text: &str, path: &Path) -> Result<BTreeMap<String, MosRecord>, DatasetError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| DatasetError::Manifest {
            path: path.to_path_buf(),
            reason: format!("line {}: {reason}", i + 1),
        };
        let mut it = line.split_whitespace();
        let (Some(mos), Some(name), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad("expected `<mos> <name>`"));
        };
        let mos: f64 = mos.parse().map_err(|_| bad("mos is not a number"))?;
        let name = name.to_ascii_lowercase();
        if out.insert(name.clone(), MosRecord { mos, std: None }).is_some() {
            return Err(DatasetError::DuplicateMos(name));
        }
    }
    Ok(out)
}

fn parse_mos_manifest<R: Read>(
    reader: R,
    path: &Path,
) -> Result<BTreeMap<String, MosRecord>, DatasetError> {
    let bad = |reason: String| DatasetError::Manifest {
        path: path.to_path_buf(),
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let cols: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if cols.len() < 2 || cols[0] != "name" || cols[1] != "mos" {
        return Err(bad(format!("header must be name,mos[,std], got {cols:?}")));
    }
    let mut out = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let line = i + 2;
        let name = row.get(0).unwrap_or_default().to_ascii_lowercase();
        if name.is_empty() {
            return Err(bad(format!("row {line}: empty name")));
        }
        let mos: f64 = row
            .get(1)
            .ok_or_else(|| bad(format!("row {line}: missing mos")))?
            .parse()
            .map_err(|_| bad(format!("row {line}: mos is not a number")))?;
        let std = match row.get(2).filter(|s| !s.is_empty()) {
            Some(s) => Some(
                s.parse()
                    .map_err(|_| bad(format!("row {line}: std is not a number")))?,
            ),
            None => None,
        };
        if out.insert(name.clone(), MosRecord { mos, std }).is_some() {
            return Err(DatasetError::DuplicateMos(name));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Directory holding the reference images, overriding the layout default.
    pub refs_dir: Option<PathBuf>,
    /// Replaces the source's default MOS normalisation.
    pub normalization: Option<NormalizationParams>,
}

/// Case-insensitive listing of the regular files in `dir`.
fn list_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>, DatasetError> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        if path.is_file() {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                out.insert(name.to_ascii_lowercase(), path.clone());
            }
        }
    }
    Ok(out)
}

fn find_subdir(root: &Path, names: &[&str]) -> Option<PathBuf> {
    let entries = fs::read_dir(root).ok()?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    names.iter().find_map(|want| {
        dirs.iter()
            .find(|d| {
                d.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.eq_ignore_ascii_case(want))
            })
            .cloned()
    })
}

struct Candidate {
    key: String,
    distorted: PathBuf,
    reference: PathBuf,
    tag: DistortionTag,
}

fn resolve_reference(
    refs: &BTreeMap<String, PathBuf>,
    refs_dir: &Path,
    key: &str,
    file: &str,
) -> Result<PathBuf, DatasetError> {
    refs.get(&file.to_ascii_lowercase())
        .cloned()
        .ok_or_else(|| DatasetError::MissingReference {
            name: key.to_string(),
            expected: refs_dir.join(file),
        })
}

fn tid_candidates(root: &Path, opts: &LoadOptions) -> Result<Vec<Candidate>, DatasetError> {
    let dist_dir = find_subdir(root, &["distorted_images"]).unwrap_or_else(|| root.to_path_buf());
    let refs_dir = opts
        .refs_dir
        .clone()
        .or_else(|| find_subdir(root, &["reference_images"]))
        .unwrap_or_else(|| root.join("reference_images"));
    let refs = if refs_dir.is_dir() {
        list_files(&refs_dir)?
    } else {
        BTreeMap::new()
    };
    let mut out = Vec::new();
    for (key, path) in list_files(&dist_dir)? {
        let Ok(parsed) = parse_tid_filename(&key) else {
            log::debug!("skipping {}", path.display());
            continue;
        };
        let reference = resolve_reference(&refs, &refs_dir, &key, &parsed.reference_file())?;
        out.push(Candidate {
            key,
            distorted: path,
            reference,
            tag: DistortionTag::tid(parsed.distortion, parsed.level as u32),
        });
    }
    Ok(out)
}

fn colors_candidates(
    dir: &Path,
    prefix: Option<&str>,
    refs: &BTreeMap<String, PathBuf>,
    refs_dir: &Path,
    tag_for: impl Fn(u32) -> DistortionTag,
    strict: bool,
) -> Result<Vec<Candidate>, DatasetError> {
    let mut out = Vec::new();
    for (file, path) in list_files(dir)? {
        let parsed = if strict {
            parse_cqd_filename(&file)
        } else {
            parse_colors_name(&file)
        };
        let Ok((n, id)) = parsed else {
            log::debug!("skipping {}", path.display());
            continue;
        };
        let key = match prefix {
            Some(p) => format!("{p}/{file}"),
            None => file,
        };
        let reference = resolve_reference(refs, refs_dir, &key, &format!("{id}.png"))?;
        out.push(Candidate {
            key,
            distorted: path,
            reference,
            tag: tag_for(n),
        });
    }
    Ok(out)
}

fn reference_listing(
    root: &Path,
    opts: &LoadOptions,
) -> Result<(PathBuf, BTreeMap<String, PathBuf>), DatasetError> {
    let dir = opts
        .refs_dir
        .clone()
        .or_else(|| find_subdir(root, &["reference", "references"]))
        .unwrap_or_else(|| root.join("reference"));
    let files = if dir.is_dir() {
        list_files(&dir)?
    } else {
        BTreeMap::new()
    };
    Ok((dir, files))
}

fn cqd_candidates(root: &Path, opts: &LoadOptions) -> Result<Vec<Candidate>, DatasetError> {
    let (refs_dir, refs) = reference_listing(root, opts)?;
    let mut dirs: Vec<(CqMethod, PathBuf, String)> = Vec::new();
    for entry in fs::read_dir(root).map_err(io_err(root))? {
        let path = entry.map_err(io_err(root))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let (true, Ok(method)) = (path.is_dir(), name.parse::<CqMethod>()) {
            dirs.push((method, path.clone(), name.to_ascii_lowercase()));
        }
    }
    dirs.sort();
    let mut out = Vec::new();
    for (method, dir, dir_key) in dirs {
        out.extend(colors_candidates(
            &dir,
            Some(&dir_key),
            &refs,
            &refs_dir,
            |n| DistortionTag::cqd(method, n),
            true,
        )?);
    }
    Ok(out)
}

fn synth_candidates(root: &Path, opts: &LoadOptions) -> Result<Vec<Candidate>, DatasetError> {
    let (refs_dir, refs) = reference_listing(root, opts)?;
    let dir = find_subdir(root, &["distorted"]).unwrap_or_else(|| root.join("distorted"));
    if !dir.is_dir() {
        return Err(DatasetError::Empty(dir));
    }
    colors_candidates(&dir, None, &refs, &refs_dir, DistortionTag::synth, false)
}

pub fn load_manifest(root: &Path, source: Source, mos_file: &Path) -> Result<Database, DatasetError> {
    load_manifest_with(root, source, mos_file, &LoadOptions::default())
}

/// Pairs every distorted image under `root` with its reference and MOS.
/// Images without a MOS row, and rows naming absent images, are errors.
pub fn load_manifest_with(
    root: &Path,
    source: Source,
    mos_file: &Path,
    opts: &LoadOptions,
) -> Result<Database, DatasetError> {
    if !root.is_dir() {
        return Err(DatasetError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let candidates = match source {
        Source::Tid => tid_candidates(root, opts)?,
        Source::Cqd => cqd_candidates(root, opts)?,
        Source::Synth => synth_candidates(root, opts)?,
    };
    if candidates.is_empty() {
        return Err(DatasetError::Empty(root.to_path_buf()));
    }
    let mut mos = read_mos_manifest(mos_file)?;
    let (lo, hi) = source.mos_scale();
    let params = opts.normalization.unwrap_or_else(|| source.normalization());
    let mut entries = Vec::with_capacity(candidates.len());
    for c in candidates {
        let rec = mos
            .remove(&c.key)
            .ok_or_else(|| DatasetError::MissingMos(c.key.clone()))?;
        if !(lo..=hi).contains(&rec.mos) {
            return Err(DatasetError::MosOutOfScale {
                name: c.key,
                value: rec.mos,
                lo,
                hi,
            });
        }
        entries.push(DatasetEntry {
            mos_normalized: Some(normalize_mos(rec.mos, &params)?),
            name: c.key,
            reference_path: c.reference,
            distorted_path: c.distorted,
            mos: rec.mos,
            mos_std: rec.std,
            tag: c.tag,
        });
    }
    if let Some(extra) = mos.into_keys().next() {
        return Err(DatasetError::UnknownImage(extra));
    }
    let name = match source {
        Source::Tid => DatabaseName::Tid,
        Source::Cqd => DatabaseName::Cqd,
        Source::Synth => DatabaseName::Synth,
    };
    log::info!("loaded {} entries for {name}", entries.len());
    Ok(Database { name, entries })
}

/// Keeps TID entries whose distortion type is in `types`. `{7}` yields TID*
/// and `{7, 22}` yields TIDD*.
pub fn select_subset(db: &Database, types: &[u8]) -> Result<Database, DatasetError> {
    if let Some(e) = db.entries.iter().find(|e| e.tag.source != Source::Tid) {
        return Err(DatasetError::WrongSource {
            expected: Source::Tid,
            found: e.tag.source,
        });
    }
    let wanted: HashSet<u8> = types.iter().copied().collect();
    let entries: Vec<DatasetEntry> = db
        .entries
        .iter()
        .filter(|e| e.tag.tid_type.is_some_and(|t| wanted.contains(&t)))
        .cloned()
        .collect();
    if entries.is_empty() {
        return Err(DatasetError::EmptySelection);
    }
    let mut sorted: Vec<u8> = wanted.into_iter().collect();
    sorted.sort_unstable();
    let name = match sorted[..] {
        [7] => DatabaseName::TidStar,
        [7, 22] => DatabaseName::TiddStar,
        _ => DatabaseName::TidSubset,
    };
    Ok(Database { name, entries })
}

/// Concatenates two normalised databases with disjoint image sets.
pub fn fuse(a: &Database, b: &Database, name: DatabaseName) -> Result<Database, DatasetError> {
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(a.len() + b.len());
    for e in a.entries.iter().chain(&b.entries) {
        if e.mos_normalized.is_none() {
            return Err(DatasetError::Unnormalized(e.name.clone()));
        }
        if !seen.insert(e.distorted_path.clone()) {
            return Err(DatasetError::DuplicateEntry(e.distorted_path.clone()));
        }
        entries.push(e.clone());
    }
    Ok(Database { name, entries })
}

/// One sub-database per CQ method, in [`CqMethod::ALL`] order.
pub fn split_by_method(db: &Database) -> Result<Vec<Database>, DatasetError> {
    let mut groups: HashMap<CqMethod, Vec<DatasetEntry>> = HashMap::new();
    for e in &db.entries {
        match e.tag.cq_method {
            Some(m) if e.tag.source == Source::Cqd => groups.entry(m).or_default().push(e.clone()),
            _ => {
                return Err(DatasetError::WrongSource {
                    expected: Source::Cqd,
                    found: e.tag.source,
                })
            }
        }
    }
    Ok(CqMethod::ALL
        .iter()
        .map(|m| Database {
            name: m.database(),
            entries: groups.remove(m).unwrap_or_default(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram of normalised MOS over `[0, 9]`; the last bin is
/// closed on the right.
pub fn mos_histogram(db: &Database, bins: usize) -> Result<Vec<HistogramBin>, DatasetError> {
    if bins == 0 {
        return Err(DatasetError::NoBins);
    }
    let width = NORMALIZED_MAX / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: i as f64 * width,
            hi: if i + 1 == bins {
                NORMALIZED_MAX
            } else {
                (i + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for e in &db.entries {
        let v = e
            .mos_normalized
            .ok_or_else(|| DatasetError::Unnormalized(e.name.clone()))?;
        let i = ((v / width).floor() as usize).min(bins - 1);
        out[i].count += 1;
    }
    Ok(out)
}

const CSV_HEADER: [&str; 11] = [
    "database",
    "name",
    "reference_path",
    "distorted_path",
    "mos",
    "mos_std",
    "mos_normalized",
    "source",
    "tid_type",
    "cq_method",
    "level",
];

fn csv_err(e: impl fmt::Display) -> DatasetError {
    DatasetError::Csv(e.to_string())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a self-contained description of `db`.
pub fn write_database_csv<W: Write>(db: &Database, writer: W) -> Result<(), DatasetError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for e in &db.entries {
        w.write_record([
            db.name.label().to_string(),
            e.name.clone(),
            e.reference_path.display().to_string(),
            e.distorted_path.display().to_string(),
            e.mos.to_string(),
            opt(e.mos_std),
            opt(e.mos_normalized),
            e.tag.source.to_string(),
            opt(e.tag.tid_type),
            opt(e.tag.cq_method),
            e.tag.level.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| DatasetError::Csv(e.to_string()))
}

pub fn read_database_csv<R: Read>(reader: R) -> Result<Database, DatasetError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(DatasetError::Csv(format!("unexpected header {headers:?}")));
    }
    let mut name = None;
    let mut entries = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let f = |i: usize| row.get(i).unwrap_or_default();
        let num = |i: usize| -> Result<Option<f64>, DatasetError> {
            let s = f(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| DatasetError::Csv(format!("bad number '{s}'")))
            }
        };
        let db: DatabaseName = f(0).parse().map_err(DatasetError::Csv)?;
        if *name.get_or_insert(db) != db {
            return Err(DatasetError::Csv("mixed database names".into()));
        }
        let tid_type = match f(8) {
            "" => None,
            s => Some(s.parse().map_err(|_| DatasetError::Csv(format!("bad tid_type '{s}'")))?),
        };
        let cq_method = match f(9) {
            "" => None,
            s => Some(s.parse().map_err(DatasetError::Csv)?),
        };
        entries.push(DatasetEntry {
            name: f(1).to_string(),
            reference_path: PathBuf::from(f(2)),
            distorted_path: PathBuf::from(f(3)),
            mos: num(4)?.ok_or_else(|| DatasetError::Csv("missing mos".into()))?,
            mos_std: num(5)?,
            mos_normalized: num(6)?,
            tag: DistortionTag {
                source: f(7).parse().map_err(DatasetError::Csv)?,
                tid_type,
                cq_method,
                level: f(10)
                    .parse()
                    .map_err(|_| DatasetError::Csv(format!("bad level '{}'", f(10))))?,
            },
        });
    }
    Ok(Database {
        name: name.ok_or_else(|| DatasetError::Csv("no rows".into()))?,
        entries,
    })
}
