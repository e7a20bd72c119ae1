//! Command-line driver: metric computation over databases, the evaluation
//! report bundle, fixture generation and database fusion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{
    self, fuse, load_manifest_with, mos_histogram, select_subset, split_by_method, Database,
    DatabaseName, LoadOptions, NormalizationParams, Source,
};
use crate::distort::{self, DistortionKind, DistortionSpec, SYNTHETIC_MOS_FORMULA};
use crate::imgcore::{self, RasterImage};
use crate::metrics::{
    evaluate_all_with, ChannelMode, HvsParams, MetricId, SsimParams,
};
use crate::stats::{
    self, boxplot_summary, correlation_table, rank_databases, rank_databases_in,
    significance_codewords, Criterion, DatabaseGroup, DbSamples, EntryScores,
};

pub const SCORES_FILE: &str = "scores.csv";
const DEFAULT_MANIFEST: &str = "mos.csv";
const HISTOGRAM_BINS: usize = 9;

type Ranking = Vec<(MetricId, Vec<DatabaseName>)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Uniform,
    Dither,
}

impl From<KindArg> for DistortionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Uniform => DistortionKind::UniformQuantize,
            KindArg::Dither => DistortionKind::PaletteDither,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tid_root: Option<PathBuf>,
    pub tid_mos: Option<PathBuf>,
    pub cqd_root: Option<PathBuf>,
    pub cqd_mos: Option<PathBuf>,
    pub synth_root: Option<PathBuf>,
    pub synth_mos: Option<PathBuf>,
    /// Manifest for the single database root given.
    pub mos: Option<PathBuf>,
    /// Reference directory override, or the input references for `distort`.
    pub refs: Option<PathBuf>,
    /// TID distortion types; `7` yields TID*, `7,22` yields TID* and TIDD*.
    pub subset: Vec<u8>,
    pub cqd_normalization: NormalizationParams,
    pub ssim: SsimParams,
    pub hvs: HvsParams,
    pub out: PathBuf,
    pub threads: usize,
    pub seed: u64,
    pub per_channel: bool,
    pub scores: Option<PathBuf>,
    pub levels: Vec<u32>,
    pub kind: DistortionKind,
    /// Synthetic references generated by `distort` when `refs` is absent.
    pub synthetic_refs: usize,
    pub synthetic_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tid_root: None,
            tid_mos: None,
            cqd_root: None,
            cqd_mos: None,
            synth_root: None,
            synth_mos: None,
            mos: None,
            refs: None,
            subset: vec![7, 22],
            cqd_normalization: Source::Cqd.normalization(),
            ssim: SsimParams::default(),
            hvs: HvsParams::default(),
            out: PathBuf::from("."),
            threads: default_threads(),
            seed: 0,
            per_channel: false,
            scores: None,
            levels: vec![4, 8, 16, 32, 64],
            kind: DistortionKind::UniformQuantize,
            synthetic_refs: 5,
            synthetic_size: 256,
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            bail!("thread count must be at least 1");
        }
        self.ssim.validate()?;
        self.hvs.validate()?;
        self.cqd_normalization.validate()?;
        if self.levels.iter().any(|l| !(2..=256).contains(l)) {
            bail!("levels must lie in 2..=256: {:?}", self.levels);
        }
        Ok(())
    }

    fn roots(&self) -> Vec<(Source, &Path, Option<&Path>)> {
        [
            (Source::Tid, &self.tid_root, &self.tid_mos),
            (Source::Cqd, &self.cqd_root, &self.cqd_mos),
            (Source::Synth, &self.synth_root, &self.synth_mos),
        ]
        .into_iter()
        .filter_map(|(s, root, mos)| root.as_deref().map(|r| (s, r, mos.as_deref())))
        .collect()
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split([',', '|'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| anyhow!("bad list item '{t}'")))
        .collect()
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), i + 1))?;
        let v = v.trim().trim_matches('"');
        out.insert(k.trim().replace('_', "-").to_ascii_lowercase(), v.to_string());
    }
    Ok(out)
}

/// Applies config-file settings to `cfg`. Unknown keys are errors.
pub fn apply_config(cfg: &mut RunConfig, map: &BTreeMap<String, String>) -> Result<()> {
    for (k, v) in map {
        let path = || Some(PathBuf::from(v));
        let num = |what: &str| -> Result<f64> {
            v.parse().map_err(|_| anyhow!("config {what}: '{v}' is not a number"))
        };
        match k.as_str() {
            "tid-root" => cfg.tid_root = path(),
            "tid-mos" => cfg.tid_mos = path(),
            "cqd-root" => cfg.cqd_root = path(),
            "cqd-mos" => cfg.cqd_mos = path(),
            "synth-root" => cfg.synth_root = path(),
            "synth-mos" => cfg.synth_mos = path(),
            "mos" => cfg.mos = path(),
            "refs" => cfg.refs = path(),
            "scores" => cfg.scores = path(),
            "out" => cfg.out = PathBuf::from(v),
            "subset" => cfg.subset = parse_list(v)?,
            "levels" => cfg.levels = parse_list(v)?,
            "threads" => cfg.threads = v.parse().context("config threads")?,
            "seed" => cfg.seed = v.parse().context("config seed")?,
            "per-channel" => cfg.per_channel = v.parse().context("config per-channel")?,
            "kind" => {
                cfg.kind = KindArg::from_str(v, true)
                    .map_err(|e| anyhow!("config kind: {e}"))?
                    .into()
            }
            "pixels-per-degree" => cfg.hvs.pixels_per_degree = num(k)?,
            "nqm-viewing-angle" => cfg.hvs.nqm_viewing_angle = Some(num(k)?),
            "vif-noise-variance" => cfg.hvs.vif_noise_variance = num(k)?,
            "ssim-k1" => cfg.ssim.k1 = num(k)?,
            "ssim-k2" => cfg.ssim.k2 = num(k)?,
            "ssim-window" => cfg.ssim.window = v.parse().context("config ssim-window")?,
            "cqd-mos-min" => cfg.cqd_normalization.x_min = num(k)?,
            "cqd-mos-max" => cfg.cqd_normalization.x_max = num(k)?,
            "normalize-k" => cfg.cqd_normalization.k = num(k)?,
            "synthetic-refs" => cfg.synthetic_refs = v.parse().context("config synthetic-refs")?,
            "synthetic-size" => cfg.synthetic_size = v.parse().context("config synthetic-size")?,
            other => bail!("unknown config key '{other}'"),
        }
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "cqiqa", version, about = "Full-reference quality measures for color-quantized images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every distorted image with the nine measures into scores.csv.
    Compute(CommonArgs),
    /// Correlate scores with MOS and write the report bundle.
    Evaluate(CommonArgs),
    /// Generate a quantized fixture database with synthetic MOS.
    Distort(CommonArgs),
    /// Write the assembled (subset and fused) databases as CSV.
    Fuse(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// key = value settings; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tid_root: Option<PathBuf>,
    #[arg(long)]
    pub tid_mos: Option<PathBuf>,
    #[arg(long)]
    pub cqd_root: Option<PathBuf>,
    #[arg(long)]
    pub cqd_mos: Option<PathBuf>,
    #[arg(long)]
    pub synth_root: Option<PathBuf>,
    #[arg(long)]
    pub synth_mos: Option<PathBuf>,
    /// MOS manifest when a single database root is given.
    #[arg(long)]
    pub mos: Option<PathBuf>,
    /// Reference image directory.
    #[arg(long)]
    pub refs: Option<PathBuf>,
    /// TID distortion types, e.g. `7` or `7,22`.
    #[arg(long)]
    pub subset: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluate R, G and B separately instead of luma.
    #[arg(long)]
    pub per_channel: bool,
    /// Scores file for `evaluate` (default: <out>/scores.csv).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Quantization levels for `distort`, e.g. `4,8,16,32,64`.
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub pixels_per_degree: Option<f64>,
}

impl CommonArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            apply_config(&mut cfg, &read_config_file(path)?)?;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = Some(v); }
            )*};
        }
        set!(tid_root, tid_mos, cqd_root, cqd_mos, synth_root, synth_mos, mos, refs, scores);
        if let Some(v) = self.out {
            cfg.out = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.per_channel {
            cfg.per_channel = true;
        }
        if let Some(v) = &self.subset {
            cfg.subset = parse_list(v)?;
        }
        if let Some(v) = &self.levels {
            cfg.levels = parse_list(v)?;
        }
        if let Some(k) = self.kind {
            cfg.kind = k.into();
        }
        if let Some(p) = self.pixels_per_degree {
            cfg.hvs.pixels_per_degree = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` and runs the chosen command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    match cli.command {
        Command::Compute(a) => cmd_compute(&a.into_config()?).map(|_| ()),
        Command::Evaluate(a) => {
            let cfg = a.into_config()?;
            let scores = cfg
                .scores
                .clone()
                .unwrap_or_else(|| cfg.out.join(SCORES_FILE));
            cmd_evaluate(&cfg, &scores).map(|_| ())
        }
        Command::Distort(a) => cmd_distort(&a.into_config()?).map(|_| ()),
        Command::Fuse(a) => cmd_fuse(&a.into_config()?).map(|_| ()),
    }
}

fn manifest_for(
    cfg: &RunConfig,
    root: &Path,
    explicit: Option<&Path>,
    single: bool,
) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    if let (true, Some(p)) = (single, &cfg.mos) {
        return Ok(p.clone());
    }
    let default = root.join(DEFAULT_MANIFEST);
    if default.is_file() {
        return Ok(default);
    }
    bail!(
        "no MOS manifest for {} (pass a --*-mos flag or add {DEFAULT_MANIFEST})",
        root.display()
    )
}

/// Loads every configured root and assembles subsets, CQD splits and the
/// fused databases, in canonical order.
pub fn build_databases(cfg: &RunConfig) -> Result<Vec<Database>> {
    let roots = cfg.roots();
    if roots.is_empty() {
        bail!("no database root given (use --tid-root, --cqd-root or --synth-root)");
    }
    let single = roots.len() == 1;
    if cfg.mos.is_some() && !single {
        bail!("--mos is ambiguous with several roots; use --tid-mos / --cqd-mos / --synth-mos");
    }
    if cfg.refs.is_some() && !single {
        bail!("--refs is ambiguous with several roots");
    }
    let mut dbs: Vec<Database> = Vec::new();
    for (source, root, mos) in roots {
        let manifest = manifest_for(cfg, root, mos, single)?;
        let opts = LoadOptions {
            refs_dir: cfg.refs.clone(),
            normalization: (source == Source::Cqd).then_some(cfg.cqd_normalization),
        };
        let db = load_manifest_with(root, source, &manifest, &opts)
            .with_context(|| format!("loading {source} from {}", root.display()))?;
        match source {
            Source::Tid => {
                let mut types = cfg.subset.clone();
                types.sort_unstable();
                types.dedup();
                if types == [7, 22] {
                    dbs.push(select_subset(&db, &[7])?);
                }
                dbs.push(select_subset(&db, &types)?);
            }
            Source::Cqd => {
                dbs.extend(split_by_method(&db)?.into_iter().filter(|d| !d.is_empty()));
                dbs.push(db);
            }
            Source::Synth => dbs.push(db),
        }
    }
    let find = |name| dbs.iter().find(|d: &&Database| d.name == name);
    let mut fused = Vec::new();
    if let Some(cqd) = find(DatabaseName::Cqd) {
        for (tid, name) in [
            (DatabaseName::TidStar, DatabaseName::TidStarCqd),
            (DatabaseName::TiddStar, DatabaseName::TiddStarCqd),
        ] {
            if let Some(t) = find(tid) {
                fused.push(fuse(t, cqd, name)?);
            }
        }
    }
    dbs.extend(fused);
    dbs.sort_by_key(|d| d.name);
    Ok(dbs)
}

/// Formats with six significant digits; infinities are written as `inf`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..15).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

fn parse_score(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| anyhow!("bad score '{t}'")),
    }
}

/// Writes `contents` through a temporary file renamed into place, so a
/// failed run never leaves a partial file behind.
fn write_atomic(path: &Path, contents: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    let result = (|| {
        let mut f = std::io::BufWriter::new(
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?,
        );
        contents(&mut f)?;
        f.flush()?;
        drop(f);
        fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn csv_writer(w: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn thread_pool(n: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .context("building worker pool")
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))
}

/// Scores every distinct entry of the configured databases and writes
/// `scores.csv` (`name,metric,value`) to the output directory.
pub fn cmd_compute(cfg: &RunConfig) -> Result<PathBuf> {
    let dbs = build_databases(cfg)?;
    let mut seen = HashSet::new();
    let entries: Vec<_> = dbs
        .iter()
        .flat_map(|d| &d.entries)
        .filter(|e| seen.insert(e.name.clone()))
        .collect();
    if entries.is_empty() {
        bail!("no entries to score");
    }
    let mode = if cfg.per_channel {
        ChannelMode::PerChannel
    } else {
        ChannelMode::Luma
    };
    log::info!("scoring {} images on {} threads", entries.len(), cfg.threads);
    let results: Vec<Result<Vec<f64>>> = thread_pool(cfg.threads)?.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let r = imgcore::load_image(&e.reference_path)?;
                let d = imgcore::load_image(&e.distorted_path)?;
                let scores = evaluate_all_with(&r, &d, &cfg.ssim, &cfg.hvs, mode)?;
                Ok(scores.iter().map(|s| s.value).collect())
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(entries.len());
    for (e, r) in entries.iter().zip(results) {
        rows.push((e.name.as_str(), r.with_context(|| format!("scoring '{}'", e.name))?));
    }
    ensure_out_dir(cfg)?;
    let path = cfg.out.join(SCORES_FILE);
    write_atomic(&path, |w| {
        let mut w = csv_writer(w);
        w.write_record(["name", "metric", "value"])?;
        for (name, values) in &rows {
            for (m, v) in MetricId::ALL.iter().zip(values) {
                w.write_record([*name, m.name(), &fmt_sig(*v)])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Reads `scores.csv`; every entry must carry all nine metrics.
pub fn read_scores(path: &Path) -> Result<EntryScores> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(["name", "metric", "value"]) {
        bail!("{}: header must be name,metric,value", path.display());
    }
    let mut partial: HashMap<String, [Option<f64>; 9]> = HashMap::new();
    for row in rdr.records() {
        let row = row?;
        let metric: MetricId = row[1].parse().map_err(|e: String| anyhow!(e))?;
        let slot = &mut partial.entry(row[0].to_string()).or_default()[metric.index()];
        if slot.replace(parse_score(&row[2])?).is_some() {
            bail!("duplicate score for {} / {metric}", &row[0]);
        }
    }
    partial
        .into_iter()
        .map(|(name, vals)| {
            let mut out = [0.0; 9];
            for (i, v) in vals.iter().enumerate() {
                out[i] = v.ok_or_else(|| anyhow!("'{name}' has no {} score", MetricId::ALL[i]))?;
            }
            Ok((name, out))
        })
        .collect()
}

/// Files written by [`cmd_evaluate`].
#[derive(Debug, Clone)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub table: stats::CorrelationTable,
}

fn codeword_databases(dbs: &[Database]) -> Vec<&Database> {
    let main: Vec<&Database> = DatabaseName::MAIN
        .iter()
        .filter_map(|n| dbs.iter().find(|d| d.name == *n))
        .collect();
    if main.len() == DatabaseName::MAIN.len() {
        main
    } else {
        dbs.iter().collect()
    }
}

pub fn cmd_evaluate(cfg: &RunConfig, scores_path: &Path) -> Result<Report> {
    let dbs = build_databases(cfg)?;
    let scores = read_scores(scores_path)?;
    ensure_out_dir(cfg)?;
    let table = correlation_table(&dbs, &scores)?;
    let mut files = Vec::new();
    let mut emit = |name: String, body: &dyn Fn(&mut csv::Writer<&mut dyn Write>) -> Result<()>| {
        let path = cfg.out.join(name);
        write_atomic(&path, |w| {
            let mut w = csv_writer(w);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        })?;
        files.push(path);
        Ok::<(), anyhow::Error>(())
    };

    let metric_header = || {
        let mut h = vec!["criterion".to_string(), "database".to_string()];
        h.extend(MetricId::ALL.iter().map(|m| m.name().to_string()));
        h
    };
    emit("table1.csv".into(), &|w| {
        w.write_record(metric_header())?;
        for c in [Criterion::Krocc, Criterion::Srocc] {
            for db in &table.databases {
                let mut row = vec![c.label().to_string(), db.label().to_string()];
                for m in MetricId::ALL {
                    row.push(fmt_sig(table.get(m, *db).expect("complete table").get(c)));
                }
                w.write_record(row)?;
            }
            let mut row = vec![c.label().to_string(), "Av.".to_string()];
            row.extend(MetricId::ALL.iter().map(|m| fmt_sig(table.average(*m, c))));
            w.write_record(row)?;
        }
        Ok(())
    })?;

    let present: HashSet<DatabaseName> = table.databases.iter().copied().collect();
    for (c, file) in [
        (Criterion::Krocc, "table2_krocc_rank.csv"),
        (Criterion::Srocc, "table3_srocc_rank.csv"),
    ] {
        let mut groups: Vec<(String, Ranking)> = Vec::new();
        for g in [DatabaseGroup::MainDb, DatabaseGroup::All, DatabaseGroup::CqdAndSubsets] {
            if g.members().iter().all(|d| present.contains(d)) {
                groups.push((g.label().into(), rank_databases(&table, g, c)?));
            }
        }
        if groups.is_empty() {
            groups.push(("Available".into(), rank_databases_in(&table, &table.databases, c)?));
        }
        emit(file.into(), &|w| {
            w.write_record(["group", "metric", "rank", "database", "value"])?;
            for (g, ranking) in &groups {
                for (m, order) in ranking {
                    for (i, d) in order.iter().enumerate() {
                        let v = table.get(*m, *d).expect("ranked cell").get(c);
                        w.write_record([g, m.name(), &(i + 1).to_string(), d.label(), &fmt_sig(v)])?;
                    }
                }
            }
            Ok(())
        })?;
    }

    let code_dbs = codeword_databases(&dbs);
    let samples: Vec<DbSamples> = code_dbs
        .iter()
        .map(|d| DbSamples::from_database(d, &scores))
        .collect::<Result<_, _>>()?;
    for (c, file) in [
        (Criterion::Krocc, "table4_krocc_codewords.csv"),
        (Criterion::Srocc, "table5_srocc_codewords.csv"),
    ] {
        let matrix = significance_codewords(&samples, c)?;
        let order = matrix
            .databases
            .iter()
            .map(|d| d.label())
            .collect::<Vec<_>>()
            .join("|");
        emit(file.into(), &|w| {
            w.write_record(["row", "column", "databases", "codeword"])?;
            for (i, row) in MetricId::ALL.iter().enumerate() {
                for (j, col) in MetricId::ALL.iter().enumerate() {
                    w.write_record([row.name(), col.name(), &order, &matrix.cells[i][j]])?;
                }
            }
            Ok(())
        })?;
    }

    emit("boxplot.csv".into(), &|w| {
        w.write_record([
            "criterion", "metric", "q1", "median", "q3", "iqr", "lower_whisker",
            "upper_whisker", "outliers",
        ])?;
        for c in [Criterion::Krocc, Criterion::Srocc] {
            for m in MetricId::ALL {
                let vals: Vec<f64> = table
                    .pairs
                    .iter()
                    .filter(|p| p.metric == m)
                    .map(|p| p.get(c))
                    .collect();
                match boxplot_summary(&vals) {
                    Ok(b) => {
                        let outliers =
                            b.outliers.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(";");
                        w.write_record([
                            c.label(),
                            m.name(),
                            &fmt_sig(b.q1),
                            &fmt_sig(b.median),
                            &fmt_sig(b.q3),
                            &fmt_sig(b.iqr),
                            &fmt_sig(b.lower_whisker),
                            &fmt_sig(b.upper_whisker),
                            &outliers,
                        ])?;
                    }
                    Err(e) => log::debug!("no box plot for {m} {}: {e}", c.label()),
                }
            }
        }
        Ok(())
    })?;

    emit("mos_histogram.csv".into(), &|w| {
        w.write_record(["database", "bin_lo", "bin_hi", "count"])?;
        for db in &dbs {
            for b in mos_histogram(db, HISTOGRAM_BINS)? {
                w.write_record([
                    db.name.label(),
                    &fmt_sig(b.lo),
                    &fmt_sig(b.hi),
                    &b.count.to_string(),
                ])?;
            }
        }
        Ok(())
    })?;

    emit("population_tests.csv".into(), &|w| {
        w.write_record(["database_a", "database_b", "ks_d", "ks_p", "mw_u", "mw_p"])?;
        let base: Vec<&Database> = dbs
            .iter()
            .filter(|d| {
                matches!(
                    d.name,
                    DatabaseName::TidStar | DatabaseName::TiddStar | DatabaseName::Cqd
                )
            })
            .collect();
        for (i, a) in base.iter().enumerate() {
            for b in &base[i + 1..] {
                let mos = |d: &Database| -> Vec<f64> {
                    d.entries.iter().filter_map(|e| e.mos_normalized).collect()
                };
                let (ma, mb) = (mos(a), mos(b));
                let ks = stats::ks_two_sample(&ma, &mb)?;
                let mw = stats::mann_whitney_u(&ma, &mb)?;
                w.write_record([
                    a.name.label(),
                    b.name.label(),
                    &fmt_sig(ks.statistic),
                    &fmt_sig(ks.p_value),
                    &fmt_sig(mw.statistic),
                    &fmt_sig(mw.p_value),
                ])?;
            }
        }
        Ok(())
    })?;

    for db in &dbs {
        for m in MetricId::ALL {
            let file = format!("scatter_{}_{}.csv", db.name.slug(), m.name().to_ascii_lowercase());
            emit(file, &|w| {
                w.write_record(["name", "mos", "score"])?;
                for e in &db.entries {
                    let v = scores[&e.name][m.index()];
                    if v.is_finite() {
                        let mos = e.mos_normalized.expect("loaded entries are normalised");
                        w.write_record([e.name.as_str(), &fmt_sig(mos), &fmt_sig(v)])?;
                    }
                }
                Ok(())
            })?;
        }
    }
    log::info!("wrote {} report files to {}", files.len(), cfg.out.display());
    Ok(Report { files, table })
}

fn collect_references(cfg: &RunConfig) -> Result<Vec<RasterImage>> {
    let Some(dir) = &cfg.refs else {
        log::info!(
            "no --refs given; generating {} synthetic references",
            cfg.synthetic_refs
        );
        return Ok((0..cfg.synthetic_refs)
            .map(|i| {
                distort::synthetic_reference(
                    cfg.synthetic_size,
                    cfg.synthetic_size,
                    cfg.seed.wrapping_add(i as u64),
                )
            })
            .collect());
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("bmp"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no PNG or BMP references in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| imgcore::load_image(p).with_context(|| format!("loading {}", p.display())))
        .collect()
}

/// Writes `<out>/reference/<id>.png`, `<out>/distorted/<N>colors_<id>.png`
/// and `<out>/mos.csv`, returning the number of distorted images.
pub fn cmd_distort(cfg: &RunConfig) -> Result<usize> {
    let refs = collect_references(cfg)?;
    let ref_dir = cfg.out.join("reference");
    let dist_dir = cfg.out.join("distorted");
    for d in [&ref_dir, &dist_dir] {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let mut levels = cfg.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    let jobs: Vec<(usize, u32)> = (0..refs.len())
        .flat_map(|i| levels.iter().map(move |&l| (i, l)))
        .collect();
    thread_pool(cfg.threads)?.install(|| {
        refs.par_iter().enumerate().try_for_each(|(i, img)| {
            let path = ref_dir.join(format!("{}.png", i + 1));
            img.save_png(&path).with_context(|| format!("writing {}", path.display()))
        })?;
        jobs.par_iter().try_for_each(|&(i, l)| {
            let spec = DistortionSpec::new(cfg.kind, l, cfg.seed)?;
            let out = spec.apply(&refs[i])?;
            let path = dist_dir.join(dataset::render_cqd_filename(l, i as u32 + 1));
            out.save_png(&path).with_context(|| format!("writing {}", path.display()))
        })
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let manifest = cfg.out.join(DEFAULT_MANIFEST);
    write_atomic(&manifest, |w| {
        writeln!(w, "# synthetic MOS: {SYNTHETIC_MOS_FORMULA}")?;
        writeln!(w, "# seed: {}", cfg.seed)?;
        let mut w = csv_writer(w);
        w.write_record(["name", "mos"])?;
        for &(i, l) in &jobs {
            let mos = distort::synthetic_mos(l, &mut rng);
            w.write_record([dataset::render_cqd_filename(l, i as u32 + 1), fmt_sig(mos)])?;
        }
        w.flush()?;
        Ok(())
    })?;
    log::info!("wrote {} distorted images to {}", jobs.len(), dist_dir.display());
    Ok(jobs.len())
}

/// Writes every assembled database to `<out>/<slug>.csv`.
pub fn cmd_fuse(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dbs = build_databases(cfg)?;
    ensure_out_dir(cfg)?;
    let mut out = Vec::new();
    for db in &dbs {
        let path = cfg.out.join(format!("{}.csv", db.name.slug()));
        write_atomic(&path, |w| Ok(dataset::write_database_csv(db, w)?))?;
        log::info!("{}: {} entries -> {}", db.name, db.len(), path.display());
        out.push(path);
    }
    Ok(out)
}
