//! Rank correlation, two-sample tests, box-plot summaries, database
//! rankings and pairwise significance codewords.

use std::collections::HashMap;

use statrs::function::erf::erfc;

use crate::dataset::{Database, DatabaseName};
use crate::metrics::MetricId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("missing scores for entry '{0}'")]
    MissingScores(String),
    #[error("entry '{0}' has no normalised MOS")]
    Unnormalized(String),
    #[error("table has no row for {metric} on {database}")]
    Incomplete {
        metric: MetricId,
        database: DatabaseName,
    },
    #[error("{metric} on {database}: {source}")]
    Cell {
        metric: MetricId,
        database: DatabaseName,
        #[source]
        source: Box<StatsError>,
    },
}

fn check_pair(x: &[f64], y: &[f64], min: usize) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < min {
        return Err(StatsError::TooFew {
            needed: min,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// 1-based ranks with ties given their average rank.
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && v[idx[j]] == v[idx[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 2)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Degenerate("constant input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of mid-ranks.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    pearson(&mid_ranks(x), &mid_ranks(y))
}

/// Number of tied pairs among consecutive equal runs of a sorted key.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort that returns the number of inversions.
fn sort_count_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_count_swaps(&mut v[..mid], buf) + sort_count_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall's tau-b in O(n log n) (Knight's algorithm).
pub fn krocc(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ties_x = tied_pairs(&xs);
    let ties_xy = tied_pairs(&pairs);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(ys.len());
    let swaps = sort_count_swaps(&mut ys, &mut buf);
    let ties_y = tied_pairs(&ys);

    let n0 = n * (n - 1) / 2;
    let numer = n0 as i128 - ties_x as i128 - ties_y as i128 + ties_xy as i128 - 2 * swaps as i128;
    let denom = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    if denom == 0.0 {
        return Err(StatsError::Degenerate("constant input".into()));
    }
    Ok((numer as f64 / denom).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

const MIN_TEST_SAMPLE: usize = 5;
/// Exact null distribution is used while the lattice stays this small.
const KS_EXACT_LIMIT: usize = 100;

fn check_samples(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    for s in [a, b] {
        if s.len() < MIN_TEST_SAMPLE {
            return Err(StatsError::TooFew {
                needed: MIN_TEST_SAMPLE,
                got: s.len(),
            });
        }
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Largest ECDF gap scaled by `n·m`, so it is an exact integer.
fn ks_gap(a: &[f64], b: &[f64]) -> u64 {
    let (sa, sb) = (sorted(a), sorted(b));
    let (n, m) = (sa.len() as i64, sb.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0i64;
    while i < sa.len() || j < sb.len() {
        let v = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] == v {
            i += 1;
        }
        while j < sb.len() && sb[j] == v {
            j += 1;
        }
        best = best.max((i as i64 * m - j as i64 * n).abs());
    }
    best as u64
}

/// `P(D ≥ gap / nm)` under the null, counting monotone lattice paths that
/// stay strictly inside the band.
fn ks_exact_p(n: usize, m: usize, gap: u64) -> f64 {
    if gap == 0 {
        return 1.0;
    }
    let inside = |i: usize, j: usize| ((i * m) as i64 - (j * n) as i64).unsigned_abs() < gap;
    let mut row = vec![0u128; m + 1];
    for i in 0..=n {
        for j in 0..=m {
            row[j] = if !inside(i, j) {
                0
            } else if i == 0 && j == 0 {
                1
            } else {
                let up = if i > 0 { row[j] } else { 0 };
                let left = if j > 0 { row[j - 1] } else { 0 };
                up + left
            };
        }
    }
    let mut total = 1u128;
    for k in 0..n {
        total = total * (m + n - k) as u128 / (k + 1) as u128;
    }
    (1.0 - row[m] as f64 / total as f64).clamp(0.0, 1.0)
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^(k-1) exp(-2k²λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test. Small samples (n + m ≤ 100) get the
/// exact null distribution; larger ones the Kolmogorov asymptotic with the
/// usual effective-size correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_samples(a, b)?;
    let (n, m) = (a.len(), b.len());
    let gap = ks_gap(a, b);
    let d = gap as f64 / (n * m) as f64;
    let p = if n + m <= KS_EXACT_LIMIT {
        ks_exact_p(n, m, gap)
    } else {
        let en = ((n * m) as f64 / (n + m) as f64).sqrt();
        kolmogorov_q((en + 0.12 + 0.11 / en) * d)
    };
    Ok(TestResult {
        statistic: d,
        p_value: p,
    })
}

/// Mann–Whitney U for `a` (pairs where `a` exceeds `b`, ties counting one
/// half), with a tie-corrected, continuity-corrected normal p-value.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_samples(a, b)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;

    let big_n = n1 + n2;
    let sp = sorted(&pooled);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sp.len() {
        let mut j = i + 1;
        while j < sp.len() && sp[j] == sp[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n1 * n2 / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    };
    Ok(TestResult {
        statistic: u,
        p_value: p,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

/// Linearly interpolated quantile of sorted data (type 7).
pub fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn boxplot_summary(values: &[f64]) -> Result<BoxplotSummary, StatsError> {
    if values.len() < 4 {
        return Err(StatsError::TooFew {
            needed: 4,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let s = sorted(values);
    let q1 = quantile_sorted(&s, 0.25);
    let median = quantile_sorted(&s, 0.5);
    let q3 = quantile_sorted(&s, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = |v: &&f64| (lo_fence..=hi_fence).contains(*v);
    let lower_whisker = *s.iter().find(inside).expect("quartiles lie inside the fences");
    let upper_whisker = *s.iter().rev().find(inside).expect("quartiles lie inside the fences");
    let outliers = s.iter().copied().filter(|v| !(lo_fence..=hi_fence).contains(v)).collect();
    Ok(BoxplotSummary {
        q1,
        median,
        q3,
        iqr,
        lower_whisker,
        upper_whisker,
        outliers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Krocc,
    Srocc,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::Krocc => "KROCC",
            Criterion::Srocc => "SROCC",
        }
    }

    pub fn compute(self, x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
        match self {
            Criterion::Krocc => krocc(x, y),
            Criterion::Srocc => srocc(x, y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPair {
    pub metric: MetricId,
    pub database: DatabaseName,
    pub krocc: f64,
    pub srocc: f64,
    /// Pairs actually used; infinite scores are left out.
    pub n: usize,
}

impl CorrelationPair {
    pub fn get(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Krocc => self.krocc,
            Criterion::Srocc => self.srocc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    pub databases: Vec<DatabaseName>,
    /// Database-major, metrics in table column order.
    pub pairs: Vec<CorrelationPair>,
}

impl CorrelationTable {
    pub fn get(&self, metric: MetricId, database: DatabaseName) -> Option<&CorrelationPair> {
        self.pairs
            .iter()
            .find(|p| p.metric == metric && p.database == database)
    }

    /// Mean coefficient of `metric` over all databases in the table.
    pub fn average(&self, metric: MetricId, c: Criterion) -> f64 {
        let vals: Vec<f64> = self
            .pairs
            .iter()
            .filter(|p| p.metric == metric)
            .map(|p| p.get(c))
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

/// Scores per entry name, in [`MetricId::ALL`] order; `+inf` is allowed.
pub type EntryScores = HashMap<String, [f64; 9]>;

/// MOS and score columns of one database, aligned row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct DbSamples {
    pub database: DatabaseName,
    pub mos: Vec<f64>,
    /// One column per metric.
    pub scores: Vec<Vec<f64>>,
}

impl DbSamples {
    pub fn from_database(db: &Database, scores: &EntryScores) -> Result<Self, StatsError> {
        let mut mos = Vec::with_capacity(db.len());
        let mut cols = vec![Vec::with_capacity(db.len()); MetricId::ALL.len()];
        for e in &db.entries {
            let row = scores
                .get(&e.name)
                .ok_or_else(|| StatsError::MissingScores(e.name.clone()))?;
            mos.push(
                e.mos_normalized
                    .ok_or_else(|| StatsError::Unnormalized(e.name.clone()))?,
            );
            for (c, v) in cols.iter_mut().zip(row) {
                c.push(*v);
            }
        }
        Ok(Self {
            database: db.name,
            mos,
            scores: cols,
        })
    }
}

/// Rows where every given column is finite.
fn finite_rows(cols: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = cols[0].len();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| cols.iter().all(|c| c[i].is_finite()))
        .collect();
    cols.iter()
        .map(|c| keep.iter().map(|&i| c[i]).collect())
        .collect()
}

/// KROCC and SROCC of every metric against normalised MOS, per database.
pub fn correlation_table(
    dbs: &[Database],
    scores: &EntryScores,
) -> Result<CorrelationTable, StatsError> {
    let mut pairs = Vec::new();
    for db in dbs {
        let s = DbSamples::from_database(db, scores)?;
        for (metric, col) in MetricId::ALL.iter().zip(&s.scores) {
            let cell = |e: StatsError| StatsError::Cell {
                metric: *metric,
                database: db.name,
                source: Box::new(e),
            };
            let rows = finite_rows(&[col, &s.mos]);
            let (x, y) = (&rows[0], &rows[1]);
            let dropped = col.len() - x.len();
            if dropped > 0 {
                log::warn!("{metric} on {}: {dropped} infinite scores left out", db.name);
            }
            pairs.push(CorrelationPair {
                metric: *metric,
                database: db.name,
                krocc: krocc(x, y).map_err(cell)?,
                srocc: srocc(x, y).map_err(cell)?,
                n: x.len(),
            });
        }
    }
    Ok(CorrelationTable {
        databases: dbs.iter().map(|d| d.name).collect(),
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatabaseGroup {
    MainDb,
    All,
    CqdAndSubsets,
}

const CQD_SUBSETS: [DatabaseName; 5] = [
    DatabaseName::CqdMedian,
    DatabaseName::CqdKmeans,
    DatabaseName::CqdOctree,
    DatabaseName::CqdWu,
    DatabaseName::CqdSom,
];

impl DatabaseGroup {
    pub fn members(self) -> Vec<DatabaseName> {
        match self {
            DatabaseGroup::MainDb => DatabaseName::MAIN.to_vec(),
            DatabaseGroup::All => DatabaseName::MAIN.iter().chain(&CQD_SUBSETS).copied().collect(),
            DatabaseGroup::CqdAndSubsets => std::iter::once(DatabaseName::Cqd)
                .chain(CQD_SUBSETS)
                .collect(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DatabaseGroup::MainDb => "MainDB",
            DatabaseGroup::All => "All",
            DatabaseGroup::CqdAndSubsets => "C&sub",
        }
    }
}

/// Per metric, `databases` sorted by decreasing coefficient; equal values
/// keep canonical database order.
pub fn rank_databases_in(
    table: &CorrelationTable,
    databases: &[DatabaseName],
    c: Criterion,
) -> Result<Vec<(MetricId, Vec<DatabaseName>)>, StatsError> {
    MetricId::ALL
        .iter()
        .map(|&metric| {
            let mut cells = databases
                .iter()
                .map(|&database| {
                    table
                        .get(metric, database)
                        .map(|p| (database, p.get(c)))
                        .ok_or(StatsError::Incomplete { metric, database })
                })
                .collect::<Result<Vec<_>, _>>()?;
            cells.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            Ok((metric, cells.into_iter().map(|(d, _)| d).collect()))
        })
        .collect()
}

pub fn rank_databases(
    table: &CorrelationTable,
    group: DatabaseGroup,
    c: Criterion,
) -> Result<Vec<(MetricId, Vec<DatabaseName>)>, StatsError> {
    rank_databases_in(table, &group.members(), c)
}

/// Two-sided critical value at α = 0.05.
pub const Z_CRITICAL: f64 = 1.959_964;
const R_LIMIT: f64 = 1.0 - 1e-12;

/// Steiger's Z for two correlations `r1 = corr(a, mos)` and
/// `r2 = corr(b, mos)` that share MOS, given `r12 = corr(a, b)`. `None` when
/// the comparison is undefined.
pub fn steiger_z(r1: f64, r2: f64, r12: f64, n: usize, variance_factor: f64) -> Option<f64> {
    if n <= 3 {
        return None;
    }
    let (r1, r2, r12) = (
        r1.clamp(-R_LIMIT, R_LIMIT),
        r2.clamp(-R_LIMIT, R_LIMIT),
        r12.clamp(-R_LIMIT, R_LIMIT),
    );
    let diff = r1.atanh() - r2.atanh();
    if diff == 0.0 {
        return None;
    }
    let rm = (r1 + r2) / 2.0;
    let rm2 = rm * rm;
    let psi = r12 * (1.0 - 2.0 * rm2) - 0.5 * rm2 * (1.0 - 2.0 * rm2 - r12 * r12);
    let cov = psi / ((1.0 - rm2) * (1.0 - rm2));
    let denom = 2.0 - 2.0 * cov;
    if denom <= 0.0 {
        return None;
    }
    Some(diff * ((n as f64 - 3.0) / variance_factor).sqrt() / denom.sqrt())
}

/// Pearson-equivalent coefficient and variance inflation for a criterion.
fn comparable(c: Criterion, r: f64) -> (f64, f64) {
    match c {
        Criterion::Krocc => ((std::f64::consts::FRAC_PI_2 * r).sin(), 1.0),
        Criterion::Srocc => (r, 1.06),
    }
}

fn symbol(z: Option<f64>) -> char {
    match z {
        Some(z) if z > Z_CRITICAL => '1',
        Some(z) if z < -Z_CRITICAL => '0',
        _ => '-',
    }
}

fn complement(word: &str) -> String {
    word.chars()
        .map(|c| match c {
            '1' => '0',
            '0' => '1',
            other => other,
        })
        .collect()
}

/// Pairwise codewords: `cells[i][j]` has one symbol per database, `1` when
/// metric `i` correlates significantly better with MOS than metric `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordMatrix {
    pub databases: Vec<DatabaseName>,
    pub cells: Vec<Vec<String>>,
}

pub fn significance_codewords(
    samples: &[DbSamples],
    c: Criterion,
) -> Result<CodewordMatrix, StatsError> {
    let m = samples.first().map_or(0, |s| s.scores.len());
    if samples.iter().any(|s| s.scores.len() != m) {
        return Err(StatsError::Degenerate("metric count differs between databases".into()));
    }
    let mut cells = vec![vec![String::new(); m]; m];
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        cells[i][i] = "-".repeat(samples.len());
        for j in i + 1..m {
            let mut word = String::with_capacity(samples.len());
            for s in samples {
                let rows = finite_rows(&[&s.scores[i], &s.scores[j], &s.mos]);
                let (a, b, mos) = (&rows[0], &rows[1], &rows[2]);
                let z = (|| {
                    let (r1, f) = comparable(c, c.compute(a, mos).ok()?);
                    let (r2, _) = comparable(c, c.compute(b, mos).ok()?);
                    let (r12, _) = comparable(c, c.compute(a, b).ok()?);
                    steiger_z(r1, r2, r12, a.len(), f)
                })();
                word.push(symbol(z));
            }
            cells[j][i] = complement(&word);
            cells[i][j] = word;
        }
    }
    Ok(CodewordMatrix {
        databases: samples.iter().map(|s| s.database).collect(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((srocc(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert!((srocc(&x, &rev).unwrap() + 1.0).abs() < 1e-15);
        // two adjacent swaps: Σd² = 4, so 1 - 6·4/120 = 0.8
        assert!((srocc(&x, &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn kendall_examples() {
        let t = krocc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-12);
        let x = [3.0, 1.0, 2.0];
        assert_eq!(krocc(&x, &x).unwrap(), 1.0);
        assert_eq!(krocc(&x, &[-3.0, -1.0, -2.0]).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_and_mismatch() {
        assert!(matches!(
            srocc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::Degenerate(_))
        ));
        assert!(matches!(
            krocc(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(StatsError::Degenerate(_))
        ));
        assert!(matches!(
            krocc(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::LengthMismatch(2, 3))
        ));
        assert!(srocc(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mid_ranks_average_ties() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn ks_examples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let b = [1.5, 2.5, 3.5, 4.5, 5.5];
        assert!((ks_two_sample(&a, &b).unwrap().statistic - 0.2).abs() < 1e-15);
        let lo: Vec<f64> = (0..6).map(|i| i as f64 / 6.0).collect();
        let hi: Vec<f64> = lo.iter().map(|v| v + 10.0).collect();
        assert_eq!(ks_two_sample(&lo, &hi).unwrap().statistic, 1.0);
        assert!(ks_two_sample(&a[..4], &b).is_err());
    }

    #[test]
    fn ks_exact_tail_of_separated_samples() {
        // only the two fully separated orderings reach D = 1
        let p = ks_exact_p(5, 5, 25);
        assert!((p - 2.0 / 252.0).abs() < 1e-15);
    }

    #[test]
    fn ks_asymptotic_branch() {
        let a: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..60).map(|i| i as f64 + 0.5).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert!(r.p_value > 0.99, "{r:?}");
        let c: Vec<f64> = (0..60).map(|i| i as f64 + 30.0).collect();
        assert!(ks_two_sample(&a, &c).unwrap().p_value < 1e-3);
    }

    #[test]
    fn mann_whitney_examples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [6.0, 7.0, 8.0, 9.0, 10.0];
        let r = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(mann_whitney_u(&b, &a).unwrap().statistic, 25.0);
        let shuffled = [3.0, 5.0, 1.0, 4.0, 2.0];
        assert!(mann_whitney_u(&a, &shuffled).unwrap().p_value > 0.9);
        let tied = [2.0; 5];
        assert_eq!(mann_whitney_u(&tied, &tied).unwrap().p_value, 1.0);
    }

    #[test]
    fn boxplot_examples() {
        assert_eq!(boxplot_summary(&[1.0, 2.0, 3.0, 4.0]).unwrap().median, 2.5);
        let c = boxplot_summary(&[7.0; 6]).unwrap();
        assert_eq!((c.q1, c.median, c.q3, c.iqr), (7.0, 7.0, 7.0, 0.0));
        assert!(c.outliers.is_empty());
        let o = boxplot_summary(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(o.outliers, [100.0]);
        assert_eq!(o.upper_whisker, 4.0);
        assert!(boxplot_summary(&[1.0, 2.0, 3.0]).is_err());
    }

    fn table(values: &[(DatabaseName, f64)]) -> CorrelationTable {
        let mut pairs = Vec::new();
        for &(database, v) in values {
            for metric in MetricId::ALL {
                pairs.push(CorrelationPair {
                    metric,
                    database,
                    krocc: v,
                    srocc: v,
                    n: 10,
                });
            }
        }
        CorrelationTable {
            databases: values.iter().map(|v| v.0).collect(),
            pairs,
        }
    }

    #[test]
    fn main_db_ranking_follows_reported_krocc() {
        use DatabaseName::*;
        let t = table(&[
            (TidStar, 0.693),
            (TiddStar, 0.638),
            (Cqd, 0.649),
            (TidStarCqd, 0.495),
            (TiddStarCqd, 0.638),
        ]);
        let ranks = rank_databases(&t, DatabaseGroup::MainDb, Criterion::Krocc).unwrap();
        assert_eq!(ranks[0].0, MetricId::Psnr);
        assert_eq!(ranks[0].1, [TidStar, Cqd, TiddStar, TiddStarCqd, TidStarCqd]);
        assert!(matches!(
            rank_databases(&t, DatabaseGroup::All, Criterion::Krocc),
            Err(StatsError::Incomplete { .. })
        ));
    }

    #[test]
    fn steiger_is_antisymmetric() {
        let z = steiger_z(0.8, 0.5, 0.4, 100, 1.0).unwrap();
        let back = steiger_z(0.5, 0.8, 0.4, 100, 1.0).unwrap();
        assert_eq!(z, -back);
        assert!(z > Z_CRITICAL);
        assert_eq!(steiger_z(0.5, 0.5, 0.9, 100, 1.0), None);
        assert_eq!(steiger_z(0.8, 0.5, 0.4, 3, 1.0), None);
    }
}
