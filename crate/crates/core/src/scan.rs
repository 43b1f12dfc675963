//! Exhaustive sweep over all canonical triplets up to `z_max`.
//!
//! Work is split into chunks of consecutive `z` values. Chunks run on a
//! rayon pool and are merged in chunk order, so the report does not depend
//! on the worker count or on the chunk size. A plain-text state file records
//! finished chunks so an interrupted run can be resumed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{Nat, Precision, Rat};
use crate::classify::{classify, ClassTag, Triplet};
use crate::error::{Error, Result};
use crate::logbounds::{gap_bin, gap_report, solve_s, LogBoundsReport, SolveOptions};
use crate::reversion::{analyze, k_sequence, reversion_exponent, ReversionAnalysis};

pub const GAP_BINS: u32 = 20;
const STATE_MAGIC: &str = "reversor-scan-state 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `1/2 < b - a < 1` and `n - b < 1/2` (acute scalene only).
    GapBounds,
    /// `|(b - a) - ln k_(n-1) / ln z| <= 1e-40`.
    GapIdentity,
    /// `k_(n-1)^2 > z` (acute scalene only).
    KSquaredAboveZ,
    /// `z / k_(n-1) > phi`.
    LambdaNondegenerate,
    /// `k_(n-1) < z^n / p_(n-1)`.
    IntervalNonempty,
    /// `y < k_i < x`, strictly increasing, for `i <= n` (needs `x > y`).
    KMonotone,
    /// `z^(2n-2) > p_(2n-2)`.
    SquaredLastTriangle,
    /// `n - 1 <= a <= s <= b <= n` with the residual within tolerance.
    SolverOrdering,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::GapBounds,
        Check::GapIdentity,
        Check::KSquaredAboveZ,
        Check::LambdaNondegenerate,
        Check::IntervalNonempty,
        Check::KMonotone,
        Check::SquaredLastTriangle,
        Check::SolverOrdering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::GapBounds => "gap_bounds",
            Check::GapIdentity => "gap_identity",
            Check::KSquaredAboveZ => "k_squared_above_z",
            Check::LambdaNondegenerate => "lambda_nondegenerate",
            Check::IntervalNonempty => "interval_nonempty",
            Check::KMonotone => "k_monotone",
            Check::SquaredLastTriangle => "squared_last_triangle",
            Check::SolverOrdering => "solver_ordering",
        }
    }

    /// The theorem battery that needs no root finding.
    pub fn exact_battery() -> BTreeSet<Check> {
        Check::ALL.into_iter().filter(|c| *c != Check::SolverOrdering).collect()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Check::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&s))
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub z_max: u64,
    pub n_max: u32,
    /// Only triplets of these classes are checked; `None` means all.
    pub class_filter: Option<BTreeSet<ClassTag>>,
    pub checks: BTreeSet<Check>,
    /// Number of consecutive `z` values per chunk.
    pub chunk_size: u64,
    /// Working precision for decimal checks.
    pub digits: u32,
}

impl ScanConfig {
    pub fn new(z_max: u64, n_max: u32) -> Self {
        ScanConfig { z_max, n_max, class_filter: None, checks: BTreeSet::new(), chunk_size: 4, digits: Precision::DEFAULT_DIGITS }
    }

    pub fn with_filter(mut self, classes: impl IntoIterator<Item = ClassTag>) -> Self {
        self.class_filter = Some(classes.into_iter().collect());
        self
    }

    pub fn with_checks(mut self, checks: impl IntoIterator<Item = Check>) -> Self {
        self.checks = checks.into_iter().collect();
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.z_max < 3 {
            return Err(Error::InvalidConfig(format!("z_max must be at least 3, got {}", self.z_max)));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidConfig(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk_size must be positive".into()));
        }
        if self.digits == 0 {
            return Err(Error::InvalidConfig("digits must be positive".into()));
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    pub fn chunk_count(&self) -> u64 {
        self.z_max.div_ceil(self.chunk_size)
    }

    fn chunk_range(&self, id: u64) -> (u64, u64) {
        let lo = id * self.chunk_size + 1;
        (lo, ((id + 1) * self.chunk_size).min(self.z_max))
    }

    fn admits(&self, class: ClassTag) -> bool {
        self.class_filter.as_ref().is_none_or(|f| f.contains(&class))
    }

    fn scope(&self) -> ScanScope {
        ScanScope {
            z_max: self.z_max,
            n_max: self.n_max,
            class_filter: self.class_filter.clone(),
            checks: self.checks.clone(),
            digits: self.digits,
        }
    }
}

/// The part of the configuration that determines report content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanScope {
    pub z_max: u64,
    pub n_max: u32,
    pub class_filter: Option<BTreeSet<ClassTag>>,
    pub checks: BTreeSet<Check>,
    pub digits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Equality {
    pub y: u64,
    pub x: u64,
    pub z: u64,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub y: u64,
    pub x: u64,
    pub z: u64,
    pub check: Check,
    pub details: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reverses,
    NoReversion,
    NoLastTriangle,
    BoundaryEquality,
}

/// Partial tallies of one chunk; also the unit persisted in the state file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkResult {
    pub id: u64,
    pub enumerated: u64,
    pub checked: u64,
    pub exponent_tests: u64,
    pub equalities: Vec<Equality>,
    pub violations: Vec<Violation>,
    pub gap_histogram: Vec<u64>,
    pub class_counts: BTreeMap<ClassTag, u64>,
    pub outcome_counts: BTreeMap<Outcome, u64>,
    pub check_counts: BTreeMap<Check, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub scope: ScanScope,
    /// Every canonical triplet in range, before the class filter.
    pub triplets_enumerated: u64,
    /// `z_max (z_max + 1) (z_max + 2) / 6`.
    pub expected_triplets: u64,
    pub complete: bool,
    /// Triplets passing the class filter.
    pub triplets_checked: u64,
    pub exponent_tests: u64,
    pub equalities: Vec<Equality>,
    pub equalities_by_exponent: BTreeMap<u32, u64>,
    /// All equalities hold again under an independent exponentiation.
    pub equalities_reverified: bool,
    /// No equality with `n >= 3` was found.
    pub no_higher_equalities: bool,
    pub violations: Vec<Violation>,
    /// Counts of `b - a` in equal bins of `[0, 1)`.
    pub gap_histogram: Vec<u64>,
    pub class_counts: BTreeMap<ClassTag, u64>,
    pub outcome_counts: BTreeMap<Outcome, u64>,
    pub check_counts: BTreeMap<Check, u64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ScanReport {
    /// JSON with the wall time left out, identical for identical scopes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn has_problems(&self) -> bool {
        !self.violations.is_empty() || !self.no_higher_equalities || !self.equalities_reverified || !self.complete
    }

    fn merge(cfg: &ScanConfig, chunks: &[ChunkResult], elapsed: Duration) -> Self {
        let mut r = ScanReport {
            scope: cfg.scope(),
            triplets_enumerated: 0,
            expected_triplets: {
                let z = cfg.z_max;
                z * (z + 1) * (z + 2) / 6
            },
            complete: false,
            triplets_checked: 0,
            exponent_tests: 0,
            equalities: Vec::new(),
            equalities_by_exponent: BTreeMap::new(),
            equalities_reverified: true,
            no_higher_equalities: true,
            violations: Vec::new(),
            gap_histogram: vec![0; GAP_BINS as usize],
            class_counts: BTreeMap::new(),
            outcome_counts: BTreeMap::new(),
            check_counts: BTreeMap::new(),
            elapsed,
        };
        for c in chunks {
            r.triplets_enumerated += c.enumerated;
            r.triplets_checked += c.checked;
            r.exponent_tests += c.exponent_tests;
            r.equalities.extend_from_slice(&c.equalities);
            r.violations.extend(c.violations.iter().cloned());
            for (h, v) in r.gap_histogram.iter_mut().zip(&c.gap_histogram) {
                *h += v;
            }
            for (k, v) in &c.class_counts {
                *r.class_counts.entry(*k).or_default() += v;
            }
            for (k, v) in &c.outcome_counts {
                *r.outcome_counts.entry(*k).or_default() += v;
            }
            for (k, v) in &c.check_counts {
                *r.check_counts.entry(*k).or_default() += v;
            }
        }
        for e in &r.equalities {
            *r.equalities_by_exponent.entry(e.n).or_default() += 1;
        }
        r.equalities_reverified = r.equalities.iter().all(reverify);
        r.no_higher_equalities = r.equalities.iter().all(|e| e.n <= 2);
        r.complete = r.triplets_enumerated == r.expected_triplets;
        r
    }
}

/// Repeated multiplication, deliberately not the code path used to find it.
fn reverify(e: &Equality) -> bool {
    let pow = |b: u64| (0..e.n).fold(BigUint::one(), |acc, _| acc * b);
    pow(e.z) == pow(e.x) + pow(e.y)
}

/// Everything computed for one triplet.
struct TripletEval {
    class: ClassTag,
    outcome: Outcome,
    n: Option<u32>,
    strict: bool,
    analysis: Option<ReversionAnalysis>,
    bounds: Option<LogBoundsReport>,
    s: Option<String>,
    gap_bin: Option<usize>,
    results: Vec<(Check, std::result::Result<(), String>)>,
}

fn needs_bounds(checks: &BTreeSet<Check>) -> bool {
    checks.iter().any(|c| matches!(c, Check::GapBounds | Check::GapIdentity | Check::KSquaredAboveZ))
}

fn evaluate(t: &Triplet, cfg: &ScanConfig, want_bounds: bool) -> Result<TripletEval> {
    let class = classify(t).tag;
    let prec = Precision::digits(cfg.digits);
    let mut ev = TripletEval {
        class,
        outcome: Outcome::NoReversion,
        n: None,
        strict: false,
        analysis: None,
        bounds: None,
        s: None,
        gap_bin: None,
        results: Vec::new(),
    };
    let rev = match reversion_exponent(t) {
        Ok(r) => r,
        Err(Error::NoReversion { .. }) => return Ok(ev),
        Err(e) => return Err(e),
    };
    ev.n = Some(rev.n);
    ev.strict = rev.strict_at_n_minus_1;
    let (z, x, y) = (t.z(), t.x(), t.y());
    let k = Rat::from_nats(&(x.pow(rev.n) + y.pow(rev.n)), &(x.pow(rev.n - 1) + y.pow(rev.n - 1)));
    ev.gap_bin = Some(gap_bin(&k, z, GAP_BINS));

    let an = match analyze(t) {
        Ok(an) => an,
        Err(Error::NoLastTriangle) => {
            ev.outcome = Outcome::NoLastTriangle;
            return Ok(ev);
        }
        Err(Error::BoundaryEquality { .. }) => {
            ev.outcome = Outcome::BoundaryEquality;
            return Ok(ev);
        }
        Err(e) => return Err(e),
    };
    ev.outcome = Outcome::Reverses;
    let acute = class == ClassTag::AcuteScalene;
    let bounds = if want_bounds || needs_bounds(&cfg.checks) { Some(gap_report(t, prec)?) } else { None };
    let fail = |ok: bool, msg: String| if ok { Ok(()) } else { Err(msg) };

    for &check in &cfg.checks {
        let res = match check {
            Check::GapBounds if acute => {
                let b = bounds.as_ref().expect("bounds computed");
                fail(
                    b.gap_in_unit && b.gap_above_half && b.n_minus_b_below_half,
                    format!("b - a = {}, n - b = {}", b.gap.to_decimal(12), b.n_minus_b.to_decimal(12)),
                )
            }
            Check::KSquaredAboveZ if acute => {
                let b = bounds.as_ref().expect("bounds computed");
                fail(b.k_squared_above_z, format!("k = {}", b.k_n_minus_1))
            }
            Check::GapBounds | Check::KSquaredAboveZ => continue,
            Check::GapIdentity => {
                let b = bounds.as_ref().expect("bounds computed");
                let upper = b.gap_identity_upper();
                fail(upper <= Rat::new(1, 10).pow(40), format!("residual up to {:e}", upper.to_f64()))
            }
            Check::LambdaNondegenerate => fail(
                an.lambda_interval_nondegenerate && an.reversor_implication,
                format!("phi = {}, z/k = {}", an.phi, an.lambda_max()),
            ),
            Check::IntervalNonempty => fail(
                an.rho_interval.lower < an.rho_interval.upper && an.lambda_interval.lower < an.lambda_interval.upper,
                format!("rho in [{}, {}]", an.rho_interval.lower, an.rho_interval.upper),
            ),
            Check::KMonotone if x > y => {
                let ks = k_sequence(x, y, rev.n);
                let yr = Rat::from_nats(y, &Nat::one());
                let xr = Rat::from_nats(x, &Nat::one());
                let bounded = ks.iter().all(|k| &yr < k && k < &xr);
                let increasing = ks.windows(2).all(|w| w[0] < w[1]);
                fail(bounded && increasing && an.k_strictly_between_bases == Some(true), format!("k sequence {ks:?}"))
            }
            Check::KMonotone => continue,
            Check::SquaredLastTriangle => fail(an.last_triangle_square_reversed, format!("exponent {}", 2 * rev.n - 2)),
            Check::SolverOrdering => {
                let opts = SolveOptions::new(1e-12, prec)?;
                let r = solve_s(t, &opts)?;
                ev.s = Some(r.s.to_decimal(20));
                fail(r.ordering_ok && r.residual_within_tolerance, format!("ordering {:?}, residual {}", r.ordering, r.residual.to_decimal(20)))
            }
        };
        ev.results.push((check, res));
    }
    ev.analysis = Some(an);
    ev.bounds = bounds;
    Ok(ev)
}

fn for_each_triplet(cfg: &ScanConfig, id: u64, mut f: impl FnMut(u64, u64, u64) -> Result<()>) -> Result<()> {
    let (lo, hi) = cfg.chunk_range(id);
    for z in lo..=hi {
        for x in 1..=z {
            for y in 1..=x {
                f(y, x, z)?;
            }
        }
    }
    Ok(())
}

pub fn run_chunk(cfg: &ScanConfig, id: u64) -> Result<ChunkResult> {
    let mut c = ChunkResult { id, gap_histogram: vec![0; GAP_BINS as usize], ..Default::default() };
    for_each_triplet(cfg, id, |y, x, z| {
        c.enumerated += 1;
        let t = Triplet::from_u64(y, x, z)?;
        let class = classify(&t).tag;
        if !cfg.admits(class) {
            return Ok(());
        }
        c.checked += 1;
        // Every exponent is tested on its own: no early exit on reversal.
        let (mut zi, mut xi, mut yi) = (BigUint::one(), BigUint::one(), BigUint::one());
        for n in 1..=cfg.n_max {
            zi *= z;
            xi *= x;
            yi *= y;
            c.exponent_tests += 1;
            if zi == &xi + &yi {
                c.equalities.push(Equality { y, x, z, n });
            }
        }
        let ev = evaluate(&t, cfg, false)?;
        *c.class_counts.entry(class).or_default() += 1;
        *c.outcome_counts.entry(ev.outcome).or_default() += 1;
        if let Some(bin) = ev.gap_bin {
            c.gap_histogram[bin] += 1;
        }
        for (check, res) in ev.results {
            *c.check_counts.entry(check).or_default() += 1;
            if let Err(details) = res {
                c.violations.push(Violation { y, x, z, check, details });
            }
        }
        Ok(())
    })?;
    Ok(c)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Stop after this many newly computed chunks, leaving the scan unfinished.
    pub stop_after_chunks: Option<usize>,
}

impl RunOptions {
    pub fn workers(workers: usize) -> Self {
        RunOptions { workers, stop_after_chunks: None }
    }
}

#[derive(Clone, Debug)]
pub struct ScanRun {
    /// `None` when the run stopped before every chunk finished.
    pub report: Option<ScanReport>,
    pub chunks_total: u64,
    pub chunks_computed: u64,
    pub chunks_replayed: u64,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn execute(cfg: &ScanConfig, opts: RunOptions, done: Vec<ChunkResult>, sink: Option<&Mutex<File>>) -> Result<ScanRun> {
    cfg.validate()?;
    let start = Instant::now();
    let total = cfg.chunk_count();
    let finished: BTreeSet<u64> = done.iter().map(|c| c.id).collect();
    let mut todo: Vec<u64> = (0..total).filter(|id| !finished.contains(id)).collect();
    if let Some(k) = opts.stop_after_chunks {
        todo.truncate(k);
    }
    let fresh: Vec<ChunkResult> = pool(opts.workers)?.install(|| {
        todo.par_iter()
            .map(|&id| {
                let c = run_chunk(cfg, id)?;
                if let Some(sink) = sink {
                    let line = format!("chunk {id} {}\n", serde_json::to_string(&c).expect("chunk serializes"));
                    let mut f = sink.lock().expect("state file lock");
                    f.write_all(line.as_bytes())?;
                    f.flush()?;
                }
                Ok(c)
            })
            .collect::<Result<_>>()
    })?;

    let computed = fresh.len() as u64;
    let replayed = done.len() as u64;
    let mut all = done;
    all.extend(fresh);
    all.sort_by_key(|c| c.id);
    let report = (all.len() as u64 == total).then(|| ScanReport::merge(cfg, &all, start.elapsed()));
    Ok(ScanRun { report, chunks_total: total, chunks_computed: computed, chunks_replayed: replayed })
}

pub fn run_scan(cfg: &ScanConfig, opts: RunOptions) -> Result<ScanRun> {
    execute(cfg, opts, Vec::new(), None)
}

/// Every exact equality `z^n = x^n + y^n` in range, with no invariant checks.
pub fn scan_equalities(cfg: &ScanConfig, workers: usize) -> Result<ScanReport> {
    let cfg = ScanConfig { checks: BTreeSet::new(), ..cfg.clone() };
    Ok(run_scan(&cfg, RunOptions::workers(workers))?.report.expect("uninterrupted run"))
}

/// The configured invariant battery over the (filtered) range.
pub fn sweep_properties(cfg: &ScanConfig, workers: usize) -> Result<ScanReport> {
    Ok(run_scan(cfg, RunOptions::workers(workers))?.report.expect("uninterrupted run"))
}

struct SavedState {
    hash: String,
    config: ScanConfig,
    chunks: Vec<ChunkResult>,
}

fn read_state(path: &Path) -> Result<SavedState> {
    let text = std::fs::read_to_string(path)?;
    // A line cut short by an interrupted write is dropped.
    let text = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let mut lines = text.lines();
    if lines.next() != Some(STATE_MAGIC) {
        return Err(Error::StateFormat(format!("{} lacks the state header", path.display())));
    }
    let bad = |what: &str| Error::StateFormat(format!("{}: {what}", path.display()));
    let hash = lines.next().and_then(|l| l.strip_prefix("config-hash ")).ok_or_else(|| bad("missing config hash"))?.to_string();
    let config: ScanConfig = lines
        .next()
        .and_then(|l| l.strip_prefix("config "))
        .and_then(|l| serde_json::from_str(l).ok())
        .ok_or_else(|| bad("missing config"))?;
    let mut chunks = BTreeMap::new();
    for line in lines {
        let (id, json) = line
            .strip_prefix("chunk ")
            .and_then(|l| l.split_once(' '))
            .ok_or_else(|| bad(&format!("unexpected line {line:?}")))?;
        let id: u64 = id.parse().map_err(|_| bad("bad chunk id"))?;
        let c: ChunkResult = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
        if c.id != id || id >= config.chunk_count() {
            return Err(bad(&format!("inconsistent chunk {id}")));
        }
        chunks.insert(id, c);
    }
    Ok(SavedState { hash, config, chunks: chunks.into_values().collect() })
}

/// Runs `cfg`, checkpointing each finished chunk to `state`. An existing
/// state file for the same configuration is continued; finished chunks are
/// replayed rather than recomputed.
pub fn run_with_state(cfg: &ScanConfig, state: &Path, opts: RunOptions) -> Result<ScanRun> {
    cfg.validate()?;
    let hash = cfg.hash();
    let done = if state.exists() {
        let saved = read_state(state)?;
        if saved.hash != hash || saved.config.hash() != hash {
            return Err(Error::ConfigMismatch { saved: saved.hash, current: hash });
        }
        saved.chunks
    } else {
        let mut f = File::create(state)?;
        writeln!(f, "{STATE_MAGIC}")?;
        writeln!(f, "config-hash {hash}")?;
        writeln!(f, "config {}", serde_json::to_string(cfg).expect("config serializes"))?;
        Vec::new()
    };
    let file = OpenOptions::new().append(true).open(state)?;
    execute(cfg, opts, done, Some(&Mutex::new(file)))
}

/// Continues whatever scan `state` belongs to.
pub fn resume(state: &Path, opts: RunOptions) -> Result<ScanRun> {
    let saved = read_state(state)?;
    run_with_state(&saved.config, state, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub y: u64,
    pub x: u64,
    pub z: u64,
    pub class: String,
    pub n: Option<u32>,
    pub strict_flag: Option<bool>,
    pub phi_num: Option<String>,
    pub phi_den: Option<String>,
    pub k_num: Option<String>,
    pub k_den: Option<String>,
    pub lambda_max_num: Option<String>,
    pub lambda_max_den: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub gap: Option<String>,
    pub s: Option<String>,
    /// `check=pass|fail` pairs separated by `;`.
    pub checks: String,
}

fn csv_row(t: &Triplet, cfg: &ScanConfig) -> Result<CsvRow> {
    let ev = evaluate(t, cfg, true)?;
    let parts = |r: &Rat| (r.numer().to_string(), r.denom().to_string());
    let an = ev.analysis.as_ref();
    let (phi, k, lam) = (an.map(|a| parts(&a.phi)), an.map(|a| parts(&a.k_n_minus_1)), an.map(|a| parts(a.lambda_max())));
    let places = cfg.digits.min(30) as usize;
    let b = ev.bounds.as_ref();
    let checks = ev
        .results
        .iter()
        .map(|(c, r)| format!("{c}={}", if r.is_ok() { "pass" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(";");
    Ok(CsvRow {
        y: t.y().try_into().unwrap_or(u64::MAX),
        x: t.x().try_into().unwrap_or(u64::MAX),
        z: t.z().try_into().unwrap_or(u64::MAX),
        class: ev.class.name().to_string(),
        n: ev.n,
        strict_flag: ev.n.map(|_| ev.strict),
        phi_num: phi.clone().map(|p| p.0),
        phi_den: phi.map(|p| p.1),
        k_num: k.clone().map(|p| p.0),
        k_den: k.map(|p| p.1),
        lambda_max_num: lam.clone().map(|p| p.0),
        lambda_max_den: lam.map(|p| p.1),
        a: b.map(|b| b.a.value.to_decimal(places)),
        b: b.map(|b| b.b.value.to_decimal(places)),
        gap: b.map(|b| b.gap.to_decimal(places)),
        s: ev.s,
        checks,
    })
}

/// One row per triplet passing the class filter, in `(z, x, y)` order.
pub fn csv_rows(cfg: &ScanConfig, workers: usize) -> Result<Vec<CsvRow>> {
    cfg.validate()?;
    let per_chunk: Vec<Vec<CsvRow>> = pool(workers)?.install(|| {
        (0..cfg.chunk_count())
            .into_par_iter()
            .map(|id| {
                let mut rows = Vec::new();
                for_each_triplet(cfg, id, |y, x, z| {
                    let t = Triplet::from_u64(y, x, z)?;
                    if cfg.admits(classify(&t).tag) {
                        rows.push(csv_row(&t, cfg)?);
                    }
                    Ok(())
                })?;
                Ok(rows)
            })
            .collect::<Result<_>>()
    })?;
    Ok(per_chunk.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eqs(r: &ScanReport, n: u32) -> Vec<(u64, u64, u64)> {
        r.equalities.iter().filter(|e| e.n == n).map(|e| (e.y, e.x, e.z)).collect()
    }

    #[test]
    fn small_ranges() {
        let r = scan_equalities(&ScanConfig::new(3, 3), 1).unwrap();
        assert_eq!(eqs(&r, 1), vec![(1, 1, 2), (1, 2, 3)]);
        assert_eq!(r.equalities.len(), 2);
        assert!(r.complete && r.equalities_reverified && r.no_higher_equalities);

        let r = scan_equalities(&ScanConfig::new(5, 3), 2).unwrap();
        assert!(eqs(&r, 1).contains(&(2, 3, 5)));
        assert_eq!(eqs(&r, 2), vec![(3, 4, 5)]);
        assert!(eqs(&r, 3).is_empty());
    }

    #[test]
    fn pythagorean_up_to_20() {
        let r = scan_equalities(&ScanConfig::new(20, 6), 0).unwrap();
        let mut got = eqs(&r, 2);
        got.sort_by_key(|t| (t.2, t.1));
        assert_eq!(got, vec![(3, 4, 5), (6, 8, 10), (5, 12, 13), (9, 12, 15), (8, 15, 17), (12, 16, 20)]);
        assert_eq!(r.triplets_enumerated, 20 * 21 * 22 / 6);
    }

    #[test]
    fn equilateral_never_reverses() {
        let cfg = ScanConfig::new(10, 3).with_filter([ClassTag::Equilateral]).with_checks(Check::ALL);
        let r = sweep_properties(&cfg, 1).unwrap();
        assert_eq!(r.triplets_checked, 10);
        assert_eq!(r.outcome_counts.get(&Outcome::NoReversion), Some(&10));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn report_independent_of_chunking_and_workers() {
        let base = ScanConfig::new(18, 5).with_checks(Check::exact_battery());
        let reference = sweep_properties(&base, 1).unwrap().canonical_json();
        for (chunk, workers) in [(1, 2), (5, 8), (18, 3), (100, 1)] {
            let r = sweep_properties(&base.clone().with_chunk_size(chunk), workers).unwrap();
            assert_eq!(r.canonical_json(), reference, "chunk {chunk} workers {workers}");
        }
    }

    #[test]
    fn acute_sweep_is_clean() {
        let cfg = ScanConfig::new(30, 2).with_filter([ClassTag::AcuteScalene]).with_checks(Check::ALL);
        let r = sweep_properties(&cfg, 0).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.gap_histogram[..10].iter().all(|&c| c == 0));
        assert_eq!(r.gap_histogram.iter().sum::<u64>(), r.triplets_checked);
    }

    #[test]
    fn resume_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.state");
        let cfg = ScanConfig::new(16, 4).with_chunk_size(2);
        let full = run_scan(&cfg, RunOptions::workers(2)).unwrap().report.unwrap();

        let half = run_with_state(&cfg, &path, RunOptions { workers: 2, stop_after_chunks: Some(4) }).unwrap();
        assert!(half.report.is_none());
        assert_eq!(half.chunks_computed, 4);

        let other = ScanConfig::new(17, 4).with_chunk_size(2);
        assert!(matches!(run_with_state(&other, &path, RunOptions::default()), Err(Error::ConfigMismatch { .. })));

        let rest = resume(&path, RunOptions::workers(3)).unwrap();
        assert_eq!((rest.chunks_replayed, rest.chunks_computed), (4, 4));
        assert_eq!(rest.report.unwrap().canonical_json(), full.canonical_json());

        let replay = run_with_state(&cfg, &path, RunOptions::workers(1)).unwrap();
        assert_eq!(replay.chunks_computed, 0);
        assert_eq!(replay.report.unwrap().canonical_json(), full.canonical_json());
    }

    #[test]
    fn truncated_state_line_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.state");
        let cfg = ScanConfig::new(8, 3).with_chunk_size(2);
        run_with_state(&cfg, &path, RunOptions { workers: 1, stop_after_chunks: Some(2) }).unwrap();
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "chunk 3 {{\"id\":3,").unwrap();
        let run = resume(&path, RunOptions::workers(1)).unwrap();
        assert_eq!(run.chunks_computed, 2);
        assert!(run.report.unwrap().complete);
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::new(2, 3).validate().is_err());
        assert!(ScanConfig::new(5, 1).validate().is_err());
        assert!(ScanConfig::new(5, 3).with_chunk_size(0).validate().is_err());
        assert_ne!(ScanConfig::new(5, 3).hash(), ScanConfig::new(6, 3).hash());
        assert_eq!("k-monotone".parse::<Check>().unwrap(), Check::KMonotone);
    }

    #[test]
    fn csv_has_one_row_per_triplet() {
        let cfg = ScanConfig::new(6, 3).with_checks(Check::exact_battery());
        let rows = csv_rows(&cfg, 2).unwrap();
        assert_eq!(rows.len(), 56);
        let r = rows.iter().find(|r| (r.y, r.x, r.z) == (4, 5, 6)).unwrap();
        assert_eq!((r.phi_num.as_deref(), r.phi_den.as_deref()), (Some("41"), Some("36")));
        assert_eq!(r.n, Some(3));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("y,x,z,class,n,strict_flag,phi_num,phi_den,k_num,k_den,lambda_max_num,lambda_max_den,a,b,gap,s,checks\n"));
        assert_eq!(text.lines().count(), 57);
    }
}
