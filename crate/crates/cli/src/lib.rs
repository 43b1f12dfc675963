//! Command-line front end. `run` parses an argument vector and returns the
//! exit code together with the text or JSON to print, so it can be driven
//! from tests without spawning a process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

use reversor_core::arith::{ordering_name, HiReal, Precision, Rat};
use reversor_core::classify::{classify, ClassTag, PredictedN, Triplet};
use reversor_core::corollary2::{
    radical_ladder, radical_verify, scale_rational_triplet, sign_case_bruteforce, BaseRelation, Fraction, RadicalTriplet,
};
use reversor_core::logbounds::{gap_report, no_reversion_witness, solve_s, OrderFlag, SolveOptions};
use reversor_core::reversion::{analyze, overreversion_in, Chain};
use reversor_core::scan::{csv_rows, run_scan, run_with_state, write_csv, Check, RunOptions, ScanConfig, ScanRun};
use reversor_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub payload: String,
}

impl CommandResult {
    fn ok(payload: String) -> Self {
        CommandResult { exit_code: EXIT_OK, payload }
    }
}

#[derive(Parser, Debug)]
#[command(name = "reversor", version, about = "Exact power-sum reversion of integer triplets")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "REVERSOR_PRECISION", default_value_t = Precision::DEFAULT_DIGITS,
          value_parser = clap::value_parser!(u32).range(8..=100_000))]
    precision: u32,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct TripletArgs {
    /// Three positive integers in any order.
    #[arg(num_args = 3, value_names = ["Y", "X", "Z"], required = true)]
    values: Vec<BigUint>,
}

impl TripletArgs {
    fn triplet(&self) -> Result<Triplet, Error> {
        let [a, b, c] = <[BigUint; 3]>::try_from(self.values.clone()).map_err(|_| Error::InvalidArgument("expected three values".into()))?;
        Triplet::new(a, b, c)
    }

    fn input(&self) -> Vec<String> {
        self.values.iter().map(ToString::to_string).collect()
    }
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    zmax: u64,
    #[arg(long, default_value_t = 12)]
    nmax: u32,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// State file: continued if present, created otherwise.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write one CSV row per triplet here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    chunk_size: u64,
    /// Restrict to a class (name or set label); repeatable.
    #[arg(long = "class")]
    classes: Vec<ClassTag>,
    /// Invariant to check; repeatable; `all` selects every check.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Stop after this many chunks (leaves a resumable state file).
    #[arg(long, hide = true)]
    stop_after_chunks: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify a triplet.
    Classify(TripletArgs),
    /// Reversion exponent, last triangle, and the lambda and rho intervals.
    Analyze(TripletArgs),
    /// Logarithmic bounds a and b around the reversion exponent.
    Bounds(TripletArgs),
    /// b(n) > n for every n, for triplets that never reverse.
    Witness {
        #[command(flatten)]
        t: TripletArgs,
        #[arg(long, default_value_t = 16)]
        max_n: u32,
    },
    /// Real exponent s with z^s = x^s + y^s.
    SolveS {
        #[command(flatten)]
        t: TripletArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Overreversion with multiplier rho.
    Overrevert {
        #[command(flatten)]
        t: TripletArgs,
        /// Rational `P/Q` or integer.
        #[arg(long)]
        rho: Rat,
    },
    /// q-th roots of a triplet with z = x + y or z^2 = x^2 + y^2.
    Radical {
        #[command(flatten)]
        t: TripletArgs,
        #[arg(long)]
        q: u32,
        /// `sum` or `pythagorean`; detected when omitted.
        #[arg(long)]
        relation: Option<BaseRelation>,
        /// Also compare the roots raised to j/q for j = 1..q.
        #[arg(long)]
        ladder: bool,
    },
    /// Clear denominators of a rational triple.
    Scale {
        /// Fractions `P/Q`: the largest is taken as z.
        #[arg(num_args = 3, value_names = ["Z", "X", "Y"], required = true)]
        values: Vec<Fraction>,
        #[arg(long)]
        n: u32,
    },
    /// Brute force over every sign pattern.
    Signs {
        #[arg(long)]
        bound: u64,
        #[arg(long, num_args = 1.., required = true)]
        n: Vec<u32>,
    },
    /// Exhaustive equality scan.
    Scan(ScanArgs),
    /// Property battery over a range (defaults: z <= 100, acute scalene).
    Sweep {
        #[arg(long, default_value_t = 100)]
        zmax: u64,
        #[arg(long, default_value_t = 2)]
        nmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        chunk_size: u64,
        /// Defaults to acute-scalene; `all` lifts the filter.
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Defaults to every check except solver_ordering; `all` adds it.
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// ASCII number line of n - 1, a, s, b, n.
    Fig1 {
        #[command(flatten)]
        t: TripletArgs,
        #[arg(long, default_value_t = 61)]
        width: usize,
        /// Also write the marker positions as CSV.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first) and executes it.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandResult { exit_code: code, payload: e.render().to_string() };
        }
    };
    let ctx = Ctx { json: cli.json, prec: Precision::digits(cli.precision) };
    match dispatch(&ctx, cli.cmd) {
        Ok(r) => r,
        Err(e) => error_result(&ctx, &e),
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NonPositive
        | Error::InvalidArgument(_)
        | Error::InvalidConfig(_)
        | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::NonPositive => "non_positive",
        Error::NoReversion { .. } => "no_reversion",
        Error::NoLastTriangle => "no_last_triangle",
        Error::BoundaryEquality { .. } => "boundary_equality",
        Error::OutOfInterval { .. } => "out_of_interval",
        Error::DegenerateBase => "degenerate_base",
        Error::WrongClass(_) => "wrong_class",
        Error::NoSignChange { .. } => "no_sign_change",
        Error::MalformedBase(_) => "malformed_base",
        Error::Indeterminate { .. } => "indeterminate",
        Error::InvalidConfig(_) => "invalid_config",
        Error::ConfigMismatch { .. } => "config_mismatch",
        Error::StateFormat(_) => "state_format",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

fn error_result(ctx: &Ctx, e: &Error) -> CommandResult {
    let exit_code = exit_code_for(e);
    let payload = if ctx.json {
        pretty(&json!({ "error": error_name(e), "message": e.to_string(), "exit_code": exit_code }))
    } else {
        format!("error: {e}\n")
    };
    CommandResult { exit_code, payload }
}

struct Ctx {
    json: bool,
    prec: Precision,
}

impl Ctx {
    fn places(&self) -> usize {
        self.prec.get().min(20) as usize
    }

    fn dec(&self, r: &Rat) -> HiReal {
        HiReal::from_rat(r, self.prec)
    }

    fn emit(&self, value: Value, text: impl FnOnce() -> String) -> CommandResult {
        CommandResult::ok(if self.json { pretty(&value) } else { text() })
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn flag_symbol(f: OrderFlag) -> &'static str {
    match f {
        OrderFlag::Strict => "<",
        OrderFlag::Equal => "=",
        OrderFlag::Unresolved => "<=?",
        OrderFlag::Violated => "!>",
    }
}

fn dispatch(ctx: &Ctx, cmd: Cmd) -> Result<CommandResult, Error> {
    match cmd {
        Cmd::Classify(a) => cmd_classify(ctx, &a),
        Cmd::Analyze(a) => cmd_analyze(ctx, &a),
        Cmd::Bounds(a) => cmd_bounds(ctx, &a),
        Cmd::Witness { t, max_n } => cmd_witness(ctx, &t, max_n),
        Cmd::SolveS { t, tol } => cmd_solve(ctx, &t, tol),
        Cmd::Overrevert { t, rho } => cmd_overrevert(ctx, &t, &rho),
        Cmd::Radical { t, q, relation, ladder } => cmd_radical(ctx, &t, q, relation, ladder),
        Cmd::Scale { values, n } => cmd_scale(ctx, values, n),
        Cmd::Signs { bound, n } => cmd_signs(ctx, bound, &n),
        Cmd::Scan(a) => {
            let checks = parse_checks(&a.checks, CheckDefault::Empty)?;
            let mut cfg = ScanConfig::new(a.zmax, a.nmax).with_checks(checks).with_chunk_size(a.chunk_size).with_digits(ctx.prec.get());
            if !a.classes.is_empty() {
                cfg = cfg.with_filter(a.classes.iter().copied());
            }
            let opts = RunOptions { workers: a.workers, stop_after_chunks: a.stop_after_chunks };
            cmd_scan(ctx, &cfg, opts, a.resume, a.out, a.csv)
        }
        Cmd::Sweep { zmax, nmax, out, resume, workers, csv, chunk_size, classes, checks } => {
            let checks = parse_checks(&checks, CheckDefault::Exact)?;
            let mut cfg = ScanConfig::new(zmax, nmax).with_checks(checks).with_chunk_size(chunk_size).with_digits(ctx.prec.get());
            if classes.is_empty() {
                cfg = cfg.with_filter([ClassTag::AcuteScalene]);
            } else if !classes.iter().any(|c| c == "all") {
                let tags = classes.iter().map(|c| c.parse()).collect::<Result<Vec<ClassTag>, _>>()?;
                cfg = cfg.with_filter(tags);
            }
            cmd_scan(ctx, &cfg, RunOptions::workers(workers), resume, out, csv)
        }
        Cmd::Fig1 { t, width, data } => cmd_fig1(ctx, &t, width, data),
    }
}

fn cmd_classify(ctx: &Ctx, a: &TripletArgs) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let c = classify(&t);
    let v = json!({ "input": a.input(), "triplet": to_value(&t), "class": to_value(&c) });
    Ok(ctx.emit(v, || {
        let mut s = format!("input {} -> canonical {t}\n", a.input().join(" "));
        let _ = writeln!(s, "class: {} ({})", c.set_label, c.tag);
        let predicted = match c.predicted_n {
            PredictedN::Fixed(n) => format!("n = {n}"),
            PredictedN::Computed => "n >= 3, computed by analyze".into(),
            PredictedN::NoneExists => "none, the inequality never reverses".into(),
        };
        let _ = writeln!(s, "reversion exponent: {predicted}");
        if let Some(note) = c.note {
            let _ = writeln!(s, "note: {note}");
        }
        s
    }))
}

fn cmd_analyze(ctx: &Ctx, a: &TripletArgs) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let an = analyze(&t)?;
    let mut v = to_value(&an);
    v["input"] = json!(a.input());
    v["lambda_max"] = to_value(an.lambda_max());
    v["rho_max"] = to_value(an.rho_max());
    v["decimals"] = json!({
        "phi": to_value(&ctx.dec(&an.phi)),
        "k_n_minus_1": to_value(&ctx.dec(&an.k_n_minus_1)),
        "lambda_max": to_value(&ctx.dec(an.lambda_max())),
        "rho_max": to_value(&ctx.dec(an.rho_max())),
    });
    Ok(ctx.emit(v, || {
        let p = ctx.places();
        let d = |r: &Rat| ctx.dec(r).to_decimal(p);
        let mut s = format!("{t}  class {} ({})\n", an.class, an.class.set_label());
        let _ = writeln!(s, "n = {}, n - 1 = {}", an.n, an.n_minus_1);
        let _ = writeln!(s, "p_(n-1) = {}, p_n = {}, z^n = {}", an.p_n_minus_1, an.p_n, an.z_pow_n);
        let _ = writeln!(s, "phi = {} = {}", an.phi, d(&an.phi));
        let _ = writeln!(s, "k_(n-1) = {} = {}", an.k_n_minus_1, d(&an.k_n_minus_1));
        let _ = writeln!(s, "lambda_max = z/k_(n-1) = {} = {}", an.lambda_max(), d(an.lambda_max()));
        let _ = writeln!(s, "lambda interval [{}, {}], nondegenerate: {}", an.lambda_interval.lower, an.lambda_interval.upper, yes(an.lambda_interval_nondegenerate));
        let _ = writeln!(s, "rho interval [{}, {}]", an.rho_interval.lower, an.rho_interval.upper);
        let lt = &an.last_triangle;
        let _ = writeln!(s, "last triangle {{{},{},{}}}", lt.y, lt.x, lt.z);
        let _ = writeln!(s, "z^(2n-2) > p_(2n-2): {}", yes(an.last_triangle_square_reversed));
        if let Some(k) = an.k_strictly_between_bases {
            let _ = writeln!(s, "y < k_(n-1) < x: {}", yes(k));
        }
        s
    }))
}

fn cmd_bounds(ctx: &Ctx, a: &TripletArgs) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let rep = gap_report(&t, ctx.prec)?;
    let mut v = to_value(&rep);
    v["input"] = json!(a.input());
    v["gap_identity_upper"] = json!(format!("{:e}", rep.gap_identity_upper().to_f64()));
    Ok(ctx.emit(v, || {
        let p = ctx.places();
        let exact = |e: Option<u32>| e.map(|m| format!(" (exactly {m})")).unwrap_or_default();
        let mut s = format!("{t}  class {}  n = {}\n", rep.class, rep.n);
        let _ = writeln!(s, "b = log p_n / log z         = {}{}", rep.b.value.to_decimal(p), exact(rep.b.exact));
        let _ = writeln!(s, "a = log p_(n-1) / log z     = {}{}", rep.a.value.to_decimal(p), exact(rep.a.exact));
        let _ = writeln!(s, "b - a                       = {}", rep.gap.to_decimal(p));
        let _ = writeln!(s, "n - b                       = {}", rep.n_minus_b.to_decimal(p));
        let _ = writeln!(s, "k_(n-1) = {}, k^2 > z: {}", rep.k_n_minus_1, yes(rep.k_squared_above_z));
        let _ = writeln!(s, "1/2 < b - a < 1: {}, n - b < 1/2: {}", yes(rep.gap_in_unit && rep.gap_above_half), yes(rep.n_minus_b_below_half));
        let _ = writeln!(s, "gap identity residual <= {:e}", rep.gap_identity_upper().to_f64());
        let _ = writeln!(s, "half-unit bounds are {}", if rep.bounds_are_theorems { "theorems for this class" } else { "measured only for this class" });
        s
    }))
}

fn cmd_witness(ctx: &Ctx, a: &TripletArgs, max_n: u32) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let rows = no_reversion_witness(&t, max_n, ctx.prec)?;
    let all = rows.iter().all(|r| r.b_above_n);
    let v = json!({ "input": a.input(), "triplet": to_value(&t), "rows": to_value(&rows), "b_above_n_for_all": all });
    Ok(ctx.emit(v, || {
        let mut s = format!("{t}: b(n) = log(x^n + y^n) / log z\n");
        for r in &rows {
            let extra = r.ln2_identity_upper().map(|u| format!("  |b - n - log2/log z| <= {:e}", u.to_f64())).unwrap_or_default();
            let _ = writeln!(s, "n = {:>3}  b = {}  b > n: {}{extra}", r.n, r.b.to_decimal(ctx.places()), yes(r.b_above_n));
        }
        s
    }))
}

fn cmd_solve(ctx: &Ctx, a: &TripletArgs, tol: f64) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let opts = SolveOptions::new(tol, ctx.prec)?;
    let r = solve_s(&t, &opts)?;
    let mut v = to_value(&r);
    v["input"] = json!(a.input());
    v["tolerance"] = json!(format!("{tol:e}"));
    Ok(ctx.emit(v, || {
        let p = ctx.places();
        let o = &r.ordering;
        let mut s = format!("{t}: z^s = x^s + y^s\n");
        let _ = writeln!(s, "s = {} (+/- {:e})", r.s.to_decimal(p), r.s.error_bound_f64());
        let _ = writeln!(s, "iterations {}, residual {:e}", r.iterations, r.residual.to_f64().abs() + r.residual.error_bound_f64());
        let _ = writeln!(
            s,
            "{} {} a {} s {} b {} {}",
            r.n - 1,
            flag_symbol(o.n_minus_1_vs_a),
            flag_symbol(o.a_vs_s),
            flag_symbol(o.s_vs_b),
            flag_symbol(o.b_vs_n),
            r.n
        );
        if r.boundary_equality {
            let _ = writeln!(s, "boundary equality: s = n - 1 exactly");
        }
        s
    }))
}

fn cmd_overrevert(ctx: &Ctx, a: &TripletArgs, rho: &Rat) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let an = analyze(&t)?;
    let o = overreversion_in(&an, rho)?;
    let mut v = to_value(&o);
    v["input"] = json!(a.input());
    v["triplet"] = to_value(&t);
    v["rho_interval"] = to_value(&an.rho_interval);
    Ok(ctx.emit(v, || {
        let rel = match o.chain {
            Chain::AtLowerBound => format!("{} > {} = {}", o.z_pow_n, o.zeta_n, o.p_n),
            Chain::StrictChain => format!("{} > {} > {}", o.z_pow_n, o.zeta_n, o.p_n),
            Chain::AtUpperBound => format!("{} = {} > {}", o.z_pow_n, o.zeta_n, o.p_n),
        };
        format!(
            "{t}: rho = {} in [{}, {}], lambda = z/rho = {}\nzeta_n = rho p_(n-1) = {}\nz^n, zeta_n, p_n: {rel}\n",
            o.rho, an.rho_interval.lower, an.rho_interval.upper, o.lambda, o.zeta_n
        )
    }))
}

fn cmd_radical(ctx: &Ctx, a: &TripletArgs, q: u32, relation: Option<BaseRelation>, ladder: bool) -> Result<CommandResult, Error> {
    let t = a.triplet()?;
    let rt = match relation {
        Some(rel) => RadicalTriplet::new(t.clone(), q, rel)?,
        None => RadicalTriplet::detect(t.clone(), q)?,
    };
    let v_res = radical_verify(&rt, ctx.prec)?;
    let steps = if ladder { Some(radical_ladder(&t, q, ctx.prec)?) } else { None };
    let mut v = to_value(&v_res);
    v["input"] = json!(a.input());
    if let Some(steps) = &steps {
        v["ladder"] = steps.iter().map(|(j, o)| json!({ "j": j, "order": ordering_name::name(*o) })).collect();
    }
    Ok(ctx.emit(v, || {
        let p = ctx.places();
        let [rz, rx, ry] = &v_res.roots;
        let mut s = format!("{t}, q = {q}, relation {:?}\n", rt.relation);
        let _ = writeln!(s, "z^(1/q) = {}\nx^(1/q) = {}\ny^(1/q) = {}", rz.to_decimal(p), rx.to_decimal(p), ry.to_decimal(p));
        let _ = writeln!(s, "z^(1/q) vs x^(1/q) + y^(1/q): {} (certified at {} digits)", ordering_name::name(v_res.root_order), v_res.root_order_digits);
        let _ = writeln!(s, "equality at exponent {}: {}", v_res.solving_exponent, yes(v_res.exact_identity));
        let _ = writeln!(s, "non-real roots per component (not constructed): {}", v_res.complex_companions_per_component);
        if let Some(steps) = &steps {
            for (j, o) in steps {
                let _ = writeln!(s, "  exponent {j}/{q}: {}", ordering_name::name(*o));
            }
        }
        s
    }))
}

fn cmd_scale(ctx: &Ctx, values: Vec<Fraction>, n: u32) -> Result<CommandResult, Error> {
    let mut vs = values;
    vs.sort_by_key(|f| std::cmp::Reverse(f.value()));
    let s = scale_rational_triplet(&vs[0], &vs[1], &vs[2], n);
    Ok(ctx.emit(to_value(&s), || {
        format!(
            "integers z, x, y = {}, {}, {}\n{}^{n} = {}, {}^{n} + {}^{n} = {}\nequal: {} (rational: {}), certificate: {}\n",
            s.z, s.x, s.y, s.z, s.lhs, s.x, s.y, s.rhs, yes(s.integer_equal), yes(s.rational_equal), yes(s.certificate)
        )
    }))
}

fn cmd_signs(ctx: &Ctx, bound: u64, n: &[u32]) -> Result<CommandResult, Error> {
    let rep = sign_case_bruteforce(bound, n, None)?;
    let mut res = ctx.emit(to_value(&rep), || {
        let mut s = format!("1 <= |y| < |x| < |z| <= {bound}, n in {n:?}\n");
        for c in &rep.cases {
            let _ = writeln!(s, "{:<22} {:<13} triples {:>8}  equalities {}", c.case.to_string(), format!("{:?}", c.verdict), c.triples_checked, c.equalities);
        }
        let _ = writeln!(s, "total equalities: {}", rep.total_equalities);
        s
    });
    if !rep.consistent {
        res.exit_code = EXIT_VIOLATION;
    }
    Ok(res)
}

enum CheckDefault {
    Empty,
    Exact,
}

fn parse_checks(raw: &[String], default: CheckDefault) -> Result<Vec<Check>, Error> {
    if raw.is_empty() {
        return Ok(match default {
            CheckDefault::Empty => Vec::new(),
            CheckDefault::Exact => Check::exact_battery().into_iter().collect(),
        });
    }
    if raw.iter().any(|c| c == "all") {
        return Ok(Check::ALL.to_vec());
    }
    raw.iter().map(|c| c.parse()).collect()
}

fn cmd_scan(ctx: &Ctx, cfg: &ScanConfig, opts: RunOptions, resume: Option<PathBuf>, out: Option<PathBuf>, csv: Option<PathBuf>) -> Result<CommandResult, Error> {
    let run: ScanRun = match &resume {
        Some(path) => run_with_state(cfg, path, opts)?,
        None => run_scan(cfg, opts)?,
    };
    let Some(report) = run.report else {
        let msg = format!("stopped after {} of {} chunks; continue with --resume", run.chunks_computed + run.chunks_replayed, run.chunks_total);
        let v = json!({ "complete": false, "chunks_total": run.chunks_total, "chunks_done": run.chunks_computed + run.chunks_replayed });
        return Ok(ctx.emit(v, || msg + "\n"));
    };
    let canonical = report.canonical_json();
    if let Some(path) = &out {
        std::fs::write(path, format!("{canonical}\n"))?;
    }
    if let Some(path) = &csv {
        let rows = csv_rows(cfg, opts.workers)?;
        write_csv(&rows, std::fs::File::create(path)?)?;
    }
    let exit_code = if report.has_problems() { EXIT_VIOLATION } else { EXIT_OK };
    let payload = if ctx.json {
        format!("{canonical}\n")
    } else {
        let mut s = format!("z <= {}, n <= {}: {} triplets enumerated, {} checked\n", cfg.z_max, cfg.n_max, report.triplets_enumerated, report.triplets_checked);
        for (n, count) in &report.equalities_by_exponent {
            let _ = writeln!(s, "equalities at n = {n}: {count}");
        }
        let _ = writeln!(s, "equalities with n >= 3: {}", if report.no_higher_equalities { "none" } else { "FOUND" });
        if !cfg.checks.is_empty() {
            let names: Vec<_> = cfg.checks.iter().map(|c| c.name()).collect();
            let _ = writeln!(s, "checks: {}", names.join(", "));
            let _ = writeln!(s, "violations: {}", report.violations.len());
            for v in report.violations.iter().take(20) {
                let _ = writeln!(s, "  {{{},{},{}}} {}: {}", v.y, v.x, v.z, v.check, v.details);
            }
        }
        let hist: Vec<_> = report.gap_histogram.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "b - a histogram (20 bins over [0, 1)): {}", hist.join(" "));
        let outcomes: Vec<_> = report.outcome_counts.iter().map(|(k, v)| format!("{k:?}={v}")).collect();
        let _ = writeln!(s, "outcomes: {}", outcomes.join(", "));
        let _ = writeln!(
            s,
            "chunks: {} computed, {} replayed; elapsed {:.2}s",
            run.chunks_computed,
            run.chunks_replayed,
            report.elapsed.as_secs_f64()
        );
        s
    };
    Ok(CommandResult { exit_code, payload })
}

fn cmd_fig1(ctx: &Ctx, a: &TripletArgs, width: usize, data: Option<PathBuf>) -> Result<CommandResult, Error> {
    if width < 11 {
        return Err(Error::InvalidArgument(format!("width must be at least 11, got {width}")));
    }
    let t = a.triplet()?;
    let r = solve_s(&t, &SolveOptions::new(1e-12, ctx.prec)?)?;
    let n = r.n;
    let markers = [("n-1", (n - 1) as f64), ("a", r.a.to_f64()), ("s", r.s.to_f64()), ("b", r.b.to_f64()), ("n", n as f64)];
    let col = |v: f64| (((v - (n - 1) as f64) * (width - 1) as f64).round().max(0.0) as usize).min(width - 1);

    let mut line: Vec<char> = vec!['-'; width];
    line[0] = '|';
    line[width - 1] = '|';
    let mut labels: Vec<char> = vec![' '; width];
    for (name, v) in &markers[1..4] {
        let c = col(*v);
        line[c] = '+';
        // Later markers shift right when two land on one column.
        let mut lc = c;
        while labels[lc] != ' ' && lc + 1 < width {
            lc += 1;
        }
        labels[lc] = name.chars().next().unwrap();
    }
    let o = &r.ordering;
    let chain = format!(
        "{} {} a {} s {} b {} {}",
        n - 1,
        flag_symbol(o.n_minus_1_vs_a),
        flag_symbol(o.a_vs_s),
        flag_symbol(o.s_vs_b),
        flag_symbol(o.b_vs_n),
        n
    );

    if let Some(path) = &data {
        let mut csv = String::from("marker,value\n");
        for (name, v) in &markers {
            let _ = writeln!(csv, "{name},{v:.17}");
        }
        std::fs::write(path, csv)?;
    }

    let values: Vec<Value> = markers.iter().map(|(name, v)| json!({ "marker": name, "value": format!("{v:.17}"), "column": col(*v) })).collect();
    let v = json!({
        "triplet": to_value(&t),
        "n": n,
        "markers": values,
        "a": to_value(&r.a),
        "s": to_value(&r.s),
        "b": to_value(&r.b),
        "ordering": to_value(&r.ordering),
        "order": chain,
        "boundary_equality": r.boundary_equality,
    });
    Ok(ctx.emit(v, || {
        let p = ctx.places().min(12);
        let left = (n - 1).to_string();
        let right = n.to_string();
        let mut s = format!("{t}: inequality distribution between n - 1 and n\n");
        let gap = width.saturating_sub(left.len() + right.len());
        let _ = writeln!(s, "{left}{}{right}", " ".repeat(gap));
        let _ = writeln!(s, "{}", line.iter().collect::<String>());
        let _ = writeln!(s, "{}", labels.iter().collect::<String>().trim_end());
        let _ = writeln!(s, "{chain}");
        let _ = writeln!(s, "a = {}  s = {}  b = {}", r.a.to_decimal(p), r.s.to_decimal(p), r.b.to_decimal(p));
        s
    }))
}
