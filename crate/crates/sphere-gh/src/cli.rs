//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sphere_gh_core::corr_odd::{validate_k, OddCorrespondence};
use sphere_gh_core::corr_voronoi::VoronoiCorrespondence;
use sphere_gh_core::distortion::{estimate_distortion, SearchBudget};
use sphere_gh_core::exec::Executor;
use sphere_gh_core::packing::{asymptotic_table, best_bound, covering_radius_estimate, euclidean_bound, BoundReport};
use sphere_gh_core::pointsets::{cross_polytope_set, cross_polytope_vdiam_exact, evenly_spaced_circle_set};
use sphere_gh_core::rng::RngStream;
use sphere_gh_core::Error;

use crate::cache::{compute_packing, CacheError, PackingCache};
use crate::json::{
    format_num, to_line, BoundDoc, CoveringDoc, DistortionDoc, PackingDoc, TableRowDoc, VerifyRecord, Num,
};
use crate::parallel::RayonExecutor;
use crate::verify::{self, Scope, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sphere-gh", version, about = "Correspondences between spheres and their distortion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best known bound on 2·d_GH(S^n, S^k) for each k.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_range)]
        k: KRange,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Estimate the distortion of an explicit correspondence.
    Distortion {
        #[arg(long, value_enum)]
        corr: CorrKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Optimize an m-point packing of ℝP^n.
    Packing {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Also estimate the covering radius of the result.
        #[arg(long)]
        covering: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the invariant suite for a scope.
    Verify {
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        #[arg(long, value_parser = parse_range)]
        k: Option<KRange>,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Gap π − bound over a range of k, as CSV by default.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_range)]
        k: KRange,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrKind {
    /// Evenly spaced points of S^1 against the cross-polytope of S^k.
    RpqEvenCross,
    /// The odd-k correspondence between S^1 and S^k.
    OddRk,
}

impl CorrKind {
    fn name(self) -> &'static str {
        match self {
            CorrKind::RpqEvenCross => "rpq-even-cross",
            CorrKind::OddRk => "odd-rk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 200)]
    pub refine_iters: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
}

impl SearchArgs {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            samples: self.samples,
            refine_iters: self.refine_iters,
            restarts: self.restarts,
            ..SearchBudget::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses the machine's parallelism.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output format; `table` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Inclusive list of `k` values, written `a` or `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRange(pub Vec<usize>);

pub fn parse_range(s: &str) -> Result<KRange, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad integer {t:?}: {e}"));
    match s.split_once("..") {
        None => Ok(KRange(vec![num(s)?])),
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            Ok(KRange((a..=b).collect()))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Core(e) => e.into(),
            io => CliError::Failure(io.to_string()),
        }
    }
}

/// Rendered command output. `success` is false only when a verification
/// suite found a failing invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub success: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, success: true }
    }
}

/// Everything an invocation produced, for use by `main` and by tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first), runs the command and writes the
/// output to `--out` when given; otherwise it lands in `stdout`.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Invocation { code, stdout, stderr };
        }
    };
    let out_path = cli.command.common().out.clone();
    match run(&cli.command) {
        Ok(out) => {
            let code = if out.success { EXIT_OK } else { EXIT_FAILURE };
            let stderr = if out.success { String::new() } else { "verification failed\n".to_string() };
            match out_path {
                Some(path) => match std::fs::write(&path, &out.text) {
                    Ok(()) => Invocation { code, stdout: String::new(), stderr },
                    Err(e) => Invocation {
                        code: EXIT_FAILURE,
                        stdout: String::new(),
                        stderr: format!("error: writing {}: {e}\n", path.display()),
                    },
                },
                None => Invocation { code, stdout: out.text, stderr },
            }
        }
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Bound { common, .. }
            | Command::Distortion { common, .. }
            | Command::Packing { common, .. }
            | Command::Verify { common, .. }
            | Command::Table { common, .. } => common,
        }
    }
}

pub fn run(command: &Command) -> Result<Output, CliError> {
    let common = command.common();
    let exec = RayonExecutor::new(common.threads).map_err(|e| CliError::Failure(e.to_string()))?;
    let json = |default: Format| common.format.unwrap_or(default) == Format::Json;
    match command {
        Command::Bound { n, k, search, .. } => {
            let docs = cmd_bound(*n, &k.0, &search.budget(), common.seed, &exec)?;
            Ok(Output::ok(render_bound(&docs, json(Format::Json))))
        }
        Command::Distortion { corr, n, k, search, .. } => {
            let doc = cmd_distortion(*corr, *n, *k, &search.budget(), common.seed, &exec)?;
            Ok(Output::ok(render_distortion(&doc, json(Format::Json))))
        }
        Command::Packing { n, m, covering, search, .. } => {
            let budget = search.budget();
            let r = packing_for(*n, *m, &budget, common.seed, &exec)?;
            let cov = if *covering {
                let rng = RngStream::new(common.seed, u64::MAX);
                Some(covering_radius_estimate(&r.points, budget.samples, &rng, &exec)?)
            } else {
                None
            };
            let doc = PackingDoc::new(*n, &r);
            Ok(Output::ok(render_packing(&doc, cov.as_ref().map(CoveringDoc::from).as_ref(), json(Format::Json))))
        }
        Command::Verify { scope, k, search, .. } => {
            let cfg = VerifyConfig {
                scope: *scope,
                ks: k.as_ref().map(|r| r.0.clone()),
                budget: search.budget(),
                seed: common.seed,
            };
            search.budget().validate()?;
            let records = verify::run(&cfg, &exec)?;
            Ok(Output {
                success: records.iter().all(VerifyRecord::passed),
                text: render_verify(&records, json(Format::Json)),
            })
        }
        Command::Table { n, k, search, .. } => {
            let rows = cmd_table(*n, &k.0, &search.budget(), common.seed, &exec)?;
            Ok(Output::ok(render_table(&rows, json(Format::Csv))))
        }
    }
}

/// Packings come from the store named by the environment when it is set.
fn packing_for<E: Executor + ?Sized>(
    n: usize,
    m: usize,
    budget: &SearchBudget,
    seed: u64,
    exec: &E,
) -> Result<sphere_gh_core::packing::PackingResult, CliError> {
    match PackingCache::from_env() {
        Some(cache) => Ok(cache.get_or_compute(n, m, budget, seed, exec)?),
        None => Ok(compute_packing(n, m, budget, seed, exec)?),
    }
}

pub fn cmd_bound<E: Executor + ?Sized>(
    n: usize,
    ks: &[usize],
    budget: &SearchBudget,
    seed: u64,
    exec: &E,
) -> Result<Vec<BoundDoc>, CliError> {
    ks.iter()
        .map(|&k| {
            // validate the pair before spending time on a packing
            best_bound(n, k, None)?;
            let report: BoundReport = if n >= 2 {
                let p = packing_for(n, k + 1, budget, seed, exec)?.min_dist;
                best_bound(n, k, Some(p))?
            } else {
                best_bound(n, k, None)?
            };
            Ok(BoundDoc::new(&report, euclidean_bound(report.value)?))
        })
        .collect()
}

pub fn cmd_distortion<E: Executor + ?Sized>(
    kind: CorrKind,
    n: usize,
    k: usize,
    budget: &SearchBudget,
    seed: u64,
    exec: &E,
) -> Result<DistortionDoc, CliError> {
    if n != 1 {
        return Err(CliError::Usage(format!("{} relates S^1 to S^k; got --n {n}", kind.name())));
    }
    budget.validate()?;
    let rng = RngStream::new(seed, 0);
    let report = match kind {
        CorrKind::RpqEvenCross => {
            if k < 2 {
                return Err(CliError::Usage(format!("{} needs k ≥ 2, got {k}", kind.name())));
            }
            let corr = VoronoiCorrespondence::new(evenly_spaced_circle_set(k + 1)?, cross_polytope_set(k)?)?;
            let bound = corr.bound(std::f64::consts::PI / (k + 1) as f64, cross_polytope_vdiam_exact(k));
            estimate_distortion(&corr, budget, &rng, exec)?.with_bound(bound)
        }
        CorrKind::OddRk => {
            validate_k(k)?;
            let corr = OddCorrespondence::new(k)?;
            estimate_distortion(&corr, budget, &rng, exec)?.with_bound(corr.bound())
        }
    };
    Ok(DistortionDoc::new(kind.name(), n, k, &report))
}

pub fn cmd_table<E: Executor + ?Sized>(
    n: usize,
    ks: &[usize],
    budget: &SearchBudget,
    seed: u64,
    exec: &E,
) -> Result<Vec<TableRowDoc>, CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("table needs n ≥ 2, got {n}")));
    }
    if let Some(&k) = ks.iter().find(|&&k| k <= n) {
        return Err(CliError::Usage(format!("table needs k > n, got k={k} with n={n}")));
    }
    let cache = PackingCache::from_env();
    let mut io_error = None;
    let rows = asymptotic_table(n, ks, |m| {
        let r = match &cache {
            Some(c) => c.get_or_compute(n, m, budget, seed, exec).map_err(|e| match e {
                CacheError::Core(e) => e,
                io => {
                    let msg = io.to_string();
                    io_error = Some(io);
                    Error::InvalidParameter(msg)
                }
            }),
            None => compute_packing(n, m, budget, seed, exec),
        }?;
        Ok(r.min_dist)
    });
    if let Some(e) = io_error {
        return Err(e.into());
    }
    Ok(rows?
        .into_iter()
        .map(|r| TableRowDoc {
            k: r.k,
            bound: Num(r.bound),
            bound_pi: Num(r.bound / std::f64::consts::PI),
            gap: Num(r.gap),
            gap_sqrtk: Num(r.gap_sqrtk),
        })
        .collect())
}

fn lines<T: serde::Serialize>(items: &[T]) -> String {
    items.iter().map(to_line).collect()
}

fn opt_num(x: Option<Num>) -> String {
    x.map(|n| format_num(n.0)).unwrap_or_default()
}

pub fn render_bound(docs: &[BoundDoc], json: bool) -> String {
    if json {
        return lines(docs);
    }
    let mut s = String::from("n,k,two_dgh_bound,two_dgh_bound_pi,exactness,euclidean_bound,source\n");
    for d in docs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            d.n,
            d.k,
            format_num(d.two_dgh_bound.0),
            format_num(d.two_dgh_bound_pi.0),
            d.exactness,
            format_num(d.euclidean_bound.0),
            d.source
        );
    }
    s
}

pub fn render_distortion(d: &DistortionDoc, json: bool) -> String {
    if json {
        return to_line(d);
    }
    format!(
        "corr,n,k,bound,estimate,samples_used,seed\n{},{},{},{},{},{},{}\n",
        d.corr,
        d.n,
        d.k,
        opt_num(d.bound),
        format_num(d.estimate.0),
        d.samples_used,
        d.seed
    )
}

pub fn render_packing(p: &PackingDoc, cov: Option<&CoveringDoc>, json: bool) -> String {
    if json {
        let mut s = to_line(p);
        if let Some(c) = cov {
            s.push_str(&to_line(c));
        }
        return s;
    }
    format!(
        "n,m,min_dist,min_dist_pi,iterations,restarts_used,covering_radius\n{},{},{},{},{},{},{}\n",
        p.n,
        p.m,
        format_num(p.min_dist.0),
        format_num(p.min_dist_pi.0),
        p.iterations,
        p.restarts_used,
        opt_num(cov.map(|c| c.radius_estimate))
    )
}

pub fn render_verify(records: &[VerifyRecord], json: bool) -> String {
    if json {
        return lines(records);
    }
    let mut s = String::from("invariant,anchor,status,max_violation\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.invariant, r.anchor, r.status, opt_num(Some(r.max_violation)));
    }
    s
}

pub fn render_table(rows: &[TableRowDoc], json: bool) -> String {
    if json {
        return lines(rows);
    }
    let mut s = String::from("k,bound,gap,gap_sqrtk\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.k, format_num(r.bound.0), format_num(r.gap.0), format_num(r.gap_sqrtk.0));
    }
    s
}
