//! The `tvf` command line: planning, obstruction checks, solving,
//! verification, and the brute-force oracles, with stable JSON artifacts.
//!
//! Exit codes are part of the contract: 0 success, 1 invalid input,
//! 2 unconverged (or verification out of tolerance, or no oracle partition),
//! 3 uncertifiable plan / vanished obstruction.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::files::{
    self, CharactersFile, ConfigFile, FileError, MapFile, ObstructionReportFile, OracleFile,
    PlanFile, PointsFile, ReportFile, RunManifest,
};
use crate::geometry::{verify, GeomError, SimplexMap};
use crate::group::GroupSpec;
use crate::obstruction::{build_chern_poly, build_sw_poly, orientability, Sw1Convention};
use crate::oracle::{radon_oracle, tverberg_oracle_affine};
use crate::planner::{PartitionPlan, PlanError, Theorem};
use crate::solver::{solve, SearchMode, SolveOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;
pub const EXIT_UNCERTIFIABLE: i32 = 3;

/// Tolerance overrides honored when the corresponding flag is absent.
pub const ENV_TOL: &str = "TVF_SOLVE_TOL";
pub const ENV_MAX_ITERS: &str = "TVF_SOLVE_MAX_ITERS";
pub const ENV_RESTARTS: &str = "TVF_SOLVE_RESTARTS";

#[derive(Parser)]
#[command(
    name = "tvf",
    version,
    about = "Average-value partition plans on simplex boundaries: plan, certify, solve, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify a partition plan; writes the plan with its
    /// coincidence schedule
    Plan(PlanArgs),
    /// Evaluate the obstruction polynomials for an ad-hoc character list
    Obstruction(ObstructionArgs),
    /// Search for a configuration annihilating a plan's transforms
    Solve(SolveArgs),
    /// Recompute the spectrum and coincidence deviations of a configuration
    Verify(VerifyArgs),
    /// Brute-force partition oracles for small point sets
    Oracle(OracleArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Which theorem to instantiate: 1.3 (subgroup) or 1.4 (blocks)
    #[arg(long)]
    theorem: String,
    #[arg(short)]
    p: u32,
    #[arg(short)]
    k: u32,
    #[arg(short)]
    r: u32,
    /// Subgroup exponent (theorem 1.3 only)
    #[arg(short, default_value_t = 0)]
    a: u32,
    #[arg(short)]
    d: u32,
    /// Restrict the schedule to one orbit length (default: all valid lengths)
    #[arg(long)]
    ell: Option<u32>,
    /// Output plan file
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ObstructionArgs {
    /// Cyclic factor orders, e.g. --orders 3,3,2
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<u32>,
    /// JSON file with {"characters": [[...], ...]}
    #[arg(long, conflicts_with = "all_nonzero")]
    chars: Option<PathBuf>,
    /// Use every nonzero character of the group
    #[arg(long)]
    all_nonzero: bool,
    #[arg(short)]
    d: u32,
    /// Read order-2 coefficients literally mod 2 instead of as indicators
    #[arg(long)]
    literal_x: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Map file; omit together with --random-map to generate one
    #[arg(long, conflicts_with = "random_map")]
    map: Option<PathBuf>,
    /// Generate a seeded random map instead of loading one
    #[arg(long)]
    random_map: bool,
    /// Simplex dimension for --random-map (default: the plan's n)
    #[arg(long)]
    map_n: Option<usize>,
    /// Write the generated map here (with --random-map)
    #[arg(long)]
    save_map: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value = "auto")]
    mode: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output configuration file
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output report file
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Acceptance threshold on the worst coincidence deviation
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Two-part partition of d+2 points from the affine dependence
    #[arg(long, conflicts_with = "tverberg")]
    radon: bool,
    /// Exhaustive q-part partition search
    #[arg(long)]
    tverberg: bool,
    #[arg(short, requires = "tverberg")]
    q: Option<usize>,
    /// JSON file with {"d": ..., "points": [[...], ...]}
    #[arg(long)]
    points: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Entry point for the binary.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Entry point usable from tests; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(args),
        Command::Obstruction(args) => cmd_obstruction(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Plan(PlanError::Uncertifiable { .. }) => EXIT_UNCERTIFIABLE,
            CliError::File(FileError::Plan(PlanError::Uncertifiable { .. })) => EXIT_UNCERTIFIABLE,
            _ => EXIT_INVALID,
        }
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn truncate_poly(text: &str) -> String {
    const LIMIT: usize = 120;
    if text.len() <= LIMIT {
        text.to_string()
    } else {
        format!("{}... ({} chars)", &text[..LIMIT], text.len())
    }
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

fn cmd_plan(args: PlanArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let theorem = match args.theorem.as_str() {
        "1.3" => Theorem::Subgroup,
        "1.4" => Theorem::Blocks,
        other => return Err(CliError::Invalid(format!("unknown theorem {other:?} (use 1.3 or 1.4)"))),
    };
    let plan = match theorem {
        Theorem::Subgroup => PartitionPlan::subgroup(args.p, args.k, args.r, args.a, args.d),
        Theorem::Blocks => PartitionPlan::blocks(args.p, args.k, args.r, args.d),
    };
    let plan = match plan {
        Ok(plan) => plan,
        Err(PlanError::Uncertifiable { polynomial }) => {
            println!("obstruction polynomial vanished: {polynomial}");
            return Err(CliError::Plan(PlanError::Uncertifiable { polynomial }));
        }
        Err(e) => return Err(e.into()),
    };

    let schedule = match args.ell {
        Some(ell) => plan.schedule(Some(ell))?,
        None => plan.full_schedule(),
    };

    println!(
        "plan theorem {}: orders {:?}, q = {}, q' = {}, m = {} (order-2: {})",
        args.theorem,
        plan.group().orders(),
        plan.q(),
        plan.q_prime(),
        plan.m(),
        plan.m_prime()
    );
    println!(
        "n = {} for maps into R^{}   (tight partition dimension N(q,d) = {})",
        plan.n(),
        plan.d(),
        plan.tight_dimension()
    );
    println!(
        "route {:?}; certificate nonzero: {}",
        plan.route(),
        truncate_poly(&plan.certificate().canonical_text())
    );
    if let Some(orientable) = plan.bundle_orientable() {
        println!("bundle orientable: {orientable}");
    }
    println!(
        "schedule: {} equality classes, {} orbit families, {} blocks",
        schedule.equality_classes.len(),
        schedule.orbit_families.len(),
        schedule.blocks.len()
    );
    for w in plan.warnings() {
        println!("warning: {w}");
    }

    if let Some(path) = &args.output {
        let manifest = RunManifest::new("plan")
            .with_param("theorem", &args.theorem)
            .with_param("p", args.p)
            .with_param("k", args.k)
            .with_param("r", args.r)
            .with_param("a", args.a)
            .with_param("d", args.d)
            .with_param("ell", args.ell);
        let mut manifest = manifest;
        manifest.wall_clock_ms = elapsed_ms(start);
        files::save(path, &PlanFile::from_plan(&plan, schedule, Some(manifest)))?;
        println!("wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// obstruction
// ---------------------------------------------------------------------------

fn cmd_obstruction(args: ObstructionArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let spec = GroupSpec::new(args.orders.clone())
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let characters = if args.all_nonzero {
        spec.enumerate_characters().into_iter().filter(|c| !c.is_trivial()).collect()
    } else {
        let path = args
            .chars
            .as_ref()
            .ok_or_else(|| CliError::Invalid("need --chars FILE or --all-nonzero".into()))?;
        let file: CharactersFile = files::load(path)?;
        let mut out = Vec::with_capacity(file.characters.len());
        for exps in file.characters {
            out.push(
                spec.character(exps).map_err(|e| CliError::Invalid(format!("bad character: {e}")))?,
            );
        }
        out
    };
    let convention =
        if args.literal_x { Sw1Convention::LiteralMod2 } else { Sw1Convention::Order2Indicator };

    let q = spec.order() as usize;
    let m = characters.len();
    let d = args.d as usize;

    let chern = build_chern_poly(spec.orders(), &characters, args.d)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let chern_dimension = 2 * d * m + q - 1;
    println!(
        "integral route: m = {m}, guaranteed for n = 2dm+q-1 = {chern_dimension}; polynomial {} [{}]",
        truncate_poly(&chern.canonical_text()),
        if chern.is_nonzero() { "nonzero" } else { "zero" }
    );

    let has_even = spec.orders().iter().any(|&o| o % 2 == 0);
    let mut sw_fields = (None, None, None, None, None);
    if args.d % 2 == 1 && has_even {
        let order2: Vec<_> =
            characters.iter().filter(|c| spec.is_order_two(c)).cloned().collect();
        let rest: Vec<_> =
            characters.iter().filter(|c| !spec.is_order_two(c)).cloned().collect();
        let m_prime = order2.len();
        let sw = build_sw_poly(spec.orders(), &order2, &rest, args.d, convention)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let orientable = orientability(spec.orders(), &order2)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let sw_dimension = d * (2 * m - m_prime) + q - 1;
        println!(
            "mod-2 route: m' = {m_prime}, guaranteed for n = d(2m-m')+q-1 = {sw_dimension}; polynomial {} [{}]; bundle orientable: {orientable}",
            truncate_poly(&sw.canonical_text()),
            if sw.is_nonzero() { "nonzero" } else { "zero" }
        );
        sw_fields = (
            Some(sw.canonical_text()),
            Some(sw.is_nonzero()),
            Some(sw_dimension),
            Some(m_prime),
            Some(orientable),
        );
    } else if args.d % 2 == 1 {
        println!("mod-2 route: skipped (no even factor contributes variables)");
    }

    let any_nonzero = chern.is_nonzero() || sw_fields.1 == Some(true);
    println!("verdict: {}", if any_nonzero { "nonzero" } else { "zero" });

    if let Some(path) = &args.output {
        let mut manifest = RunManifest::new("obstruction")
            .with_param("orders", &args.orders)
            .with_param("d", args.d)
            .with_param("all_nonzero", args.all_nonzero)
            .with_param("literal_x", args.literal_x);
        if let Some(chars) = &args.chars {
            manifest = manifest.with_input(chars)?;
        }
        manifest.wall_clock_ms = elapsed_ms(start);
        let report = ObstructionReportFile {
            orders: args.orders.clone(),
            d: args.d,
            m,
            chern_polynomial: chern.canonical_text(),
            chern_nonzero: chern.is_nonzero(),
            chern_dimension,
            sw_polynomial: sw_fields.0,
            sw_nonzero: sw_fields.1,
            sw_dimension: sw_fields.2,
            m_prime: sw_fields.3,
            orientable: sw_fields.4,
            manifest: Some(manifest),
        };
        files::save(path, &report)?;
        println!("wrote {}", path.display());
    }
    Ok(if any_nonzero { EXIT_OK } else { EXIT_UNCERTIFIABLE })
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn env_override<T: std::str::FromStr>(var: &str) -> Result<Option<T>, CliError> {
    match std::env::var(var) {
        Ok(text) => text
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("cannot parse {var}={text}"))),
        Err(_) => Ok(None),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let plan_file: PlanFile = files::load(&args.plan)?;
    let plan = plan_file.instantiate()?;

    let mode = match args.mode.as_str() {
        "auto" => SearchMode::Auto,
        "exhaustive" => SearchMode::Exhaustive,
        "anneal" => SearchMode::Anneal,
        other => return Err(CliError::Invalid(format!("unknown mode {other:?}"))),
    };
    let tol = match args.tol {
        Some(t) => t,
        None => env_override::<f64>(ENV_TOL)?.unwrap_or(1e-8),
    };
    let max_iters = match args.max_iters {
        Some(v) => v,
        None => env_override::<usize>(ENV_MAX_ITERS)?.unwrap_or(50_000),
    };
    let restarts = match args.restarts {
        Some(v) => v,
        None => env_override::<usize>(ENV_RESTARTS)?.unwrap_or(8),
    };

    let map = if args.random_map {
        let n = args.map_n.unwrap_or(plan.n());
        SimplexMap::random(n, plan.d() as usize, args.seed)
    } else {
        let path = args
            .map
            .as_ref()
            .ok_or_else(|| CliError::Invalid("need --map FILE or --random-map".into()))?;
        let map_file: MapFile = files::load(path)?;
        map_file.instantiate()?
    };

    if let Some(path) = &args.save_map {
        let mut manifest = RunManifest::new("solve:map").with_seed(args.seed);
        manifest.wall_clock_ms = 0;
        files::save(path, &MapFile::from_map(&map, Some(manifest)))?;
        println!("wrote {}", path.display());
    }

    let options = SolveOptions { mode, seed: args.seed, tol, max_iters, restarts, threads: args.threads };
    let outcome = solve(&map, &plan, &options)?;

    for w in &outcome.warnings {
        println!("warning: {w}");
    }
    println!(
        "mode {:?}: {} assignments tried; objective residual {:.3e} (tolerance {:.1e})",
        outcome.mode_used, outcome.assignments_tried, outcome.objective_residual, tol
    );
    println!(
        "full annihilated residual {:.3e}; worst coincidence deviation {:.3e}",
        outcome.report.residual, outcome.report.max_coincidence_deviation
    );
    println!("support sizes {:?}", outcome.report.support_profile);
    println!("converged: {}", if outcome.converged { "yes" } else { "no" });

    let mut manifest = RunManifest::new("solve")
        .with_param("tol", tol)
        .with_param("max_iters", max_iters)
        .with_param("restarts", restarts)
        .with_param("mode", &args.mode)
        .with_param("threads", args.threads)
        .with_param("random_map", args.random_map)
        .with_param("map_n", args.map_n)
        .with_seed(args.seed)
        .with_input(&args.plan)?;
    if let Some(path) = &args.map {
        manifest = manifest.with_input(path)?;
    }
    manifest.wall_clock_ms = elapsed_ms(start);

    if let Some(path) = &args.output {
        files::save(
            path,
            &ConfigFile::from_configuration(&outcome.configuration, Some(manifest.clone())),
        )?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.report {
        let mut report = ReportFile::from_report(&outcome.report, &plan, Some(manifest));
        report.converged = Some(outcome.converged);
        report.assignment = Some(outcome.assignment.clone());
        files::save(path, &report)?;
        println!("wrote {}", path.display());
    }
    Ok(if outcome.converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let plan = files::load::<PlanFile>(&args.plan)?.instantiate()?;
    let map = files::load::<MapFile>(&args.map)?.instantiate()?;
    let config = files::load::<ConfigFile>(&args.config)?.instantiate()?;

    let report = verify(&map, &config, &plan)?;
    println!(
        "residual {:.3e}; max |c| over annihilated {:.3e}; bound on deviations {:.3e}",
        report.residual, report.max_annihilated_coeff, report.guarantee_bound
    );
    println!(
        "worst coincidence deviation {:.3e} (tolerance {:.1e}); support sizes {:?}",
        report.max_coincidence_deviation, args.tol, report.support_profile
    );
    if let Some(dev) = report.alternating_sum_deviation {
        println!("alternating-sum deviation {dev:.3e}");
    }
    let ok = report.max_coincidence_deviation <= args.tol;
    println!("within tolerance: {}", if ok { "yes" } else { "no" });

    if let Some(path) = &args.output {
        let mut manifest = RunManifest::new("verify")
            .with_param("tol", args.tol)
            .with_input(&args.plan)?
            .with_input(&args.map)?
            .with_input(&args.config)?;
        manifest.wall_clock_ms = elapsed_ms(start);
        let mut file = ReportFile::from_report(&report, &plan, Some(manifest));
        file.converged = Some(ok);
        files::save(path, &file)?;
        println!("wrote {}", path.display());
    }
    Ok(if ok { EXIT_OK } else { EXIT_UNCONVERGED })
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

fn cmd_oracle(args: OracleArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    if !args.radon && !args.tverberg {
        return Err(CliError::Invalid("choose --radon or --tverberg".into()));
    }
    let points_file: PointsFile = files::load(&args.points)?;
    if points_file.points.iter().any(|p| p.len() != points_file.d) {
        return Err(CliError::Invalid("points do not match the declared dimension".into()));
    }

    let mut manifest = RunManifest::new("oracle").with_input(&args.points)?;

    if args.radon {
        let partition = radon_oracle(&points_file.points)?;
        println!(
            "partition {:?} / {:?}, witness {:?}",
            partition.positive, partition.negative, partition.witness
        );
        if let Some(path) = &args.output {
            manifest.wall_clock_ms = elapsed_ms(start);
            files::save(path, &OracleFile::Radon { partition, manifest: Some(manifest) })?;
            println!("wrote {}", path.display());
        }
        return Ok(EXIT_OK);
    }

    let q = args.q.ok_or_else(|| CliError::Invalid("--tverberg needs -q".into()))?;
    let found = tverberg_oracle_affine(&points_file.points, q)?;
    let code = match &found {
        Some(partition) => {
            println!("partition {:?}, witness {:?}", partition.parts, partition.witness);
            EXIT_OK
        }
        None => {
            println!("none found");
            EXIT_UNCONVERGED
        }
    };
    if let Some(path) = &args.output {
        manifest = manifest.with_param("q", q);
        manifest.wall_clock_ms = elapsed_ms(start);
        files::save(path, &OracleFile::Tverberg { q, partition: found, manifest: Some(manifest) })?;
        println!("wrote {}", path.display());
    }
    Ok(code)
}
