//! Command-line surface for the exact polygon-diagram counting engines:
//! single counts, count tables, parity fits, intersection-number extraction,
//! and the verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification or structural check
//! fails, 2 on usage errors (clap reports its own parse failures with 2 as
//! well). Output is deterministic for a given invocation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polycount::analysis::{
    fit_quasipoly, intersection_numbers, structure_polynomial, AnalysisError,
};
use polycount::counts::{p_closed, Counter, Family, SurfaceClass};
use polycount::exact::Rat;
use polycount::verify::{run_suites, Suite};

#[derive(Parser)]
#[command(
    name = "polycount",
    version,
    about = "Exact counts of polygon diagrams on oriented surfaces, with structural verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single count
    Count(CountArgs),
    /// Emit every count with profile entries up to a bound
    Table(TableArgs),
    /// Fit the parity-stratified polynomial family of a pruned count
    Fit(FitArgs),
    /// Extract intersection numbers from fitted top coefficients
    Intersect(IntersectArgs),
    /// Run verification suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    P,
    Q,
    N,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::P => Family::P,
            FamilyArg::Q => Family::Q,
            FamilyArg::N => Family::N,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Closed,
    Recursive,
    Transform,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct CountArgs {
    /// Count family: p (polygon diagrams), q (pruned), n (pruned arcs)
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short = 'g', long = "genus")]
    g: u32,
    /// Number of boundary components
    #[arg(short = 'n', long = "boundaries")]
    n: usize,
    /// Comma-separated boundary vertex counts, one per boundary
    #[arg(long, value_delimiter = ',')]
    profile: Vec<u64>,
    /// Computation route (family p only)
    #[arg(long, value_enum, default_value_t = RouteArg::Recursive)]
    route: RouteArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Read and write a persistent count cache at this path
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short = 'g', long = "genus")]
    g: u32,
    #[arg(short = 'n', long = "boundaries")]
    n: usize,
    /// Emit every profile with entries at most this bound
    #[arg(long)]
    max: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Family to fit: q or n
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short = 'g', long = "genus")]
    g: u32,
    #[arg(short = 'n', long = "boundaries")]
    n: usize,
    /// Also extract the structure polynomial of the full polygon count
    #[arg(long)]
    structure: bool,
}

#[derive(Args)]
struct IntersectArgs {
    /// Source family for the top coefficients: q or n
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short = 'g', long = "genus")]
    g: u32,
    #[arg(short = 'n', long = "boundaries")]
    n: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Routes,
    Identities,
    Fits,
    Intersections,
    Pullback,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (repeatable); defaults to all
    #[arg(long = "suite", value_enum)]
    suites: Vec<SuiteArg>,
    /// Truncation order for the pullback comparison
    #[arg(long, default_value_t = 12)]
    order: u64,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Count(args) => run_count(args),
        Command::Table(args) => run_table(args),
        Command::Fit(args) => run_fit(args),
        Command::Intersect(args) => run_intersect(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn check_failed(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn load_cache(ct: &Counter, path: &Path) -> Result<(), String> {
    if path.exists() {
        ct.cache().load(path).map(|_| ()).map_err(|e| e.to_string())
    } else {
        Ok(())
    }
}

fn save_cache(ct: &Counter, path: &Path) -> Result<(), String> {
    ct.cache().save(path).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CountJson<'a> {
    family: String,
    g: u32,
    n: usize,
    profile: &'a [u64],
    value: String,
}

#[derive(Serialize)]
struct RowJson<'a> {
    profile: &'a [u64],
    value: String,
}

fn profile_csv(profile: &[u64]) -> String {
    profile
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn csv_header(n: usize) -> String {
    (1..=n)
        .map(|i| format!("mu{i}"))
        .collect::<Vec<_>>()
        .join(",")
        + ",value"
}

fn run_count(args: CountArgs) -> ExitCode {
    if args.n == 0 {
        return usage_error("need at least one boundary component");
    }
    if args.profile.len() != args.n {
        return usage_error(&format!(
            "profile has {} entries but n = {}",
            args.profile.len(),
            args.n
        ));
    }
    let family = args.family.family();
    let surface = SurfaceClass::new(args.g, args.n);
    if family != Family::P && args.route != RouteArg::Recursive {
        return usage_error("--route selects among the polygon-count routes; families q and n have only their recursion");
    }
    if family == Family::N && !surface.is_stable() && args.profile.iter().any(|&m| m > 0) {
        return usage_error(&format!("arc counts are not defined on {surface}"));
    }
    match args.route {
        RouteArg::Closed => {
            if p_closed(args.g, &args.profile).is_none() {
                return usage_error(&format!("no closed form for {surface}"));
            }
        }
        RouteArg::Transform => {
            if !surface.is_stable() {
                return usage_error(&format!("the cuff transform does not apply to {surface}"));
            }
        }
        RouteArg::Recursive => {}
    }

    let ct = Counter::new();
    if let Some(path) = &args.cache {
        if let Err(e) = load_cache(&ct, path) {
            return usage_error(&e);
        }
    }
    let value = match (family, args.route) {
        (Family::P, RouteArg::Closed) => p_closed(args.g, &args.profile).unwrap(),
        (Family::P, RouteArg::Transform) => ct.p_from_q(args.g, &args.profile),
        _ => ct.count(family, args.g, &args.profile),
    };
    if let Some(path) = &args.cache {
        if let Err(e) = save_cache(&ct, path) {
            return usage_error(&e);
        }
    }

    match args.format {
        FormatArg::Text => println!("{value}"),
        FormatArg::Json => {
            let doc = CountJson {
                family: family.to_string().to_lowercase(),
                g: args.g,
                n: args.n,
                profile: &args.profile,
                value: value.to_string(),
            };
            println!("{}", serde_json::to_string(&doc).unwrap());
        }
        FormatArg::Csv => {
            println!("{}", csv_header(args.n));
            println!("{},{value}", profile_csv(&args.profile));
        }
    }
    ExitCode::SUCCESS
}

fn for_each_profile_lex(n: usize, max: u64, mut f: impl FnMut(&[u64])) {
    let mut profile = vec![0u64; n];
    loop {
        f(&profile);
        let mut axis = n;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if profile[axis] < max {
                profile[axis] += 1;
                break;
            }
            profile[axis] = 0;
        }
    }
}

fn run_table(args: TableArgs) -> ExitCode {
    if args.n == 0 {
        return usage_error("need at least one boundary component");
    }
    let family = args.family.family();
    let surface = SurfaceClass::new(args.g, args.n);
    if family == Family::N && !surface.is_stable() {
        return usage_error(&format!("arc counts are not defined on {surface}"));
    }
    let ct = Counter::new();
    if let Some(path) = &args.cache {
        if let Err(e) = load_cache(&ct, path) {
            return usage_error(&e);
        }
    }

    let mut rows: Vec<(Vec<u64>, Rat)> = Vec::new();
    for_each_profile_lex(args.n, args.max, |p| {
        rows.push((p.to_vec(), ct.count(family, args.g, p)));
    });

    if let Some(path) = &args.cache {
        if let Err(e) = save_cache(&ct, path) {
            return usage_error(&e);
        }
    }

    match args.format {
        FormatArg::Csv => {
            println!("{}", csv_header(args.n));
            for (p, v) in &rows {
                println!("{},{v}", profile_csv(p));
            }
        }
        FormatArg::Text => {
            for (p, v) in &rows {
                println!("{} {v}", profile_csv(p));
            }
        }
        FormatArg::Json => {
            let doc: Vec<RowJson> = rows
                .iter()
                .map(|(p, v)| RowJson {
                    profile: p,
                    value: v.to_string(),
                })
                .collect();
            println!("{}", serde_json::to_string(&doc).unwrap());
        }
    }
    ExitCode::SUCCESS
}

fn domain_exit(err: &AnalysisError) -> ExitCode {
    match err {
        AnalysisError::Unsupported { .. } | AnalysisError::BadFamily(_) => {
            usage_error(&err.to_string())
        }
        _ => check_failed(&err.to_string()),
    }
}

fn run_fit(args: FitArgs) -> ExitCode {
    if args.n == 0 {
        return usage_error("need at least one boundary component");
    }
    let family = args.family.family();
    if family == Family::P {
        return usage_error("fitting applies to the pruned families q and n");
    }
    let ct = Counter::new();
    let report = match fit_quasipoly(&ct, family, args.g, args.n) {
        Ok(r) => r,
        Err(e) => return domain_exit(&e),
    };
    let mut doc = serde_json::to_value(report.to_json()).unwrap();
    if args.structure {
        let a = 3 * args.g as u64 + args.n as u64 - 3;
        match structure_polynomial(&ct, args.g, args.n, 2 * a + 9) {
            Ok(f) => {
                doc["structure"] = serde_json::to_value(f.to_json()).unwrap();
            }
            Err(e) => return check_failed(&e.to_string()),
        }
    }
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_intersect(args: IntersectArgs) -> ExitCode {
    if args.n == 0 {
        return usage_error("need at least one boundary component");
    }
    let family = args.family.family();
    if family == Family::P {
        return usage_error("intersection extraction uses the pruned families q and n");
    }
    let ct = Counter::new();
    let table = match intersection_numbers(&ct, args.g, args.n, family) {
        Ok(t) => t,
        Err(e) => return domain_exit(&e),
    };
    match args.format {
        FormatArg::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&table.to_json()).unwrap()
            );
        }
        _ => {
            for (d, v) in &table.entries {
                println!("({},{}) d={:?} -> {v}", table.g, table.n, d);
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let mut suites: Vec<Suite> = Vec::new();
    let requested = if args.suites.is_empty() {
        vec![SuiteArg::All]
    } else {
        args.suites.clone()
    };
    for s in requested {
        let expanded = match s {
            SuiteArg::Routes => vec![Suite::Routes],
            SuiteArg::Identities => vec![Suite::Identities],
            SuiteArg::Fits => vec![Suite::Fits],
            SuiteArg::Intersections => vec![Suite::Intersections],
            SuiteArg::Pullback => vec![Suite::Pullback],
            SuiteArg::All => Suite::from_name("all").unwrap(),
        };
        for suite in expanded {
            if !suites.contains(&suite) {
                suites.push(suite);
            }
        }
    }

    let ct = Counter::new();
    let checks = run_suites(&ct, &suites, args.order);
    let mut failed = 0usize;
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} ({:.3}s): {}",
            check.name,
            check.elapsed.as_secs_f64(),
            check.detail
        );
        if !check.pass {
            failed += 1;
        }
    }
    println!(
        "{} checks, {} passed, {failed} failed",
        checks.len(),
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
