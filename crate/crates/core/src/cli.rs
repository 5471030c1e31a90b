//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an asserted identity failed, 2 usage error,
//! 3 enumeration budget exceeded.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::forest::{self, ForestPoset};
use crate::identities::{self, Grid, Identity, IdentityReport};
use crate::permstat;
use crate::qpoly::IntPolynomial;
use crate::wreath;

pub const DEFAULT_BUDGET: u128 = 5_000_000;
pub const BUDGET_ENV: &str = "MAHONIA_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "mahonia", version, about = "Signed Mahonian distributions, checked by enumeration")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest number of objects a single computation may enumerate.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one distribution polynomial.
    Dist(DistArgs),
    /// Check an identity on a parameter grid, one JSON report per line.
    Verify(VerifyArgs),
    /// Tabulate a conjecture; never fails on inequality.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Snk,
    SnkPrime,
    Rake,
    Forest,
    FmajCk,
    Pi,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Weight each object by (-1)^inv.
    #[arg(long)]
    signed: bool,
    /// Rename the output variables, comma separated.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    /// Forest as JSON (`{"n":4,"parent":{"1":3}}`), from a file or `-`.
    #[arg(long, value_name = "FILE|-")]
    forest: Option<String>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    r: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<u32>,
    /// Random instances per tuple, for sampled identities.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GridArgs {
    fn grid(&self) -> Grid {
        Grid {
            n: self.n,
            n_max: self.n_max,
            k: self.k,
            k_max: self.k_max,
            r: self.r.clone(),
            p: self.p.clone(),
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    identity: String,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Conjecture {
    Problem1,
    Problem2,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum)]
    conjecture: Conjecture,
    #[command(flatten)]
    grid: GridArgs,
}

enum Failure {
    Usage(String),
    Budget(u128, u128),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotDivisible | Error::DecodeMismatch(_) | Error::NoEntrywiseMinimum => {
                Failure::Failed(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

struct Ctx<'a> {
    out: &'a mut (dyn Write + Send),
    stdin: &'a mut (dyn Read + Send),
    format: Format,
    budget: u128,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(
    args: I,
    out: &mut (dyn Write + Send),
    err: &mut dyn Write,
    stdin: &mut (dyn Read + Send),
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                return 2;
            }
            let _ = write!(out, "{rendered}");
            return 0;
        }
    };
    match execute(cli, out, stdin) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Budget(need, budget)) => {
            let _ = writeln!(err, "error: needs {need} objects, budget is {budget}");
            3
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn resolve_budget(flag: Option<u128>) -> Result<u128, Failure> {
    let budget = match flag {
        Some(b) => b,
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{BUDGET_ENV}={v} is not a positive integer")))?,
            Err(_) => DEFAULT_BUDGET,
        },
    };
    if budget == 0 {
        return Err(Failure::Usage("budget must be positive".into()));
    }
    Ok(budget)
}

fn execute(cli: Cli, out: &mut (dyn Write + Send), stdin: &mut (dyn Read + Send)) -> Result<i32, Failure> {
    let budget = resolve_budget(cli.budget)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Failure::Failed(e.to_string()))?;
    let mut ctx = Ctx {
        out,
        stdin,
        format: cli.format,
        budget,
    };
    pool.install(|| match cli.command {
        Command::Dist(args) => cmd_dist(&mut ctx, args),
        Command::Verify(args) => cmd_verify(&mut ctx, args),
        Command::Scan(args) => cmd_scan(&mut ctx, args),
    })
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

fn check_budget(ctx: &Ctx, need: u128) -> Result<(), Failure> {
    if need > ctx.budget {
        Err(Failure::Budget(need, ctx.budget))
    } else {
        Ok(())
    }
}

fn require_n(n: Option<usize>) -> Result<usize, Failure> {
    n.ok_or_else(|| Failure::Usage("--n is required for this family".into()))
}

fn cmd_dist(ctx: &mut Ctx, args: DistArgs) -> Result<i32, Failure> {
    let k = args.k;
    let poly = match args.family {
        Family::Snk | Family::SnkPrime | Family::Rake => {
            let n = require_n(args.n)?;
            if k > n {
                return Err(Failure::Usage(format!("k={k} exceeds n={n}")));
            }
            check_budget(ctx, factorial(n) / factorial(k))?;
            match args.family {
                Family::Snk => permstat::signed_distribution(n, k, args.signed)?,
                Family::SnkPrime => permstat::signed_distribution_prime(n, k, args.signed)?,
                _ => forest::rake_distribution(n, k, args.signed)?,
            }
        }
        Family::Forest => {
            let text = match args.forest.as_deref() {
                None => return Err(Failure::Usage("--forest is required for the forest family".into())),
                Some("-") => {
                    let mut s = String::new();
                    ctx.stdin.read_to_string(&mut s)?;
                    s
                }
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?,
            };
            let forest = ForestPoset::from_json_str(&text)?;
            check_budget(ctx, factorial(forest.len()))?;
            forest::label_distribution(&forest, args.signed)
        }
        Family::FmajCk => {
            let n = require_n(args.n)?;
            if args.r == 0 || k >= n.max(1) {
                return Err(Failure::Usage(format!("need r >= 1 and k < n, got r={}, n={n}, k={k}", args.r)));
            }
            let need = (args.r as u128).saturating_pow((n - k) as u32) * factorial(n) / factorial(k);
            check_budget(ctx, need)?;
            let elems = wreath::c_k_set(args.r, args.p, n, k)?.collect::<Result<Vec<_>, _>>()?;
            if args.signed {
                wreath::signed_fmaj_inverse_distribution(&elems)
            } else {
                wreath::fmaj_inverse_distribution(&elems)
            }
        }
        Family::Pi => {
            let n = require_n(args.n)?;
            if k > n {
                return Err(Failure::Usage(format!("k={k} exceeds n={n}")));
            }
            let need = (args.r as u128).saturating_pow(k as u32) * factorial(n) / factorial(n - k);
            check_budget(ctx, need)?;
            let elems = wreath::pi_set(args.r, n, k)?
                .map(|g| wreath::canonical_dual(&g, 1))
                .collect::<Result<Vec<_>, _>>()?;
            wreath::fmaj_inverse_distribution(&elems)
        }
    };
    write_polynomial(ctx, &poly, &args.vars)?;
    Ok(0)
}

fn write_polynomial(ctx: &mut Ctx, poly: &IntPolynomial, rename: &[String]) -> Result<(), Failure> {
    let poly = if rename.is_empty() {
        poly.clone()
    } else {
        let names: Vec<&str> = rename.iter().map(String::as_str).collect();
        poly.renamed(&names)?
    };
    match ctx.format {
        Format::Json => {
            let line = serde_json::to_string(&poly).map_err(|e| Failure::Failed(e.to_string()))?;
            writeln!(ctx.out, "{line}")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *ctx.out);
            let mut header: Vec<String> = poly.vars().iter().map(|v| v.to_string()).collect();
            header.push("coefficient".into());
            w.write_record(&header)?;
            for (exps, c) in poly.rows() {
                let mut row: Vec<String> = exps.iter().map(u32::to_string).collect();
                row.push(c.to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run_grid(ctx: &mut Ctx, identity: Identity, grid: &Grid) -> Result<bool, Failure> {
    let tuples = identities::tuples(identity, grid);
    if tuples.is_empty() {
        return Err(Failure::Usage(format!("empty parameter grid for {identity}")));
    }
    let need = tuples.iter().map(|t| identities::cost(identity, t)).max().unwrap_or(0);
    check_budget(ctx, need)?;
    let format = ctx.format;
    let mut all_hold = true;
    let mut csv_out = (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = csv_out.as_mut() {
        w.write_record(["identity", "r", "p", "n", "k", "sample", "equal", "expected", "lhs", "rhs", "factorization"])?;
    }
    let mut io_error = None;
    identities::verify_each(identity, grid, |report: IdentityReport| {
        all_hold &= identity.is_observation() || report.holds();
        let written = match csv_out.as_mut() {
            Some(w) => w.write_record(csv_row(&report)).map_err(Failure::from),
            None => serde_json::to_string(&report)
                .map_err(|e| Failure::Failed(e.to_string()))
                .and_then(|line| writeln!(ctx.out, "{line}").map_err(Failure::from)),
        };
        if let Err(e) = written {
            io_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    if let Some(w) = csv_out {
        let bytes = w.into_inner().map_err(|e| Failure::Failed(e.to_string()))?;
        ctx.out.write_all(&bytes)?;
    }
    Ok(all_hold)
}

fn csv_row(r: &IdentityReport) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    vec![
        r.identity.clone(),
        opt(r.params.r.map(|x| x.to_string())),
        opt(r.params.p.map(|x| x.to_string())),
        r.params.n.to_string(),
        opt(r.params.k.map(|x| x.to_string())),
        opt(r.params.sample.map(|x| x.to_string())),
        r.equal.to_string(),
        opt(r.expected.map(|x| x.to_string())),
        r.lhs.to_string(),
        r.rhs.to_string(),
        opt(r.factorization.clone()),
    ]
}

fn cmd_verify(ctx: &mut Ctx, args: VerifyArgs) -> Result<i32, Failure> {
    let identity: Identity = args.identity.parse()?;
    let ok = run_grid(ctx, identity, &args.grid.grid())?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_scan(ctx: &mut Ctx, args: ScanArgs) -> Result<i32, Failure> {
    let identity = match args.conjecture {
        Conjecture::Problem1 => Identity::Problem1,
        Conjecture::Problem2 => Identity::Problem2,
    };
    run_grid(ctx, identity, &args.grid.grid())?;
    Ok(0)
}
