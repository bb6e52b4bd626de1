use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use chainlab::bounds::BoundKind;
use chainlab::chain::file::{ChainDocument, LoadedChain, SearchMeta};
use chainlab::chain::{validate_degree_d, Nat};
use chainlab::constructors::{construct, degree_chain, power_chain, power_plus_one_chain, Method};
use chainlab::error::Error;
use chainlab::report::{
    self, bounds_table, construction_document, scholz_audit, AUDIT_HEADER, BOUND_HEADER,
};
use chainlab::search::{
    load_known_values, search, IotaOracle, KnownValuesTable, SearchBudget, SearchOptions,
};

/// Addition chains for 2^n - 1: constructions, exact search and bound audits.
#[derive(Parser)]
#[command(name = "chainlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a chain with one of the constructions and write it as JSON.
    Construct {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Validate a chain file.
    Verify { path: PathBuf },
    /// Find a shortest chain for n by exhaustive search.
    Search {
        #[arg(long)]
        n: Nat,
        /// Restrict to star chains.
        #[arg(long)]
        star: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare iota(2^n - 1) with n - 1 + iota(n) for 2 <= n <= n_max.
    ScholzAudit {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate bounds against constructed lengths.
    BoundsTable {
        /// Inclusive range `a..b`.
        #[arg(long, conflicts_with = "n")]
        range: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Comma-separated kinds; defaults to all.
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a known-values table by search, or cross-check one.
    KnownValues {
        #[arg(long, required_unless_present = "check")]
        n_max: Option<u64>,
        /// Cross-check the table selected by --table (or the default) instead.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Known-values table; defaults to $CHAINLAB_TABLE, then the bundled table.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 14)]
    budget_depth: u32,
    #[arg(long, default_value_t = 1_000_000_000)]
    budget_nodes: u64,
    #[arg(long, default_value_t = 300)]
    budget_seconds: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Invariant(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integrity { .. } | Error::Contract { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

impl Common {
    fn budget(&self) -> Result<SearchBudget, Failure> {
        if self.budget_depth == 0 || self.budget_nodes == 0 || self.budget_seconds == 0 {
            return Err(Failure::Usage("budgets must be positive".into()));
        }
        Ok(SearchBudget::new(
            self.budget_depth,
            self.budget_nodes,
            Duration::from_secs(self.budget_seconds),
        ))
    }

    fn table(&self) -> Result<KnownValuesTable, Failure> {
        let path = self
            .table
            .clone()
            .or_else(|| std::env::var_os("CHAINLAB_TABLE").map(PathBuf::from));
        match path {
            Some(p) => {
                let text = fs::read_to_string(&p)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                Ok(load_known_values(&text)?)
            }
            None => Ok(report::bundled_table()),
        }
    }

    fn oracle(&self) -> Result<IotaOracle, Failure> {
        Ok(IotaOracle::new(
            Some(Arc::new(self.table()?)),
            self.budget()?,
        ))
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

/// Status lines go to stdout unless stdout carries the document itself.
fn status(out: &Option<PathBuf>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn table_text(header: &[&str], records: &[Vec<String>], pretty: bool) -> Result<String, Failure> {
    if pretty {
        return Ok(report::render_pretty(header, records));
    }
    let mut buf = Vec::new();
    report::write_csv(&mut buf, header, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn cmd_construct(method: Method, n: u64, out: &Option<PathBuf>, common: &Common) -> CliResult {
    if n < method.min_n() {
        return Err(Failure::Usage(format!(
            "{method} needs n >= {}, got {n}",
            method.min_n()
        )));
    }
    let (doc, valid, summary) = match method {
        Method::Power | Method::PowerPlusOne => {
            let chain = if method == Method::Power {
                power_chain(n)
            } else {
                power_plus_one_chain(n)?
            };
            let report = chain.validate();
            let summary = format!("length {}", chain.length());
            (
                ChainDocument::from_chain(&chain, method.tag()),
                report,
                summary,
            )
        }
        Method::Degree => {
            let chain = degree_chain(n)?;
            let report = validate_degree_d(&chain);
            let summary = format!("length {} (degree {})", chain.length(), chain.degree());
            (
                ChainDocument::from_degree_chain(&chain, method.tag()),
                report,
                summary,
            )
        }
        _ => {
            let outcome = construct(method, n)?;
            let oracle = common.oracle()?;
            let doc = construction_document(&outcome, n, &oracle)?;
            let m = doc
                .measurement
                .as_ref()
                .expect("constructions are measured");
            let verdict = if m.satisfied { "OK" } else { "EXCEEDS" };
            let summary = format!("{} <= {} {verdict}", outcome.length(), m.bound);
            (doc, outcome.chain.validate(), summary)
        }
    };
    if !valid.is_ok() {
        return Err(Failure::Invariant(format!(
            "constructed chain invalid: {valid}"
        )));
    }
    emit(out, &doc.to_json())?;
    status(out, &summary);
    Ok(())
}

fn cmd_verify(path: &Path) -> CliResult {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let doc = ChainDocument::from_json(&text)?;
    let report = match doc.to_chain()? {
        LoadedChain::Addition(c) => c.validate(),
        LoadedChain::Degree(c) => validate_degree_d(&c),
    };
    if report.is_ok() {
        println!("valid, length {}", doc.elements.len().saturating_sub(1));
        Ok(())
    } else {
        Err(Failure::Invariant(format!("invalid chain: {report}")))
    }
}

fn cmd_search(n: &Nat, star: bool, out: &Option<PathBuf>, common: &Common) -> CliResult {
    if *n == Nat::from(0u32) {
        return Err(Failure::Usage("n must be positive".into()));
    }
    let r = search(n, common.budget()?, SearchOptions::default(), star);
    let mut doc =
        ChainDocument::from_chain(&r.witness, if star { "star-search" } else { "search" });
    doc.search = Some(SearchMeta {
        nodes_expanded: r.nodes_expanded,
        proven_optimal: r.proven_optimal,
        star_only: r.star_only,
    });
    emit(out, &doc.to_json())?;
    let proof = if r.proven_optimal {
        "optimal"
    } else {
        "not proven optimal"
    };
    status(out, &format!("length {} ({proof})", r.optimal_length));
    Ok(())
}

fn cmd_scholz_audit(n_max: u64, out: &Option<PathBuf>, pretty: bool, common: &Common) -> CliResult {
    let rows = scholz_audit(n_max, &common.oracle()?, common.budget()?)?;
    let records: Vec<Vec<String>> = rows.iter().map(|r| r.record()).collect();
    emit(out, &table_text(&AUDIT_HEADER, &records, pretty)?)?;
    Ok(())
}

fn parse_range(range: Option<&str>, n: Option<u64>) -> Result<(u64, u64), Failure> {
    match (range, n) {
        (None, Some(n)) => Ok((n, n)),
        (Some(r), None) => {
            let (a, b) = r
                .split_once("..")
                .ok_or_else(|| Failure::Usage(format!("range {r:?} is not `a..b`")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| Failure::Usage(format!("range {r:?}: {e}")))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(Failure::Usage(format!("range {r:?} is empty")));
            }
            Ok((a, b))
        }
        _ => Err(Failure::Usage("give exactly one of --range or --n".into())),
    }
}

fn parse_kinds(kinds: Option<&str>) -> Result<Vec<BoundKind>, Failure> {
    match kinds {
        None => Ok(BoundKind::ALL.to_vec()),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(Failure::from))
            .collect(),
    }
}

fn cmd_known_values(
    n_max: Option<u64>,
    check: bool,
    out: &Option<PathBuf>,
    common: &Common,
) -> CliResult {
    let budget = common.budget()?;
    if check {
        let table = common.table()?;
        let checked = table.cross_check(budget)?;
        println!("{checked} of {} entries confirmed by search", table.len());
        return Ok(());
    }
    let n_max = n_max.expect("required by clap");
    let oracle = IotaOracle::new(None, budget);
    let mut pairs = Vec::new();
    for n in 1..=n_max {
        let i = oracle.iota(n);
        if i.source == chainlab::search::IotaSource::Search {
            pairs.push((n, i.value));
        } else {
            eprintln!("n = {n}: not settled within budget, omitted");
        }
    }
    let table = KnownValuesTable::from_pairs(pairs);
    emit(
        out,
        &table.to_text("n iota(n), each value proven optimal by exhaustive search"),
    )?;
    Ok(())
}

fn run(cmd: &Command) -> CliResult {
    match cmd {
        Command::Construct {
            method,
            n,
            out,
            common,
        } => cmd_construct(*method, *n, out, common),
        Command::Verify { path } => cmd_verify(path),
        Command::Search {
            n,
            star,
            out,
            common,
        } => cmd_search(n, *star, out, common),
        Command::ScholzAudit {
            n_max,
            out,
            pretty,
            common,
        } => {
            if *n_max < 2 {
                return Err(Failure::Usage("--n-max must be at least 2".into()));
            }
            cmd_scholz_audit(*n_max, out, *pretty, common)
        }
        Command::BoundsTable {
            range,
            n,
            kinds,
            out,
            pretty,
            common,
        } => {
            let (a, b) = parse_range(range.as_deref(), *n)?;
            let kinds = parse_kinds(kinds.as_deref())?;
            let rows = bounds_table(a..=b, &kinds, &common.oracle()?)?;
            let records: Vec<Vec<String>> = rows.iter().map(|r| r.record()).collect();
            emit(out, &table_text(&BOUND_HEADER, &records, *pretty)?)?;
            Ok(())
        }
        Command::KnownValues {
            n_max,
            check,
            out,
            common,
        } => cmd_known_values(*n_max, *check, out, common),
    }
}

fn workers(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Construct { common, .. }
        | Command::Search { common, .. }
        | Command::ScholzAudit { common, .. }
        | Command::BoundsTable { common, .. }
        | Command::KnownValues { common, .. } => common.workers,
        Command::Verify { .. } => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match workers(&cli.command) {
        Some(0) => Err(Failure::Usage("--workers must be positive".into())),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => run(&cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
