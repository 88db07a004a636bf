//! The `redlen` command line.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 usage or input error, 3 budget or fuel exhausted.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use redlen::arith::{bench, BenchError, BenchRow};
use redlen::criterion::{infer_with_report, Type2Failure};
use redlen::engine::FuelExhausted;
use redlen::graph::to_dot;
use redlen::{
    certify_uniform_length, check_criterion, explore, normalize, parse_trs, Builtin, GraphError,
    LengthOracle, OracleError, RuleClass, SigmaPrime, Strategy, Term, Trs, DEFAULT_FUEL,
    DEFAULT_MAX_NODES,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "redlen", version, about = "Reduction length analysis for orthogonal term rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the uniform-length criterion for a system.
    Check(CheckArgs),
    /// Rewrite a term to normal form and print the trace.
    Normalize(NormalizeArgs),
    /// Explore all reductions of a term and certify their lengths.
    Certify(CertifyArgs),
    /// Measure step counts of builtin arithmetic.
    Bench(BenchArgs),
    /// Print the reduction graph of a term in DOT format.
    Dot(DotArgs),
    /// List builtin systems or print one as a TRS file.
    Builtins(BuiltinsArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SystemArgs {
    /// TRS file in (VAR ...)(RULES ...) format.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Name of a builtin system.
    #[arg(long)]
    builtin: Option<Builtin>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Comma-separated distinguished symbols; empty for none.
    #[arg(long, value_delimiter = ',', conflicts_with = "infer_sigma")]
    sigma_prime: Option<Vec<String>>,
    /// Infer the distinguished symbols (the default).
    #[arg(long)]
    infer_sigma: bool,
}

#[derive(Args, Debug)]
struct StrategyArgs {
    #[arg(long, default_value = "li")]
    strategy: Strategy,
    /// Seed for `--strategy random`.
    #[arg(long)]
    seed: Option<u64>,
}

impl StrategyArgs {
    fn resolve(&self) -> Result<Strategy, Failure> {
        match (self.strategy, self.seed) {
            (Strategy::RandomRedex(_), Some(seed)) => Ok(Strategy::RandomRedex(seed)),
            (s, None) => Ok(s),
            (s, Some(_)) => Err(Failure::usage(format!("--seed has no effect with strategy {s}"))),
        }
    }
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    term: String,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    /// Build the explicit reduction graph.
    Graph,
    /// Memoized length sets; no witness traces.
    Oracle,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    term: String,
    /// Node budget (state budget with `--method oracle`).
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long, value_enum, default_value = "graph")]
    method: Method,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    builtin: Builtin,
    /// Defined symbol to apply.
    #[arg(long)]
    op: String,
    /// Comma-separated argument values; repeat for several inputs.
    #[arg(long, required = true, value_parser = parse_tuple)]
    args: Vec<Vec<u64>>,
    /// Comma-separated strategies.
    #[arg(long, value_delimiter = ',', default_value = "li,lo")]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn parse_tuple(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|a| a.trim().parse::<u64>().map_err(|e| format!("`{a}`: {e}")))
        .collect()
}

#[derive(Args, Debug)]
struct DotArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    term: String,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
}

#[derive(Args, Debug)]
struct BuiltinsArgs {
    /// Print this system as a TRS file.
    #[arg(long)]
    export: Option<Builtin>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::usage(format!("output error: {e}"))
    }
}

type Outcome = Result<u8, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Check(a) => check(a, out),
        Command::Normalize(a) => normalize_cmd(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Bench(a) => bench_cmd(a, out),
        Command::Dot(a) => dot(a, out),
        Command::Builtins(a) => builtins(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

enum Loaded {
    Builtin(Builtin),
    File(Trs),
}

impl Loaded {
    fn trs(&self) -> &Trs {
        match self {
            Loaded::Builtin(b) => b.trs(),
            Loaded::File(t) => t,
        }
    }
}

fn load(s: &SystemArgs) -> Result<Loaded, Failure> {
    match (&s.builtin, &s.file) {
        (Some(b), _) => Ok(Loaded::Builtin(*b)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            parse_trs(&text)
                .map(Loaded::File)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(Failure::usage("one of --file or --builtin is required")),
    }
}

fn load_term(trs: &Trs, text: &str) -> Result<Term, Failure> {
    trs.parse_term(text).map_err(|e| Failure::usage(format!("term: {e}")))
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Outcome {
    let loaded = load(&a.system)?;
    let trs = loaded.trs();
    let report = match &a.sigma_prime {
        Some(names) => {
            let names: Vec<&str> = names.iter().map(|n| n.trim()).filter(|n| !n.is_empty()).collect();
            let sp = SigmaPrime::from_names(trs, &names).map_err(|e| Failure::usage(e.to_string()))?;
            check_criterion(trs, &sp).map_err(|e| Failure::usage(e.to_string()))?
        }
        None => infer_with_report(trs).1,
    };
    writeln!(out, "LEFT-LINEAR: {}", yes_no(report.left_linear))?;
    writeln!(out, "ORTHOGONAL: {}", yes_no(report.orthogonal))?;
    for o in &report.overlaps {
        writeln!(out, "OVERLAP {o}")?;
    }
    writeln!(out, "SIGMA' = {}", report.sigma_prime)?;
    for (i, class) in &report.per_rule {
        let rule = &trs.rules()[*i];
        writeln!(out, "RULE {i} {rule}: {class}")?;
        if let RuleClass::Violation(v) = class {
            if let Type2Failure::DefinedSymbolInArgument { defined_at, .. } = &v.type2 {
                if let Some(sub) = rule.rhs().subterm_at(defined_at) {
                    writeln!(out, "  offending subterm {sub} at {defined_at}")?;
                }
            }
        }
    }
    if report.verdict {
        writeln!(out, "CRITERION: HOLDS")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "CRITERION: NOT APPLICABLE")?;
        Ok(EXIT_NEGATIVE)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn normalize_cmd(a: NormalizeArgs, out: &mut dyn Write) -> Outcome {
    let loaded = load(&a.system)?;
    let trs = loaded.trs();
    let t = load_term(trs, &a.term)?;
    let strategy = a.strategy.resolve()?;
    writeln!(out, "START {t}")?;
    match normalize(trs, &t, strategy, a.fuel) {
        Ok(trace) => {
            write!(out, "{trace}")?;
            writeln!(out, "NORMAL FORM {}", trace.last())?;
            writeln!(out, "STEPS {}", trace.len())?;
            Ok(EXIT_OK)
        }
        Err(FuelExhausted { partial }) => {
            write!(out, "{partial}")?;
            writeln!(out, "FUEL EXHAUSTED after {} steps", partial.len())?;
            Ok(EXIT_BUDGET)
        }
    }
}

fn certify(a: CertifyArgs, out: &mut dyn Write) -> Outcome {
    let loaded = load(&a.system)?;
    let trs = loaded.trs();
    let t = load_term(trs, &a.term)?;
    match a.method {
        Method::Graph => certify_graph(trs, &t, a.max_nodes, out),
        Method::Oracle => certify_oracle(trs, &t, a.max_nodes, out),
    }
}

fn certify_graph(trs: &Trs, t: &Term, max_nodes: usize, out: &mut dyn Write) -> Outcome {
    let g = explore(trs, t, max_nodes);
    match certify_uniform_length(&g, trs) {
        Ok(cert) => {
            writeln!(out, "{cert}")?;
            writeln!(out, "NORMAL FORM {}", cert.normal_form)?;
            writeln!(out, "NODES {}", g.node_count())?;
            if let Some((short, long)) = &cert.witness_pair {
                for (name, trace) in [("shortest", short), ("longest", long)] {
                    writeln!(out, "WITNESS {name} {} steps", trace.len())?;
                    write!(out, "{trace}")?;
                }
            }
            Ok(if cert.uniform { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Err(GraphError::Incomplete) => {
            writeln!(out, "INCOMPLETE after {} nodes", g.node_count())?;
            Ok(EXIT_BUDGET)
        }
        Err(GraphError::Cyclic(u)) => {
            writeln!(out, "CYCLIC through {u}")?;
            Ok(EXIT_BUDGET)
        }
        Err(GraphError::MultipleNormalForms(u, v)) => {
            writeln!(out, "MULTIPLE NORMAL FORMS {u} and {v}")?;
            Ok(EXIT_NEGATIVE)
        }
        Err(e @ GraphError::NonBasicRoot(_)) => Err(Failure::usage(e.to_string())),
    }
}

fn certify_oracle(trs: &Trs, t: &Term, max_states: usize, out: &mut dyn Write) -> Outcome {
    let mut oracle = LengthOracle::new(trs, max_states);
    match oracle.solve(t) {
        Ok(summary) => {
            let ks: Vec<String> = summary.lengths.iter().map(|k| k.to_string()).collect();
            if summary.is_uniform() {
                writeln!(out, "UNIFORM {}", ks[0])?;
            } else {
                writeln!(out, "NONUNIFORM {{{}}}", ks.join(","))?;
            }
            writeln!(out, "NORMAL FORM {}", summary.normal_form)?;
            writeln!(out, "STATES {}", oracle.states())?;
            Ok(if summary.is_uniform() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Err(OracleError::Budget(n)) => {
            writeln!(out, "INCOMPLETE after {n} states")?;
            Ok(EXIT_BUDGET)
        }
        Err(OracleError::Cyclic(u)) => {
            writeln!(out, "CYCLIC through {u}")?;
            Ok(EXIT_BUDGET)
        }
        Err(OracleError::MultipleNormalForms(u, v)) => {
            writeln!(out, "MULTIPLE NORMAL FORMS {u} and {v}")?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn bench_cmd(a: BenchArgs, out: &mut dyn Write) -> Outcome {
    let mut rows: Vec<BenchRow> = Vec::new();
    for args in &a.args {
        match bench(a.builtin, &a.op, args, &a.strategies, a.fuel) {
            Ok(r) => rows.extend(r),
            Err(e @ BenchError::FuelExhausted { .. }) => {
                return Err(Failure { code: EXIT_BUDGET, message: e.to_string() })
            }
            Err(e) => return Err(Failure::usage(e.to_string())),
        }
    }
    match a.format {
        Format::Csv => {
            writeln!(out, "{}", BenchRow::CSV_HEADER)?;
            for r in &rows {
                writeln!(out, "{}", r.to_csv())?;
            }
        }
        Format::Text => {
            for r in &rows {
                let args: Vec<String> = r.args.iter().map(|x| x.to_string()).collect();
                writeln!(
                    out,
                    "{} {}({}) {}: {} steps, value {}",
                    r.system,
                    r.op,
                    args.join(","),
                    r.strategy,
                    r.steps,
                    r.value
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn dot(a: DotArgs, out: &mut dyn Write) -> Outcome {
    let loaded = load(&a.system)?;
    let trs = loaded.trs();
    let t = load_term(trs, &a.term)?;
    let g = explore(trs, &t, a.max_nodes);
    write!(out, "{}", to_dot(&g))?;
    Ok(if g.is_complete() { EXIT_OK } else { EXIT_BUDGET })
}

fn builtins(a: BuiltinsArgs, out: &mut dyn Write) -> Outcome {
    if let Some(b) = a.export {
        write!(out, "{}", b.source())?;
        return Ok(EXIT_OK);
    }
    for b in Builtin::ALL {
        let sp = b
            .expected_sigma_prime()
            .map_or_else(|| "none".to_string(), |sp| sp.to_string());
        writeln!(out, "{b}\t{:?}\t{} rules\tsigma' {sp}", b.notation(), b.trs().rules().len())?;
    }
    Ok(EXIT_OK)
}
