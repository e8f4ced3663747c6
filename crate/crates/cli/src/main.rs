//! Batch command-line interface over the library: model checking, exact
//! term evaluation, joint-distribution printing, bounded satisfiability and
//! validity, formula transforms, SMT-LIB export, and classification.
//!
//! Exit codes are part of the interface:
//!   0  true / SAT / valid-within-bounds
//!   1  false / UNSAT-within-bounds / counterexample found
//!   2  undefined / unknown / resource limits
//!   64 usage error
//!   65 formula or term parse error
//!   66 model, table, or DAG file invalid

use clap::{Args, Parser, Subcommand, ValueEnum};
use pchsat_core::eval::{
    eval_formula, eval_formula_bn, term_value, term_value_bn, EvalError, EvalOptions, EvalOutcome,
    Verdict,
};
use pchsat_core::io::{self, ModelFile};
use pchsat_core::lang::{parse_formula, parse_term, Formula, LangContext, Term};
use pchsat_core::model::{Dag, Domain, JointTable, Scm};
use pchsat_core::rational::{format_decimal, format_rational};
use pchsat_core::solve::{
    export_smtlib, solve_sat, solve_validity_bounded, Backend, ExportMode, SatResult, SatVerdict,
    SolveConfig, SolveError,
};
use pchsat_core::transform::{
    do_calculus_rule3, encode_causal_ordering, encode_dag_constraint_l3, expand_sums,
    reduce_to_complete_dag, CausalOrdering, TransformError,
};
use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "pchsat",
    about = "Exact probabilistic and causal model checking and bounded satisfiability",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula against a model file (SCM, BN, or joint table)
    Check(CheckArgs),
    /// Evaluate a term against a model file, printing exact and decimal values
    Eval(EvalArgs),
    /// Print the joint distribution of a model, optionally post-interventional
    Joint(JointArgs),
    /// Bounded-model satisfiability search
    Solve(SolveArgs),
    /// Bounded-model validity: search for a counterexample
    Validity(SolveArgs),
    /// Apply a formula transform
    Transform(TransformArgs),
    /// Emit an SMT-LIB 2 encoding
    Export(ExportArgs),
    /// Classify a formula (layer, arithmetic, operators)
    Info(InfoArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Model file (JSON); `-` reads standard input
    #[arg(long)]
    model: String,
    /// Formula file; `-` reads standard input
    #[arg(long)]
    formula: String,
    /// Summand budget for `sum` expansion during evaluation
    #[arg(long, default_value_t = 1_000_000)]
    sum_budget: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: String,
    /// Term file; `-` reads standard input
    #[arg(long)]
    term: String,
    #[arg(long, default_value_t = 1_000_000)]
    sum_budget: usize,
}

#[derive(Args)]
struct JointArgs {
    #[arg(long)]
    model: String,
    /// Interventions `X=1,Y=0`; intervened variables are summed out of the
    /// printed table
    #[arg(long = "do", value_name = "ASSIGNMENTS")]
    interventions: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    formula: String,
    /// Declared endogenous variables, comma separated
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    /// Shared domain cardinality
    #[arg(long, default_value_t = 2)]
    c: u32,
    /// Support-size bound (required; the search space is relative to it)
    #[arg(long)]
    p: usize,
    /// DAG constraint file
    #[arg(long)]
    dag: Option<String>,
    /// Causal ordering, comma separated (equivalent to its complete DAG)
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    /// Restrict to product-form (Markovian) exogenous support
    #[arg(long)]
    markovian: bool,
    /// Worker threads for the candidate scan
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Where to write the witness (or counterexample) on success
    #[arg(long, default_value = "witness.json")]
    witness: String,
    #[arg(long, default_value_t = 1_000_000)]
    sum_budget: usize,
    /// Cap on candidate structures examined
    #[arg(long, default_value_t = 1_000_000)]
    max_structures: u64,
    /// Pivot budget per LP call
    #[arg(long, default_value_t = 100_000)]
    max_lp_pivots: usize,
    /// Wall-clock budget in seconds
    #[arg(long)]
    time_budget: Option<u64>,
    /// Seed for reproducibility; the bounded search is deterministic, so
    /// this is recorded but has no effect on results
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print search statistics to standard error
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    LinearExact,
    PolyNaive,
    PolyExport,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::LinearExact => Backend::LinearExact,
            BackendArg::PolyNaive => Backend::PolyNaive,
            BackendArg::PolyExport => Backend::PolyExport,
        }
    }
}

#[derive(Args)]
struct TransformArgs {
    /// One of: expand-sums, complete-dag, causal-ordering, dag-l3,
    /// docalc-rule3
    #[arg(long)]
    name: String,
    /// Formula file (expand-sums, complete-dag, causal-ordering)
    #[arg(long)]
    formula: Option<String>,
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    #[arg(long, default_value_t = 2)]
    c: u32,
    /// Ordering for causal-ordering, comma separated
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    /// DAG file for dag-l3
    #[arg(long)]
    dag: Option<String>,
    /// Where to write the emitted DAG of complete-dag (default: stderr)
    #[arg(long)]
    dag_out: Option<String>,
    /// Node budget for expand-sums
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    #[arg(long, default_value_t = 2)]
    c: u32,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Support bound for per-structure mode
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long)]
    dag: Option<String>,
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    /// Cap on emitted per-structure problems
    #[arg(long, default_value_t = 10_000)]
    max_structures: u64,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    sum_budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    JointTable,
    PerStructure,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    #[arg(long, default_value_t = 2)]
    c: u32,
}

// ── error-to-exit-code plumbing ───────────────────────────────────────

enum Failure {
    Usage(String),
    FormulaParse(String),
    ModelFile(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::FormulaParse(_) => 65,
            Failure::ModelFile(_) => 66,
            Failure::Limit(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::FormulaParse(m) | Failure::ModelFile(m)
            | Failure::Limit(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        match e {
            SolveError::Config(_) => Failure::Usage(e.to_string()),
            SolveError::Transform(TransformError::BudgetExceeded { .. })
            | SolveError::TooLarge => Failure::Limit(e.to_string()),
            other => Failure::Limit(other.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Failure {
        match e {
            TransformError::BudgetExceeded { .. } => Failure::Limit(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::InterventionalOnBn { .. } => Failure::Usage(e.to_string()),
            other => Failure::Limit(other.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))
}

fn load_model(path: &str) -> Result<ModelFile, Failure> {
    let text = if path == "-" {
        read_input(path)?
    } else {
        fs::read_to_string(path).map_err(|e| Failure::ModelFile(format!("reading {path}: {e}")))?
    };
    io::parse_model(&text).map_err(|e| Failure::ModelFile(e.to_string()))
}

fn load_dag(path: &str) -> Result<Dag, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::ModelFile(format!("reading {path}: {e}")))?;
    io::parse_dag(&text).map_err(|e| Failure::ModelFile(e.to_string()))
}

fn context_for(model: &ModelFile) -> Result<LangContext, Failure> {
    let (vars, domain) = match model {
        ModelFile::Scm(m) => (m.vars().to_vec(), m.domain()),
        ModelFile::Bn(b) => (b.dag().vars().to_vec(), b.domain()),
        ModelFile::Joint(t) => (t.vars().to_vec(), t.domain()),
    };
    LangContext::new(vars, domain).map_err(|e| Failure::ModelFile(e.to_string()))
}

fn context_from_flags(vars: &[String], c: u32) -> Result<LangContext, Failure> {
    if vars.is_empty() {
        return Err(Failure::Usage("--vars must declare at least one variable".into()));
    }
    let domain = Domain::new(c).map_err(|e| Failure::Usage(e.to_string()))?;
    LangContext::new(vars.to_vec(), domain).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_formula_input(path: &str, ctx: &LangContext) -> Result<Formula, Failure> {
    let text = read_input(path)?;
    parse_formula(&text, ctx).map_err(|e| Failure::FormulaParse(e.to_string()))
}

fn parse_term_input(path: &str, ctx: &LangContext) -> Result<Term, Failure> {
    let text = read_input(path)?;
    parse_term(&text, ctx).map_err(|e| Failure::FormulaParse(e.to_string()))
}

fn parse_assignments(text: &str, ctx: &LangContext) -> Result<Vec<(String, u32)>, Failure> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let Some((var, value)) = part.split_once('=') else {
            return Err(Failure::Usage(format!(
                "intervention `{part}` is not of the form VAR=VALUE"
            )));
        };
        let var = var.trim().to_string();
        if !ctx.declares(&var) {
            return Err(Failure::Usage(format!("unknown variable `{var}` in --do")));
        }
        let value: u32 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad value in `{part}`")))?;
        if !ctx.domain().contains(value) {
            return Err(Failure::Usage(format!(
                "value {value} is outside the domain {{0..{}}}",
                ctx.domain().cardinality()
            )));
        }
        out.push((var, value));
    }
    Ok(out)
}

// ── commands ──────────────────────────────────────────────────────────

fn run_check(args: &CheckArgs) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let ctx = context_for(&model)?;
    let formula = parse_formula_input(&args.formula, &ctx)?;
    let opts = EvalOptions {
        sum_budget: args.sum_budget,
    };
    let verdict = match &model {
        ModelFile::Scm(m) => eval_formula(m, &formula, &opts)?,
        ModelFile::Bn(b) => eval_formula_bn(b, &formula, &opts)?,
        ModelFile::Joint(t) => eval_formula(&t.lift_to_scm(), &formula, &opts)?,
    };
    Ok(match verdict {
        Verdict::True => {
            println!("true");
            0
        }
        Verdict::False => {
            println!("false");
            1
        }
        Verdict::Undefined(u) => {
            println!("undefined: condition {} has probability zero", u.condition);
            2
        }
    })
}

fn run_eval(args: &EvalArgs) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let ctx = context_for(&model)?;
    let term = parse_term_input(&args.term, &ctx)?;
    let opts = EvalOptions {
        sum_budget: args.sum_budget,
    };
    let outcome = match &model {
        ModelFile::Scm(m) => term_value(m, &term, &opts)?,
        ModelFile::Bn(b) => term_value_bn(b, &term, &opts)?,
        ModelFile::Joint(t) => term_value(&t.lift_to_scm(), &term, &opts)?,
    };
    Ok(match outcome {
        EvalOutcome::Value(v) => {
            println!("{} (~ {})", format_rational(&v), format_decimal(&v, 6));
            0
        }
        EvalOutcome::Undefined(u) => {
            println!("undefined: condition {} has probability zero", u.condition);
            2
        }
    })
}

fn print_table(jt: &JointTable) {
    println!("# {}  probability", jt.vars().join(" "));
    let c = jt.domain().cardinality();
    let n = jt.vars().len();
    let mut assignment = vec![0u32; n];
    loop {
        let p = jt.prob(&assignment);
        let cells: Vec<String> = assignment.iter().map(|v| v.to_string()).collect();
        println!(
            "{}  {}  {}",
            cells.join(" "),
            format_rational(&p),
            format_decimal(&p, 6)
        );
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            assignment[k] += 1;
            if assignment[k] < c {
                break;
            }
            assignment[k] = 0;
        }
    }
}

fn run_joint(args: &JointArgs) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let ctx = context_for(&model)?;
    let table = match (&model, &args.interventions) {
        (ModelFile::Scm(m), None) => m.joint_distribution(),
        (ModelFile::Scm(m), Some(text)) => {
            let ints = parse_assignments(text, &ctx)?;
            let forced = m
                .intervene(&ints)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let away: Vec<String> = ints.iter().map(|(v, _)| v.clone()).collect();
            forced
                .joint_distribution()
                .marginalize_away(&away)
                .map_err(|e| Failure::Usage(e.to_string()))?
        }
        (ModelFile::Bn(b), None) => b.joint_distribution(),
        (ModelFile::Joint(t), None) => t.clone(),
        (_, Some(_)) => {
            return Err(Failure::Usage(
                "--do requires a structural model (type \"scm\")".into(),
            ))
        }
    };
    print_table(&table);
    Ok(0)
}

fn build_solve_config(args: &SolveArgs) -> Result<(SolveConfig, LangContext), Failure> {
    let ctx = context_from_flags(&args.vars, args.c)?;
    let mut cfg = SolveConfig::new(args.vars.clone(), ctx.domain(), args.p);
    cfg.backend = args.backend.into();
    cfg.markovian = args.markovian;
    cfg.jobs = args.jobs.max(1);
    cfg.sum_budget = args.sum_budget;
    cfg.limits.max_structures = args.max_structures;
    cfg.limits.max_lp_pivots = args.max_lp_pivots;
    cfg.limits.time_budget = args.time_budget.map(Duration::from_secs);
    if let Some(path) = &args.dag {
        cfg.dag = Some(load_dag(path)?);
    }
    if let Some(ord) = &args.ordering {
        cfg.ordering =
            Some(CausalOrdering::new(ord.clone()).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    cfg.check().map_err(Failure::from)?;
    Ok((cfg, ctx))
}

fn report_stats(result: &SatResult, wanted: bool) {
    if wanted {
        eprintln!(
            "stats: structures examined = {}, lp calls = {}, elapsed = {:?}",
            result.stats.structures_examined, result.stats.lp_calls, result.stats.elapsed
        );
    }
}

fn write_witness(path: &str, witness: &Scm) -> Result<(), Failure> {
    fs::write(path, io::scm_to_json(witness))
        .map_err(|e| Failure::Usage(format!("writing {path}: {e}")))
}

fn run_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let (cfg, ctx) = build_solve_config(args)?;
    let formula = parse_formula_input(&args.formula, &ctx)?;
    let result = solve_sat(&formula, &cfg)?;
    report_stats(&result, args.stats);
    Ok(match result.verdict {
        SatVerdict::Sat(witness) => {
            write_witness(&args.witness, &witness)?;
            println!("SAT (witness written to {})", args.witness);
            0
        }
        SatVerdict::UnsatWithinBounds => {
            println!("UNSAT within bounds (support <= {}, configured class)", args.p);
            1
        }
        SatVerdict::Unknown(reason) => {
            println!("UNKNOWN: {reason}");
            2
        }
    })
}

fn run_validity(args: &SolveArgs) -> Result<u8, Failure> {
    let (cfg, ctx) = build_solve_config(args)?;
    let formula = parse_formula_input(&args.formula, &ctx)?;
    let result = solve_validity_bounded(&formula, &cfg)?;
    report_stats(&result, args.stats);
    Ok(match result.verdict {
        SatVerdict::Sat(counterexample) => {
            write_witness(&args.witness, &counterexample)?;
            println!("not valid: counterexample written to {}", args.witness);
            1
        }
        SatVerdict::UnsatWithinBounds => {
            println!("valid within bounds (support <= {}, configured class)", args.p);
            0
        }
        SatVerdict::Unknown(reason) => {
            println!("UNKNOWN: {reason}");
            2
        }
    })
}

fn run_transform(args: &TransformArgs) -> Result<u8, Failure> {
    match args.name.as_str() {
        "expand-sums" => {
            let ctx = context_from_flags(&args.vars, args.c)?;
            let formula = formula_arg(args, &ctx)?;
            let out = expand_sums(&formula, ctx.domain(), args.budget)?;
            println!("{out}");
        }
        "complete-dag" => {
            let ctx = context_from_flags(&args.vars, args.c)?;
            let formula = formula_arg(args, &ctx)?;
            let (same, dag) = reduce_to_complete_dag(&formula, ctx.vars())?;
            println!("{same}");
            let dag_json = io::dag_to_json(&dag);
            match &args.dag_out {
                Some(path) => fs::write(path, dag_json)
                    .map_err(|e| Failure::Usage(format!("writing {path}: {e}")))?,
                None => eprint!("{dag_json}"),
            }
        }
        "causal-ordering" => {
            let ctx = context_from_flags(&args.vars, args.c)?;
            let formula = formula_arg(args, &ctx)?;
            let Some(ord) = &args.ordering else {
                return Err(Failure::Usage("causal-ordering needs --ordering".into()));
            };
            let ord =
                CausalOrdering::new(ord.clone()).map_err(|e| Failure::Usage(e.to_string()))?;
            let enc = encode_causal_ordering(&formula, &ord, ctx.domain())?;
            println!("# vars: {}", enc.vars.join(","));
            println!("{}", enc.formula);
        }
        "dag-l3" => {
            let Some(path) = &args.dag else {
                return Err(Failure::Usage("dag-l3 needs --dag".into()));
            };
            let dag = load_dag(path)?;
            let domain = Domain::new(args.c).map_err(|e| Failure::Usage(e.to_string()))?;
            let out = encode_dag_constraint_l3(&dag, domain);
            println!("# vars: {}", dag.vars().join(","));
            println!("{out}");
        }
        "docalc-rule3" => {
            if args.vars.len() != 4 {
                return Err(Failure::Usage(
                    "docalc-rule3 needs exactly four variables in --vars".into(),
                ));
            }
            let ctx = context_from_flags(&args.vars, args.c)?;
            let out = do_calculus_rule3(
                &args.vars[0],
                &args.vars[1],
                &args.vars[2],
                &args.vars[3],
                ctx.domain(),
            )?;
            println!("# vars: {}", args.vars.join(","));
            println!("{out}");
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown transform `{other}` (expected expand-sums, complete-dag, causal-ordering, dag-l3, or docalc-rule3)"
            )))
        }
    }
    Ok(0)
}

fn formula_arg(args: &TransformArgs, ctx: &LangContext) -> Result<Formula, Failure> {
    let Some(path) = &args.formula else {
        return Err(Failure::Usage(format!("{} needs --formula", args.name)));
    };
    parse_formula_input(path, ctx)
}

fn run_export(args: &ExportArgs) -> Result<u8, Failure> {
    let ctx = context_from_flags(&args.vars, args.c)?;
    let formula = parse_formula_input(&args.formula, &ctx)?;
    let mut cfg = SolveConfig::new(args.vars.clone(), ctx.domain(), args.p);
    cfg.sum_budget = args.sum_budget;
    cfg.limits.max_structures = args.max_structures;
    if let Some(path) = &args.dag {
        cfg.dag = Some(load_dag(path)?);
    }
    if let Some(ord) = &args.ordering {
        cfg.ordering =
            Some(CausalOrdering::new(ord.clone()).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let mode = match args.mode {
        ModeArg::JointTable => ExportMode::JointTable,
        ModeArg::PerStructure => ExportMode::PerStructure,
    };
    let text = export_smtlib(&formula, &cfg, mode)?;
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("writing {path}: {e}")))?
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_info(args: &InfoArgs) -> Result<u8, Failure> {
    let ctx = context_from_flags(&args.vars, args.c)?;
    let formula = parse_formula_input(&args.formula, &ctx)?;
    let c = formula.classify();
    println!("layer: {}", c.layer);
    println!("arithmetic: {}", c.arithmetic.as_str());
    println!("uses_sum: {}", c.uses_sum);
    println!("uses_cond: {}", c.uses_cond);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendered help/version on stdout semantics
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(64)
            };
        }
    };
    let outcome = match &cli.command {
        Command::Check(a) => run_check(a),
        Command::Eval(a) => run_eval(a),
        Command::Joint(a) => run_joint(a),
        Command::Solve(a) => run_solve(a),
        Command::Validity(a) => run_validity(a),
        Command::Transform(a) => run_transform(a),
        Command::Export(a) => run_export(a),
        Command::Info(a) => run_info(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
