use std::fs;
use std::io::{self, Write};
use std::panic;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use embtree::bijection::{phi_inverse_trace, phi_trace, psi_inverse_trace, psi_trace};
use embtree::conditions::check_tree_conditions;
use embtree::formulas::{
    count_binary_profile, count_cayley_complete, count_cayley_in, count_cayley_out, count_cayley_profile,
    count_sary_in, count_sary_out, count_sary_profile, explain_binary_profile, explain_cayley_profile,
    explain_sary_profile, product_of, Factor,
};
use embtree::oracle::EnumerationBudget;
use embtree::sampler::{
    profile_law, sample_batch, sample_embedded_cayley_with, sample_sary_with, sample_sfunction_with, Family,
};
use embtree::types::{CVec, CompleteCounts, InCounts, OutCounts};
use embtree::verify::{self, Scope, Selection};
use embtree::{BigCount, Error, MarkedSTree, Profile, Regime, Result, SFunction, StepSet};

#[derive(Parser)]
#[command(name = "embtree", version, about = "Count, verify and sample trees embedded in the integer line")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact count from the product formulas
    Count(CountArgs),
    /// Cross-check formulas, oracle, bijections and algebraic identities
    Verify(VerifyArgs),
    /// Uniform random trees or functions, one JSON object per line
    Sample(SampleArgs),
    /// Exact law of the vertical profile of a uniform tree
    Law(LawArgs),
    /// Bijections between functions and marked trees
    #[command(subcommand)]
    Bijection(BijectionCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKind {
    Binary,
    Cayley,
    Sary,
}

#[derive(Args)]
struct CountArgs {
    kind: CountKind,
    /// Step set, e.g. "-1,1" or "-2..1"
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<String>,
    /// Profile, e.g. "2;2,1" (counts at negative abscissas before the semicolon)
    #[arg(long, allow_hyphen_values = true)]
    profile: Option<String>,
    /// Out-type census as JSON [[i, s, count], ...]
    #[arg(long, value_name = "JSON")]
    out_types: Option<String>,
    /// In-type census as JSON [[i, [c_m, ..., c_1], count], ...]
    #[arg(long, value_name = "JSON")]
    in_types: Option<String>,
    /// Complete-type census of the non-root vertices as JSON [[i, s, [c_m, ..., c_1], count], ...]
    #[arg(long, value_name = "JSON", requires = "root_in")]
    complete_types: Option<String>,
    /// In-type of the root as JSON [c_m, ..., c_1]
    #[arg(long, value_name = "JSON")]
    root_in: Option<String>,
    /// Print the labeled factors of the product formula
    #[arg(long)]
    explain: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    max_n: u64,
    /// Step set to sweep; repeatable. Defaults to every S in {-2,-1,0,1} containing 1
    #[arg(long, allow_hyphen_values = true)]
    steps: Vec<String>,
    /// Only the pinned regression values
    #[arg(long)]
    regression: bool,
    /// Only the cycle-sum identity sweeps
    #[arg(long)]
    identities: bool,
    /// Bound on |ell| and r for the identity sweeps
    #[arg(long, default_value_t = 4)]
    span: i64,
    /// Random evaluation points per cycle graph
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest size the brute-force enumerators accept
    #[arg(long, env = "EMBTREE_MAX_N", default_value_t = 7)]
    budget: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Cayley,
    Sary,
    Function,
}

#[derive(Args)]
struct SampleArgs {
    kind: SampleKind,
    #[arg(long, allow_hyphen_values = true)]
    steps: String,
    #[arg(long, allow_hyphen_values = true)]
    profile: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of draws
    #[arg(short = 'n', long = "count", default_value_t = 1)]
    count: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawKind {
    Binary,
    Sary,
    Cayley,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct LawArgs {
    kind: LawKind,
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<String>,
    /// Tree size
    #[arg(short = 'n', long = "size")]
    size: u64,
    #[arg(long, value_enum, default_value_t = LawFormat::Csv)]
    format: LawFormat,
    /// Same as --format json
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum BijectionCmd {
    /// Staged trace of the bijection. A function is mapped to its tree, a tree
    /// is mapped back to its function and traced forward from there.
    Trace {
        /// JSON file holding a function or a marked tree
        #[arg(long)]
        input: String,
    },
}

fn parse_steps(s: Option<&str>) -> Result<StepSet> {
    s.ok_or_else(|| Error::Parse("--steps is required".into()))?.parse()
}

fn parse_json<T: serde::de::DeserializeOwned>(flag: &str, s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("{flag}: {e}")))
}

fn emit(out: &mut impl Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::PreconditionViolated(format!("cannot write output: {e}")))
}

fn cmd_count(a: &CountArgs, out: &mut impl Write) -> Result<ExitCode> {
    let steps = match a.kind {
        CountKind::Binary => StepSet::new([-1, 1])?,
        _ => parse_steps(a.steps.as_deref())?,
    };
    let typed = a.out_types.is_some() || a.in_types.is_some() || a.complete_types.is_some();
    if typed && a.explain {
        return Err(Error::Parse("--explain applies to profile counts".into()));
    }
    let mut factors: Vec<Factor> = Vec::new();
    let mut desc = json!({ "kind": kind_name(a.kind), "steps": steps.to_string() });
    let sary = matches!(a.kind, CountKind::Sary | CountKind::Binary);
    let count: BigCount = if let Some(s) = &a.out_types {
        let rows: Vec<(i64, i64, u64)> = parse_json("--out-types", s)?;
        let o: OutCounts = rows.iter().map(|&(i, s, k)| ((i, s), k)).collect();
        desc["out_types"] = json!(rows);
        if sary {
            count_sary_out(&steps, &o)?
        } else {
            count_cayley_out(&steps, &o)?
        }
    } else if let Some(s) = &a.in_types {
        let rows: Vec<(i64, CVec, u64)> = parse_json("--in-types", s)?;
        let inc: InCounts = rows.iter().map(|(i, c, k)| ((*i, c.clone()), *k)).collect();
        desc["in_types"] = json!(rows);
        if sary {
            count_sary_in(&steps, &inc)?
        } else {
            count_cayley_in(&steps, &inc)?
        }
    } else if let Some(s) = &a.complete_types {
        if sary {
            return Err(Error::Parse("complete types are counted for Cayley trees only".into()));
        }
        let rows: Vec<(i64, i64, CVec, u64)> = parse_json("--complete-types", s)?;
        let root: CVec = parse_json("--root-in", a.root_in.as_deref().unwrap_or("[]"))?;
        let cc: CompleteCounts = rows.iter().map(|(i, s, c, k)| ((*i, *s, c.clone()), *k)).collect();
        desc["complete_types"] = json!(rows);
        desc["root_in"] = json!(root);
        count_cayley_complete(&steps, &root, &cc)?
    } else {
        let p: Profile = a.profile.as_deref().ok_or_else(|| Error::Parse("--profile is required".into()))?.parse()?;
        desc["profile"] = json!(p.to_string());
        if a.explain {
            factors = match a.kind {
                CountKind::Binary => explain_binary_profile(&p)?,
                CountKind::Cayley => explain_cayley_profile(&steps, &p)?,
                CountKind::Sary => explain_sary_profile(&steps, &p)?,
            };
            product_of(&factors, "explained count")?
        } else {
            match a.kind {
                CountKind::Binary => count_binary_profile(&p)?,
                CountKind::Cayley => count_cayley_profile(&steps, &p)?,
                CountKind::Sary => count_sary_profile(&steps, &p)?,
            }
        }
    };
    if a.json {
        desc["count"] = json!(count.to_string());
        if a.explain {
            desc["factors"] = serde_json::to_value(&factors).expect("factors serialize");
        }
        emit(out, &desc.to_string())?;
    } else {
        for f in &factors {
            emit(out, &f.to_string())?;
        }
        emit(out, &count.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(k: CountKind) -> &'static str {
    match k {
        CountKind::Binary => "binary",
        CountKind::Cayley => "cayley",
        CountKind::Sary => "sary",
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> Result<ExitCode> {
    let step_sets = if a.steps.is_empty() {
        verify::standard_step_sets()
    } else {
        a.steps.iter().map(|s| s.parse()).collect::<Result<Vec<StepSet>>>()?
    };
    let scope = Scope {
        max_n: a.max_n,
        step_sets,
        span: a.span,
        points: a.points,
        seed: a.seed,
        budget: EnumerationBudget::with_max_size(a.budget),
    };
    let sel = if a.regression || a.identities {
        Selection { regressions: a.regression, identities: a.identities, ..Selection::none() }
    } else {
        Selection::all()
    };
    let report = verify::run(&scope, sel)?;
    if a.json {
        emit(out, &report.to_json_value().to_string())?;
    } else {
        emit(out, &report.to_string())?;
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sample(a: &SampleArgs, out: &mut impl Write) -> Result<ExitCode> {
    let steps: StepSet = a.steps.parse()?;
    let p: Profile = a.profile.parse()?;
    let lines: Vec<String> = match a.kind {
        SampleKind::Cayley => sample_batch(a.seed, a.count, |rng| sample_embedded_cayley_with(&steps, &p, rng).map(|t| t.to_json()))?,
        SampleKind::Sary => sample_batch(a.seed, a.count, |rng| sample_sary_with(&steps, &p, rng).map(|t| t.to_json()))?,
        SampleKind::Function => {
            let regime = Regime::of(&p);
            sample_batch(a.seed, a.count, |rng| sample_sfunction_with(&steps, &p, regime, rng).map(|f| f.to_json()))?
        }
    };
    for l in lines {
        emit(out, &l)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_law(a: &LawArgs, out: &mut impl Write) -> Result<ExitCode> {
    let family = match a.kind {
        LawKind::Binary => Family::Binary,
        LawKind::Sary => Family::Sary(parse_steps(a.steps.as_deref())?),
        LawKind::Cayley => Family::Cayley(parse_steps(a.steps.as_deref())?),
    };
    let law = profile_law(a.size, family)?;
    if a.json || a.format == LawFormat::Json {
        emit(out, &law.to_json_value().to_string())?;
    } else {
        write!(out, "{}", law.to_csv()).map_err(|e| Error::PreconditionViolated(format!("cannot write output: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_trace(input: &str, out: &mut impl Write) -> Result<ExitCode> {
    let text = fs::read_to_string(input).map_err(|e| Error::Parse(format!("cannot read {input}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{input}: {e}")))?;
    let (direction, trace) = if v.get("image").is_some() {
        let f = SFunction::from_json_value(&v)?;
        let t = match Regime::of(f.profile()) {
            Regime::Nonneg => serde_json::to_value(phi_trace(&f)?),
            Regime::General => serde_json::to_value(psi_trace(&f)?),
        };
        ("forward", t)
    } else {
        let t = MarkedSTree::from_json_value(&v)?;
        let tr = match Regime::of(t.profile()) {
            Regime::Nonneg => serde_json::to_value(phi_inverse_trace(&t)?),
            Regime::General => serde_json::to_value(psi_inverse_trace(&t)?),
        };
        ("inverse", tr)
    };
    let trace = trace.map_err(|e| Error::PreconditionViolated(format!("trace does not serialize: {e}")))?;
    let tree = MarkedSTree::from_json_value(&trace["tree"])?;
    let report = check_tree_conditions(&tree, Regime::of(tree.profile()))?;
    let doc = json!({
        "direction": direction,
        "trace": trace,
        "conditions": { "t1": report.t1, "t2_prime": report.t2_prime, "t2_double": report.t2_double },
    });
    emit(out, &serde_json::to_string_pretty(&doc).expect("json"))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Command::Count(a) => cmd_count(&a, &mut out),
        Command::Verify(a) => cmd_verify(&a, &mut out),
        Command::Sample(a) => cmd_sample(&a, &mut out),
        Command::Law(a) => cmd_law(&a, &mut out),
        Command::Bijection(BijectionCmd::Trace { input }) => cmd_trace(&input, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(1),
    }
}
