//! The `msp` command line. [`run`] parses arguments, does the work and
//! returns the process exit code: 0 on success, 1 when a requested check
//! fails, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use msp_core::algorithms::{Algorithm, RunConfig};
use msp_core::analytics::{
    a_laminar, basic_bound, best_p, c_uniform, forbidden_bound, forbidden_optimum,
    generation_bound, graphic_mixture_bound, optimize_mixture, rank2_mixture_bound, MixtureTarget,
};
use msp_core::arrival::{AugmentMode, AugmentOptions};
use msp_core::harness::{distribution_tests, estimate, exact_oracle, DistConfig, EstimateConfig};
use msp_core::instance_gen::{Family, GeneratorSpec};
use msp_core::labeling::{verify_implication, Language, Pairing, SchemeKind, VerifyConfig, VerifyReport};
use msp_core::{Error, MatroidInstance};

/// Significant digits kept in printed floats.
pub const SIG_DIGITS: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "msp", version, about = "Matroid secretary simulation and verification")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the payload to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "MSP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo selection frequencies of the optimal elements.
    Simulate(SimulateArgs),
    /// Evaluate a closed-form bound.
    Analytic(AnalyticArgs),
    /// Maximize a bound over its parameters.
    Optimize(OptimizeArgs),
    /// Write the tight laminar instance.
    Tight(TightArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Check a word-language implication on paired trials.
    Verify(VerifyArgs),
    /// Exact selection probabilities by enumeration (n <= 8).
    Oracle(OracleArgs),
    /// Goodness-of-fit tests for the improving process.
    TestDist(TestDistArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    p: f64,
    /// Mixture bias.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = parse_mode, default_value = "auto")]
    augment: AugmentMode,
    /// Exit 1 unless the upper end of the smallest frequency's confidence
    /// interval reaches this value.
    #[arg(long)]
    min_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Formula {
    /// Greedy on uniform matroids.
    C,
    /// Greedy on laminar matroids.
    A,
    Basic,
    Generation,
    Rank2Mixture,
    GraphicMixture,
    Forbidden,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Uniform,
    Laminar,
    Basic,
    Generation,
    Rank2Mixture,
    GraphicMixture,
    GraphicAboveThreshold,
    Forbidden,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    target: Target,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args, Debug)]
struct TightArgs {
    #[arg(long)]
    q: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    TightLaminar,
    Uniform,
    Laminar,
    Rank2,
    Graph,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    branching: Option<usize>,
    /// Comma-separated class sizes.
    #[arg(long, value_delimiter = ',')]
    class_sizes: Vec<usize>,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    simple: bool,
    #[arg(long, default_value_t = 0.0)]
    parallel_bias: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long)]
    language: String,
    /// The optimal element to track; all of `OPT(E)` when absent.
    #[arg(long)]
    star: Option<usize>,
    #[arg(long)]
    p: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = parse_mode, default_value = "auto")]
    augment: AugmentMode,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, value_parser = parse_mode, default_value = "pinned")]
    augment: AugmentMode,
}

#[derive(Args, Debug)]
struct TestDistArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Truncation point of the augmentation.
    #[arg(long, default_value_t = 0.05)]
    trunc: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

fn parse_mode(s: &str) -> Result<AugmentMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::Refused(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

/// A command's result: the payload, its CSV rendering, and whether a
/// requested check failed.
struct Output {
    json: Value,
    csv: Option<String>,
    check_failed: bool,
}

impl Output {
    fn new(json: Value) -> Self {
        Output {
            json,
            csv: None,
            check_failed: false,
        }
    }
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => round_sig(x).to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// One header row and one value row from the scalar fields of an object.
fn flat_csv(v: &Value) -> String {
    let Some(obj) = v.as_object() else {
        return format!("value\n{}\n", cell(v));
    };
    let fields: Vec<(&String, &Value)> = obj
        .iter()
        .filter(|(_, x)| !x.is_object() && !x.is_array())
        .collect();
    let head: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<String> = fields.iter().map(|(_, x)| cell(x)).collect();
    format!("{}\n{}\n", head.join(","), row.join(","))
}

fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn load_instance(path: &Path) -> Result<MatroidInstance, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read instance {}: {e}", path.display())))?;
    let inst: MatroidInstance = serde_json::from_str(&text)
        .map_err(|e| usage(format!("bad instance {}: {e}", path.display())))?;
    let issues = inst.validate();
    if !issues.is_empty() {
        let list: Vec<String> = issues.iter().map(ToString::to_string).collect();
        return Err(usage(format!("invalid instance: {}", list.join("; "))));
    }
    Ok(inst)
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required for {what}")))
}

fn simulate(a: &SimulateArgs) -> Result<Output, Failure> {
    let inst = load_instance(&a.instance)?;
    let run = RunConfig::mixture(a.p, a.eps);
    let mut cfg = EstimateConfig::new(a.algorithm, run, a.trials, a.seed);
    cfg.augment = AugmentOptions::mode(a.augment, a.p);
    let rep = estimate(&inst, &cfg)?;
    let check_failed = a.min_bound.is_some_and(|b| rep.min.ci_hi < b);
    let mut json = to_value(&rep);
    json["instance"] = json!(a.instance.display().to_string());
    if let Some(b) = a.min_bound {
        json["min_bound"] = json!(b);
        json["bound_covered"] = json!(!check_failed);
    }
    let rows = rep.per_element.iter().map(|e| {
        vec![
            e.element_id.to_string(),
            e.hits.to_string(),
            e.trials.to_string(),
            round_sig(e.freq).to_string(),
            round_sig(e.ci_lo).to_string(),
            round_sig(e.ci_hi).to_string(),
        ]
    });
    Ok(Output {
        json,
        csv: Some(table_csv(
            &["element_id", "hits", "trials", "freq", "ci_lo", "ci_hi"],
            rows,
        )),
        check_failed,
    })
}

fn analytic(a: &AnalyticArgs) -> Result<Output, Failure> {
    let what = "this formula";
    let value = match a.formula {
        Formula::C => c_uniform(need(a.r, "r", what)?, a.p)?,
        Formula::A => a_laminar(need(a.r, "r", what)?, a.p)?,
        Formula::Basic => basic_bound(a.p)?,
        Formula::Generation => generation_bound(a.p)?,
        Formula::Rank2Mixture => rank2_mixture_bound(a.p, need(a.eps, "eps", what)?)?,
        Formula::GraphicMixture => graphic_mixture_bound(a.p, need(a.eps, "eps", what)?)?,
        Formula::Forbidden => forbidden_bound(need(a.q, "q", what)?, a.p)?,
    };
    let formula = Formula::value_variants()
        .iter()
        .find(|f| **f == a.formula)
        .and_then(|f| f.to_possible_value())
        .map(|v| v.get_name().to_string());
    let mut json = json!({ "formula": formula, "p": a.p, "value": value });
    for (k, v) in [("r", a.r), ("q", a.q)] {
        if let Some(v) = v {
            json[k] = json!(v);
        }
    }
    if let Some(e) = a.eps {
        json["eps"] = json!(e);
    }
    Ok(Output::new(json))
}

fn optimize(a: &OptimizeArgs) -> Result<Output, Failure> {
    let what = "this target";
    let (p, q, eps, value) = match a.target {
        Target::Uniform => {
            let r = need(a.r, "r", what)?;
            let (p, v) = best_p(|p| c_uniform(r, p))?;
            (p, None, None, v)
        }
        Target::Laminar => {
            let r = need(a.r, "r", what)?;
            let (p, v) = best_p(|p| a_laminar(r, p))?;
            (p, None, None, v)
        }
        Target::Basic => {
            let (p, v) = best_p(basic_bound)?;
            (p, None, None, v)
        }
        Target::Generation => {
            let (p, v) = best_p(generation_bound)?;
            (p, None, None, v)
        }
        Target::Forbidden => {
            let (p, v) = forbidden_optimum(need(a.q, "q", what)?)?;
            (p, None, None, v)
        }
        Target::Rank2Mixture | Target::GraphicMixture | Target::GraphicAboveThreshold => {
            let t = match a.target {
                Target::Rank2Mixture => MixtureTarget::Rank2,
                Target::GraphicMixture => MixtureTarget::Graphic,
                _ => MixtureTarget::GraphicAboveThreshold,
            };
            let m = optimize_mixture(t)?;
            (m.p, m.q, Some(m.epsilon), m.value)
        }
    };
    let mut json = json!({ "p": p, "value": value });
    if let Some(q) = q {
        json["q"] = json!(q);
    }
    if let Some(e) = eps {
        json["eps"] = json!(e);
    }
    let target = a.target.to_possible_value().map(|v| v.get_name().to_string());
    json["target"] = json!(target);
    if let Some(r) = a.r {
        json["r"] = json!(r);
    }
    Ok(Output::new(json))
}

fn instance_output(inst: &MatroidInstance) -> Output {
    Output::new(to_value(inst))
}

fn tight(a: &TightArgs) -> Result<Output, Failure> {
    let spec = GeneratorSpec {
        family: Family::TightLaminar { q: a.q, r: a.r },
        seed: a.seed,
    };
    Ok(instance_output(&spec.generate()?))
}

fn gen(a: &GenArgs) -> Result<Output, Failure> {
    let what = "this family";
    let family = match a.family {
        FamilyName::TightLaminar => Family::TightLaminar {
            q: need(a.q, "q", what)?,
            r: need(a.r, "r", what)?,
        },
        FamilyName::Uniform => Family::Uniform {
            n: need(a.n, "n", what)?,
            r: need(a.r, "r", what)?,
        },
        FamilyName::Laminar => Family::RandomLaminar {
            n: need(a.n, "n", what)?,
            depth: need(a.depth, "depth", what)?,
            branching: need(a.branching, "branching", what)?,
        },
        FamilyName::Rank2 => {
            if a.class_sizes.is_empty() {
                return Err(usage("--class-sizes is required for rank2"));
            }
            Family::Rank2 {
                class_sizes: a.class_sizes.clone(),
            }
        }
        FamilyName::Graph => Family::Graph {
            vertices: need(a.vertices, "vertices", what)?,
            edges: need(a.edges, "edges", what)?,
            simple: a.simple,
            parallel_bias: a.parallel_bias,
        },
    };
    let spec = GeneratorSpec {
        family,
        seed: a.seed,
    };
    Ok(instance_output(&spec.generate()?))
}

fn verify(a: &VerifyArgs) -> Result<Output, Failure> {
    let inst = load_instance(&a.instance)?;
    let lang = Language::parse(&a.language, inst.rank(), 0)?;
    let pairing = Pairing::resolve(a.algorithm, a.scheme, lang)?;
    let opt = inst.opt();
    let stars: Vec<usize> = match a.star {
        Some(s) if opt.contains(s) => vec![s],
        Some(s) => return Err(usage(format!("element {s} is not in OPT(E)"))),
        None => opt.iter().collect(),
    };
    let mut cfg = VerifyConfig::new(a.trials, a.p, a.seed);
    cfg.augment = AugmentOptions::mode(a.augment, a.p);
    let mut per_star = Vec::new();
    let mut bad = 0;
    for (i, &star) in stars.iter().enumerate() {
        let cfg = VerifyConfig {
            seed: a.seed.wrapping_add(i as u64),
            ..cfg
        };
        let rep: VerifyReport = verify_implication(&inst, pairing, star, &cfg)?;
        bad += rep.violations + rep.converse_violations.unwrap_or(0) + rep.label_violations;
        let mut v = to_value(rep);
        v["star"] = json!(star);
        per_star.push(v);
    }
    let csv = table_csv(
        &[
            "star",
            "trials",
            "violations",
            "converse_violations",
            "label_violations",
            "word_in_lang",
            "selected",
        ],
        per_star.iter().map(|v| {
            [
                "star",
                "trials",
                "violations",
                "converse_violations",
                "label_violations",
                "word_in_lang",
                "selected",
            ]
            .iter()
            .map(|k| cell(&v[*k]))
            .collect()
        }),
    );
    let json = json!({
        "config": {
            "instance": a.instance.display().to_string(),
            "pairing": pairing,
            "algorithm": a.algorithm,
            "scheme": a.scheme,
            "language": lang,
            "p": a.p,
            "trials": a.trials,
            "seed": a.seed,
            "augmentation": a.augment,
        },
        "per_star": per_star,
        "total_violations": bad,
        "passed": bad == 0,
    });
    Ok(Output {
        json,
        csv: Some(csv),
        check_failed: bad > 0,
    })
}

fn oracle(a: &OracleArgs) -> Result<Output, Failure> {
    let inst = load_instance(&a.instance)?;
    let cfg = RunConfig::mixture(a.p, a.eps);
    let res = exact_oracle(&inst, a.algorithm, &cfg, a.augment)?;
    let csv = table_csv(
        &["element_id", "probability"],
        res.per_element
            .iter()
            .map(|s| vec![s.element_id.to_string(), round_sig(s.probability).to_string()]),
    );
    let mut json = to_value(&res);
    json["config"] = json!({
        "instance": a.instance.display().to_string(),
        "algorithm": a.algorithm,
        "p": a.p,
        "eps": a.eps,
    });
    Ok(Output {
        json,
        csv: Some(csv),
        check_failed: false,
    })
}

fn test_dist(a: &TestDistArgs) -> Result<Output, Failure> {
    let inst = load_instance(&a.instance)?;
    let cfg = DistConfig {
        trunc: a.trunc,
        b: a.b,
        ..DistConfig::default()
    };
    let rep = distribution_tests(&inst, a.trials, a.seed, &cfg)?;
    let mut rows = vec![vec![
        "ks".to_string(),
        String::new(),
        round_sig(rep.ks.b).to_string(),
        round_sig(rep.ks.statistic).to_string(),
        round_sig(rep.ks.p_value).to_string(),
    ]];
    for c in &rep.chi_square {
        rows.push(vec![
            "chi-square".into(),
            round_sig(c.a).to_string(),
            round_sig(c.b).to_string(),
            round_sig(c.statistic).to_string(),
            round_sig(c.p_value).to_string(),
        ]);
    }
    let ind = &rep.independence;
    rows.push(vec![
        "correlation".into(),
        round_sig(ind.first.0).to_string(),
        round_sig(ind.second.1).to_string(),
        round_sig(ind.rho).to_string(),
        round_sig(ind.p_value).to_string(),
    ]);
    let mut json = to_value(&rep);
    json["config"] = json!({
        "instance": a.instance.display().to_string(),
        "trials": a.trials,
        "seed": a.seed,
        "augmentation": AugmentMode::Auto,
        "trunc": a.trunc,
        "b": a.b,
    });
    Ok(Output {
        json,
        csv: Some(table_csv(&["test", "a", "b", "statistic", "p_value"], rows)),
        check_failed: !rep.passed,
    })
}

fn dispatch(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Analytic(a) => analytic(a),
        Command::Optimize(a) => optimize(a),
        Command::Tight(a) => tight(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::TestDist(a) => test_dist(a),
    }
}

fn is_instance_command(cmd: &Command) -> bool {
    matches!(cmd, Command::Tight(_) | Command::Gen(_))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    if cli.format == Format::Csv && is_instance_command(&cli.command) {
        return Err(usage("instances are written as JSON only"));
    }
    if cli.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    let mut output = pool.install(|| dispatch(&cli.command))?;
    let payload = match cli.format {
        Format::Json => {
            round_value(&mut output.json);
            let mut s = serde_json::to_string(&output.json).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Csv => output.csv.take().unwrap_or_else(|| flat_csv(&output.json)),
    };
    match &cli.out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => out
            .write_all(payload.as_bytes())
            .map_err(|e| Failure { code: 1, msg: e.to_string() })?,
    }
    Ok(if output.check_failed { 1 } else { 0 })
}

/// Runs the command line `args` (program name first), writing the payload
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
