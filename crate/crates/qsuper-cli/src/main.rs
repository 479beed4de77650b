use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsuper::identities::{bosonic_b, compute_delta, fermionic_f, BfParams, DEFAULT_BUDGET};
use qsuper::matprod::{alternating_supernomial_sum, matrix_product_entry};
use qsuper::partitions::{admissible_genfun, enumerate_admissible};
use qsuper::qpoly::HalfInt;
use qsuper::qseries::{
    b_function, branching_function, string_function, vira_char_limit, BFuncParams, BranchParams, SeriesCtx,
    StringParams,
};
use qsuper::supernomial::{big_t, big_t_explicit, q_supernomial, tilde_t};
use qsuper::tsdecomp::build_ts;
use qsuper::verify::{run_sweep, selftest, Scale, SweepConfig};
use qsuper::{Error, LVec};

#[derive(Parser)]
#[command(name = "qsuper", version, about = "Exact q-supernomials and supernomial identities")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Include wall-clock timings, which makes output nondeterministic.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Q,
    #[value(name = "T")]
    T,
    Tilde,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    String,
    Branching,
    Virasoro,
    Bfunction,
}

/// Comma separated integers; the empty string is the empty list.
#[derive(Clone, Debug, Default)]
struct IntList(Vec<i64>);

fn parse_list(s: &str) -> Result<IntList, String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.trim().is_empty() {
        return Ok(IntList::default());
    }
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad integer {t:?}"))).collect::<Result<_, _>>().map(IntList)
}

fn parse_lvec(s: &str) -> Result<LVec, String> {
    s.parse::<LVec>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// One q-supernomial `[L; a]` or one of its companions.
    Supernomial {
        #[arg(long = "L", value_parser = parse_lvec)]
        l: LVec,
        #[arg(long, allow_hyphen_values = true)]
        a: HalfInt,
        #[arg(long, value_enum, default_value_t = Form::Q)]
        form: Form,
    },
    /// Admissible partitions and their generating function.
    Partitions {
        #[arg(long = "L", value_parser = parse_lvec)]
        l: LVec,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, conflicts_with = "genfun")]
        list: bool,
        #[arg(long)]
        genfun: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Takahashi-Suzuki data of `p/k`.
    TsDecomp {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        k: i64,
    },
    /// Bosonic and fermionic sides of one polynomial identity.
    IdentityCheck {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        k: i64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long = "L", value_parser = parse_lvec)]
        l: LVec,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Truncated q-series.
    Series(SeriesArgs),
    /// Entry of the matrix product against the alternating supernomial sum.
    Matprod {
        #[arg(long)]
        p: i64,
        #[arg(long = "L", value_parser = parse_lvec)]
        l: LVec,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
    },
    /// Identity sweep over a parameter grid read from a JSON config.
    Sweep {
        #[arg(long)]
        config: Option<std::path::PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Runs the acceptance criteria.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, default_value_t = qsuper::qseries::DEFAULT_ORDER, allow_hyphen_values = true)]
    order: i64,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "L", value_parser = parse_list, allow_hyphen_values = true)]
    l: Option<IntList>,
    #[arg(long, value_parser = parse_list)]
    sigma: Option<IntList>,
    /// Escalated components, for `--what bfunction`.
    #[arg(long = "K", value_parser = parse_list)]
    k_set: Option<IntList>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    p: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long = "P")]
    big_p: Option<i64>,
    #[arg(long = "Pprime")]
    big_pp: Option<i64>,
    #[arg(long)]
    r: Option<i64>,
    #[arg(long)]
    s: Option<i64>,
}

/// Failure modes mapped onto exit codes.
enum Outcome {
    Done(Value),
    /// A verification that ran and failed.
    Failed(Value),
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParams(format!("--{flag} is required here")))
}

fn single_sigma(v: Option<IntList>) -> Result<i64, Error> {
    match v.as_ref().map(|x| x.0.as_slice()) {
        None => Ok(0),
        Some([s]) => Ok(*s),
        Some(_) => Err(Error::InvalidParams("--sigma takes one value here".into())),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run_series(args: SeriesArgs) -> Result<Value, Error> {
    let ctx = SeriesCtx::new(args.order);
    let l = args.l.clone().unwrap_or_default().0;
    let (series, params) = match args.what {
        What::String => {
            let sp = StringParams::new(need(args.n, "N")?, l, single_sigma(args.sigma)?, need(args.a, "a")?)?;
            (string_function(&sp, &ctx)?, to_value(&sp))
        }
        What::Branching => {
            let bp = BranchParams::new(
                need(args.n, "N")?,
                need(args.big_p, "P")?,
                need(args.big_pp, "Pprime")?,
                need(args.r, "r")?,
                need(args.s, "s")?,
                l,
                single_sigma(args.sigma)?,
            )?;
            (branching_function(&bp, &ctx)?, to_value(&bp))
        }
        What::Virasoro => {
            let n = need(args.n, "N")?;
            let bf = BfParams::new(need(args.p, "p")?, need(args.k, "k")?, n, need(args.a, "a")?, need(args.b, "b")?, LVec::new(l)?)?;
            let params = json!({"p": bf.p(), "k": bf.k(), "N": n, "a": bf.a, "b": bf.b, "bbar": bf.bbar});
            (vira_char_limit(&bf, &ctx), params)
        }
        What::Bfunction => {
            let n = need(args.n, "N")?;
            let k_set = need(args.k_set, "K")?.0.into_iter().map(|x| usize::try_from(x).unwrap_or(0)).collect();
            let sigma = args.sigma.map(|x| x.0).unwrap_or_else(|| vec![0; n]);
            let bp = BFuncParams::new(n, k_set, l, sigma, need(args.a, "a")?)?;
            (b_function(&bp, &ctx)?, to_value(&bp))
        }
    };
    Ok(json!({"order": args.order, "params": params, "series": series, "display": series.to_string()}))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let timing = cli.timing;
    match cli.command {
        Command::Supernomial { l, a, form } => {
            let poly = match form {
                Form::Q => q_supernomial(&l, a)?,
                Form::T => big_t(&l, a)?,
                Form::Explicit => big_t_explicit(&l, a)?,
                Form::Tilde => {
                    let a = a.to_int().ok_or_else(|| Error::NonIntegralIndex(format!("tilde T needs integer a, got {a}")))?;
                    tilde_t(&l, a)
                }
            };
            Ok(Outcome::Done(json!({"L": l, "a": a, "poly": poly, "display": poly.to_string()})))
        }
        Command::Partitions { l, a, list, genfun, budget } => {
            let mut out = json!({"L": l, "a": a});
            if list || !genfun {
                let parts = enumerate_admissible(&l, a, budget)?;
                out["count"] = json!(parts.len());
                out["partitions"] = json!(parts.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>());
            }
            if genfun || !list {
                let g = admissible_genfun(&l, a, budget)?;
                out["display"] = json!(g.to_string());
                out["genfun"] = to_value(&g);
            }
            Ok(Outcome::Done(out))
        }
        Command::TsDecomp { p, k } => Ok(Outcome::Done(to_value(&build_ts(p, k)?))),
        Command::IdentityCheck { p, k, n, a, b, l, budget } => {
            let start = Instant::now();
            let bf = BfParams::new(p, k, n, a, b, l)?;
            let lhs = bosonic_b(&bf)?;
            let rhs = fermionic_f(&bf, budget)?;
            let delta = compute_delta(&bf.ts, a, b)?;
            let equal = lhs == rhs;
            let mut out = json!({
                "lhs": lhs,
                "rhs": rhs,
                "equal": equal,
                "delta": {"num": *delta.numer(), "den": *delta.denom()},
                "theorem_applies": bf.theorem_applies(),
            });
            if timing {
                out["elapsed"] = json!(start.elapsed().as_secs_f64());
            }
            Ok(if equal { Outcome::Done(out) } else { Outcome::Failed(out) })
        }
        Command::Series(args) => Ok(Outcome::Done(run_series(args)?)),
        Command::Matprod { p, l, a, b } => {
            let lhs = matrix_product_entry(p, &l, a, b)?;
            let rhs = alternating_supernomial_sum(p, &l, a, b)?;
            let equal = lhs == rhs;
            let out = json!({"p": p, "L": l, "a": a, "b": b, "lhs": lhs.to_string(), "rhs": rhs.to_string(), "equal": equal});
            Ok(if equal { Outcome::Done(out) } else { Outcome::Failed(out) })
        }
        Command::Sweep { config, workers, output } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<SweepConfig>(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
                }
                None => SweepConfig::default(),
            };
            if workers.is_some() {
                cfg.workers = workers;
            }
            if let Some(o) = &output {
                cfg.output = Some(o.display().to_string());
            }
            let report = run_sweep(&cfg)?;
            let shown = if timing { report.clone() } else { report.without_timing() };
            let value = to_value(&shown);
            if let Some(path) = &cfg.output {
                let text = serde_json::to_string_pretty(&value).expect("json");
                std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            }
            eprintln!("sweep: {} passed, {} failed, {} errors", report.passed, report.failed, report.errors);
            match report.exit_code() {
                0 => Ok(Outcome::Done(value)),
                1 => Ok(Outcome::Failed(value)),
                _ => Err(Error::Budget(format!("{} grid points hit a budget or convergence limit", report.errors))),
            }
        }
        Command::Selftest { quick } => {
            let report = selftest(if quick { Scale::Quick } else { Scale::Full });
            for c in &report.criteria {
                eprintln!("{} criterion {:>2} {} ({} cases, {:.1}s)", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.cases, c.seconds);
            }
            let mut value = to_value(&report);
            if !timing {
                strip_timing(&mut value);
            }
            Ok(if report.passed { Outcome::Done(value) } else { Outcome::Failed(value) })
        }
    }
}

/// Drops every `seconds` field.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Tables for lists of records, `key<TAB>value` lines otherwise.
fn render_tsv(v: &Value) -> String {
    let table_key = ["points", "criteria"].into_iter().find(|k| v.get(*k).is_some_and(Value::is_array));
    let mut out = String::new();
    if let Some(key) = table_key {
        let rows = v[key].as_array().expect("array");
        let mut cols: Vec<String> = Vec::new();
        for r in rows {
            if let Some(m) = r.as_object() {
                for k in m.keys() {
                    if !cols.contains(k) {
                        cols.push(k.clone());
                    }
                }
            }
        }
        out += &cols.join("\t");
        out.push('\n');
        for r in rows {
            let line: Vec<String> = cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect();
            out += &line.join("\t");
            out.push('\n');
        }
        return out;
    }
    if let Some(m) = v.as_object() {
        for (k, x) in m {
            out += &format!("{k}\t{}\n", cell(x));
        }
    }
    out
}

fn emit(format: Format, mut v: Value) {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(1));
    }
    let text = match format {
        Format::Json => serde_json::to_string(&v).expect("json") + "\n",
        Format::Tsv => render_tsv(&v),
    };
    // A closed pipe downstream is not an error of ours.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(Outcome::Done(v)) => {
            emit(format, v);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(v)) => {
            emit(format, v);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
