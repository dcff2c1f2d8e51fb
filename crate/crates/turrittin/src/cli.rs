//! Command-line front-end.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use turrittin_core::chain::TransformChain;
use turrittin_core::field::set_max_factor_degree;
use turrittin_core::reduce::{formal_normal_form, Mode};
use turrittin_core::system::SystemJet;
use turrittin_core::verify::{
    check_form, check_gauge_chain, check_rank_monotone, invariants_report, FormKind,
};
use turrittin_core::Error;

use crate::format::{
    chain_json, normal_form_json, parse_chain_value, parse_json, parse_system_value,
    reduction_json, report_json, report_text, system_json, FormatError, SystemDocument,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_TOWER: i32 = 4;
pub const EXIT_RESONANT: i32 = 5;
pub const EXIT_OTHER: i32 = 6;

pub const MAX_DEGREE_VAR: &str = "TURRITTIN_MAX_DEGREE";

#[derive(Parser, Debug)]
#[command(
    name = "turrittin",
    version,
    about = "Exact formal reduction of meromorphic linear ODE systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Write artifacts to this file (or directory, for `reduce`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the invariants of a system.
    Analyze { input: PathBuf },
    /// Reduce a system to normal form.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CliMode::Complex)]
        mode: CliMode,
        /// Degree of the normal form.
        #[arg(long, default_value_t = 0)]
        degree: i64,
        /// Use only the input truncated to this relative order.
        #[arg(long)]
        precision: Option<i64>,
    },
    /// Replay a chain and check the claimed output.
    Verify {
        input: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        claimed: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Print a chain step by step.
    Trace {
        input: PathBuf,
        #[arg(long)]
        chain: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum CliMode {
    Complex,
    Real,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Complex => Mode::Complex,
            CliMode::Real => Mode::Real,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Format { .. } => EXIT_USAGE,
            CliError::Io { .. } => EXIT_OTHER,
            CliError::Core(e) => match e {
                Error::InsufficientPrecision { .. } => EXIT_PRECISION,
                Error::UnsupportedTower(_) | Error::DegreeCapExceeded { .. } => EXIT_TOWER,
                Error::ResonantResidual(_) => EXIT_RESONANT,
                _ => EXIT_OTHER,
            },
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn read_value(path: &Path) -> Result<Value, CliError> {
    parse_json(&read_text(path)?).map_err(|e| CliError::Format {
        path: path.display().to_string(),
        source: e,
    })
}

fn read_system(path: &Path) -> Result<SystemDocument, CliError> {
    let v = read_value(path)?;
    parse_system_value(&v).map_err(|e| CliError::Format {
        path: path.display().to_string(),
        source: e,
    })
}

/// Accepts either a bare document or the combined `reduce` output holding it under `key`.
fn sub_document<'a>(v: &'a Value, key: &str) -> &'a Value {
    v.get(key).filter(|s| s.is_object()).unwrap_or(v)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

struct Output {
    format: OutFormat,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, w: &mut dyn Write, text: String, json: Value) -> Result<(), CliError> {
        let body = match self.format {
            OutFormat::Text => text,
            OutFormat::Json => pretty(&json),
        };
        match &self.out {
            Some(p) => write_file(p, &body),
            None => w.write_all(body.as_bytes()).map_err(|e| CliError::Io {
                path: "stdout".into(),
                source: e,
            }),
        }
    }
}

fn analyze(o: &Output, w: &mut dyn Write, input: &Path) -> Result<i32, CliError> {
    let doc = read_system(input)?;
    let rep = invariants_report(&doc.system, None);
    let text = format!(
        "field: {}\norder: {}\n{}",
        doc.field,
        doc.system.order(),
        report_text(&rep)
    );
    let mut v = report_json(&rep);
    v["field"] = json!(doc.field.to_string());
    o.emit(w, text, v)?;
    Ok(if rep.all_pass { EXIT_OK } else { EXIT_VERIFY })
}

fn truncated(a: &SystemJet, precision: Option<i64>) -> Result<SystemJet, CliError> {
    match precision {
        None => Ok(a.clone()),
        Some(p) => Ok(a.truncate(p)?),
    }
}

fn reduce(
    o: &Output,
    w: &mut dyn Write,
    input: &Path,
    mode: Mode,
    degree: i64,
    precision: Option<i64>,
) -> Result<i32, CliError> {
    if degree < 0 {
        return Err(CliError::Usage("--degree must be nonnegative".into()));
    }
    let doc = read_system(input)?;
    let a = truncated(&doc.system, precision)?;
    let f = formal_normal_form(&a, degree, mode)?;
    let n = a.dim();
    let nf = &f.normal;
    let mut text = String::new();
    text.push_str(&format!(
        "rank: {}\nramification: {}\ndegree: {}\nfield: {}\n",
        nf.rank, nf.ramification, nf.degree, f.field
    ));
    for (j, d) in nf.exponential.iter().enumerate() {
        text.push_str(&format!("D_{}: {}\n", j, d));
    }
    text.push_str(&format!("C: {}\n", nf.residual));
    text.push_str(&format!("deresonation rounds: {}\n", f.deresonation_rounds));
    let kinds: Vec<&str> = f.chain.steps.iter().map(|s| s.kind_name()).collect();
    text.push_str(&format!(
        "chain: {} steps [{}]\n",
        kinds.len(),
        kinds.join(", ")
    ));
    text.push_str(&format!("solution: {}\n", f.solution()));
    let combined = reduction_json(&f, n);
    if let Some(dir) = &o.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        write_file(&dir.join("chain.json"), &pretty(&chain_json(&f.chain, n)))?;
        write_file(
            &dir.join("claimed.json"),
            &pretty(&system_json(&f.system, &f.field, &Map::new())),
        )?;
        write_file(
            &dir.join("normal_form.json"),
            &pretty(&normal_form_json(nf, &f.field)),
        )?;
        write_file(&dir.join("reduction.json"), &pretty(&combined))?;
        write_file(&dir.join("solution.txt"), &format!("{}\n", f.solution()))?;
        let body = match o.format {
            OutFormat::Text => text,
            OutFormat::Json => pretty(&combined),
        };
        w.write_all(body.as_bytes()).map_err(|e| CliError::Io {
            path: "stdout".into(),
            source: e,
        })?;
        return Ok(EXIT_OK);
    }
    o.emit(w, text, combined)?;
    Ok(EXIT_OK)
}

fn verify(
    o: &Output,
    w: &mut dyn Write,
    input: &Path,
    chain: &Path,
    claimed: &Path,
    mode: Option<CliMode>,
    degree: Option<i64>,
) -> Result<i32, CliError> {
    let doc = read_system(input)?;
    let cv = read_value(chain)?;
    let chain_doc =
        parse_chain_value(sub_document(&cv, "chain")).map_err(|e| CliError::Format {
            path: chain.display().to_string(),
            source: e,
        })?;
    let clv = read_value(claimed)?;
    let claimed_sys = parse_system_value(sub_document(&clv, "claimed"))
        .map_err(|e| CliError::Format {
            path: claimed.display().to_string(),
            source: e,
        })?
        .system;
    let inferred = clv
        .pointer("/normal_form/mode")
        .and_then(Value::as_str)
        .map(|m| {
            if m == "real" {
                CliMode::Real
            } else {
                CliMode::Complex
            }
        });
    let kind = match mode.or(inferred).unwrap_or(CliMode::Complex) {
        CliMode::Complex => FormKind::Trs,
        CliMode::Real => FormKind::Rtrs,
    };
    let mu = degree
        .or_else(|| {
            clv.pointer("/normal_form/degree")
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    if chain_doc
        .steps
        .iter()
        .any(|s| s.validate(doc.system.dim()).is_err())
    {
        return Err(CliError::Usage(
            "chain size does not match the system".into(),
        ));
    }
    let mut rep = check_gauge_chain(&doc.system, &chain_doc, &claimed_sys)?;
    rep.merge(check_rank_monotone(&doc.system, &chain_doc)?);
    let q = claimed_sys.poincare_rank().unwrap_or(0).max(0);
    rep.merge(check_form(&claimed_sys, kind, q, mu)?);
    o.emit(w, report_text(&rep), report_json(&rep))?;
    Ok(if rep.all_pass { EXIT_OK } else { EXIT_VERIFY })
}

fn trace(o: &Output, w: &mut dyn Write, input: &Path, chain: &Path) -> Result<i32, CliError> {
    let doc = read_system(input)?;
    let cv = read_value(chain)?;
    let c: TransformChain =
        parse_chain_value(sub_document(&cv, "chain")).map_err(|e| CliError::Format {
            path: chain.display().to_string(),
            source: e,
        })?;
    let systems = c.trace(&doc.system)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, s) in systems.iter().enumerate() {
        let label = if i == 0 {
            String::from("input")
        } else {
            format!(
                "{} (degree {})",
                c.steps[i - 1].kind_name(),
                c.steps[i - 1].degree()
            )
        };
        let inv = s.invariants().ok();
        let q = inv.map_or(String::from("-"), |v| v.q.to_string());
        let k = inv.map_or(String::from("-"), |v| v.k.to_string());
        text.push_str(&format!(
            "[{}] {}: q = {}, k = {}, order = {}\n",
            i,
            label,
            q,
            k,
            s.order()
        ));
        if let Some(v) = s.valuation() {
            text.push_str(&format!("     x^{}: {}\n", v, s.at(v)));
        }
        let mut row = json!({"index": i, "label": label, "q": q, "k": k, "system": system_json(s, &doc.field, &Map::new())});
        if i > 0 {
            row["step"] = crate::format::step_json(&c.steps[i - 1]);
        }
        rows.push(row);
    }
    o.emit(
        w,
        text,
        json!({"format": crate::format::FORMAT, "trace": rows}),
    )?;
    Ok(EXIT_OK)
}

fn apply_env() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(MAX_DEGREE_VAR) {
        let cap: usize = v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{} must be a positive integer, got '{}'",
                MAX_DEGREE_VAR, v
            ))
        })?;
        if cap == 0 {
            return Err(CliError::Usage(format!(
                "{} must be positive",
                MAX_DEGREE_VAR
            )));
        }
        set_max_factor_degree(cap);
    }
    Ok(())
}

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let res = apply_env().and_then(|_| {
        let o = Output {
            format: cli.format,
            out: cli.out.clone(),
        };
        match &cli.command {
            Command::Analyze { input } => analyze(&o, out, input),
            Command::Reduce {
                input,
                mode,
                degree,
                precision,
            } => reduce(&o, out, input, (*mode).into(), *degree, *precision),
            Command::Verify {
                input,
                chain,
                claimed,
                mode,
                degree,
            } => verify(&o, out, input, chain, claimed, *mode, *degree),
            Command::Trace { input, chain } => trace(&o, out, input, chain),
        }
    });
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            e.exit_code()
        }
    }
}
