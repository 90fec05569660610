//! afinv: exact AF-algebra invariants of surface bundles from the command
//! line. stdout carries data (canonical JSON / DOT), stderr diagnostics.

use std::collections::HashMap;
use std::process::ExitCode;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use afinv::bratteli::{dimension_vector, dot_export, stationary_diagram};
use afinv::error::Error;
use afinv::exactnum::{BigRational, IntMatrix};
use afinv::jacobiperron::{jp_expand, jp_factorize};
use afinv::numberfield::{FieldElement, NumberField, QuadraticSurd};
use afinv::pfdata::{jacobian_from_periods, module_similar, SimilarityVerdict};
use afinv::report::{
    bigint_value, jp_digits_value, matrix_value, rational_str, InvariantReport,
};
use afinv::torusbundle::{
    alexander_polynomial, conjugacy_test, ConjugacyVerdict, TorusMonodromy,
    DEFAULT_CERTIFICATE_BOUND,
};
use afinv::traceform::order_form_closed;

const USAGE: &str = "\
afinv - exact AF-algebra invariants of surface bundles

USAGE:
  afinv invariants --matrix \"<n^2 integers row-major>\" [--steps N]
  afinv conjugate --a \"<4 integers>\" --b \"<4 integers>\" [--bound K]
  afinv alexander --matrix \"<4 integers>\"
  afinv jp expand --theta \"<surds: p, p/q or p+q*sqrt(d), comma-separated>\" [--steps N]
  afinv jp factor --matrix \"<n^2 integers>\"
  afinv bratteli --matrix \"<n^2 integers>\" --depth N [--dot PATH]
  afinv order --d D --f F
  afinv module similar --m1 \"<surds>\" --m2 \"<surds>\"

Matrices also parse from JSON: {\"rows\":n,\"entries\":[...]}.
Exit codes: 0 ok/conjugate/similar, 1 distinct, 2 undetermined/unsupported,
64 parse error, 65 domain error. AFINV_MAX_STEPS caps iteration defaults.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => code,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: parse: {}", msg);
            ExitCode::from(64)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {}: {}", e.name(), e.detail());
            ExitCode::from(65)
        }
    }
}

enum CliError {
    Parse(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        // Usage errors on the CLI boundary are caller mistakes: exit 64.
        match e {
            Error::Usage(msg) => CliError::Parse(msg),
            other => CliError::Lib(other),
        }
    }
}

fn run(args: &[String]) -> Result<ExitCode, CliError> {
    if args.is_empty() {
        return Err(CliError::Parse("missing subcommand; try --help".into()));
    }
    if args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{}", USAGE);
        return Ok(ExitCode::SUCCESS);
    }
    match args[0].as_str() {
        "invariants" => cmd_invariants(&args[1..]),
        "conjugate" => cmd_conjugate(&args[1..]),
        "alexander" => cmd_alexander(&args[1..]),
        "jp" => match args.get(1).map(String::as_str) {
            Some("expand") => cmd_jp_expand(&args[2..]),
            Some("factor") => cmd_jp_factor(&args[2..]),
            other => Err(CliError::Parse(format!(
                "jp needs a subcommand expand|factor, got {:?}",
                other
            ))),
        },
        "bratteli" => cmd_bratteli(&args[1..]),
        "order" => cmd_order(&args[1..]),
        "module" => match args.get(1).map(String::as_str) {
            Some("similar") => cmd_module_similar(&args[2..]),
            other => Err(CliError::Parse(format!(
                "module needs the subcommand similar, got {:?}",
                other
            ))),
        },
        other => Err(CliError::Parse(format!("unknown subcommand '{}'", other))),
    }
}

// ---------------------------------------------------------------------------
// Flag parsing
// ---------------------------------------------------------------------------

fn parse_flags(args: &[String], allowed: &[&str]) -> Result<HashMap<String, String>, CliError> {
    let mut out = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let flag = args[i]
            .strip_prefix("--")
            .ok_or_else(|| CliError::Parse(format!("expected a --flag, got '{}'", args[i])))?;
        if !allowed.contains(&flag) {
            return Err(CliError::Parse(format!("unknown flag '--{}'", flag)));
        }
        let val = args
            .get(i + 1)
            .ok_or_else(|| CliError::Parse(format!("flag --{} needs a value", flag)))?;
        if out.insert(flag.to_string(), val.clone()).is_some() {
            return Err(CliError::Parse(format!("flag --{} given twice", flag)));
        }
        i += 2;
    }
    Ok(out)
}

fn require<'a>(flags: &'a HashMap<String, String>, key: &str) -> Result<&'a str, CliError> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Parse(format!("missing required flag --{}", key)))
}

fn parse_matrix(s: &str) -> Result<IntMatrix, CliError> {
    let s = s.trim();
    if s.starts_with('{') {
        let v: Value = serde_json::from_str(s)
            .map_err(|e| CliError::Parse(format!("bad matrix JSON: {}", e)))?;
        return afinv::report::parse_matrix_value(&v).map_err(CliError::from);
    }
    let entries: Vec<BigInt> = s
        .split_whitespace()
        .map(|t| t.parse::<BigInt>().map_err(|_| CliError::Parse(format!("bad integer '{}'", t))))
        .collect::<Result<_, _>>()?;
    let n = (1..=entries.len()).find(|&n| n * n == entries.len()).ok_or_else(|| {
        CliError::Parse(format!(
            "{} entries do not form a square matrix",
            entries.len()
        ))
    })?;
    IntMatrix::new(n, n, entries).map_err(CliError::from)
}

fn parse_steps(flags: &HashMap<String, String>, default: usize) -> Result<usize, CliError> {
    let env_default = std::env::var("AFINV_MAX_STEPS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(default);
    match flags.get("steps") {
        None => Ok(env_default),
        Some(s) => s
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Parse(format!("bad --steps '{}'", s))),
    }
}

/// Surd literal: `p`, `p/q`, `[p+]q*sqrt(d)`, `[p-]q*sqrt(d)`, `sqrt(d)`.
fn parse_surd(s: &str) -> Result<(BigRational, BigRational, Option<BigInt>), CliError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let parse_rat = |t: &str| -> Result<BigRational, CliError> {
        afinv::report::parse_rational_str(t).map_err(CliError::from)
    };
    match compact.find("sqrt(") {
        None => Ok((parse_rat(&compact)?, BigRational::zero(), None)),
        Some(pos) => {
            let rest = &compact[pos + 5..];
            let close = rest
                .find(')')
                .ok_or_else(|| CliError::Parse(format!("unclosed sqrt( in '{}'", s)))?;
            // An optional trailing "+r" / "-r" adds a rational part, so
            // "sqrt(2)-1" works as well as "-1+sqrt(2)".
            let trailing = &rest[close + 1..];
            let p_extra = if trailing.is_empty() {
                BigRational::zero()
            } else if trailing.starts_with('+') || trailing.starts_with('-') {
                parse_rat(trailing)?
            } else {
                return Err(CliError::Parse(format!(
                    "unexpected trailing text after sqrt() in '{}'",
                    s
                )));
            };
            let d: BigInt = rest[..close]
                .parse()
                .map_err(|_| CliError::Parse(format!("bad radicand in '{}'", s)))?;
            let coeff = &compact[..pos];
            // Split "p+q*" / "p-q*" / "q*" / "-q*" / "" / "-" / "p+" / "p-".
            let sign_pos = coeff
                .char_indices()
                .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
                .map(|(i, _)| i)
                .next_back();
            let (p_str, q_str) = match sign_pos {
                Some(i) => (&coeff[..i], &coeff[i..]),
                None => ("", coeff),
            };
            let q_str = q_str.strip_suffix('*').unwrap_or(q_str);
            let q = match q_str {
                "" | "+" => BigRational::from_integer(BigInt::from(1)),
                "-" => BigRational::from_integer(BigInt::from(-1)),
                t => parse_rat(t.strip_prefix('+').unwrap_or(t))?,
            };
            let p = if p_str.is_empty() { BigRational::zero() } else { parse_rat(p_str)? };
            Ok((p + p_extra, q, Some(d)))
        }
    }
}

/// Parse a comma-separated theta list into field elements of a common field.
fn parse_theta_list(s: &str) -> Result<Vec<FieldElement>, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if parts.is_empty() {
        return Err(CliError::Parse("empty theta list".into()));
    }
    let parsed: Vec<(BigRational, BigRational, Option<BigInt>)> =
        parts.iter().map(|p| parse_surd(p)).collect::<Result<_, _>>()?;
    let mut radicand: Option<BigInt> = None;
    for (_, q, d) in &parsed {
        if let (Some(d), false) = (d, q.is_zero()) {
            match &radicand {
                None => radicand = Some(d.clone()),
                Some(prev) if prev == d => {}
                Some(prev) => {
                    return Err(CliError::Parse(format!(
                        "mixed radicands sqrt({}) and sqrt({})",
                        prev, d
                    )))
                }
            }
        }
    }
    match radicand {
        None => {
            let field = NumberField::rationals();
            Ok(parsed
                .into_iter()
                .map(|(p, _, _)| FieldElement::from_rational(field.clone(), p))
                .collect())
        }
        Some(d) => {
            let field = NumberField::quadratic(&d).map_err(CliError::from)?;
            parsed
                .into_iter()
                .map(|(p, q, _)| {
                    QuadraticSurd::new(d.clone(), p, q)
                        .and_then(|s| s.to_field_element(&field))
                        .map_err(CliError::from)
                })
                .collect()
        }
    }
}

fn emit(v: &Value) {
    println!("{}", v);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_invariants(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["matrix", "steps"])?;
    let m = parse_matrix(require(&flags, "matrix")?)?;
    let steps = parse_steps(&flags, 100)?;
    let report = InvariantReport::from_general_matrix(&m, steps)?;
    emit(&report.to_json());
    Ok(ExitCode::SUCCESS)
}

fn cmd_conjugate(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["a", "b", "bound"])?;
    let a = TorusMonodromy::new(parse_matrix(require(&flags, "a")?)?)?;
    let b = TorusMonodromy::new(parse_matrix(require(&flags, "b")?)?)?;
    let bound = match flags.get("bound") {
        None => DEFAULT_CERTIFICATE_BOUND,
        Some(s) => s
            .parse::<i64>()
            .ok()
            .filter(|&n| n >= 0)
            .ok_or_else(|| CliError::Parse(format!("bad --bound '{}'", s)))?,
    };
    let verdict = conjugacy_test(&a, &b, bound)?;
    let (value, code) = match verdict {
        ConjugacyVerdict::Conjugate { transform } => (
            json!({
                "verdict": "conjugate",
                "transform": matrix_value(&transform),
            }),
            ExitCode::SUCCESS,
        ),
        ConjugacyVerdict::DistinctByInvariants => {
            (json!({ "verdict": "distinct_by_invariants" }), ExitCode::from(1))
        }
        ConjugacyVerdict::DistinctByPeriods => {
            (json!({ "verdict": "distinct_by_periods" }), ExitCode::from(1))
        }
        ConjugacyVerdict::Undetermined => {
            (json!({ "verdict": "undetermined" }), ExitCode::from(2))
        }
    };
    emit(&value);
    Ok(code)
}

fn cmd_alexander(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["matrix"])?;
    let m = parse_matrix(require(&flags, "matrix")?)?;
    let a = TorusMonodromy::new(m)?;
    let poly = alexander_polynomial(&a);
    let coeffs: Vec<Value> = poly.coeffs().iter().rev().map(bigint_value).collect();
    emit(&json!({
        "alexander": coeffs,
        "input": matrix_value(a.matrix()),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_jp_expand(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["theta", "steps"])?;
    let theta = parse_theta_list(require(&flags, "theta")?)?;
    let steps = parse_steps(&flags, 100)?;
    let e = jp_expand(&theta, steps)?;
    let mut m = Map::new();
    m.insert("dimension".into(), json!(e.dimension));
    m.insert("digits".into(), jp_digits_value(&e.digits));
    m.insert("terminated".into(), json!(e.terminated));
    if let Some((pre, per)) = e.periodic {
        m.insert(
            "periodic".into(),
            json!({
                "preperiod_length": pre,
                "period_length": per,
                "period": jp_digits_value(e.period_digits().unwrap_or(&[])),
            }),
        );
    }
    emit(&Value::Object(m));
    Ok(ExitCode::SUCCESS)
}

fn cmd_jp_factor(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["matrix"])?;
    let m = parse_matrix(require(&flags, "matrix")?)?;
    let digits = jp_factorize(&m)?;
    emit(&json!({
        "digits": jp_digits_value(&digits),
        "input": matrix_value(&m),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_bratteli(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["matrix", "depth", "dot"])?;
    let m = parse_matrix(require(&flags, "matrix")?)?;
    let depth: usize = require(&flags, "depth")?
        .parse()
        .ok()
        .filter(|&d| d >= 1)
        .ok_or_else(|| CliError::Parse("bad --depth".into()))?;
    let d = stationary_diagram(&m, depth)?;
    let dims: Vec<Value> = (0..=depth + 1)
        .map(|lvl| {
            dimension_vector(&d, lvl)
                .map(|v| Value::Array(v.iter().map(bigint_value).collect()))
        })
        .collect::<Result<_, _>>()?;
    let mut obj = Map::new();
    obj.insert("depth".into(), json!(depth));
    obj.insert("root_arity".into(), json!(d.root_arity()));
    obj.insert("dimension_vectors".into(), Value::Array(dims));
    obj.insert("input".into(), matrix_value(&m));
    if let Some(path) = flags.get("dot") {
        let text = dot_export(&d);
        write_atomically(path, &text)?;
        obj.insert("dot_path".into(), json!(path));
    }
    emit(&Value::Object(obj));
    Ok(ExitCode::SUCCESS)
}

fn write_atomically(path: &str, text: &str) -> Result<(), CliError> {
    let tmp = format!("{}.tmp", path);
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::Parse(format!("cannot write {}: {}", path, e)))
}

fn cmd_order(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["d", "f"])?;
    let d: BigInt = require(&flags, "d")?
        .parse()
        .map_err(|_| CliError::Parse("bad --d".into()))?;
    let f: BigInt = require(&flags, "f")?
        .parse()
        .map_err(|_| CliError::Parse("bad --f".into()))?;
    let rep = order_form_closed(&d, &f)?;
    let gram: Vec<Value> = rep
        .gram
        .iter()
        .map(|row| {
            Value::Array(row.iter().map(|q| Value::String(rational_str(q))).collect())
        })
        .collect();
    emit(&json!({
        "crosscheck": if rep.crosschecked { "ok" } else { "failed" },
        "d": bigint_value(&rep.d),
        "delta": rep.delta_closed.to_string(),
        "f": bigint_value(&rep.f),
        "form": {
            "x2": bigint_value(&rep.q_coeffs.0),
            "xy": bigint_value(&rep.q_coeffs.1),
            "y2": bigint_value(&rep.q_coeffs.2),
        },
        "gram": gram,
        "omega": rep.omega,
        "sigma": rep.invariants.sigma,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_module_similar(args: &[String]) -> Result<ExitCode, CliError> {
    let flags = parse_flags(args, &["m1", "m2"])?;
    let g1 = parse_theta_list(require(&flags, "m1")?)?;
    let g2 = parse_theta_list(require(&flags, "m2")?)?;
    // Bring both generator lists into one field (rationals embed anywhere).
    let (g1, g2) = unify_fields(g1, g2)?;
    let field = g1[0].field().clone();
    let m1 = jacobian_from_periods(&field, &g1)?;
    let m2 = jacobian_from_periods(&field, &g2)?;
    let verdict = module_similar(&m1, &m2)?;
    let (name, code) = match verdict {
        SimilarityVerdict::Similar => ("similar", ExitCode::SUCCESS),
        SimilarityVerdict::Distinct => ("distinct", ExitCode::from(1)),
        SimilarityVerdict::Unsupported => ("unsupported", ExitCode::from(2)),
    };
    emit(&json!({ "verdict": name }));
    Ok(code)
}

fn unify_fields(
    g1: Vec<FieldElement>,
    g2: Vec<FieldElement>,
) -> Result<(Vec<FieldElement>, Vec<FieldElement>), CliError> {
    if g1[0].field() == g2[0].field() {
        return Ok((g1, g2));
    }
    let lift = |gens: Vec<FieldElement>, field: &std::sync::Arc<NumberField>| {
        gens.into_iter()
            .map(|g| {
                g.as_rational()
                    .map(|q| FieldElement::from_rational(field.clone(), q))
                    .ok_or_else(|| {
                        CliError::Parse("module generators live in different fields".into())
                    })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    if g1[0].field().degree() == 1 {
        let f = g2[0].field().clone();
        Ok((lift(g1, &f)?, g2))
    } else if g2[0].field().degree() == 1 {
        let f = g1[0].field().clone();
        Ok((g1, lift(g2, &f)?))
    } else {
        Err(CliError::Parse("module generators live in different fields".into()))
    }
}
