//! JSON documents for systems, chains, normal forms and reports.
//!
//! Every document carries `"format": 1` and writes numbers as exact strings.

use serde_json::{json, Map, Value};

use turrittin_core::chain::{TransformChain, TransformStep};
use turrittin_core::field::Field;
use turrittin_core::jet::LaurentJet;
use turrittin_core::matrix::Matrix;
use turrittin_core::reduce::{FormalNormalForm, NormalForm, Unit};
use turrittin_core::system::{PolyMatrix, SystemJet};
use turrittin_core::verify::VerificationReport;

use crate::text::{parse_jet, parse_scalar, TextError};

pub const FORMAT: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Text { path: String, source: TextError },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid field descriptor: {0}")]
    Field(String),
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema {
        path: path.into(),
        message: message.into(),
    })
}

pub fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_format(v: &Value) -> Result<(), FormatError> {
    match v.get("format") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT) => Ok(()),
        Some(Value::String(s)) if s == "1" => Ok(()),
        Some(other) => schema("format", format!("unsupported version {}", other)),
        None => schema("format", "missing"),
    }
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, FormatError> {
    v.get(key).ok_or_else(|| FormatError::Schema {
        path: key.into(),
        message: "missing".into(),
    })
}

fn int_field(v: &Value, key: &str) -> Result<i64, FormatError> {
    match get(v, key)? {
        Value::Number(n) => n.as_i64().ok_or_else(|| FormatError::Schema {
            path: key.into(),
            message: "not an integer".into(),
        }),
        Value::String(s) => s.trim().parse().map_err(|_| FormatError::Schema {
            path: key.into(),
            message: format!("bad integer '{}'", s),
        }),
        _ => schema(key, "expected an integer"),
    }
}

pub fn parse_field(text: &str) -> Result<Field, FormatError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || FormatError::Field(text.to_string());
    let (base, complex) = if let Some(b) = t.strip_suffix("(i)") {
        (b.to_string(), true)
    } else if let Some(b) = t.strip_suffix(",i)") {
        (format!("{})", b), true)
    } else {
        (t.clone(), false)
    };
    let d = match base.as_str() {
        "Q" => None,
        s => {
            let inner = s
                .strip_prefix("Q(sqrt(")
                .and_then(|r| r.strip_suffix("))"))
                .ok_or_else(bad)?;
            Some(inner.parse::<i64>().map_err(|_| bad())?)
        }
    };
    Field::new(d, complex).map_err(|e| FormatError::Field(format!("{}: {}", text, e)))
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    m.row(i)
                        .iter()
                        .map(|s| Value::String(s.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn parse_matrix(v: &Value, path: &str) -> Result<Matrix, FormatError> {
    let rows = v.as_array().ok_or_else(|| FormatError::Schema {
        path: path.into(),
        message: "expected an array of rows".into(),
    })?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let cells = r.as_array().ok_or_else(|| FormatError::Schema {
            path: format!("{}[{}]", path, i),
            message: "expected an array".into(),
        })?;
        if cells.len() != rows.len() {
            return schema(&format!("{}[{}]", path, i), "matrix is not square");
        }
        let mut row = Vec::with_capacity(cells.len());
        for (j, c) in cells.iter().enumerate() {
            let p = format!("{}[{}][{}]", path, i, j);
            let s = match c {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() => n.to_string(),
                _ => return schema(&p, "expected a scalar string"),
            };
            row.push(parse_scalar(&s).map_err(|e| FormatError::Text { path: p, source: e })?);
        }
        out.push(row);
    }
    Ok(Matrix::from_rows(out))
}

/// A parsed system document.
#[derive(Clone, Debug)]
pub struct SystemDocument {
    pub field: Field,
    pub system: SystemJet,
    pub metadata: Map<String, Value>,
}

pub fn system_json(a: &SystemJet, field: &Field, metadata: &Map<String, Value>) -> Value {
    let entries: Vec<Value> = a
        .entries()
        .iter()
        .map(|row| Value::Array(row.iter().map(|e| Value::String(e.to_string())).collect()))
        .collect();
    let mut v = json!({
        "format": FORMAT,
        "field": field.to_string(),
        "n": a.dim(),
        "truncation_order": a.order(),
        "entries": entries,
    });
    if !metadata.is_empty() {
        v["metadata"] = Value::Object(metadata.clone());
    }
    v
}

pub fn parse_system_value(v: &Value) -> Result<SystemDocument, FormatError> {
    check_format(v)?;
    let field = match v.get("field") {
        Some(Value::String(s)) => parse_field(s)?,
        None => Field::RATIONALS,
        _ => return schema("field", "expected a string"),
    };
    let n = int_field(v, "n")?;
    let order = int_field(v, "truncation_order")?;
    let rows = get(v, "entries")?
        .as_array()
        .ok_or_else(|| FormatError::Schema {
            path: "entries".into(),
            message: "expected an array".into(),
        })?;
    if n <= 0 || rows.len() != n as usize {
        return schema("entries", format!("expected {} rows", n));
    }
    let mut entries: Vec<Vec<LaurentJet>> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let cells = match r.as_array() {
            Some(c) if c.len() == n as usize => c,
            _ => {
                return schema(
                    &format!("entries[{}]", i),
                    format!("expected {} entries", n),
                )
            }
        };
        let mut row = Vec::with_capacity(cells.len());
        for (j, c) in cells.iter().enumerate() {
            let p = format!("entries[{}][{}]", i, j);
            let s = match c {
                Value::String(s) => s.clone(),
                Value::Number(x) if x.is_i64() => x.to_string(),
                _ => return schema(&p, "expected a jet string"),
            };
            let jet = parse_jet(&s, Some(order)).map_err(|e| FormatError::Text {
                path: p.clone(),
                source: e,
            })?;
            if !jet.coeffs().iter().all(|c| field.contains(c)) {
                return Err(FormatError::Field(format!(
                    "{} has a coefficient outside {}",
                    p, field
                )));
            }
            row.push(jet);
        }
        entries.push(row);
    }
    let system = SystemJet::from_entries(&entries).map_err(|e| FormatError::Schema {
        path: "entries".into(),
        message: e.to_string(),
    })?;
    let metadata = match v.get("metadata") {
        Some(Value::Object(m)) => m.clone(),
        None => Map::new(),
        _ => return schema("metadata", "expected an object"),
    };
    Ok(SystemDocument {
        field,
        system,
        metadata,
    })
}

pub fn parse_system(text: &str) -> Result<SystemDocument, FormatError> {
    parse_system_value(&parse_json(text)?)
}

pub fn poly_json(p: &PolyMatrix) -> Value {
    Value::Array(p.coeffs().iter().map(matrix_json).collect())
}

fn parse_poly(v: &Value, path: &str) -> Result<PolyMatrix, FormatError> {
    let cs = v.as_array().ok_or_else(|| FormatError::Schema {
        path: path.into(),
        message: "expected an array of matrices".into(),
    })?;
    let ms = cs
        .iter()
        .enumerate()
        .map(|(d, c)| parse_matrix(c, &format!("{}[{}]", path, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = ms.first() else {
        return schema(path, "empty polynomial");
    };
    let n = first.rows();
    if ms.iter().any(|m| m.rows() != n) {
        return schema(path, "coefficient sizes differ");
    }
    Ok(PolyMatrix::new(n, ms))
}

pub fn step_json(s: &TransformStep) -> Value {
    match s {
        TransformStep::ConstantRegular(p) => {
            json!({"kind": s.kind_name(), "matrix": matrix_json(p)})
        }
        TransformStep::RegularPolynomial(p) => {
            json!({"kind": s.kind_name(), "coeffs": poly_json(p)})
        }
        TransformStep::DiagonalMonomial(k) => {
            json!({"kind": s.kind_name(), "exponents": k.iter().map(|v| v.to_string()).collect::<Vec<_>>()})
        }
        TransformStep::Ramification(r) => json!({"kind": s.kind_name(), "index": r.to_string()}),
    }
}

pub fn chain_json(c: &TransformChain, n: usize) -> Value {
    json!({
        "format": FORMAT,
        "n": n,
        "steps": c.steps.iter().map(step_json).collect::<Vec<_>>(),
    })
}

fn parse_u32(v: &Value, path: &str) -> Result<u32, FormatError> {
    let bad = || FormatError::Schema {
        path: path.into(),
        message: "expected a nonnegative integer".into(),
    };
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| bad()),
        Value::Number(n) => n
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

pub fn parse_chain_value(v: &Value) -> Result<TransformChain, FormatError> {
    check_format(v)?;
    let n = int_field(v, "n")? as usize;
    let steps = get(v, "steps")?
        .as_array()
        .ok_or_else(|| FormatError::Schema {
            path: "steps".into(),
            message: "expected an array".into(),
        })?;
    let mut out = Vec::with_capacity(steps.len());
    for (i, s) in steps.iter().enumerate() {
        let p = format!("steps[{}]", i);
        let kind = s.get("kind").and_then(Value::as_str).unwrap_or("");
        let step = match kind {
            "constant-regular" => TransformStep::ConstantRegular(parse_matrix(
                get(s, "matrix")?,
                &format!("{}.matrix", p),
            )?),
            "regular-polynomial" => TransformStep::RegularPolynomial(parse_poly(
                get(s, "coeffs")?,
                &format!("{}.coeffs", p),
            )?),
            "diagonal-monomial" => {
                let ks = get(s, "exponents")?
                    .as_array()
                    .ok_or_else(|| FormatError::Schema {
                        path: p.clone(),
                        message: "expected exponents".into(),
                    })?;
                TransformStep::DiagonalMonomial(
                    ks.iter()
                        .map(|k| parse_u32(k, &p))
                        .collect::<Result<_, _>>()?,
                )
            }
            "ramification" => TransformStep::Ramification(parse_u32(get(s, "index")?, &p)?),
            other => return schema(&p, format!("unknown step kind '{}'", other)),
        };
        step.validate(n).map_err(|e| FormatError::Schema {
            path: p.clone(),
            message: e.to_string(),
        })?;
        out.push(step);
    }
    Ok(TransformChain::from_steps(out))
}

pub fn parse_chain(text: &str) -> Result<TransformChain, FormatError> {
    parse_chain_value(&parse_json(text)?)
}

fn unit_json(u: &Unit) -> Value {
    match u {
        Unit::Real(i) => json!({"real": i}),
        Unit::Pair(i) => json!({"pair": i}),
    }
}

pub fn normal_form_json(nf: &NormalForm, field: &Field) -> Value {
    json!({
        "format": FORMAT,
        "mode": match nf.mode { turrittin_core::reduce::Mode::Complex => "complex", turrittin_core::reduce::Mode::Real => "real" },
        "rank": nf.rank.to_string(),
        "degree": nf.degree.to_string(),
        "ramification": nf.ramification.to_string(),
        "exponential_part": nf.exponential.iter().map(matrix_json).collect::<Vec<_>>(),
        "residual_matrix": matrix_json(&nf.residual),
        "block_structure": nf.blocks,
        "layout": nf.layout.iter().map(unit_json).collect::<Vec<_>>(),
        "principal_part": system_json(&nf.principal, field, &Map::new()),
        "tail": system_json(&nf.tail, field, &Map::new()),
    })
}

/// The combined output of `reduce`.
pub fn reduction_json(f: &FormalNormalForm, n: usize) -> Value {
    json!({
        "format": FORMAT,
        "field": f.field.to_string(),
        "normal_form": normal_form_json(&f.normal, &f.field),
        "chain": chain_json(&f.chain, n),
        "q_gauge": poly_json(&f.q_gauge),
        "claimed": system_json(&f.system, &f.field, &Map::new()),
        "solution": f.solution(),
        "deresonation_rounds": f.deresonation_rounds.to_string(),
    })
}

pub fn report_json(r: &VerificationReport) -> Value {
    json!({
        "format": FORMAT,
        "all_pass": r.all_pass,
        "checks": r.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect::<Vec<_>>(),
    })
}

pub fn report_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        s.push_str(&format!(
            "{:<4} {}: {}\n",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use turrittin_core::field::Scalar;

    #[test]
    fn field_descriptors() {
        assert_eq!(parse_field("Q").unwrap(), Field::RATIONALS);
        assert_eq!(parse_field("Q(i)").unwrap(), Field::GAUSSIAN);
        let f = Field::new(Some(2), true).unwrap();
        assert_eq!(parse_field(&f.to_string()).unwrap(), f);
        assert_eq!(parse_field("Q(sqrt(2),i)").unwrap(), f);
        assert!(parse_field("Q(sqrt(4))").is_err());
        assert!(parse_field("R").is_err());
    }

    #[test]
    fn system_round_trip() {
        let doc = r#"{"format": 1, "field": "Q", "n": 2, "truncation_order": 1,
            "entries": [["x^-2*(1 + 1/2*x)", "0"], ["x", "x^-1*(3)"]], "metadata": {"name": "demo"}}"#;
        let d = parse_system(doc).unwrap();
        assert_eq!(d.system.valuation(), Some(-2));
        assert_eq!(d.system.at(-1)[(0, 0)], Scalar::from_ratio(1, 2));
        let v = system_json(&d.system, &d.field, &d.metadata);
        let again = parse_system_value(&v).unwrap();
        assert_eq!(again.system, d.system);
        assert_eq!(system_json(&again.system, &again.field, &again.metadata), v);
    }

    #[test]
    fn system_errors() {
        assert!(matches!(
            parse_system("{\"format\": 1,\n \"n\": }"),
            Err(FormatError::Json { line: 2, .. })
        ));
        let past = r#"{"format": 1, "n": 1, "truncation_order": 0, "entries": [["x^-1 + x"]]}"#;
        assert!(matches!(parse_system(past), Err(FormatError::Text { .. })));
        let field = r#"{"format": 1, "field": "Q", "n": 1, "truncation_order": 0, "entries": [["i*x^-1"]]}"#;
        assert!(matches!(parse_system(field), Err(FormatError::Field(_))));
        let version = r#"{"format": 2, "n": 1, "truncation_order": 0, "entries": [["1"]]}"#;
        assert!(parse_system(version).is_err());
    }

    #[test]
    fn chain_round_trip() {
        let c = TransformChain::from_steps(vec![
            TransformStep::Ramification(2),
            TransformStep::ConstantRegular(Matrix::from_ints(&[&[1, 1], &[0, 1]])),
            TransformStep::RegularPolynomial(PolyMatrix::new(
                2,
                vec![Matrix::identity(2), Matrix::from_ints(&[&[0, 3], &[0, 0]])],
            )),
            TransformStep::DiagonalMonomial(vec![0, 1]),
        ]);
        let v = chain_json(&c, 2);
        assert_eq!(parse_chain_value(&v).unwrap(), c);
        let bad = r#"{"format": 1, "n": 2, "steps": [{"kind": "constant-regular", "matrix": [["1", "1"], ["1", "1"]]}]}"#;
        assert!(parse_chain(bad).is_err());
    }
}
