//! Payload loading and the JSON table/grid schemas.
//!
//! A payload argument is inline JSON, `@path` for a file, or `-` for stdin.
//!
//! * MapTable: `{"<expr>": "<expr>", ...}`
//! * GridValues: `{"k": 2, "n": 1, "values": {"0,0": "<expr>", "0,1": ...}}`

use std::collections::BTreeMap;
use std::io::Read;

use derivcalc_core::reconstruct::GridValues;
use derivcalc_core::syntax::parse_expr;
use derivcalc_core::{MapTable, Monomial};
use serde_json::Value;

use crate::CliError;

pub fn read_payload(arg: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_json(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))
}

fn expr_string<'a>(v: &'a Value, what: &str) -> Result<&'a str, CliError> {
    v.as_str()
        .ok_or_else(|| CliError::Usage(format!("{what} must be a string expression, found {v}")))
}

pub fn parse_table(text: &str, k: usize) -> Result<MapTable, CliError> {
    let Value::Object(m) = parse_json(text)? else {
        return Err(CliError::Usage("table must be a JSON object".into()));
    };
    let mut entries = Vec::with_capacity(m.len());
    for (x, v) in &m {
        let fx = expr_string(v, "table value")?;
        entries.push((parse_expr(x, k)?, parse_expr(fx, k)?));
    }
    if entries.is_empty() {
        return Err(CliError::Usage("table is empty".into()));
    }
    Ok(MapTable::new(k, entries)?)
}

#[cfg(test)]
fn table_to_json(t: &MapTable) -> Value {
    Value::Object(
        t.entries()
            .iter()
            .map(|(x, v)| (x.to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

fn small_int(v: Option<&Value>, key: &str) -> Result<u64, CliError> {
    let v = v.ok_or_else(|| CliError::Usage(format!("grid is missing \"{key}\"")))?;
    let parsed = match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| CliError::Usage(format!("grid \"{key}\" must be a nonnegative integer")))
}

pub fn parse_grid(text: &str) -> Result<GridValues, CliError> {
    let Value::Object(m) = parse_json(text)? else {
        return Err(CliError::Usage("grid must be a JSON object".into()));
    };
    let k = small_int(m.get("k"), "k")? as usize;
    if k == 0 {
        return Err(CliError::Usage("grid \"k\" must be at least 1".into()));
    }
    let n = u32::try_from(small_int(m.get("n"), "n")?)
        .map_err(|_| CliError::Usage("grid \"n\" is too large".into()))?;
    let Some(Value::Object(vals)) = m.get("values") else {
        return Err(CliError::Usage("grid \"values\" must be an object".into()));
    };
    let mut values = BTreeMap::new();
    for (key, v) in vals {
        let idx: Vec<u32> = key
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("bad grid index \"{key}\"")))?;
        if idx.len() != k || idx.iter().any(|&i| i > n) {
            return Err(CliError::Usage(format!(
                "grid index \"{key}\" is not in {{0..{n}}}^{k}"
            )));
        }
        let value = parse_expr(expr_string(v, "grid value")?, k)?;
        values.insert(Monomial::new(idx), value);
    }
    Ok(GridValues::new(k, n, values))
}

#[cfg(test)]
fn grid_to_json(g: &GridValues) -> Value {
    let values = g
        .values
        .iter()
        .map(|(i, v)| {
            let key: Vec<String> = i.exponents().iter().map(u32::to_string).collect();
            (key.join(","), Value::String(v.to_string()))
        })
        .collect();
    serde_json::json!({ "k": g.nvars, "n": g.n, "values": Value::Object(values) })
}
