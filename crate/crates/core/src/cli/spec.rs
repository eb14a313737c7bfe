//! Parsing of `--where-*` selection specs and selectivity fractions.

use crate::error::{Error, Result};
use crate::predicate::SelectionClause;

/// One `IN` constraint: zero-based attribute index and its values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhereSpec {
    pub index: usize,
    pub values: Vec<String>,
}

/// `attr=I:v1,v2` with `I` counting from 1, or `NAME:v1,v2` looked up in
/// `names`. An empty value list is an error.
pub fn parse_where(spec: &str, names: Option<&[String]>) -> Result<WhereSpec> {
    let (key, values) = spec
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("`{spec}` is not ATTR:VALUES")))?;
    let index = match key.strip_prefix("attr=") {
        Some(i) => {
            let i: usize = i
                .parse()
                .map_err(|_| Error::Usage(format!("bad attribute index in `{spec}`")))?;
            if i == 0 {
                return Err(Error::Usage("attribute indices count from 1".into()));
            }
            i - 1
        }
        None => names
            .and_then(|ns| ns.iter().position(|n| n == key))
            .ok_or_else(|| Error::Usage(format!("unknown attribute `{key}`")))?,
    };
    let values: Vec<String> = if values.is_empty() {
        Vec::new()
    } else {
        values.split(',').map(str::to_string).collect()
    };
    if values.is_empty() {
        return Err(Error::EmptyInClause);
    }
    Ok(WhereSpec { index, values })
}

/// Conjunction of specs; repeating an attribute is a usage error.
pub fn resolve_clause(specs: &[String], names: Option<&[String]>) -> Result<SelectionClause> {
    let mut clause = SelectionClause::unconstrained();
    let mut seen = Vec::new();
    for s in specs {
        let w = parse_where(s, names)?;
        if seen.contains(&w.index) {
            return Err(Error::Usage(format!("attribute {} constrained twice", w.index + 1)));
        }
        seen.push(w.index);
        clause = clause.with_in(w.index, w.values);
    }
    Ok(clause)
}

/// `0.01` or `1/100`.
pub fn parse_selectivity(s: &str) -> Result<f64> {
    let bad = || Error::Usage(format!("bad selectivity `{s}`"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if !(v > 0.0 && v <= 1.0) {
        return Err(bad());
    }
    Ok(v)
}
