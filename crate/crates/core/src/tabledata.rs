//! Table ingestion: TPC-H `.tbl` files, CSV dumps, the synthetic selectivity
//! column, and seeded random instances for tests.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::joincore::{JoinQuery, PlainRow, PlainTable, TableSchema};
use crate::predicate::{AttributeValue, SelectionClause};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Integer,
    Decimal,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TblSchema {
    pub name: String,
    pub columns: Vec<(String, ColumnKind)>,
}

impl TblSchema {
    pub fn new(name: &str, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|&(n, k)| (n.to_string(), k)).collect(),
        }
    }

    pub fn customer() -> Self {
        use ColumnKind::*;
        Self::new(
            "customer",
            &[
                ("c_custkey", Integer),
                ("c_name", Text),
                ("c_address", Text),
                ("c_nationkey", Integer),
                ("c_phone", Text),
                ("c_acctbal", Decimal),
                ("c_mktsegment", Text),
                ("c_comment", Text),
            ],
        )
    }

    pub fn orders() -> Self {
        use ColumnKind::*;
        Self::new(
            "orders",
            &[
                ("o_orderkey", Integer),
                ("o_custkey", Integer),
                ("o_orderstatus", Text),
                ("o_totalprice", Decimal),
                ("o_orderdate", Text),
                ("o_orderpriority", Text),
                ("o_clerk", Text),
                ("o_shippriority", Integer),
                ("o_comment", Text),
            ],
        )
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "customer" | "customers" => Ok(Self::customer()),
            "orders" => Ok(Self::orders()),
            other => Err(Error::Usage(format!("unknown .tbl schema `{other}`"))),
        }
    }

    /// Accepts the full column name or the name without its `x_` prefix.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|(c, _)| c == name || c.split_once('_').is_some_and(|(_, s)| s == name))
            .ok_or_else(|| {
                Error::SchemaMismatch(format!("no column `{name}` in `{}`", self.name))
            })
    }
}

/// Which columns become the join value and the non-join attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub join: String,
    /// `None` keeps every column other than the join column, in file order.
    pub attrs: Option<Vec<String>>,
    /// Keep only the first `limit` rows.
    pub limit: Option<usize>,
}

impl Projection {
    pub fn new(join: &str) -> Self {
        Self {
            join: join.to_string(),
            attrs: None,
            limit: None,
        }
    }

    pub fn attrs(mut self, attrs: &[&str]) -> Self {
        self.attrs = Some(attrs.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }
}

fn parse_error(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        line,
        detail: detail.into(),
    }
}

/// Canonical form of a numeric cell: no sign on zero, no leading zeros, no
/// trailing fractional zeros.
pub fn normalize_decimal(cell: &str) -> Option<String> {
    let (neg, digits) = match cell.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, cell.strip_prefix('+').unwrap_or(cell)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let int = int.trim_start_matches('0');
    let frac = frac.trim_end_matches('0');
    let mut out = String::new();
    if neg && !(int.is_empty() && frac.is_empty()) {
        out.push('-');
    }
    out.push_str(if int.is_empty() { "0" } else { int });
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    Some(out)
}

fn normalize(cell: &str, kind: ColumnKind, line: usize) -> Result<String> {
    let cell = cell.trim();
    match kind {
        ColumnKind::Text => Ok(cell.to_string()),
        ColumnKind::Integer if cell.contains('.') => {
            Err(parse_error(line, format!("`{cell}` is not an integer")))
        }
        ColumnKind::Integer | ColumnKind::Decimal => normalize_decimal(cell)
            .ok_or_else(|| parse_error(line, format!("`{cell}` is not a number"))),
    }
}

fn project(
    name: &str,
    header: &[String],
    projection: &Projection,
    id_col: Option<usize>,
) -> Result<(usize, Vec<usize>, TableSchema)> {
    let find = |c: &str| {
        header
            .iter()
            .position(|h| h == c || h.split_once('_').is_some_and(|(_, s)| s == c))
            .ok_or_else(|| Error::SchemaMismatch(format!("no column `{c}` in `{name}`")))
    };
    let join = find(&projection.join)?;
    let attrs = match &projection.attrs {
        Some(list) => list.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?,
        None => (0..header.len()).filter(|&i| i != join && Some(i) != id_col).collect(),
    };
    let mut seen = BTreeSet::new();
    for &i in &attrs {
        if i == join || !seen.insert(i) {
            return Err(Error::SchemaMismatch(format!(
                "column `{}` selected twice",
                header[i]
            )));
        }
    }
    let attr_names: Vec<&str> = attrs.iter().map(|&i| header[i].as_str()).collect();
    let schema = TableSchema::new(name, header[join].clone(), &attr_names);
    Ok((join, attrs, schema))
}

/// Parses pipe-delimited rows (trailing `|` optional). Row ids are 1..N in
/// file order.
pub fn parse_tbl_str(text: &str, schema: &TblSchema, projection: &Projection) -> Result<PlainTable> {
    let header: Vec<String> = schema.columns.iter().map(|(c, _)| c.clone()).collect();
    let (join, attrs, table_schema) = project(&schema.name, &header, projection, None)?;
    let limit = projection.limit.unwrap_or(usize::MAX);
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if rows.len() >= limit {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let line = line.strip_suffix('|').unwrap_or(line);
        let cells: Vec<&str> = line.split('|').collect();
        if cells.len() != schema.columns.len() {
            return Err(parse_error(
                lineno,
                format!("expected {} fields, found {}", schema.columns.len(), cells.len()),
            ));
        }
        let cell = |i: usize| normalize(cells[i], schema.columns[i].1, lineno).map(AttributeValue::from);
        rows.push(PlainRow {
            row_id: rows.len() as u64 + 1,
            join_value: cell(join)?,
            attrs: attrs.iter().map(|&i| cell(i)).collect::<Result<_>>()?,
        });
    }
    PlainTable::new(table_schema, rows)
}

pub fn parse_tbl(path: &Path, schema: &TblSchema, projection: &Projection) -> Result<PlainTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tbl_str(&text, schema, projection)
}

/// Canonical dump: header `row_id,<join>,<attrs…>`.
pub fn table_to_csv(table: &PlainTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row_id", table.schema.join_attr.as_str()];
    header.extend(table.schema.attrs.iter().map(String::as_str));
    let csv_err = |e: csv::Error| Error::format("csv", e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let id = row.row_id.to_string();
        let mut record: Vec<&[u8]> = vec![id.as_bytes(), row.join_value.as_bytes()];
        record.extend(row.attrs.iter().map(AttributeValue::as_bytes));
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format("csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("cells are utf-8"))
}

/// Reads a CSV with a header row. Without `id_col`, row ids are 1..N.
/// Cells are trimmed.
pub fn read_csv_str(
    name: &str,
    text: &str,
    projection: &Projection,
    id_col: Option<&str>,
) -> Result<PlainTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let id_idx = id_col
        .map(|c| {
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| Error::SchemaMismatch(format!("no id column `{c}` in `{name}`")))
        })
        .transpose()?;
    let (join, attrs, schema) = project(name, &header, projection, id_idx)?;
    let limit = projection.limit.unwrap_or(usize::MAX);
    let mut rows = Vec::new();
    let mut ids = BTreeSet::new();
    for (idx, record) in reader.records().enumerate() {
        if rows.len() >= limit {
            break;
        }
        let lineno = idx + 2;
        let record = record.map_err(|e| parse_error(lineno, e.to_string()))?;
        let row_id = match id_idx {
            Some(i) => record[i]
                .parse::<u64>()
                .map_err(|_| parse_error(lineno, format!("row id `{}` is not a u64", &record[i])))?,
            None => rows.len() as u64 + 1,
        };
        if !ids.insert(row_id) {
            return Err(parse_error(lineno, format!("duplicate row id {row_id}")));
        }
        rows.push(PlainRow {
            row_id,
            join_value: record[join].into(),
            attrs: attrs.iter().map(|&i| record[i].into()).collect(),
        });
    }
    PlainTable::new(schema, rows)
}

pub fn read_csv(path: &Path, projection: &Projection, id_col: Option<&str>) -> Result<PlainTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_csv_str(&name, &text, projection, id_col)
}

/// Prefix used for rows that carry no selectivity value.
pub const FILLER_PREFIX: &str = "~fill";

/// Appends column `column`: each `(value, fraction)` goes to
/// `⌊fraction·n⌋` rows picked by a seeded shuffle, every other row gets a
/// unique filler.
pub fn synthesize_selectivity(
    table: &PlainTable,
    column: &str,
    spec: &[(AttributeValue, f64)],
    seed: u64,
) -> Result<PlainTable> {
    if let Some((v, f)) = spec.iter().find(|(_, f)| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::InvalidParams(format!("fraction {f} for `{v}` is outside (0, 1]")));
    }
    let total: f64 = spec.iter().map(|(_, f)| f).sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::SelectivityOverflow(total));
    }
    let n = table.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
    let mut assigned: Vec<Option<&AttributeValue>> = vec![None; n];
    let mut next = 0;
    for (value, fraction) in spec {
        let count = ((fraction * n as f64) + 1e-9).floor() as usize;
        let count = count.min(n - next);
        for &i in &order[next..next + count] {
            assigned[i] = Some(value);
        }
        next += count;
    }
    let mut out = table.clone();
    out.schema.attrs.push(column.to_string());
    for (row, value) in out.rows.iter_mut().zip(assigned) {
        row.attrs.push(match value {
            Some(v) => v.clone(),
            None => format!("{FILLER_PREFIX}{}", row.row_id).into(),
        });
    }
    Ok(out)
}

/// The benchmark selectivity set `{1/12.5, 1/25, 1/50, 1/100}`.
pub fn standard_selectivities() -> Vec<(AttributeValue, f64)> {
    [12.5, 25.0, 50.0, 100.0]
        .into_iter()
        .map(|d| (selectivity_value(1.0 / d), 1.0 / d))
        .collect()
}

/// Attribute value used for selectivity fraction `s`, e.g. `s=0.01`.
pub fn selectivity_value(s: f64) -> AttributeValue {
    format!("s={s}").into()
}

/// Inputs for a benchmark table pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    pub customers: PathBuf,
    pub orders: PathBuf,
    pub scale_tag: String,
    pub selectivity: Vec<(AttributeValue, f64)>,
    pub join_attr: String,
    /// Carried TPC-H columns per table, after the selectivity column.
    pub extra_attrs: usize,
    pub limit: Option<usize>,
    pub seed: u64,
}

pub const SELECTIVITY_COLUMN: &str = "selectivity";

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.selectivity.iter().map(|(_, f)| f).sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::SelectivityOverflow(total));
        }
        if self.selectivity.iter().any(|(_, f)| !(*f > 0.0 && *f <= 1.0)) {
            return Err(Error::InvalidParams("selectivity fractions must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// `(customers, orders)` with the selectivity column first.
    pub fn load(&self) -> Result<(PlainTable, PlainTable)> {
        self.validate()?;
        let load = |path: &Path, schema: TblSchema, salt: u64| -> Result<PlainTable> {
            let mut p = Projection::new(&self.join_attr);
            p.limit = self.limit;
            let full = parse_tbl(path, &schema, &p)?;
            let with_sel = synthesize_selectivity(&full, SELECTIVITY_COLUMN, &self.selectivity, self.seed ^ salt)?;
            Ok(keep_selectivity_first(&with_sel, self.extra_attrs))
        };
        Ok((
            load(&self.customers, TblSchema::customer(), 0)?,
            load(&self.orders, TblSchema::orders(), 1)?,
        ))
    }
}

/// Moves the last (selectivity) column to the front and keeps `extra`
/// of the remaining attributes.
pub fn keep_selectivity_first(table: &PlainTable, extra: usize) -> PlainTable {
    let m = table.schema.m();
    let keep: Vec<usize> = std::iter::once(m - 1).chain((0..m - 1).take(extra)).collect();
    let mut out = table.clone();
    out.schema.attrs = keep.iter().map(|&i| table.schema.attrs[i].clone()).collect();
    for (dst, src) in out.rows.iter_mut().zip(&table.rows) {
        dst.attrs = keep.iter().map(|&i| src.attrs[i].clone()).collect();
    }
    out
}

/// TPC-H-shaped `.tbl` text for `customers` and `orders` rows. Each order
/// references a customer key in `1..=customers`.
pub fn synthetic_tpch(seed: u64, customers: usize, orders: usize) -> (String, String) {
    const SEGMENTS: [&str; 5] = ["AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"];
    const PRIORITIES: [&str; 5] = ["1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECIFIED", "5-LOW"];
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut cust = String::with_capacity(customers * 160);
    for key in 1..=customers {
        let nation = rng.gen_range(0..25);
        writeln!(
            cust,
            "{key}|Customer#{key:09}|addr{:08x}|{nation}|{}-{:03}-{:03}-{:04}|{}.{:02}|{}|comment {:x}|",
            rng.gen::<u32>(),
            nation + 10,
            rng.gen_range(100..1000),
            rng.gen_range(100..1000),
            rng.gen_range(1000..10000),
            rng.gen_range(-999..10000),
            rng.gen_range(0..100),
            SEGMENTS.choose(&mut rng).unwrap(),
            rng.gen::<u64>(),
        )
        .unwrap();
    }
    let mut ord = String::with_capacity(orders * 160);
    for i in 1..=orders {
        let custkey = rng.gen_range(1..=customers.max(1));
        writeln!(
            ord,
            "{}|{custkey}|{}|{}.{:02}|199{}-{:02}-{:02}|{}|Clerk#{:09}|0|order comment {:x}|",
            i * 4 - 3,
            ["O", "F", "P"].choose(&mut rng).unwrap(),
            rng.gen_range(800..500_000),
            rng.gen_range(0..100),
            rng.gen_range(2..9),
            rng.gen_range(1..13),
            rng.gen_range(1..29),
            PRIORITIES.choose(&mut rng).unwrap(),
            rng.gen_range(1..1001),
            rng.gen::<u64>(),
        )
        .unwrap();
    }
    (cust, ord)
}

/// Shape of a random test instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub rows_a: usize,
    pub rows_b: usize,
    pub m: usize,
    pub t: usize,
    pub join_domain: usize,
    pub attr_domain: usize,
}

fn random_table(rng: &mut ChaCha20Rng, name: &str, rows: usize, spec: &InstanceSpec) -> PlainTable {
    let attrs: Vec<String> = (1..=spec.m).map(|i| format!("x{i}")).collect();
    let attr_refs: Vec<&str> = attrs.iter().map(String::as_str).collect();
    let rows = (1..=rows as u64)
        .map(|id| PlainRow {
            row_id: id,
            join_value: format!("j{}", rng.gen_range(0..spec.join_domain.max(1))).into(),
            attrs: (0..spec.m)
                .map(|_| format!("v{}", rng.gen_range(0..spec.attr_domain.max(1))).into())
                .collect(),
        })
        .collect();
    PlainTable::new(TableSchema::new(name, "j", &attr_refs), rows).expect("rows built to schema")
}

/// Each attribute is constrained with probability 1/2, to between 1 and
/// `t` distinct domain values.
pub fn random_clause<R: Rng + ?Sized>(rng: &mut R, spec: &InstanceSpec) -> SelectionClause {
    let mut clause = SelectionClause::unconstrained();
    let domain = spec.attr_domain.max(1);
    for i in 0..spec.m {
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=spec.t.min(domain));
            let values = (0..domain).choose_multiple(rng, k);
            clause = clause.with_in(i, values.into_iter().map(|v| format!("v{v}")));
        }
    }
    clause
}

/// Tables plus `queries` random queries with ids `1..=queries`.
pub fn gen_random_workload(
    seed: u64,
    spec: &InstanceSpec,
    queries: usize,
) -> (PlainTable, PlainTable, Vec<JoinQuery>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = random_table(&mut rng, "A", spec.rows_a, spec);
    let b = random_table(&mut rng, "B", spec.rows_b, spec);
    let qs = (1..=queries as u64)
        .map(|id| JoinQuery::new(id, random_clause(&mut rng, spec), random_clause(&mut rng, spec)))
        .collect();
    (a, b, qs)
}

pub fn gen_random_instance(seed: u64, spec: &InstanceSpec) -> (PlainTable, PlainTable, JoinQuery) {
    let (a, b, mut qs) = gen_random_workload(seed, spec, 1);
    (a, b, qs.pop().expect("one query"))
}
