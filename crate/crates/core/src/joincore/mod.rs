//! The join scheme: client-side setup, row encryption and token generation;
//! server-side tag computation and hash matching; a plaintext oracle with
//! the same result type.

pub mod codec;
mod matching;
mod oracle;
mod scheme;

use std::fmt;
use std::str::FromStr;

pub use matching::{execute_join, sj_match};
pub use oracle::{oracle_join, satisfying_rows};
pub use scheme::{
    build_query_vector, build_row_vector, query_vector_from_polys, sj_decrypt_row,
    sj_decrypt_rows, sj_decrypt_table, sj_encrypt_row, sj_encrypt_table, sj_setup, sj_token_gen,
};

use crate::error::{Error, Result};
use crate::fhipe::{CipherVector, Fingerprint, TokenVector};
use crate::predicate::{AttributeValue, SelectionClause};
use crate::algebra::PairingSuite;

/// Which of the two joined tables a row or token belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableSide {
    A,
    B,
}

impl TableSide {
    pub fn code(self) -> u32 {
        match self {
            TableSide::A => 0,
            TableSide::B => 1,
        }
    }

    pub fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(TableSide::A),
            1 => Ok(TableSide::B),
            other => Err(Error::format("table id", format!("unknown table id {other}"))),
        }
    }
}

impl fmt::Display for TableSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableSide::A => "A",
            TableSide::B => "B",
        })
    }
}

/// A row identity: `(table, row-id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowRef {
    pub side: TableSide,
    pub row_id: u64,
}

impl RowRef {
    pub fn a(row_id: u64) -> Self {
        Self {
            side: TableSide::A,
            row_id,
        }
    }

    pub fn b(row_id: u64) -> Self {
        Self {
            side: TableSide::B,
            row_id,
        }
    }
}

impl fmt::Display for RowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.row_id)
    }
}

impl FromStr for RowRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::format("row reference", format!("`{s}` is not SIDE:ROW"));
        let (side, id) = s.split_once(':').ok_or_else(bad)?;
        let side = match side {
            "A" => TableSide::A,
            "B" => TableSide::B,
            _ => return Err(bad()),
        };
        Ok(Self {
            side,
            row_id: id.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSchema {
    pub name: String,
    pub join_attr: String,
    pub attrs: Vec<String>,
}

impl TableSchema {
    pub fn new(name: impl Into<String>, join_attr: impl Into<String>, attrs: &[&str]) -> Self {
        Self {
            name: name.into(),
            join_attr: join_attr.into(),
            attrs: attrs.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.attrs.len()
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainRow {
    pub row_id: u64,
    pub join_value: AttributeValue,
    pub attrs: Vec<AttributeValue>,
}

impl PlainRow {
    pub fn new(row_id: u64, join_value: &str, attrs: &[&str]) -> Self {
        Self {
            row_id,
            join_value: join_value.into(),
            attrs: attrs.iter().map(|&a| a.into()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainTable {
    pub schema: TableSchema,
    pub rows: Vec<PlainRow>,
}

// Padding columns carry this constant and are never constrained.
const PAD_PREFIX: &str = "__pad";

impl PlainTable {
    pub fn new(schema: TableSchema, rows: Vec<PlainRow>) -> Result<Self> {
        let m = schema.m();
        if let Some(bad) = rows.iter().find(|r| r.attrs.len() != m) {
            return Err(Error::SchemaMismatch(format!(
                "row {} has {} attributes, schema `{}` has {m}",
                bad.row_id,
                bad.attrs.len(),
                schema.name
            )));
        }
        Ok(Self { schema, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends constant dummy attributes until the schema has `m` of them.
    pub fn padded_to(&self, m: usize) -> Result<Self> {
        let have = self.schema.m();
        if have > m {
            return Err(Error::SchemaMismatch(format!(
                "table `{}` has {have} attributes but the key supports m = {m}",
                self.schema.name
            )));
        }
        let mut out = self.clone();
        for i in have..m {
            out.schema.attrs.push(format!("{PAD_PREFIX}{i}"));
        }
        for row in &mut out.rows {
            row.attrs.resize(m, AttributeValue::default());
        }
        Ok(out)
    }
}

/// `m` non-join attributes, `IN` lists of at most `t` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeParams {
    pub m: usize,
    pub t: usize,
}

impl SchemeParams {
    pub fn new(m: usize, t: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if t == 0 {
            return Err(Error::InvalidParams("t must be at least 1".into()));
        }
        Ok(Self { m, t })
    }

    /// Vector dimension `m(t+1) + 3`.
    pub fn n(&self) -> usize {
        self.m * (self.t + 1) + 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedRow<S: PairingSuite> {
    pub row_id: u64,
    pub cipher: CipherVector<S>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedTable<S: PairingSuite> {
    pub params: SchemeParams,
    pub fingerprint: Fingerprint,
    pub rows: Vec<EncryptedRow<S>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinQuery {
    pub id: u64,
    pub clause_a: SelectionClause,
    pub clause_b: SelectionClause,
}

impl JoinQuery {
    pub fn new(id: u64, clause_a: SelectionClause, clause_b: SelectionClause) -> Self {
        Self {
            id,
            clause_a,
            clause_b,
        }
    }

    pub fn clause(&self, side: TableSide) -> &SelectionClause {
        match side {
            TableSide::A => &self.clause_a,
            TableSide::B => &self.clause_b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryToken<S: PairingSuite> {
    pub query_id: u64,
    pub side: TableSide,
    pub fingerprint: Fingerprint,
    pub tk: TokenVector<S>,
}

/// Both table tokens of one query. The shared query key is not kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTokenPair<S: PairingSuite> {
    pub query_id: u64,
    pub a: QueryToken<S>,
    pub b: QueryToken<S>,
}

/// Canonical bytes of a decrypted target-group element plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tag {
    pub bytes: Vec<u8>,
    pub row: RowRef,
    pub query_id: u64,
}

/// Rows bucketed by equal tag. `groups` lists every bucket with two or
/// more members, including same-table buckets; `join_pairs` holds only
/// cross-table `(A row, B row)` pairs. Both are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub query_id: u64,
    pub groups: Vec<Vec<RowRef>>,
    pub join_pairs: Vec<(u64, u64)>,
}

impl MatchResult {
    /// Sorts members within groups, groups, and pairs.
    pub(crate) fn from_buckets(query_id: u64, buckets: impl IntoIterator<Item = Vec<RowRef>>) -> Self {
        let mut groups = Vec::new();
        let mut join_pairs = Vec::new();
        for mut members in buckets {
            if members.len() < 2 {
                continue;
            }
            members.sort_unstable();
            members.dedup();
            for a in members.iter().filter(|r| r.side == TableSide::A) {
                for b in members.iter().filter(|r| r.side == TableSide::B) {
                    join_pairs.push((a.row_id, b.row_id));
                }
            }
            if members.len() >= 2 {
                groups.push(members);
            }
        }
        groups.sort_unstable();
        join_pairs.sort_unstable();
        Self {
            query_id,
            groups,
            join_pairs,
        }
    }
}
