//! File formats.
//!
//! Binary files start with a 4-byte magic and a `u16` version; all integers
//! are little-endian and fixed width. Group elements use the suite's
//! compressed encoding, scalars big-endian fixed width.
//!
//! ```text
//! key file     SJM1 ver suite q_len m:u32 t:u32 n:u32 g1 g2 B[n*n]
//! params file  SJP1 ver suite q_len m:u32 t:u32 n:u32 fingerprint[32]
//! table file   SJT1 ver suite q_len m:u32 t:u32 n:u32 rows:u64 fingerprint[32]
//!              then per row: row_id:u64 G2[n]
//! token record SJK1 ver suite query_id:u64 table_id:u32 n:u32 G1[n] fingerprint[32]
//! ```
//!
//! A token-pair file is the A record followed by the B record. Match output
//! and tag archives are text.

use std::fmt::Write as _;

use super::{
    EncryptedRow, EncryptedTable, MatchResult, QueryToken, QueryTokenPair, RowRef, SchemeParams,
    TableSide, Tag,
};
use crate::algebra::{scalar_byte_len, scalar_read, scalar_write, PairingSuite, SquareMatrix};
use crate::error::{Error, Result};
use crate::fhipe::{CipherVector, Fingerprint, MasterSecretKey, PublicParams, TokenVector};

pub const FORMAT_VERSION: u16 = 1;
pub const MAGIC_KEY: &[u8; 4] = b"SJM1";
pub const MAGIC_PARAMS: &[u8; 4] = b"SJP1";
pub const MAGIC_TABLE: &[u8; 4] = b"SJT1";
pub const MAGIC_TOKEN: &[u8; 4] = b"SJK1";

struct Reader<'a> {
    what: &'static str,
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(what: &'static str, buf: &'a [u8]) -> Self {
        Self { what, buf, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.buf.len());
        let Some(end) = end else {
            return Err(Error::format(
                self.what,
                format!("truncated at byte {} (needed {len} more)", self.pos),
            ));
        };
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        if got != expected {
            return Err(Error::format(
                self.what,
                format!("bad magic {:?}", String::from_utf8_lossy(got)),
            ));
        }
        let version = self.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::format(self.what, format!("unsupported version {version}")));
        }
        Ok(())
    }

    fn suite<S: PairingSuite>(&mut self) -> Result<()> {
        let found = self.u16()?;
        if found != S::SUITE_ID {
            return Err(Error::SuiteMismatch {
                expected: S::SUITE_ID,
                found,
            });
        }
        Ok(())
    }

    fn q_len<S: PairingSuite>(&mut self) -> Result<()> {
        let q_len = self.u16()? as usize;
        if q_len != scalar_byte_len::<S::Scalar>() {
            return Err(Error::format(self.what, format!("scalar width {q_len} does not match suite")));
        }
        Ok(())
    }

    fn params(&mut self) -> Result<SchemeParams> {
        let m = self.u32()? as usize;
        let t = self.u32()? as usize;
        let n = self.u32()? as usize;
        let params = SchemeParams::new(m, t).map_err(|e| Error::format(self.what, e.to_string()))?;
        if params.n() != n {
            return Err(Error::format(
                self.what,
                format!("n = {n} inconsistent with m = {m}, t = {t}"),
            ));
        }
        Ok(params)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::format(
                self.what,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }
}

fn header<S: PairingSuite>(out: &mut Vec<u8>, magic: &[u8; 4], params: &SchemeParams) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&S::SUITE_ID.to_le_bytes());
    out.extend_from_slice(&(scalar_byte_len::<S::Scalar>() as u16).to_le_bytes());
    out.extend_from_slice(&(params.m as u32).to_le_bytes());
    out.extend_from_slice(&(params.t as u32).to_le_bytes());
    out.extend_from_slice(&(params.n() as u32).to_le_bytes());
}

pub fn encode_msk<S: PairingSuite>(msk: &MasterSecretKey<S>, params: &SchemeParams) -> Vec<u8> {
    let mut out = Vec::new();
    header::<S>(&mut out, MAGIC_KEY, params);
    S::g1_write(msk.g1(), &mut out);
    S::g2_write(msk.g2(), &mut out);
    for x in msk.b().entries() {
        scalar_write(x, &mut out);
    }
    out
}

pub fn decode_msk<S: PairingSuite>(bytes: &[u8]) -> Result<(MasterSecretKey<S>, SchemeParams)> {
    let mut r = Reader::new("key file", bytes);
    r.magic(MAGIC_KEY)?;
    r.suite::<S>()?;
    r.q_len::<S>()?;
    let params = r.params()?;
    let g1 = S::g1_read(r.take(S::G1_BYTES)?)?;
    let g2 = S::g2_read(r.take(S::G2_BYTES)?)?;
    let n = params.n();
    let width = scalar_byte_len::<S::Scalar>();
    let entries = (0..n * n)
        .map(|_| scalar_read(r.take(width)?))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let b = SquareMatrix::from_entries(n, entries)?;
    let msk = MasterSecretKey::from_parts(g1, g2, b)
        .map_err(|_| Error::format("key file", "masking matrix is singular"))?;
    Ok((msk, params))
}

pub fn encode_pp<S: PairingSuite>(pp: &PublicParams, params: &SchemeParams) -> Vec<u8> {
    let mut out = Vec::new();
    header::<S>(&mut out, MAGIC_PARAMS, params);
    out.extend_from_slice(&pp.fingerprint);
    out
}

pub fn decode_pp<S: PairingSuite>(bytes: &[u8]) -> Result<(PublicParams, SchemeParams)> {
    let mut r = Reader::new("params file", bytes);
    r.magic(MAGIC_PARAMS)?;
    r.suite::<S>()?;
    r.q_len::<S>()?;
    let params = r.params()?;
    let fingerprint = r.array::<32>()?;
    r.finish()?;
    Ok((
        PublicParams {
            suite_id: S::SUITE_ID,
            dim: params.n(),
            fingerprint,
        },
        params,
    ))
}

pub fn encode_table<S: PairingSuite>(table: &EncryptedTable<S>) -> Vec<u8> {
    let n = table.params.n();
    let mut out = Vec::with_capacity(70 + table.rows.len() * (8 + n * S::G2_BYTES));
    header::<S>(&mut out, MAGIC_TABLE, &table.params);
    out.extend_from_slice(&(table.rows.len() as u64).to_le_bytes());
    out.extend_from_slice(&table.fingerprint);
    for row in &table.rows {
        out.extend_from_slice(&row.row_id.to_le_bytes());
        for p in &row.cipher.0 {
            S::g2_write(p, &mut out);
        }
    }
    out
}

pub fn decode_table<S: PairingSuite>(bytes: &[u8]) -> Result<EncryptedTable<S>> {
    let mut r = Reader::new("table file", bytes);
    r.magic(MAGIC_TABLE)?;
    r.suite::<S>()?;
    r.q_len::<S>()?;
    let params = r.params()?;
    let count = r.u64()?;
    let fingerprint: Fingerprint = r.array()?;
    let n = params.n();
    let row_len = 8 + n * S::G2_BYTES;
    let remaining = bytes.len() - r.pos;
    if count.checked_mul(row_len as u64) != Some(remaining as u64) {
        return Err(Error::format(
            "table file",
            format!("header declares {count} rows but {remaining} bytes follow"),
        ));
    }
    let mut rows = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let row_id = r.u64()?;
        let cipher = (0..n)
            .map(|_| S::g2_read(r.take(S::G2_BYTES)?))
            .collect::<Result<Vec<_>>>()?;
        rows.push(EncryptedRow {
            row_id,
            cipher: CipherVector(cipher),
        });
    }
    r.finish()?;
    Ok(EncryptedTable {
        params,
        fingerprint,
        rows,
    })
}

fn encode_token_into<S: PairingSuite>(token: &QueryToken<S>, out: &mut Vec<u8>) {
    out.extend_from_slice(MAGIC_TOKEN);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&S::SUITE_ID.to_le_bytes());
    out.extend_from_slice(&token.query_id.to_le_bytes());
    out.extend_from_slice(&token.side.code().to_le_bytes());
    out.extend_from_slice(&(token.tk.len() as u32).to_le_bytes());
    for p in &token.tk.0 {
        S::g1_write(p, out);
    }
    out.extend_from_slice(&token.fingerprint);
}

fn decode_token_from<S: PairingSuite>(r: &mut Reader<'_>) -> Result<QueryToken<S>> {
    r.magic(MAGIC_TOKEN)?;
    r.suite::<S>()?;
    let query_id = r.u64()?;
    let side = TableSide::from_code(r.u32()?)?;
    let n = r.u32()? as usize;
    let tk = (0..n)
        .map(|_| S::g1_read(r.take(S::G1_BYTES)?))
        .collect::<Result<Vec<_>>>()?;
    let fingerprint = r.array()?;
    Ok(QueryToken {
        query_id,
        side,
        fingerprint,
        tk: TokenVector(tk),
    })
}

pub fn encode_token<S: PairingSuite>(token: &QueryToken<S>) -> Vec<u8> {
    let mut out = Vec::new();
    encode_token_into(token, &mut out);
    out
}

pub fn decode_token<S: PairingSuite>(bytes: &[u8]) -> Result<QueryToken<S>> {
    let mut r = Reader::new("token file", bytes);
    let token = decode_token_from(&mut r)?;
    r.finish()?;
    Ok(token)
}

pub fn encode_token_pair<S: PairingSuite>(pair: &QueryTokenPair<S>) -> Vec<u8> {
    let mut out = Vec::new();
    encode_token_into(&pair.a, &mut out);
    encode_token_into(&pair.b, &mut out);
    out
}

pub fn decode_token_pair<S: PairingSuite>(bytes: &[u8]) -> Result<QueryTokenPair<S>> {
    let mut r = Reader::new("token file", bytes);
    let a = decode_token_from::<S>(&mut r)?;
    let b = decode_token_from::<S>(&mut r)?;
    r.finish()?;
    if a.side != TableSide::A || b.side != TableSide::B {
        return Err(Error::format("token file", "expected the A token followed by the B token"));
    }
    if a.query_id != b.query_id {
        return Err(Error::format("token file", "tokens belong to different queries"));
    }
    if a.fingerprint != b.fingerprint {
        return Err(Error::KeyMismatch);
    }
    Ok(QueryTokenPair {
        query_id: a.query_id,
        a,
        b,
    })
}

const MATCH_HEADER: &str = "# secjoin match v1";
const PAIRS_HEADER: &str = "# pairs: query_id,rowid_a,rowid_b";
const GROUPS_HEADER: &str = "# groups: query_id,tag_index,members";
const QUERY_PREFIX: &str = "# query: ";

/// Line-oriented match output; byte-identical for equal results.
pub fn format_match(result: &MatchResult) -> String {
    let mut out = String::new();
    let q = result.query_id;
    writeln!(out, "{MATCH_HEADER}").unwrap();
    writeln!(out, "{QUERY_PREFIX}{q}").unwrap();
    writeln!(out, "{PAIRS_HEADER}").unwrap();
    for (a, b) in &result.join_pairs {
        writeln!(out, "{q},{a},{b}").unwrap();
    }
    writeln!(out, "{GROUPS_HEADER}").unwrap();
    for (i, group) in result.groups.iter().enumerate() {
        let members: Vec<String> = group.iter().map(RowRef::to_string).collect();
        writeln!(out, "{q},{i},{}", members.join(" ")).unwrap();
    }
    out
}

pub fn parse_match(text: &str) -> Result<MatchResult> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Pairs,
        Groups,
    }
    let mut section = Section::Start;
    let mut result = MatchResult::default();
    let mut query_id = None;
    let bad = |line: usize, detail: &str| Error::Parse {
        line,
        detail: detail.to_string(),
    };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        match line {
            MATCH_HEADER if idx == 0 => continue,
            PAIRS_HEADER => {
                section = Section::Pairs;
                continue;
            }
            GROUPS_HEADER => {
                section = Section::Groups;
                continue;
            }
            "" => continue,
            _ => {}
        }
        if let Some(id) = line.strip_prefix(QUERY_PREFIX) {
            let q: u64 = id.trim().parse().map_err(|_| bad(lineno, "bad query id"))?;
            if *query_id.get_or_insert(q) != q {
                return Err(bad(lineno, "mixed query ids"));
            }
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, ',').collect();
        if fields.len() != 3 {
            return Err(bad(lineno, "expected three comma-separated fields"));
        }
        let q: u64 = fields[0].parse().map_err(|_| bad(lineno, "bad query id"))?;
        if *query_id.get_or_insert(q) != q {
            return Err(bad(lineno, "mixed query ids"));
        }
        match section {
            Section::Start => return Err(bad(lineno, "record before section header")),
            Section::Pairs => {
                let a = fields[1].parse().map_err(|_| bad(lineno, "bad row id"))?;
                let b = fields[2].parse().map_err(|_| bad(lineno, "bad row id"))?;
                result.join_pairs.push((a, b));
            }
            Section::Groups => {
                let members = fields[2]
                    .split(' ')
                    .map(str::parse)
                    .collect::<Result<Vec<RowRef>>>()
                    .map_err(|e| bad(lineno, &e.to_string()))?;
                result.groups.push(members);
            }
        }
    }
    result.query_id = query_id.unwrap_or(0);
    Ok(result)
}

pub const TAG_ARCHIVE_HEADER: &str = "query_id,table,row_id,tag";

/// CSV of tags with provenance, one per line, in input order.
pub fn format_tags(tags: &[Tag]) -> String {
    let mut out = String::with_capacity(tags.len() * 1200);
    writeln!(out, "{TAG_ARCHIVE_HEADER}").unwrap();
    for t in tags {
        writeln!(out, "{},{},{},{}", t.query_id, t.row.side, t.row.row_id, hex::encode(&t.bytes))
            .unwrap();
    }
    out
}

pub fn parse_tags(text: &str) -> Result<Vec<Tag>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, TAG_ARCHIVE_HEADER)) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                detail: format!("expected header `{TAG_ARCHIVE_HEADER}`"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(idx, line)| {
            let bad = |detail: &str| Error::Parse {
                line: idx + 1,
                detail: detail.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad("expected four fields"));
            }
            let row: RowRef = format!("{}:{}", f[1], f[2])
                .parse()
                .map_err(|_| bad("bad table or row id"))?;
            Ok(Tag {
                query_id: f[0].parse().map_err(|_| bad("bad query id"))?,
                row,
                bytes: hex::decode(f[3]).map_err(|_| bad("bad hex tag"))?,
            })
        })
        .collect()
}
