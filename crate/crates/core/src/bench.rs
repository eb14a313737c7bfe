//! Timing harness: per-row crypto cost across `t`, join runtime across
//! table sizes and selectivities, and join runtime across `IN`-clause sizes.
//!
//! Only the timed operation sits inside the clock; setup, encryption of the
//! benchmark tables and I/O are outside it. Repetitions are interleaved
//! across points (rep 0 of every point, then rep 1, ...) so a slow stretch
//! on the machine hits all points alike. Output is grouped by point.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::algebra::PairingSuite;
use crate::error::{Error, Result};
use crate::joincore::{
    sj_decrypt_row, sj_decrypt_rows, sj_encrypt_row, sj_encrypt_table, sj_match, sj_setup,
    sj_token_gen, EncryptedTable, JoinQuery, PlainRow, PlainTable, QueryTokenPair,
};
use crate::predicate::{AttributeValue, SelectionClause};
use crate::tabledata::{
    keep_selectivity_first, parse_tbl_str, selectivity_value, synthesize_selectivity,
    synthetic_tpch, Projection, TblSchema, SELECTIVITY_COLUMN,
};

pub const DEFAULT_REPS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Crypto,
    Scale,
    InClause,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Crypto => "crypto",
            BenchMode::Scale => "scale",
            BenchMode::InClause => "inclause",
        })
    }
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crypto" => Ok(BenchMode::Crypto),
            "scale" => Ok(BenchMode::Scale),
            "inclause" => Ok(BenchMode::InClause),
            other => Err(Error::Usage(format!("unknown bench mode `{other}`"))),
        }
    }
}

/// One timed repetition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub experiment: String,
    pub operation: String,
    pub m: usize,
    pub t: usize,
    pub rows: usize,
    pub selectivity: f64,
    pub rep: usize,
    pub seconds: f64,
    pub matches: usize,
}

pub fn records_to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::format("bench csv", e.to_string()))?;
    }
    if records.is_empty() {
        w.write_record(["experiment", "operation", "m", "t", "rows", "selectivity", "rep", "seconds", "matches"])
            .map_err(|e| Error::format("bench csv", e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format("bench csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

/// Median of `seconds` over the records accepted by `keep`.
pub fn median_seconds(records: &[BenchRecord], keep: impl Fn(&BenchRecord) -> bool) -> Option<f64> {
    let mut xs: Vec<f64> = records.iter().filter(|r| keep(r)).map(|r| r.seconds).collect();
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[mid] } else { (xs[mid - 1] + xs[mid]) / 2.0 })
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(f64, T)> {
    let start = Instant::now();
    let out = f()?;
    Ok((start.elapsed().as_secs_f64(), out))
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::Usage("reps must be at least 1".into()));
    }
    Ok(())
}

/// Token generation, single-row encryption and single-row decryption for
/// each `t`, with an `IN` clause of `t` values on the first attribute.
pub fn bench_crypto<S: PairingSuite>(
    m: usize,
    ts: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    check_reps(reps)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let attrs: Vec<String> = (0..m).map(|i| format!("value{i}")).collect();
    let attr_refs: Vec<&str> = attrs.iter().map(String::as_str).collect();
    let row = PlainRow::new(1, "42", &attr_refs);
    let mut points = Vec::new();
    for &t in ts {
        let (pp, msk, params) = sj_setup::<S, _>(m, t, &mut rng)?;
        let values = std::iter::once(attrs[0].clone()).chain((1..t).map(|i| format!("decoy{i}")));
        let query = JoinQuery::new(1, SelectionClause::unconstrained().with_in(0, values), SelectionClause::unconstrained());
        points.push((t, pp, msk, params, query));
    }
    let mut per_point = vec![Vec::new(); points.len()];
    for rep in 0..reps {
        for ((t, pp, msk, params, query), out) in points.iter().zip(&mut per_point) {
            let record = |operation: &str, seconds: f64| BenchRecord {
                experiment: BenchMode::Crypto.to_string(),
                operation: operation.to_string(),
                m,
                t: *t,
                rows: 1,
                selectivity: 0.0,
                rep,
                seconds,
                matches: 0,
            };
            let (s, tokens) = time(|| sj_token_gen(msk, params, query, &mut rng))?;
            out.push(record("token_gen", s));
            let (s, enc) = time(|| sj_encrypt_row(msk, params, &row, &mut rng))?;
            out.push(record("encrypt_row", s));
            let (s, _) = time(|| sj_decrypt_row(pp, &tokens.a, &enc))?;
            out.push(record("decrypt_row", s));
        }
    }
    Ok(per_point.concat())
}

/// Where benchmark tables come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableSource {
    /// TPC-H-shaped rows generated from a seed.
    Synthetic { seed: u64 },
    /// Real `.tbl` files, truncated to the requested row count.
    Files { customers: PathBuf, orders: PathBuf },
}

/// Customers and orders with `rows` rows each, joined on custkey, with the
/// selectivity column first and `m - 1` further TPC-H attributes.
pub fn bench_tables(
    source: &TableSource,
    rows: usize,
    m: usize,
    selectivity: &[(AttributeValue, f64)],
    seed: u64,
) -> Result<(PlainTable, PlainTable)> {
    let (cust_text, ord_text) = match source {
        TableSource::Synthetic { seed } => synthetic_tpch(*seed, rows, rows),
        TableSource::Files { customers, orders } => (
            std::fs::read_to_string(customers).map_err(|e| Error::io(customers, e))?,
            std::fs::read_to_string(orders).map_err(|e| Error::io(orders, e))?,
        ),
    };
    let projection = Projection::new("custkey").limit(rows);
    let prepare = |text: &str, schema: TblSchema, salt: u64| -> Result<PlainTable> {
        let t = parse_tbl_str(text, &schema, &projection)?;
        let t = synthesize_selectivity(&t, SELECTIVITY_COLUMN, selectivity, seed ^ salt)?;
        Ok(keep_selectivity_first(&t, m.saturating_sub(1)))
    };
    Ok((
        prepare(&cust_text, TblSchema::customer(), 0)?,
        prepare(&ord_text, TblSchema::orders(), 1)?,
    ))
}

fn selected<'a, S: PairingSuite>(
    plain: &'a PlainTable,
    enc: &'a EncryptedTable<S>,
    clause: &'a SelectionClause,
) -> impl Iterator<Item = &'a crate::joincore::EncryptedRow<S>> + 'a {
    plain
        .rows
        .iter()
        .zip(&enc.rows)
        .filter(|(p, _)| clause.get(0).accepts(&p.attrs[0]))
        .map(|(_, e)| e)
}

fn timed_join<S: PairingSuite>(
    pp: &crate::fhipe::PublicParams,
    tokens: &QueryTokenPair<S>,
    query: &JoinQuery,
    plain: (&PlainTable, &PlainTable),
    enc: (&EncryptedTable<S>, &EncryptedTable<S>),
) -> Result<(f64, usize)> {
    time(|| {
        let tags_a = sj_decrypt_rows(pp, &tokens.a, selected(plain.0, enc.0, &query.clause_a))?;
        let tags_b = sj_decrypt_rows(pp, &tokens.b, selected(plain.1, enc.1, &query.clause_b))?;
        Ok(sj_match(query.id, &tags_a, &tags_b).join_pairs.len())
    })
}

/// Server join runtime (pre-filter, decryption, matching) at `t = 1` for
/// every row count and selectivity. Rows not carrying the queried
/// selectivity value are dropped before decryption.
pub fn bench_scale<S: PairingSuite>(
    source: &TableSource,
    row_counts: &[usize],
    selectivities: &[f64],
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    check_reps(reps)?;
    let spec: Vec<(AttributeValue, f64)> = selectivities.iter().map(|&s| (selectivity_value(s), s)).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut datasets = Vec::new();
    for &rows in row_counts {
        let (pa, pb) = bench_tables(source, rows, m, &spec, seed)?;
        let (pp, msk, params) = sj_setup::<S, _>(m, 1, &mut rng)?;
        let ea = sj_encrypt_table(&msk, &params, &pa, &mut rng)?;
        let eb = sj_encrypt_table(&msk, &params, &pb, &mut rng)?;
        datasets.push((rows, pa, pb, pp, msk, params, ea, eb));
    }
    let points: Vec<_> = datasets
        .iter()
        .flat_map(|d| spec.iter().map(move |sel| (d, sel)))
        .collect();
    let mut per_point = vec![Vec::new(); points.len()];
    for rep in 0..reps {
        for (((rows, pa, pb, pp, msk, params, ea, eb), (value, s)), out) in points.iter().zip(&mut per_point) {
            let clause = SelectionClause::unconstrained().with_in(0, [value.clone()]);
            let query = JoinQuery::new(1, clause.clone(), clause);
            let tokens = sj_token_gen(msk, params, &query, &mut rng)?;
            let (seconds, matches) = timed_join(pp, &tokens, &query, (pa, pb), (ea, eb))?;
            out.push(BenchRecord {
                experiment: BenchMode::Scale.to_string(),
                operation: "join".into(),
                m,
                t: 1,
                rows: *rows,
                selectivity: *s,
                rep,
                seconds,
                matches,
            });
        }
    }
    Ok(per_point.concat())
}

/// Join runtime for `IN` clauses of `t` values: the queried selectivity
/// value plus `t - 1` values that occur in no row.
pub fn bench_inclause<S: PairingSuite>(
    source: &TableSource,
    rows: usize,
    selectivity: f64,
    ts: &[usize],
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    check_reps(reps)?;
    let value = selectivity_value(selectivity);
    let (pa, pb) = bench_tables(source, rows, m, &[(value.clone(), selectivity)], seed)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    for &t in ts {
        let (pp, msk, params) = sj_setup::<S, _>(m, t, &mut rng)?;
        let ea = sj_encrypt_table(&msk, &params, &pa, &mut rng)?;
        let eb = sj_encrypt_table(&msk, &params, &pb, &mut rng)?;
        let values: Vec<AttributeValue> = std::iter::once(value.clone())
            .chain((1..t).map(|i| format!("decoy{i}").into()))
            .collect();
        let clause = SelectionClause::unconstrained().with_in(0, values);
        let query = JoinQuery::new(1, clause.clone(), clause);
        points.push((t, pp, msk, params, ea, eb, query));
    }
    let mut per_point = vec![Vec::new(); points.len()];
    for rep in 0..reps {
        for ((t, pp, msk, params, ea, eb, query), out) in points.iter().zip(&mut per_point) {
            let tokens = sj_token_gen(msk, params, query, &mut rng)?;
            let (seconds, matches) = timed_join(pp, &tokens, query, (&pa, &pb), (ea, eb))?;
            out.push(BenchRecord {
                experiment: BenchMode::InClause.to_string(),
                operation: "join".into(),
                m,
                t: *t,
                rows,
                selectivity,
                rep,
                seconds,
                matches,
            });
        }
    }
    Ok(per_point.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Bls12Suite, Toy257};

    #[test]
    fn median_of_odd_and_even_counts() {
        let rec = |s: f64| BenchRecord {
            experiment: "x".into(),
            operation: "y".into(),
            m: 1,
            t: 1,
            rows: 1,
            selectivity: 0.0,
            rep: 0,
            seconds: s,
            matches: 0,
        };
        let rs = vec![rec(3.0), rec(1.0), rec(2.0)];
        assert_eq!(median_seconds(&rs, |_| true), Some(2.0));
        assert_eq!(median_seconds(&rs[..2], |_| true), Some(2.0));
        assert_eq!(median_seconds(&rs, |_| false), None);
    }

    #[test]
    fn crypto_records_cover_every_point() {
        let rs = bench_crypto::<Toy257>(2, &[1, 3], 2, 1).unwrap();
        assert_eq!(rs.len(), 2 * 2 * 3);
        assert!(rs.iter().all(|r| r.seconds >= 0.0 && r.experiment == "crypto"));
        let csv = records_to_csv(&rs).unwrap();
        assert!(csv.starts_with("experiment,operation,m,t,rows,selectivity,rep,seconds,matches\n"));
        assert_eq!(csv.lines().count(), 13);
    }

    #[test]
    fn scale_prefilter_decrypts_only_selected_rows() {
        let src = TableSource::Synthetic { seed: 3 };
        // Real suite: join-value hashes collide too often in a toy field.
        let rs = bench_scale::<Bls12Suite>(&src, &[100], &[0.2, 0.1], 1, 1, 4).unwrap();
        assert_eq!(rs.len(), 2);
        let spec = [(selectivity_value(0.2), 0.2), (selectivity_value(0.1), 0.1)];
        let (a, b) = bench_tables(&src, 100, 1, &spec, 4).unwrap();
        for r in &rs {
            let v = selectivity_value(r.selectivity);
            let clause = SelectionClause::unconstrained().with_in(0, [v]);
            let q = JoinQuery::new(1, clause.clone(), clause);
            assert_eq!(r.matches, crate::joincore::oracle_join(&a, &b, &q).join_pairs.len());
        }
    }

    #[test]
    fn bench_tables_shape() {
        let spec = [(selectivity_value(0.1), 0.1)];
        let (a, b) = bench_tables(&TableSource::Synthetic { seed: 1 }, 100, 3, &spec, 1).unwrap();
        assert_eq!((a.len(), b.len()), (100, 100));
        assert_eq!(a.schema.attrs[0], SELECTIVITY_COLUMN);
        assert_eq!((a.schema.m(), b.schema.m()), (3, 3));
        assert_eq!(a.rows.iter().filter(|r| r.attrs[0] == spec[0].0).count(), 10);
    }

    #[test]
    fn inclause_records() {
        let rs = bench_inclause::<Toy257>(&TableSource::Synthetic { seed: 2 }, 100, 0.1, &[1, 4], 1, 2, 5).unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs[3].t, 4);
        assert!(bench_inclause::<Toy257>(&TableSource::Synthetic { seed: 2 }, 10, 0.1, &[1], 1, 0, 5).is_err());
    }

    #[test]
    fn mode_names() {
        assert_eq!("inclause".parse::<BenchMode>().unwrap(), BenchMode::InClause);
        assert!("fast".parse::<BenchMode>().is_err());
    }
}
