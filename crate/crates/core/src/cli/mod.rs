//! The `secjoin` command line.
//!
//! Client commands (`setup`, `encrypt`, `token`) read the master secret key;
//! the server command (`join`) reads only public parameters, tokens and
//! encrypted tables.

mod spec;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;

use crate::algebra::DefaultSuite;
use crate::bench::{self, BenchMode, TableSource, DEFAULT_REPS};
use crate::error::{Error, Result};
use crate::joincore::codec;
use crate::joincore::{execute_join, sj_encrypt_table, sj_setup, sj_token_gen, JoinQuery, PlainTable};
use crate::leakage::{cross_query_collisions, leakage_report, observed_leakage, BaselineModel};
use crate::predicate::SelectionClause;
use crate::tabledata::{self, Projection, TblSchema};

pub use spec::{parse_selectivity, parse_where, resolve_clause, WhereSpec};

pub const KEY_DIR_ENV: &str = "SECJOIN_KEY_DIR";
pub const MSK_FILE: &str = "msk.sjm";
pub const PP_FILE: &str = "pp.sjp";

type Suite = DefaultSuite;

#[derive(Debug, Parser)]
#[command(name = "secjoin", version, about = "Equi-joins over encrypted tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a master secret key and public parameters.
    Setup(SetupArgs),
    /// Encrypt a table (CSV with header, or TPC-H .tbl).
    Encrypt(EncryptArgs),
    /// Issue a token pair for one join query.
    Token(TokenArgs),
    /// Server side: decrypt both tables under a token pair and hash-join.
    Join(JoinArgs),
    /// Compare leakage of the scheme against baseline models.
    LeakCompare(LeakArgs),
    /// Run a timing experiment and emit CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    /// Number of non-join attributes per table.
    #[arg(long)]
    pub m: usize,
    /// Maximum number of values in one IN clause.
    #[arg(long)]
    pub t: usize,
    /// Output directory for msk.sjm and pp.sjp.
    #[arg(long, env = KEY_DIR_ENV)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
    /// Deterministic keys for testing. Never use for real data.
    #[arg(long, value_name = "SEED")]
    pub insecure_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Tbl,
}

#[derive(Debug, Args)]
pub struct TableInput {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the file extension.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// `customer` or `orders` for .tbl input; guessed from the file name.
    #[arg(long)]
    pub tbl_schema: Option<String>,
    #[arg(long)]
    pub join_col: String,
    /// CSV column holding row ids; rows are numbered from 1 otherwise.
    #[arg(long)]
    pub id_col: Option<String>,
    /// Non-join columns to encrypt, in order. Defaults to all others.
    #[arg(long, value_delimiter = ',')]
    pub attrs: Option<Vec<String>>,
    /// Keep only the first N rows.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EncryptArgs {
    /// Defaults to $SECJOIN_KEY_DIR/msk.sjm.
    #[arg(long)]
    pub msk: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableInput,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_name = "SEED")]
    pub insecure_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TokenArgs {
    /// Defaults to $SECJOIN_KEY_DIR/msk.sjm.
    #[arg(long)]
    pub msk: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub query_id: u64,
    /// Selection on table A: `attr=I:v1,v2` (I counts from 1) or `NAME:v1,v2`.
    #[arg(long = "where-a")]
    pub where_a: Vec<String>,
    #[arg(long = "where-b")]
    pub where_b: Vec<String>,
    /// Attribute names of table A, in encryption order, for `NAME:` specs.
    #[arg(long, value_delimiter = ',')]
    pub attrs_a: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub attrs_b: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_name = "SEED")]
    pub insecure_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    /// Defaults to $SECJOIN_KEY_DIR/pp.sjp.
    #[arg(long)]
    pub pp: Option<PathBuf>,
    #[arg(long)]
    pub tokens: PathBuf,
    #[arg(long)]
    pub table_a: PathBuf,
    #[arg(long)]
    pub table_b: PathBuf,
    /// Match output; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every tag with its provenance as CSV.
    #[arg(long)]
    pub tags_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct LeakArgs {
    /// Plaintext table A as CSV.
    #[arg(long)]
    pub table_a: PathBuf,
    #[arg(long)]
    pub table_b: PathBuf,
    #[arg(long)]
    pub join_col_a: String,
    #[arg(long)]
    pub join_col_b: String,
    #[arg(long)]
    pub id_col_a: Option<String>,
    #[arg(long)]
    pub id_col_b: Option<String>,
    /// TOML file with `[[query]]` entries (`id`, `where_a`, `where_b`).
    #[arg(long)]
    pub workload: PathBuf,
    /// Tag archives written by `join --tags-out`; adds an OBSERVED row.
    #[arg(long = "tags")]
    pub tags: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "DET,ONION,KPABE_SELECT,SECURE_JOIN")]
    pub models: Vec<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `crypto`, `scale` or `inclause`.
    #[arg(long)]
    pub mode: String,
    /// Values of t (crypto, inclause). Default 1..=10.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<usize>,
    /// Rows per table (scale: one point per value; inclause: first value).
    #[arg(long, value_delimiter = ',')]
    pub rows: Vec<usize>,
    /// Fractions such as `0.01` or `1/100`.
    #[arg(long, value_delimiter = ',')]
    pub selectivity: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    /// Attributes per row. Defaults to 3 for crypto, 1 otherwise.
    #[arg(long)]
    pub m: Option<usize>,
    /// TPC-H customer.tbl; synthetic data is used without it.
    #[arg(long, requires = "orders")]
    pub customers: Option<PathBuf>,
    #[arg(long, requires = "customers")]
    pub orders: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "SEED")]
    pub insecure_seed: Option<u64>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Setup(a) => cmd_setup(&a),
        Command::Encrypt(a) => cmd_encrypt(&a),
        Command::Token(a) => cmd_token(&a),
        Command::Join(a) => cmd_join(&a),
        Command::LeakCompare(a) => cmd_leak_compare(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn key_file(explicit: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    match std::env::var_os(KEY_DIR_ENV) {
        Some(dir) => Ok(PathBuf::from(dir).join(name)),
        None => Err(Error::Usage(format!("no key file given and {KEY_DIR_ENV} is not set"))),
    }
}

pub fn cmd_setup(a: &SetupArgs) -> Result<()> {
    if a.t == 0 || a.m == 0 {
        return Err(Error::Usage("--m and --t must be at least 1".into()));
    }
    let msk_path = a.out.join(MSK_FILE);
    let pp_path = a.out.join(PP_FILE);
    if !a.force {
        if let Some(p) = [&msk_path, &pp_path].into_iter().find(|p| p.exists()) {
            return Err(Error::WouldOverwrite(p.clone()));
        }
    }
    let mut rng = rng_for(a.insecure_seed);
    let (pp, msk, params) = sj_setup::<Suite, _>(a.m, a.t, &mut rng)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    write(&msk_path, codec::encode_msk(&msk, &params))?;
    write(&pp_path, codec::encode_pp::<Suite>(&pp, &params))?;
    eprintln!(
        "wrote {} and {} (m={}, t={}, n={}, fingerprint {})",
        msk_path.display(),
        pp_path.display(),
        params.m,
        params.t,
        params.n(),
        hex::encode(&pp.fingerprint[..8])
    );
    Ok(())
}

fn guess_tbl_schema(input: &TableInput) -> Result<TblSchema> {
    if let Some(name) = &input.tbl_schema {
        return TblSchema::by_name(name);
    }
    let stem = input
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    for name in ["customer", "orders"] {
        if stem.contains(name) {
            return TblSchema::by_name(name);
        }
    }
    Err(Error::Usage("cannot tell the .tbl schema; pass --tbl-schema".into()))
}

pub fn load_table(input: &TableInput) -> Result<PlainTable> {
    let format = input.format.unwrap_or_else(|| match input.input.extension() {
        Some(e) if e == "tbl" => InputFormat::Tbl,
        _ => InputFormat::Csv,
    });
    let projection = Projection {
        join: input.join_col.clone(),
        attrs: input.attrs.clone(),
        limit: input.limit,
    };
    match format {
        InputFormat::Csv => tabledata::read_csv(&input.input, &projection, input.id_col.as_deref()),
        InputFormat::Tbl => {
            if input.id_col.is_some() {
                return Err(Error::Usage("--id-col applies to CSV input only".into()));
            }
            tabledata::parse_tbl(&input.input, &guess_tbl_schema(input)?, &projection)
        }
    }
}

pub fn cmd_encrypt(a: &EncryptArgs) -> Result<()> {
    let (msk, params) = codec::decode_msk::<Suite>(&read(&key_file(&a.msk, MSK_FILE)?)?)?;
    let table = load_table(&a.table)?.padded_to(params.m)?;
    let mut rng = rng_for(a.insecure_seed);
    let enc = sj_encrypt_table(&msk, &params, &table, &mut rng)?;
    write(&a.out, codec::encode_table(&enc))?;
    eprintln!("encrypted {} rows to {}", enc.rows.len(), a.out.display());
    Ok(())
}

fn names(list: &[String]) -> Option<&[String]> {
    (!list.is_empty()).then_some(list)
}

pub fn cmd_token(a: &TokenArgs) -> Result<()> {
    let (msk, params) = codec::decode_msk::<Suite>(&read(&key_file(&a.msk, MSK_FILE)?)?)?;
    let clause_a = resolve_clause(&a.where_a, names(&a.attrs_a))?;
    let clause_b = resolve_clause(&a.where_b, names(&a.attrs_b))?;
    let query = JoinQuery::new(a.query_id, clause_a, clause_b);
    let mut rng = rng_for(a.insecure_seed);
    let tokens = sj_token_gen(&msk, &params, &query, &mut rng)?;
    write(&a.out, codec::encode_token_pair(&tokens))?;
    eprintln!("wrote token pair for query {} to {}", a.query_id, a.out.display());
    Ok(())
}

pub fn cmd_join(a: &JoinArgs) -> Result<()> {
    let (pp, _) = codec::decode_pp::<Suite>(&read(&key_file(&a.pp, PP_FILE)?)?)?;
    let tokens = codec::decode_token_pair::<Suite>(&read(&a.tokens)?)?;
    let table_a = codec::decode_table::<Suite>(&read(&a.table_a)?)?;
    let table_b = codec::decode_table::<Suite>(&read(&a.table_b)?)?;
    let (result, tags) = execute_join(&pp, &tokens, &table_a, &table_b)?;
    emit(a.out.as_deref(), &codec::format_match(&result))?;
    if let Some(path) = &a.tags_out {
        write(path, codec::format_tags(&tags))?;
    }
    eprintln!(
        "query {}: {} join pairs, {} tag groups",
        result.query_id,
        result.join_pairs.len(),
        result.groups.len()
    );
    Ok(())
}

#[derive(Debug, Deserialize)]
struct Workload {
    #[serde(default)]
    query: Vec<WorkloadQuery>,
}

#[derive(Debug, Deserialize)]
struct WorkloadQuery {
    id: u64,
    #[serde(default)]
    where_a: Vec<String>,
    #[serde(default)]
    where_b: Vec<String>,
}

/// Queries from a TOML workload, resolving attribute names against the
/// tables' schemas.
pub fn parse_workload(text: &str, table_a: &PlainTable, table_b: &PlainTable) -> Result<Vec<JoinQuery>> {
    let w: Workload = toml::from_str(text).map_err(|e| Error::format("workload", e.to_string()))?;
    w.query
        .into_iter()
        .map(|q| {
            let clause = |specs: &[String], t: &PlainTable| -> Result<SelectionClause> {
                let c = resolve_clause(specs, Some(&t.schema.attrs))?;
                c.validate(t.schema.m(), usize::MAX)?;
                Ok(c)
            };
            Ok(JoinQuery::new(q.id, clause(&q.where_a, table_a)?, clause(&q.where_b, table_b)?))
        })
        .collect()
}

pub fn cmd_leak_compare(a: &LeakArgs) -> Result<()> {
    let load = |path: &Path, join: &str, id: &Option<String>| {
        tabledata::read_csv(path, &Projection::new(join), id.as_deref())
    };
    let table_a = load(&a.table_a, &a.join_col_a, &a.id_col_a)?;
    let table_b = load(&a.table_b, &a.join_col_b, &a.id_col_b)?;
    let queries = parse_workload(&read_text(&a.workload)?, &table_a, &table_b)?;
    let models = a
        .models
        .iter()
        .map(|m| m.parse::<BaselineModel>())
        .collect::<Result<Vec<_>>>()?;
    let mut report = leakage_report(&models, &table_a, &table_b, &queries);
    let mut collisions = None;
    if !a.tags.is_empty() {
        let mut tags = Vec::new();
        for p in &a.tags {
            tags.extend(codec::parse_tags(&read_text(p)?)?);
        }
        report.push("OBSERVED", queries.len(), observed_leakage(&tags));
        collisions = Some(cross_query_collisions(&tags));
    }
    let mut text = match a.format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Csv => report.to_csv(),
    };
    if let (ReportFormat::Text, Some(c)) = (a.format, collisions) {
        text.push_str(&format!("cross-query tag equalities: {c}\n"));
    }
    emit(a.out.as_deref(), &text)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let mode: BenchMode = a.mode.parse()?;
    let seed = a.insecure_seed.unwrap_or_else(rand::random);
    let source = match (&a.customers, &a.orders) {
        (Some(c), Some(o)) => TableSource::Files {
            customers: c.clone(),
            orders: o.clone(),
        },
        _ => TableSource::Synthetic { seed },
    };
    let ts = if a.t.is_empty() { (1..=10).collect() } else { a.t.clone() };
    if ts.contains(&0) {
        return Err(Error::Usage("t values must be at least 1".into()));
    }
    let selectivities = a
        .selectivity
        .iter()
        .map(|s| parse_selectivity(s))
        .collect::<Result<Vec<f64>>>()?;
    let records = match mode {
        BenchMode::Crypto => bench::bench_crypto::<Suite>(a.m.unwrap_or(3), &ts, a.reps, seed)?,
        BenchMode::Scale => {
            let rows = if a.rows.is_empty() { vec![1_000, 10_000] } else { a.rows.clone() };
            let sel = if selectivities.is_empty() {
                vec![1.0 / 12.5, 1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0]
            } else {
                selectivities
            };
            bench::bench_scale::<Suite>(&source, &rows, &sel, a.m.unwrap_or(1), a.reps, seed)?
        }
        BenchMode::InClause => {
            let rows = a.rows.first().copied().unwrap_or(2_000);
            let sel = selectivities.first().copied().unwrap_or(0.01);
            bench::bench_inclause::<Suite>(&source, rows, sel, &ts, a.m.unwrap_or(1), a.reps, seed)?
        }
    };
    emit(a.out.as_deref(), &bench::records_to_csv(&records)?)
}
