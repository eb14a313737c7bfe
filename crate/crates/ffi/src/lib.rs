//! C bindings for `secjoin`.
//!
//! Keys, plaintext tables and match results are opaque handles. Encrypted
//! tables, token pairs and public parameters cross the boundary as byte
//! buffers in the `secjoin` file formats, so they can be stored or shipped
//! to the server side unchanged.
//!
//! Every fallible function returns an [`SjStatus`]; on failure
//! [`sj_last_error_message`] describes the error on the calling thread.
//! Output parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use secjoin::algebra::DefaultSuite;
use secjoin::cli::resolve_clause;
use secjoin::fhipe::MasterSecretKey;
use secjoin::joincore::{
    self, codec, execute_join, sj_setup, sj_token_gen, JoinQuery, MatchResult,
    PlainRow, PlainTable, SchemeParams, TableSchema,
};
use secjoin::predicate::AttributeValue;
use secjoin::Error;

type Suite = DefaultSuite;

/// Result of every fallible call. Values match the `secjoin` exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SjStatus {
    Ok = 0,
    Io = 1,
    InvalidArgument = 2,
    Format = 3,
    Param = 4,
    Internal = 5,
}

impl From<&Error> for SjStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            1 => SjStatus::Io,
            2 => SjStatus::InvalidArgument,
            3 => SjStatus::Format,
            4 => SjStatus::Param,
            _ => SjStatus::Internal,
        }
    }
}

/// A Rust-owned byte buffer. Release with [`sj_bytes_free`].
#[repr(C)]
pub struct SjBytes {
    pub data: *mut u8,
    pub len: usize,
}

impl SjBytes {
    fn from_vec(v: Vec<u8>) -> Self {
        let boxed = v.into_boxed_slice();
        let len = boxed.len();
        SjBytes {
            data: Box::into_raw(boxed) as *mut u8,
            len,
        }
    }
}

/// Master secret key with its scheme parameters.
pub struct SjKey {
    msk: MasterSecretKey<Suite>,
    params: SchemeParams,
}

/// Plaintext table under construction.
pub struct SjTable {
    table: PlainTable,
}

pub struct SjMatch {
    result: MatchResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> SjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SjStatus::Ok
        }
        Ok(Err(e)) => {
            let status = SjStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
        Err(_) => {
            set_last_error("internal error (panic)".into());
            SjStatus::Internal
        }
    }
}

fn invalid(what: &str) -> Error {
    Error::Usage(what.to_string())
}

unsafe fn input_bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], Error> {
    if data.is_null() {
        return if len == 0 { Ok(&[]) } else { Err(invalid("null buffer with nonzero length")) };
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn input_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} handle is null")))
}

unsafe fn rng_from(seed: *const u64) -> ChaCha20Rng {
    match seed.as_ref() {
        Some(&s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `bytes` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sj_bytes_free(bytes: SjBytes) {
    if !bytes.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(bytes.data, bytes.len)));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New key for `m` attributes and `IN` lists of up to `t` values. `seed`
/// may be NULL; a non-NULL seed makes the key deterministic and is for
/// tests only.
///
/// # Safety
/// `seed` is NULL or points to a `uint64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_key_generate(m: usize, t: usize, seed: *const u64, out: *mut *mut SjKey) -> SjStatus {
    guard(|| {
        let mut rng = rng_from(seed);
        let (_, msk, params) = sj_setup::<Suite, _>(m, t, &mut rng)?;
        write_out(out, Box::into_raw(Box::new(SjKey { msk, params })))
    })
}

/// # Safety
/// `data` points to `len` readable bytes; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_key_from_bytes(data: *const u8, len: usize, out: *mut *mut SjKey) -> SjStatus {
    guard(|| {
        let (msk, params) = codec::decode_msk::<Suite>(input_bytes(data, len)?)?;
        write_out(out, Box::into_raw(Box::new(SjKey { msk, params })))
    })
}

/// Serialized secret key. Keep it on the client.
///
/// # Safety
/// `key` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_key_to_bytes(key: *const SjKey, out: *mut SjBytes) -> SjStatus {
    guard(|| {
        let k = handle(key, "key")?;
        write_out(out, SjBytes::from_vec(codec::encode_msk(&k.msk, &k.params)))
    })
}

/// Serialized public parameters for the server.
///
/// # Safety
/// `key` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_key_public_params(key: *const SjKey, out: *mut SjBytes) -> SjStatus {
    guard(|| {
        let k = handle(key, "key")?;
        write_out(out, SjBytes::from_vec(codec::encode_pp::<Suite>(k.msk.pp(), &k.params)))
    })
}

/// Vector dimension `n`, or 0 for a NULL handle.
///
/// # Safety
/// `key` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sj_key_dimension(key: *const SjKey) -> usize {
    key.as_ref().map_or(0, |k| k.params.n())
}

/// # Safety
/// `key` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sj_key_free(key: *mut SjKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// Empty table with `m` non-join attributes.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_table_new(m: usize, out: *mut *mut SjTable) -> SjStatus {
    guard(|| {
        let names: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let table = PlainTable::new(TableSchema::new("ffi", "join", &refs), Vec::new())?;
        write_out(out, Box::into_raw(Box::new(SjTable { table })))
    })
}

/// Appends a row. `attrs` holds exactly the table's `m` strings.
///
/// # Safety
/// `table` is a live handle; `join_value` and each of the `n_attrs`
/// entries of `attrs` are NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn sj_table_push_row(
    table: *mut SjTable,
    row_id: u64,
    join_value: *const c_char,
    attrs: *const *const c_char,
    n_attrs: usize,
) -> SjStatus {
    guard(|| {
        let t = table.as_mut().ok_or_else(|| invalid("table handle is null"))?;
        if n_attrs != t.table.schema.m() {
            return Err(Error::SchemaMismatch(format!(
                "row has {n_attrs} attributes, table has {}",
                t.table.schema.m()
            )));
        }
        let join = input_str(join_value, "join value")?;
        let cells: &[*const c_char] = if n_attrs == 0 { &[] } else {
            if attrs.is_null() {
                return Err(invalid("attribute array is null"));
            }
            slice::from_raw_parts(attrs, n_attrs)
        };
        let values = cells
            .iter()
            .map(|&c| input_str(c, "attribute").map(AttributeValue::from))
            .collect::<Result<Vec<_>, _>>()?;
        t.table.rows.push(PlainRow {
            row_id,
            join_value: join.into(),
            attrs: values,
        });
        Ok(())
    })
}

/// # Safety
/// `table` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sj_table_len(table: *const SjTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.len())
}

/// # Safety
/// `table` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sj_table_free(table: *mut SjTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Encrypts `table`, padding it to the key's `m`, into the encrypted-table
/// format.
///
/// # Safety
/// `key` and `table` are live handles; `seed` is NULL or readable; `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_encrypt_table(
    key: *const SjKey,
    table: *const SjTable,
    seed: *const u64,
    out: *mut SjBytes,
) -> SjStatus {
    guard(|| {
        let k = handle(key, "key")?;
        let t = handle(table, "table")?;
        let padded = t.table.padded_to(k.params.m)?;
        let enc = joincore::sj_encrypt_table(&k.msk, &k.params, &padded, &mut rng_from(seed))?;
        write_out(out, SjBytes::from_vec(codec::encode_table(&enc)))
    })
}

unsafe fn clause_specs(s: *const c_char) -> Result<Vec<String>, Error> {
    if s.is_null() {
        return Ok(Vec::new());
    }
    Ok(input_str(s, "selection")?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect())
}

/// Token pair for one query. `where_a` and `where_b` are NULL (no
/// selection) or newline-separated specs of the form `attr=I:v1,v2`, with
/// `I` counting from 1.
///
/// # Safety
/// `key` is a live handle; the strings are NULL or NUL-terminated; `seed`
/// is NULL or readable; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_token_generate(
    key: *const SjKey,
    query_id: u64,
    where_a: *const c_char,
    where_b: *const c_char,
    seed: *const u64,
    out: *mut SjBytes,
) -> SjStatus {
    guard(|| {
        let k = handle(key, "key")?;
        let query = JoinQuery::new(
            query_id,
            resolve_clause(&clause_specs(where_a)?, None)?,
            resolve_clause(&clause_specs(where_b)?, None)?,
        );
        let tokens = sj_token_gen(&k.msk, &k.params, &query, &mut rng_from(seed))?;
        write_out(out, SjBytes::from_vec(codec::encode_token_pair(&tokens)))
    })
}

/// Server side: decrypts both encrypted tables under the token pair and
/// hash-joins the tags.
///
/// # Safety
/// Each buffer points to its stated number of readable bytes; `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sj_join(
    pp: *const u8,
    pp_len: usize,
    tokens: *const u8,
    tokens_len: usize,
    table_a: *const u8,
    table_a_len: usize,
    table_b: *const u8,
    table_b_len: usize,
    out: *mut *mut SjMatch,
) -> SjStatus {
    guard(|| {
        let (pp, _) = codec::decode_pp::<Suite>(input_bytes(pp, pp_len)?)?;
        let tokens = codec::decode_token_pair::<Suite>(input_bytes(tokens, tokens_len)?)?;
        let a = codec::decode_table::<Suite>(input_bytes(table_a, table_a_len)?)?;
        let b = codec::decode_table::<Suite>(input_bytes(table_b, table_b_len)?)?;
        let (result, _) = execute_join(&pp, &tokens, &a, &b)?;
        write_out(out, Box::into_raw(Box::new(SjMatch { result })))
    })
}

/// Number of `(A row, B row)` pairs, sorted ascending.
///
/// # Safety
/// `m` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sj_match_pair_count(m: *const SjMatch) -> usize {
    m.as_ref().map_or(0, |m| m.result.join_pairs.len())
}

/// Number of tag groups with two or more rows.
///
/// # Safety
/// `m` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sj_match_group_count(m: *const SjMatch) -> usize {
    m.as_ref().map_or(0, |m| m.result.groups.len())
}

/// # Safety
/// `m` is a live handle; `rowid_a` and `rowid_b` are writable.
#[no_mangle]
pub unsafe extern "C" fn sj_match_pair(
    m: *const SjMatch,
    index: usize,
    rowid_a: *mut u64,
    rowid_b: *mut u64,
) -> SjStatus {
    guard(|| {
        let m = handle(m, "match")?;
        let &(a, b) = m
            .result
            .join_pairs
            .get(index)
            .ok_or_else(|| invalid("pair index out of range"))?;
        if rowid_a.is_null() || rowid_b.is_null() {
            return Err(invalid("output pointer is null"));
        }
        rowid_a.write(a);
        rowid_b.write(b);
        Ok(())
    })
}

/// The match in the line-oriented text format. Free with
/// [`sj_string_free`].
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sj_match_to_text(m: *const SjMatch, out: *mut *mut c_char) -> SjStatus {
    guard(|| {
        let m = handle(m, "match")?;
        let text = CString::new(codec::format_match(&m.result)).expect("no NUL in match text");
        write_out(out, text.into_raw())
    })
}

/// # Safety
/// `m` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sj_match_free(m: *mut SjMatch) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
