use std::ffi::{c_char, CStr, CString};
use std::ptr;

use secjoin_ffi::*;

fn last_error() -> String {
    let p = sj_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn bytes_of(b: &SjBytes) -> &[u8] {
    unsafe { std::slice::from_raw_parts(b.data, b.len) }
}

fn empty_bytes() -> SjBytes {
    SjBytes { data: ptr::null_mut(), len: 0 }
}

unsafe fn table(rows: &[(u64, &str, &[&str])], m: usize) -> *mut SjTable {
    let mut t = ptr::null_mut();
    assert_eq!(sj_table_new(m, &mut t), SjStatus::Ok);
    for &(id, join, attrs) in rows {
        let join = CString::new(join).unwrap();
        let cells: Vec<CString> = attrs.iter().map(|a| CString::new(*a).unwrap()).collect();
        let ptrs: Vec<*const c_char> = cells.iter().map(|c| c.as_ptr()).collect();
        assert_eq!(sj_table_push_row(t, id, join.as_ptr(), ptrs.as_ptr(), ptrs.len()), SjStatus::Ok);
    }
    t
}

struct Pipeline {
    key: *mut SjKey,
    pp: SjBytes,
    enc_a: SjBytes,
    enc_b: SjBytes,
}

impl Pipeline {
    unsafe fn worked_example() -> Self {
        let seed = 11u64;
        let mut key = ptr::null_mut();
        assert_eq!(sj_key_generate(2, 1, &seed, &mut key), SjStatus::Ok);
        assert_eq!(sj_key_dimension(key), 7);
        let teams = table(&[(1, "1", &["Web Application"]), (2, "2", &["Database"])], 1);
        let employees = table(
            &[
                (1, "1", &["Hans", "Programmer"]),
                (2, "1", &["Kaily", "Tester"]),
                (3, "2", &["John", "Programmer"]),
                (4, "2", &["Sally", "Tester"]),
            ],
            2,
        );
        assert_eq!(sj_table_len(employees), 4);
        let (mut pp, mut enc_a, mut enc_b) = (empty_bytes(), empty_bytes(), empty_bytes());
        assert_eq!(sj_key_public_params(key, &mut pp), SjStatus::Ok);
        assert_eq!(sj_encrypt_table(key, teams, ptr::null(), &mut enc_a), SjStatus::Ok);
        assert_eq!(sj_encrypt_table(key, employees, ptr::null(), &mut enc_b), SjStatus::Ok);
        sj_table_free(teams);
        sj_table_free(employees);
        Pipeline { key, pp, enc_a, enc_b }
    }

    unsafe fn query(&self, id: u64, where_a: &str, where_b: &str) -> *mut SjMatch {
        let (wa, wb) = (CString::new(where_a).unwrap(), CString::new(where_b).unwrap());
        let mut tokens = empty_bytes();
        assert_eq!(
            sj_token_generate(self.key, id, wa.as_ptr(), wb.as_ptr(), ptr::null(), &mut tokens),
            SjStatus::Ok
        );
        let mut m = ptr::null_mut();
        let status = sj_join(
            self.pp.data,
            self.pp.len,
            tokens.data,
            tokens.len,
            self.enc_a.data,
            self.enc_a.len,
            self.enc_b.data,
            self.enc_b.len,
            &mut m,
        );
        assert_eq!(status, SjStatus::Ok);
        sj_bytes_free(tokens);
        m
    }

    unsafe fn free(self) {
        sj_key_free(self.key);
        sj_bytes_free(self.pp);
        sj_bytes_free(self.enc_a);
        sj_bytes_free(self.enc_b);
    }
}

unsafe fn pairs(m: *const SjMatch) -> Vec<(u64, u64)> {
    (0..sj_match_pair_count(m))
        .map(|i| {
            let (mut a, mut b) = (0, 0);
            assert_eq!(sj_match_pair(m, i, &mut a, &mut b), SjStatus::Ok);
            (a, b)
        })
        .collect()
}

#[test]
fn worked_example_through_the_c_abi() {
    unsafe {
        let p = Pipeline::worked_example();
        let m1 = p.query(1, "attr=1:Web Application", "attr=2:Tester");
        assert_eq!(pairs(m1), vec![(1, 2)]);
        let m2 = p.query(2, "attr=1:Database", "attr=2:Programmer");
        assert_eq!(pairs(m2), vec![(2, 3)]);
        assert_eq!(sj_match_group_count(m2), 1);

        let mut text = ptr::null_mut();
        assert_eq!(sj_match_to_text(m2, &mut text), SjStatus::Ok);
        let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert!(s.contains("\n2,2,3\n"), "{s}");
        assert!(s.contains("2,0,A:2 B:3\n"), "{s}");
        sj_string_free(text);

        let mut a = 0;
        let mut b = 0;
        assert_eq!(sj_match_pair(m2, 5, &mut a, &mut b), SjStatus::InvalidArgument);
        sj_match_free(m1);
        sj_match_free(m2);

        // Unconstrained query: every cross-table pair with equal keys.
        let all = p.query(3, "", "");
        assert_eq!(pairs(all), vec![(1, 1), (1, 2), (2, 3), (2, 4)]);
        assert_eq!(sj_match_group_count(all), 2);
        sj_match_free(all);
        p.free();
    }
}

#[test]
fn key_round_trips_through_bytes() {
    unsafe {
        let seed = 5u64;
        let mut key = ptr::null_mut();
        assert_eq!(sj_key_generate(1, 2, &seed, &mut key), SjStatus::Ok);
        let mut bytes = empty_bytes();
        assert_eq!(sj_key_to_bytes(key, &mut bytes), SjStatus::Ok);
        assert_eq!(&bytes_of(&bytes)[..4], b"SJM1");
        let mut back = ptr::null_mut();
        assert_eq!(sj_key_from_bytes(bytes.data, bytes.len, &mut back), SjStatus::Ok);
        let (mut pp1, mut pp2) = (empty_bytes(), empty_bytes());
        sj_key_public_params(key, &mut pp1);
        sj_key_public_params(back, &mut pp2);
        assert_eq!(bytes_of(&pp1), bytes_of(&pp2));

        // Same seed, same key.
        let mut again = ptr::null_mut();
        sj_key_generate(1, 2, &seed, &mut again);
        let mut pp3 = empty_bytes();
        sj_key_public_params(again, &mut pp3);
        assert_eq!(bytes_of(&pp1), bytes_of(&pp3));

        for b in [bytes, pp1, pp2, pp3] {
            sj_bytes_free(b);
        }
        sj_key_free(key);
        sj_key_free(back);
        sj_key_free(again);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut key = ptr::null_mut();
        assert_eq!(sj_key_generate(1, 0, ptr::null(), &mut key), SjStatus::Param);
        assert!(key.is_null());
        assert!(last_error().contains("t must be at least 1"));

        assert_eq!(sj_key_from_bytes(b"junk".as_ptr(), 4, &mut key), SjStatus::Format);
        assert!(!last_error().is_empty());
        assert_eq!(sj_key_from_bytes(ptr::null(), 3, &mut key), SjStatus::InvalidArgument);
        assert_eq!(sj_key_generate(1, 1, ptr::null(), ptr::null_mut()), SjStatus::InvalidArgument);

        assert_eq!(sj_key_generate(1, 1, ptr::null(), &mut key), SjStatus::Ok);
        assert!(sj_last_error_message().is_null());

        let too_many = CString::new("attr=1:a,b").unwrap();
        let mut tokens = empty_bytes();
        assert_eq!(
            sj_token_generate(key, 1, too_many.as_ptr(), ptr::null(), ptr::null(), &mut tokens),
            SjStatus::Param
        );
        assert!(last_error().contains("too many IN values"));
        assert!(tokens.data.is_null());

        let t = table(&[], 1);
        let join = CString::new("1").unwrap();
        assert_eq!(sj_table_push_row(t, 1, join.as_ptr(), ptr::null(), 0), SjStatus::Format);
        let wide = table(&[], 2);
        let mut enc = empty_bytes();
        assert_eq!(sj_encrypt_table(key, wide, ptr::null(), &mut enc), SjStatus::Format);
        assert_eq!(sj_encrypt_table(ptr::null(), t, ptr::null(), &mut enc), SjStatus::InvalidArgument);
        sj_table_free(t);
        sj_table_free(wide);
        sj_key_free(key);

        // Null handles are harmless for accessors and frees.
        assert_eq!(sj_key_dimension(ptr::null()), 0);
        assert_eq!(sj_match_pair_count(ptr::null()), 0);
        sj_key_free(ptr::null_mut());
        sj_match_free(ptr::null_mut());
        sj_string_free(ptr::null_mut());
        sj_bytes_free(empty_bytes());
    }
}

#[test]
fn tokens_from_another_key_are_rejected() {
    unsafe {
        let p = Pipeline::worked_example();
        let mut other = ptr::null_mut();
        sj_key_generate(2, 1, ptr::null(), &mut other);
        let mut tokens = empty_bytes();
        assert_eq!(
            sj_token_generate(other, 1, ptr::null(), ptr::null(), ptr::null(), &mut tokens),
            SjStatus::Ok
        );
        let mut m = ptr::null_mut();
        let status = sj_join(
            p.pp.data, p.pp.len, tokens.data, tokens.len, p.enc_a.data, p.enc_a.len, p.enc_b.data,
            p.enc_b.len, &mut m,
        );
        assert_eq!(status, SjStatus::Format);
        assert!(last_error().contains("key mismatch"));
        assert!(m.is_null());
        sj_bytes_free(tokens);
        sj_key_free(other);
        p.free();
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(sj_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/secjoin.h")).unwrap();
    for name in [
        "typedef struct SjKey SjKey;",
        "SJ_STATUS_FORMAT = 3",
        "sj_key_generate",
        "sj_encrypt_table",
        "sj_token_generate",
        "sj_join",
        "sj_match_pair",
        "sj_last_error_message",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
