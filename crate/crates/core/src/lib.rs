//! Equi-joins over encrypted tables.
//!
//! A client encrypts each row of two tables under a master secret key and,
//! per query, issues a pair of tokens. The server pairs every token with
//! every row ciphertext, obtaining a target-group tag per row, and runs a
//! hash join on those tags. Rows that satisfy the query's `IN` clauses and
//! share a join value produce equal tags; tags from different queries are
//! unrelated.
//!
//! Modules, bottom up:
//!
//! * [`algebra`]: scalars, pairing suites, matrices over `Z_q`
//! * [`fhipe`]: function-hiding inner-product encryption reduced to tags
//! * [`predicate`]: hashing into the field and `IN`-clause polynomials
//! * [`joincore`]: the join scheme, server-side matching, plaintext oracle,
//!   and binary file formats
//! * [`leakage`]: ideal, observed, and baseline leakage profiles
//! * [`tabledata`]: TPC-H `.tbl` ingestion and test-instance generation
//! * [`bench`]: timing harness behind `secjoin bench`
//! * [`cli`]: command implementations behind the `secjoin` binary

pub mod algebra;
pub mod bench;
pub mod cli;
pub mod error;
pub mod fhipe;
pub mod joincore;
pub mod leakage;
pub mod predicate;
pub mod tabledata;

pub use error::{Error, Result};
