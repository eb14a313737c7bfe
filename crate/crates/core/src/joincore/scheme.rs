use ark_ff::{PrimeField, UniformRand};
use rand::Rng;

use super::{
    EncryptedRow, EncryptedTable, JoinQuery, PlainRow, PlainTable, QueryToken, QueryTokenPair,
    RowRef, SchemeParams, TableSide, Tag,
};
use crate::algebra::{random_nonzero, PairingSuite};
use crate::error::{Error, Result};
use crate::fhipe::{
    ipe_decrypt_tag, ipe_encrypt_many, ipe_setup, ipe_token, MasterSecretKey, PublicParams,
};
use crate::predicate::{embed_attr, hash_join_value, selection_poly, PolyCoeffs, SelectionClause};

pub fn sj_setup<S: PairingSuite, R: Rng + ?Sized>(
    m: usize,
    t: usize,
    rng: &mut R,
) -> Result<(PublicParams, MasterSecretKey<S>, SchemeParams)> {
    let params = SchemeParams::new(m, t)?;
    let (pp, msk) = ipe_setup::<S, R>(params.n(), rng)?;
    Ok((pp, msk, params))
}

/// `(H(a₀), γ₂·a₁⁰ … γ₂·a₁ᵗ, …, γ₂·a_m⁰ … γ₂·a_mᵗ, γ₁, 0)`.
pub fn build_row_vector<F: PrimeField>(
    row: &PlainRow,
    params: &SchemeParams,
    gamma1: F,
    gamma2: F,
) -> Result<Vec<F>> {
    if row.attrs.len() != params.m {
        return Err(Error::SchemaMismatch(format!(
            "row {} has {} attributes, parameters expect m = {}",
            row.row_id,
            row.attrs.len(),
            params.m
        )));
    }
    let mut w = Vec::with_capacity(params.n());
    w.push(hash_join_value::<F>(&row.join_value));
    for (i, value) in row.attrs.iter().enumerate() {
        let x: F = embed_attr(i, value);
        let mut power = gamma2;
        for _ in 0..=params.t {
            w.push(power);
            power *= x;
        }
    }
    w.push(gamma1);
    w.push(F::zero());
    debug_assert_eq!(w.len(), params.n());
    Ok(w)
}

/// `(k, p₁,₀ … p₁,ₜ, …, p_m,₀ … p_m,ₜ, 0, δ)` from explicit polynomials.
pub fn query_vector_from_polys<F: PrimeField>(
    k: F,
    polys: &[PolyCoeffs<F>],
    params: &SchemeParams,
    delta: F,
) -> Result<Vec<F>> {
    if k.is_zero() {
        return Err(Error::InvalidParams("query key must be nonzero".into()));
    }
    if polys.len() != params.m {
        return Err(Error::DimensionMismatch {
            expected: params.m,
            actual: polys.len(),
        });
    }
    let mut v = Vec::with_capacity(params.n());
    v.push(k);
    for p in polys {
        if p.0.len() != params.t + 1 {
            return Err(Error::DimensionMismatch {
                expected: params.t + 1,
                actual: p.0.len(),
            });
        }
        v.extend_from_slice(&p.0);
    }
    v.push(F::zero());
    v.push(delta);
    Ok(v)
}

/// Query vector for one table's clause; unconstrained attributes get the
/// zero polynomial.
pub fn build_query_vector<F: PrimeField, R: Rng + ?Sized>(
    k: F,
    clause: &SelectionClause,
    params: &SchemeParams,
    delta: F,
    rng: &mut R,
) -> Result<Vec<F>> {
    clause.validate(params.m, params.t)?;
    let polys = (0..params.m)
        .map(|i| selection_poly(i, clause.get(i), params.t, rng))
        .collect::<Result<Vec<_>>>()?;
    query_vector_from_polys(k, &polys, params, delta)
}

// γ₂ = 0 would zero every attribute slot and let the row match any query.
fn row_randomness<F: PrimeField, R: Rng + ?Sized>(rng: &mut R) -> (F, F) {
    (F::rand(rng), random_nonzero(rng))
}

pub fn sj_encrypt_row<S: PairingSuite, R: Rng + ?Sized>(
    msk: &MasterSecretKey<S>,
    params: &SchemeParams,
    row: &PlainRow,
    rng: &mut R,
) -> Result<EncryptedRow<S>> {
    let (g1, g2) = row_randomness::<S::Scalar, R>(rng);
    let w = build_row_vector(row, params, g1, g2)?;
    let cipher = ipe_encrypt_many(msk, &[w])?.pop().expect("one row in, one out");
    Ok(EncryptedRow {
        row_id: row.row_id,
        cipher,
    })
}

fn check_params<S: PairingSuite>(msk: &MasterSecretKey<S>, params: &SchemeParams) -> Result<()> {
    if msk.dim() != params.n() {
        return Err(Error::DimensionMismatch {
            expected: msk.dim(),
            actual: params.n(),
        });
    }
    Ok(())
}

/// Encrypts every row with fresh per-row randomness, batching the group
/// exponentiations.
pub fn sj_encrypt_table<S: PairingSuite, R: Rng + ?Sized>(
    msk: &MasterSecretKey<S>,
    params: &SchemeParams,
    table: &PlainTable,
    rng: &mut R,
) -> Result<EncryptedTable<S>> {
    check_params(msk, params)?;
    let vectors = table
        .rows
        .iter()
        .map(|row| {
            let (g1, g2) = row_randomness::<S::Scalar, R>(rng);
            build_row_vector(row, params, g1, g2)
        })
        .collect::<Result<Vec<_>>>()?;
    let ciphers = ipe_encrypt_many(msk, &vectors)?;
    Ok(EncryptedTable {
        params: *params,
        fingerprint: *msk.fingerprint(),
        rows: table
            .rows
            .iter()
            .zip(ciphers)
            .map(|(row, cipher)| EncryptedRow {
                row_id: row.row_id,
                cipher,
            })
            .collect(),
    })
}

/// One fresh nonzero query key shared by both tokens, independent `δ`s.
pub fn sj_token_gen<S: PairingSuite, R: Rng + ?Sized>(
    msk: &MasterSecretKey<S>,
    params: &SchemeParams,
    query: &JoinQuery,
    rng: &mut R,
) -> Result<QueryTokenPair<S>> {
    check_params(msk, params)?;
    let k: S::Scalar = random_nonzero(rng);
    let token = |side: TableSide, rng: &mut R| -> Result<QueryToken<S>> {
        let delta = S::Scalar::rand(rng);
        let v = build_query_vector(k, query.clause(side), params, delta, rng)?;
        Ok(QueryToken {
            query_id: query.id,
            side,
            fingerprint: *msk.fingerprint(),
            tk: ipe_token(msk, &v)?,
        })
    };
    let a = token(TableSide::A, rng)?;
    let b = token(TableSide::B, rng)?;
    Ok(QueryTokenPair {
        query_id: query.id,
        a,
        b,
    })
}

pub fn sj_decrypt_row<S: PairingSuite>(
    pp: &PublicParams,
    token: &QueryToken<S>,
    row: &EncryptedRow<S>,
) -> Result<Tag> {
    if token.fingerprint != pp.fingerprint {
        return Err(Error::KeyMismatch);
    }
    let gt = ipe_decrypt_tag(pp, &token.tk, &row.cipher)?;
    Ok(Tag {
        bytes: S::gt_to_bytes(&gt),
        row: RowRef {
            side: token.side,
            row_id: row.row_id,
        },
        query_id: token.query_id,
    })
}

/// Decrypts a subset of rows, e.g. after a plaintext pre-filter.
pub fn sj_decrypt_rows<'a, S: PairingSuite>(
    pp: &PublicParams,
    token: &QueryToken<S>,
    rows: impl IntoIterator<Item = &'a EncryptedRow<S>>,
) -> Result<Vec<Tag>> {
    rows.into_iter()
        .map(|row| sj_decrypt_row(pp, token, row))
        .collect()
}

pub fn sj_decrypt_table<S: PairingSuite>(
    pp: &PublicParams,
    token: &QueryToken<S>,
    table: &EncryptedTable<S>,
) -> Result<Vec<Tag>> {
    if table.fingerprint != token.fingerprint || table.fingerprint != pp.fingerprint {
        return Err(Error::KeyMismatch);
    }
    sj_decrypt_rows(pp, token, &table.rows)
}
