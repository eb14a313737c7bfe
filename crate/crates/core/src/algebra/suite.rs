use std::fmt::Debug;
use std::hash::Hash;

use ark_ff::{BigInteger, PrimeField};

use crate::error::{Error, Result};

/// A type-3 (asymmetric) bilinear group `(G1, G2, GT, q, e)`.
///
/// Group operations are written multiplicatively in the documentation to
/// match the usual presentation; `g1_pow(g, x)` is `g^x`.
pub trait PairingSuite: Sized + Send + Sync + 'static {
    type Scalar: PrimeField;
    type G1: Copy + Eq + Debug + Send + Sync;
    type G2: Copy + Eq + Debug + Send + Sync;
    type Gt: Copy + Eq + Hash + Debug + Send + Sync;

    /// Identifier written into every file header.
    const SUITE_ID: u16;
    const NAME: &'static str;
    const G1_BYTES: usize;
    const G2_BYTES: usize;
    const GT_BYTES: usize;

    fn g1_generator() -> Self::G1;
    fn g2_generator() -> Self::G2;
    fn g1_identity() -> Self::G1;
    fn g2_identity() -> Self::G2;
    fn gt_identity() -> Self::Gt;

    fn g1_pow(base: &Self::G1, exp: &Self::Scalar) -> Self::G1;
    fn g2_pow(base: &Self::G2, exp: &Self::Scalar) -> Self::G2;
    fn gt_pow(base: &Self::Gt, exp: &Self::Scalar) -> Self::Gt;

    /// `∏ᵢ e(uᵢ, wᵢ)`; callers guarantee equal lengths.
    fn pairing_product(u: &[Self::G1], w: &[Self::G2]) -> Self::Gt;

    /// `(base^{e₁}, …, base^{eₖ})`. Suites may amortize a fixed-base table.
    fn g1_pow_many(base: &Self::G1, exps: &[Self::Scalar]) -> Vec<Self::G1> {
        exps.iter().map(|e| Self::g1_pow(base, e)).collect()
    }

    fn g2_pow_many(base: &Self::G2, exps: &[Self::Scalar]) -> Vec<Self::G2> {
        exps.iter().map(|e| Self::g2_pow(base, e)).collect()
    }

    fn g1_write(p: &Self::G1, out: &mut Vec<u8>);
    fn g2_write(p: &Self::G2, out: &mut Vec<u8>);
    fn gt_write(p: &Self::Gt, out: &mut Vec<u8>);
    fn g1_read(bytes: &[u8]) -> Result<Self::G1>;
    fn g2_read(bytes: &[u8]) -> Result<Self::G2>;
    fn gt_read(bytes: &[u8]) -> Result<Self::Gt>;

    fn pair(a: &Self::G1, b: &Self::G2) -> Self::Gt {
        Self::pairing_product(std::slice::from_ref(a), std::slice::from_ref(b))
    }

    fn gt_to_bytes(p: &Self::Gt) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::GT_BYTES);
        Self::gt_write(p, &mut out);
        out
    }
}

/// Width of the big-endian scalar encoding.
pub fn scalar_byte_len<F: PrimeField>() -> usize {
    (F::MODULUS_BIT_SIZE as usize).div_ceil(8)
}

pub fn scalar_write<F: PrimeField>(s: &F, out: &mut Vec<u8>) {
    let be = s.into_bigint().to_bytes_be();
    let width = scalar_byte_len::<F>();
    // into_bigint pads to whole limbs; keep only the low `width` bytes.
    out.extend_from_slice(&be[be.len() - width..]);
}

/// Strict decoding: rejects values `≥ q`.
pub fn scalar_read<F: PrimeField>(bytes: &[u8]) -> Result<F> {
    let width = scalar_byte_len::<F>();
    if bytes.len() != width {
        return Err(Error::format(
            "scalar",
            format!("expected {width} bytes, got {}", bytes.len()),
        ));
    }
    let value = F::from_be_bytes_mod_order(bytes);
    let mut canonical = Vec::with_capacity(width);
    scalar_write(&value, &mut canonical);
    if canonical != bytes {
        return Err(Error::format("scalar", "value is not reduced modulo q"));
    }
    Ok(value)
}

/// Uniform nonzero scalar.
pub fn random_nonzero<F: PrimeField, R: rand::Rng + ?Sized>(rng: &mut R) -> F {
    loop {
        let x = F::rand(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// `g^v` componentwise in G1.
pub fn vec_exp_g1<S: PairingSuite>(base: &S::G1, v: &[S::Scalar]) -> Vec<S::G1> {
    S::g1_pow_many(base, v)
}

/// `g^v` componentwise in G2.
pub fn vec_exp_g2<S: PairingSuite>(base: &S::G2, v: &[S::Scalar]) -> Vec<S::G2> {
    S::g2_pow_many(base, v)
}

/// `∏ᵢ e(uᵢ, wᵢ)`, which equals `e(g₁, g₂)^{⟨x, y⟩}` for `u = g₁^x`, `w = g₂^y`.
pub fn multi_pairing<S: PairingSuite>(u: &[S::G1], w: &[S::G2]) -> Result<S::Gt> {
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: w.len(),
        });
    }
    Ok(S::pairing_product(u, w))
}
