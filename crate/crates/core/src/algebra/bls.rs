//! BLS12-381 backend (arkworks). Group order is a 255-bit prime.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::scalar_mul::BatchMulPreprocessing;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::Zero;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};

use super::suite::PairingSuite;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bls12Suite;

pub type Gt = PairingOutput<Bls12_381>;

// Below this many exponents the window table costs more than it saves.
const FIXED_BASE_THRESHOLD: usize = 32;

fn write<T: CanonicalSerialize>(p: &T, out: &mut Vec<u8>) {
    p.serialize_compressed(out)
        .expect("writing into a Vec cannot fail");
}

fn read<T: CanonicalDeserialize>(what: &'static str, expected: usize, bytes: &[u8]) -> Result<T> {
    if bytes.len() != expected {
        return Err(Error::format(
            what,
            format!("expected {expected} bytes, got {}", bytes.len()),
        ));
    }
    T::deserialize_compressed(bytes).map_err(|e| Error::format(what, e.to_string()))
}

impl PairingSuite for Bls12Suite {
    type Scalar = Fr;
    type G1 = G1Affine;
    type G2 = G2Affine;
    type Gt = Gt;

    const SUITE_ID: u16 = 0x0381;
    const NAME: &'static str = "bls12-381";
    const G1_BYTES: usize = 48;
    const G2_BYTES: usize = 96;
    const GT_BYTES: usize = 576;

    fn g1_generator() -> G1Affine {
        G1Affine::generator()
    }

    fn g2_generator() -> G2Affine {
        G2Affine::generator()
    }

    fn g1_identity() -> G1Affine {
        G1Affine::zero()
    }

    fn g2_identity() -> G2Affine {
        G2Affine::zero()
    }

    fn gt_identity() -> Gt {
        Gt::zero()
    }

    fn g1_pow(base: &G1Affine, exp: &Fr) -> G1Affine {
        (*base * exp).into_affine()
    }

    fn g2_pow(base: &G2Affine, exp: &Fr) -> G2Affine {
        (*base * exp).into_affine()
    }

    fn gt_pow(base: &Gt, exp: &Fr) -> Gt {
        *base * exp
    }

    fn pairing_product(u: &[G1Affine], w: &[G2Affine]) -> Gt {
        debug_assert_eq!(u.len(), w.len());
        if u.is_empty() {
            return Gt::zero();
        }
        Bls12_381::multi_pairing(u.iter().copied(), w.iter().copied())
    }

    fn g1_pow_many(base: &G1Affine, exps: &[Fr]) -> Vec<G1Affine> {
        if exps.len() < FIXED_BASE_THRESHOLD {
            let proj: Vec<G1Projective> = exps.iter().map(|e| *base * e).collect();
            return G1Projective::normalize_batch(&proj);
        }
        BatchMulPreprocessing::new(base.into_group(), exps.len()).batch_mul(exps)
    }

    fn g2_pow_many(base: &G2Affine, exps: &[Fr]) -> Vec<G2Affine> {
        if exps.len() < FIXED_BASE_THRESHOLD {
            let proj: Vec<G2Projective> = exps.iter().map(|e| *base * e).collect();
            return G2Projective::normalize_batch(&proj);
        }
        BatchMulPreprocessing::new(base.into_group(), exps.len()).batch_mul(exps)
    }

    fn g1_write(p: &G1Affine, out: &mut Vec<u8>) {
        write(p, out)
    }

    fn g2_write(p: &G2Affine, out: &mut Vec<u8>) {
        write(p, out)
    }

    fn gt_write(p: &Gt, out: &mut Vec<u8>) {
        write(p, out)
    }

    fn g1_read(bytes: &[u8]) -> Result<G1Affine> {
        read("G1 point", Self::G1_BYTES, bytes)
    }

    fn g2_read(bytes: &[u8]) -> Result<G2Affine> {
        read("G2 point", Self::G2_BYTES, bytes)
    }

    fn gt_read(bytes: &[u8]) -> Result<Gt> {
        read("GT element", Self::GT_BYTES, bytes)
    }
}

/// `e(g₁, g₂)` for the standard generators.
pub fn gt_generator() -> Gt {
    Gt::generator()
}
