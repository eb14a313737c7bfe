//! Toy "pairing" over a small prime field. NOT SECURE.
//!
//! A group element `g^x` is represented by its exponent `x`, so the pairing
//! is field multiplication and every exponent is visible. This exists so
//! that tests can check exponent arithmetic exactly and enumerate whole
//! fields.

use std::marker::PhantomData;

use ark_ff::{Fp64, MontBackend, MontConfig, PrimeField};

use super::suite::{scalar_read, scalar_write, PairingSuite};
use crate::error::Result;

#[derive(MontConfig)]
#[modulus = "101"]
#[generator = "2"]
pub struct F101Config;
pub type F101 = Fp64<MontBackend<F101Config, 1>>;

#[derive(MontConfig)]
#[modulus = "257"]
#[generator = "3"]
pub struct F257Config;
pub type F257 = Fp64<MontBackend<F257Config, 1>>;

/// A group element stored as its discrete logarithm base the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyElem<F>(pub F);

impl<F> ToyElem<F> {
    pub fn exponent(&self) -> &F {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ToySuite<F>(PhantomData<F>);

pub type Toy101 = ToySuite<F101>;
pub type Toy257 = ToySuite<F257>;

impl<F: PrimeField> PairingSuite for ToySuite<F> {
    type Scalar = F;
    type G1 = ToyElem<F>;
    type G2 = ToyElem<F>;
    type Gt = ToyElem<F>;

    const SUITE_ID: u16 = 0xF000 | (F::MODULUS_BIT_SIZE as u16);
    const NAME: &'static str = "toy-insecure";
    const G1_BYTES: usize = (F::MODULUS_BIT_SIZE as usize).div_ceil(8);
    const G2_BYTES: usize = Self::G1_BYTES;
    const GT_BYTES: usize = Self::G1_BYTES;

    fn g1_generator() -> Self::G1 {
        ToyElem(F::one())
    }

    fn g2_generator() -> Self::G2 {
        ToyElem(F::one())
    }

    fn g1_identity() -> Self::G1 {
        ToyElem(F::zero())
    }

    fn g2_identity() -> Self::G2 {
        ToyElem(F::zero())
    }

    fn gt_identity() -> Self::Gt {
        ToyElem(F::zero())
    }

    fn g1_pow(base: &Self::G1, exp: &F) -> Self::G1 {
        ToyElem(base.0 * exp)
    }

    fn g2_pow(base: &Self::G2, exp: &F) -> Self::G2 {
        ToyElem(base.0 * exp)
    }

    fn gt_pow(base: &Self::Gt, exp: &F) -> Self::Gt {
        ToyElem(base.0 * exp)
    }

    fn pairing_product(u: &[Self::G1], w: &[Self::G2]) -> Self::Gt {
        ToyElem(u.iter().zip(w).map(|(a, b)| a.0 * b.0).sum())
    }

    fn g1_write(p: &Self::G1, out: &mut Vec<u8>) {
        scalar_write(&p.0, out)
    }

    fn g2_write(p: &Self::G2, out: &mut Vec<u8>) {
        scalar_write(&p.0, out)
    }

    fn gt_write(p: &Self::Gt, out: &mut Vec<u8>) {
        scalar_write(&p.0, out)
    }

    fn g1_read(bytes: &[u8]) -> Result<Self::G1> {
        scalar_read(bytes).map(ToyElem)
    }

    fn g2_read(bytes: &[u8]) -> Result<Self::G2> {
        scalar_read(bytes).map(ToyElem)
    }

    fn gt_read(bytes: &[u8]) -> Result<Self::Gt> {
        scalar_read(bytes).map(ToyElem)
    }
}

/// Small integer as a field element; handy in tests.
pub fn fe<F: PrimeField>(x: u64) -> F {
    F::from(x)
}

/// Canonical integer value of a single-limb field element.
pub fn to_u64<F: PrimeField>(x: &F) -> u64 {
    x.into_bigint().as_ref()[0]
}
