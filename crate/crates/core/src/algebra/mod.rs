//! Field scalars, pairing groups, and matrices over `Z_q`.

pub mod bls;
pub mod matrix;
pub mod suite;
pub mod toy;

pub use bls::Bls12Suite;
pub use matrix::{
    determinant, dual_matrix, inner_product, sample_invertible_matrix,
    sample_invertible_matrix_with, SquareMatrix,
};
pub use suite::{
    multi_pairing, random_nonzero, scalar_byte_len, scalar_read, scalar_write, vec_exp_g1,
    vec_exp_g2, PairingSuite,
};
pub use toy::{Toy101, Toy257, ToyElem, ToySuite, F101, F257};

/// Suite used by the command line and the C bindings.
pub type DefaultSuite = Bls12Suite;
