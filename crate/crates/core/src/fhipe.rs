//! Function-hiding inner-product encryption, reduced to single-element
//! keys and ciphertexts whose pairing is a target-group tag.
//!
//! Tokens are `g₁^{v·B}` and ciphertexts `g₂^{w·B*}` with
//! `B* = det(B)·(B⁻¹)ᵀ`, so pairing them yields
//! `e(g₁, g₂)^{det(B)·⟨v, w⟩}`. There are no per-call random exponents
//! and no discrete-log recovery; callers put their randomness inside `v`
//! and `w`.

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::algebra::{
    dual_matrix, multi_pairing, random_nonzero, sample_invertible_matrix, scalar_write,
    PairingSuite, SquareMatrix,
};
use crate::error::{Error, Result};

/// Binds ciphertexts and tokens to the key that produced them.
pub type Fingerprint = [u8; 32];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pub suite_id: u16,
    pub dim: usize,
    pub fingerprint: Fingerprint,
}

#[derive(Clone)]
pub struct MasterSecretKey<S: PairingSuite> {
    pp: PublicParams,
    g1: S::G1,
    g2: S::G2,
    b: SquareMatrix<S::Scalar>,
    b_star: SquareMatrix<S::Scalar>,
    det: S::Scalar,
}

impl<S: PairingSuite> std::fmt::Debug for MasterSecretKey<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MasterSecretKey")
            .field("pp", &self.pp)
            .finish_non_exhaustive()
    }
}

impl<S: PairingSuite> MasterSecretKey<S> {
    /// Assembles a key from generators and a masking matrix; `B*` is derived.
    pub fn from_parts(g1: S::G1, g2: S::G2, b: SquareMatrix<S::Scalar>) -> Result<Self> {
        let b_star = dual_matrix(&b)?;
        let det = b.determinant();
        let dim = b.dim();
        let fingerprint = fingerprint::<S>(&g1, &g2, &b, &b_star);
        Ok(Self {
            pp: PublicParams {
                suite_id: S::SUITE_ID,
                dim,
                fingerprint,
            },
            g1,
            g2,
            b,
            b_star,
            det,
        })
    }

    pub fn pp(&self) -> &PublicParams {
        &self.pp
    }

    pub fn dim(&self) -> usize {
        self.pp.dim
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.pp.fingerprint
    }

    pub fn g1(&self) -> &S::G1 {
        &self.g1
    }

    pub fn g2(&self) -> &S::G2 {
        &self.g2
    }

    pub fn b(&self) -> &SquareMatrix<S::Scalar> {
        &self.b
    }

    pub fn b_star(&self) -> &SquareMatrix<S::Scalar> {
        &self.b_star
    }

    pub fn det(&self) -> S::Scalar {
        self.det
    }

    /// `e(g₁, g₂)`, the base every tag is a power of.
    pub fn gt_base(&self) -> S::Gt {
        S::pair(&self.g1, &self.g2)
    }
}

fn fingerprint<S: PairingSuite>(
    g1: &S::G1,
    g2: &S::G2,
    b: &SquareMatrix<S::Scalar>,
    b_star: &SquareMatrix<S::Scalar>,
) -> Fingerprint {
    let mut buf = Vec::new();
    buf.extend_from_slice(b"secjoin/msk-fingerprint/v1");
    buf.extend_from_slice(&S::SUITE_ID.to_le_bytes());
    buf.extend_from_slice(&(b.dim() as u32).to_le_bytes());
    S::g1_write(g1, &mut buf);
    S::g2_write(g2, &mut buf);
    for x in b.entries().iter().chain(b_star.entries()) {
        scalar_write(x, &mut buf);
    }
    Sha256::digest(&buf).into()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenVector<S: PairingSuite>(pub Vec<S::G1>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherVector<S: PairingSuite>(pub Vec<S::G2>);

impl<S: PairingSuite> TokenVector<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: PairingSuite> CipherVector<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn ipe_setup<S: PairingSuite, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<(PublicParams, MasterSecretKey<S>)> {
    if dim == 0 {
        return Err(Error::InvalidParams("dimension must be at least 1".into()));
    }
    let g1 = S::g1_pow(&S::g1_generator(), &random_nonzero(rng));
    let g2 = S::g2_pow(&S::g2_generator(), &random_nonzero(rng));
    let b = sample_invertible_matrix(dim, rng);
    let msk = MasterSecretKey::from_parts(g1, g2, b)?;
    Ok((msk.pp.clone(), msk))
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `g₁^{v·B}`.
pub fn ipe_token<S: PairingSuite>(
    msk: &MasterSecretKey<S>,
    v: &[S::Scalar],
) -> Result<TokenVector<S>> {
    check_dim(msk.dim(), v.len())?;
    let exps = msk.b.left_mul_vec(v)?;
    Ok(TokenVector(S::g1_pow_many(&msk.g1, &exps)))
}

/// `g₂^{w·B*}`.
pub fn ipe_encrypt<S: PairingSuite>(
    msk: &MasterSecretKey<S>,
    w: &[S::Scalar],
) -> Result<CipherVector<S>> {
    Ok(ipe_encrypt_many(msk, std::slice::from_ref(&w.to_vec()))?
        .pop()
        .expect("one input, one output"))
}

/// Encrypts many vectors at once so the `g₂` window table is built once.
pub fn ipe_encrypt_many<S: PairingSuite>(
    msk: &MasterSecretKey<S>,
    ws: &[Vec<S::Scalar>],
) -> Result<Vec<CipherVector<S>>> {
    let n = msk.dim();
    let mut exps = Vec::with_capacity(ws.len() * n);
    for w in ws {
        check_dim(n, w.len())?;
        exps.extend(msk.b_star.left_mul_vec(w)?);
    }
    let points = S::g2_pow_many(&msk.g2, &exps);
    Ok(points
        .chunks(n.max(1))
        .map(|c| CipherVector(c.to_vec()))
        .collect())
}

/// `e(tk, c) = e(g₁, g₂)^{det(B)·⟨v, w⟩}`.
pub fn ipe_decrypt_tag<S: PairingSuite>(
    pp: &PublicParams,
    tk: &TokenVector<S>,
    c: &CipherVector<S>,
) -> Result<S::Gt> {
    check_dim(pp.dim, tk.len())?;
    check_dim(pp.dim, c.len())?;
    multi_pairing::<S>(&tk.0, &c.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::toy::{fe, to_u64, ToyElem};
    use crate::algebra::{inner_product, Toy101, F101};
    use ark_ff::UniformRand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn plain_msk(b: SquareMatrix<F101>) -> MasterSecretKey<Toy101> {
        MasterSecretKey::from_parts(Toy101::g1_generator(), Toy101::g2_generator(), b).unwrap()
    }

    fn exps(v: &[ToyElem<F101>]) -> Vec<u64> {
        v.iter().map(|e| to_u64(e.exponent())).collect()
    }

    #[test]
    fn one_dimensional_setup_has_unit_dual() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (_, msk) = ipe_setup::<Toy101, _>(1, &mut rng).unwrap();
        assert_eq!(msk.b_star().entries(), &[fe::<F101>(1)]);
    }

    #[test]
    fn setup_dual_invariant() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pp, msk) = ipe_setup::<Toy101, _>(5, &mut rng).unwrap();
        assert_eq!(pp.dim, 5);
        let lhs = msk.b().mul(&msk.b_star().transpose()).unwrap();
        assert_eq!(lhs, SquareMatrix::identity(5).scale(msk.det()));
        assert!(ipe_setup::<Toy101, _>(0, &mut rng).is_err());
    }

    #[test]
    fn different_seeds_give_different_masks() {
        let (_, a) = ipe_setup::<Toy101, _>(4, &mut ChaCha20Rng::seed_from_u64(10)).unwrap();
        let (_, b) = ipe_setup::<Toy101, _>(4, &mut ChaCha20Rng::seed_from_u64(11)).unwrap();
        assert_ne!(a.b(), b.b());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn token_and_ciphertext_exponents() {
        let msk = plain_msk(SquareMatrix::identity(2));
        let tk = ipe_token(&msk, &[fe(3), fe(4)]).unwrap();
        assert_eq!(exps(&tk.0), vec![3, 4]);
        let ct = ipe_encrypt(&msk, &[fe(7), fe(9)]).unwrap();
        assert_eq!(exps(&ct.0), vec![7, 9]);
        let zero = ipe_token(&msk, &[fe(0), fe(0)]).unwrap();
        assert!(zero.0.iter().all(|p| *p == Toy101::g1_identity()));
        assert!(ipe_token(&msk, &[fe(1)]).is_err());
        assert!(ipe_encrypt(&msk, &[fe(1), fe(2), fe(3)]).is_err());
    }

    #[test]
    fn exponents_follow_clear_matrix_products() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (_, msk) = ipe_setup::<Toy101, _>(6, &mut rng).unwrap();
        let g1 = *msk.g1().exponent();
        let g2 = *msk.g2().exponent();
        for _ in 0..20 {
            let v: Vec<F101> = (0..6).map(|_| F101::rand(&mut rng)).collect();
            // Clear oracle: v·B computed entry by entry.
            let vb: Vec<F101> = (0..6)
                .map(|j| (0..6).map(|i| v[i] * msk.b().get(i, j)).sum())
                .collect();
            let tk = ipe_token(&msk, &v).unwrap();
            for (p, e) in tk.0.iter().zip(&vb) {
                assert_eq!(*p.exponent(), g1 * e);
            }
            let wbs: Vec<F101> = (0..6)
                .map(|j| (0..6).map(|i| v[i] * msk.b_star().get(i, j)).sum())
                .collect();
            let ct = ipe_encrypt(&msk, &v).unwrap();
            for (p, e) in ct.0.iter().zip(&wbs) {
                assert_eq!(*p.exponent(), g2 * e);
            }
        }
    }

    #[test]
    fn decrypt_unit_vectors_identity_mask() {
        let msk = plain_msk(SquareMatrix::identity(3));
        let e1 = [fe(1), fe(0), fe(0)];
        let tag = ipe_decrypt_tag(msk.pp(), &ipe_token(&msk, &e1).unwrap(), &ipe_encrypt(&msk, &e1).unwrap())
            .unwrap();
        assert_eq!(tag, msk.gt_base());
        let e2 = [fe(0), fe(1), fe(0)];
        let tag = ipe_decrypt_tag(msk.pp(), &ipe_token(&msk, &e1).unwrap(), &ipe_encrypt(&msk, &e2).unwrap())
            .unwrap();
        assert_eq!(tag, Toy101::gt_identity());
    }

    #[test]
    fn decrypt_matches_clear_exponent() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (pp, msk) = ipe_setup::<Toy101, _>(10, &mut rng).unwrap();
        for _ in 0..50 {
            let v: Vec<F101> = (0..10).map(|_| F101::rand(&mut rng)).collect();
            let w: Vec<F101> = (0..10).map(|_| F101::rand(&mut rng)).collect();
            let tag = ipe_decrypt_tag(&pp, &ipe_token(&msk, &v).unwrap(), &ipe_encrypt(&msk, &w).unwrap())
                .unwrap();
            let expected = Toy101::gt_pow(&msk.gt_base(), &(msk.det() * inner_product(&v, &w)));
            assert_eq!(tag, expected);
        }
    }

    #[test]
    fn tag_depends_only_on_inner_product() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (pp, msk) = ipe_setup::<Toy101, _>(3, &mut rng).unwrap();
        // (1,2,3)·(4,5,6) = 32 and (2,0,0)·(16,9,9) = 32.
        let t1 = ipe_decrypt_tag(
            &pp,
            &ipe_token(&msk, &[fe(1), fe(2), fe(3)]).unwrap(),
            &ipe_encrypt(&msk, &[fe(4), fe(5), fe(6)]).unwrap(),
        )
        .unwrap();
        let t2 = ipe_decrypt_tag(
            &pp,
            &ipe_token(&msk, &[fe(2), fe(0), fe(0)]).unwrap(),
            &ipe_encrypt(&msk, &[fe(16), fe(9), fe(9)]).unwrap(),
        )
        .unwrap();
        assert_eq!(t1, t2);
        let t3 = ipe_decrypt_tag(
            &pp,
            &ipe_token(&msk, &[fe(2), fe(0), fe(0)]).unwrap(),
            &ipe_encrypt(&msk, &[fe(17), fe(9), fe(9)]).unwrap(),
        )
        .unwrap();
        assert_ne!(t1, t3);
    }

    #[test]
    fn decrypt_rejects_wrong_lengths() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (pp, msk) = ipe_setup::<Toy101, _>(3, &mut rng).unwrap();
        let tk = ipe_token(&msk, &[fe(1), fe(2), fe(3)]).unwrap();
        let short = CipherVector::<Toy101>(vec![Toy101::g2_generator(); 2]);
        assert!(matches!(
            ipe_decrypt_tag(&pp, &tk, &short),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }
}
