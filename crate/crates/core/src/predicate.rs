//! Hashing attribute values into `Z_q` and encoding `IN` clauses as
//! polynomials whose roots are the selected values.

use std::collections::BTreeSet;
use std::fmt;

use ark_ff::PrimeField;
use rand::Rng;
use sha2::{Digest, Sha512};

use crate::algebra::random_nonzero;
use crate::error::{Error, Result};

/// A cell in canonical byte form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AttributeValue(Vec<u8>);

impl AttributeValue {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Self(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str_lossy(&self) -> std::borrow::Cow<'_, str> {
        String::from_utf8_lossy(&self.0)
    }
}

impl From<&str> for AttributeValue {
    fn from(s: &str) -> Self {
        Self(s.as_bytes().to_vec())
    }
}

impl From<String> for AttributeValue {
    fn from(s: String) -> Self {
        Self(s.into_bytes())
    }
}

impl fmt::Debug for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str_lossy())
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str_lossy())
    }
}

/// Constraint on one non-join attribute.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    Unconstrained,
    In(BTreeSet<AttributeValue>),
}

impl Selection {
    pub fn in_values<I, V>(values: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<AttributeValue>,
    {
        Selection::In(values.into_iter().map(Into::into).collect())
    }

    pub fn accepts(&self, value: &AttributeValue) -> bool {
        match self {
            Selection::Unconstrained => true,
            Selection::In(set) => set.contains(value),
        }
    }
}

/// One selection per non-join attribute, indexed from 0. Attributes past the
/// end of `per_attr` are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SelectionClause {
    pub per_attr: Vec<Selection>,
}

impl SelectionClause {
    pub fn unconstrained() -> Self {
        Self::default()
    }

    /// Constrains attribute `index` (0-based) to `values`.
    pub fn with_in<I, V>(mut self, index: usize, values: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<AttributeValue>,
    {
        if self.per_attr.len() <= index {
            self.per_attr.resize(index + 1, Selection::Unconstrained);
        }
        self.per_attr[index] = Selection::in_values(values);
        self
    }

    pub fn get(&self, index: usize) -> &Selection {
        self.per_attr.get(index).unwrap_or(&Selection::Unconstrained)
    }

    /// Plaintext evaluation used by the oracle and the leakage models.
    pub fn accepts(&self, attrs: &[AttributeValue]) -> bool {
        self.per_attr
            .iter()
            .enumerate()
            .all(|(i, sel)| attrs.get(i).is_some_and(|v| sel.accepts(v)))
    }

    /// Checks the clause fits a schema with `m` attributes and at most `t`
    /// values per `IN` list.
    pub fn validate(&self, m: usize, t: usize) -> Result<()> {
        for (i, sel) in self.per_attr.iter().enumerate() {
            if let Selection::In(set) = sel {
                if i >= m {
                    return Err(Error::SchemaMismatch(format!(
                        "selection on attribute {} but the schema has {m}",
                        i + 1
                    )));
                }
                if set.is_empty() {
                    return Err(Error::EmptyInClause);
                }
                if set.len() > t {
                    return Err(Error::TooManyInValues {
                        given: set.len(),
                        max: t,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Coefficients `c₀ … c_t` of `P(x) = Σ cⱼ xʲ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCoeffs<F>(pub Vec<F>);

impl<F: PrimeField> PolyCoeffs<F> {
    pub fn degree_bound(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

fn hash_to_field<F: PrimeField>(domain: &[u8], value: &[u8]) -> F {
    let mut h = Sha512::new();
    h.update(b"secjoin/h2f/v1/");
    h.update((domain.len() as u32).to_be_bytes());
    h.update(domain);
    h.update(value);
    F::from_be_bytes_mod_order(&h.finalize())
}

/// Embeds the value of non-join attribute `index` into `Z_q`. Domain
/// separated by attribute index only, so both tables agree.
pub fn embed_attr<F: PrimeField>(index: usize, value: &AttributeValue) -> F {
    let mut domain = b"attr/".to_vec();
    domain.extend_from_slice(&(index as u64).to_be_bytes());
    hash_to_field(&domain, value.as_bytes())
}

/// Hash of a join-column value, shared by both tables.
pub fn hash_join_value<F: PrimeField>(value: &AttributeValue) -> F {
    hash_to_field(b"join", value.as_bytes())
}

/// `c · ∏(x − φ)` over the distinct roots, padded with zeros to `t + 1`
/// coefficients.
pub fn build_poly_scaled<F: PrimeField>(roots: &[F], t: usize, c: F) -> Result<PolyCoeffs<F>> {
    let distinct: BTreeSet<_> = roots.iter().copied().collect();
    if distinct.is_empty() {
        return Err(Error::EmptyInClause);
    }
    if distinct.len() > t {
        return Err(Error::TooManyInValues {
            given: distinct.len(),
            max: t,
        });
    }
    let mut coeffs = vec![F::zero(); t + 1];
    coeffs[0] = c;
    for (deg, root) in distinct.into_iter().enumerate() {
        // Multiply by (x − root), highest coefficient first.
        for j in (1..=deg + 1).rev() {
            coeffs[j] = coeffs[j - 1] - root * coeffs[j];
        }
        coeffs[0] = -root * coeffs[0];
    }
    Ok(PolyCoeffs(coeffs))
}

/// Random nonzero multiple of `∏(x − φ)`.
pub fn build_poly<F: PrimeField, R: Rng + ?Sized>(
    roots: &[F],
    t: usize,
    rng: &mut R,
) -> Result<PolyCoeffs<F>> {
    build_poly_scaled(roots, t, random_nonzero(rng))
}

pub fn zero_poly<F: PrimeField>(t: usize) -> PolyCoeffs<F> {
    PolyCoeffs(vec![F::zero(); t + 1])
}

/// Horner evaluation.
pub fn eval_poly<F: PrimeField>(p: &PolyCoeffs<F>, x: F) -> F {
    p.0.iter().rev().fold(F::zero(), |acc, c| acc * x + c)
}

/// Polynomial for one attribute's selection; roots are the embedded values.
pub fn selection_poly<F: PrimeField, R: Rng + ?Sized>(
    index: usize,
    selection: &Selection,
    t: usize,
    rng: &mut R,
) -> Result<PolyCoeffs<F>> {
    match selection {
        Selection::Unconstrained => Ok(zero_poly(t)),
        Selection::In(values) => {
            let roots: Vec<F> = values.iter().map(|v| embed_attr(index, v)).collect();
            build_poly(&roots, t, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::toy::{fe, to_u64};
    use crate::algebra::{F101, F257};
    use ark_bls12_381::Fr;
    use ark_ff::{UniformRand, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn ints(p: &PolyCoeffs<F101>) -> Vec<u64> {
        p.0.iter().map(to_u64).collect()
    }

    #[test]
    fn build_poly_worked_example() {
        let p = build_poly_scaled(&[fe::<F101>(2), fe(3)], 4, fe(1)).unwrap();
        assert_eq!(ints(&p), vec![6, 96, 1, 0, 0]);
        assert_eq!(to_u64(&eval_poly(&p, fe(2))), 0);
        assert_eq!(to_u64(&eval_poly(&p, fe(4))), 2);
    }

    #[test]
    fn build_poly_single_zero_root() {
        let p = build_poly_scaled(&[fe::<F101>(0)], 3, fe(1)).unwrap();
        assert_eq!(ints(&p), vec![0, 1, 0, 0]);
    }

    #[test]
    fn build_poly_errors() {
        assert!(matches!(
            build_poly_scaled::<F101>(&[], 2, fe(1)),
            Err(Error::EmptyInClause)
        ));
        assert!(matches!(
            build_poly_scaled(&[fe::<F101>(1), fe(2), fe(3)], 2, fe(1)),
            Err(Error::TooManyInValues { given: 3, max: 2 })
        ));
        // Repeated roots collapse, so this fits t = 1.
        let p = build_poly_scaled(&[fe::<F101>(5), fe(5)], 1, fe(1)).unwrap();
        assert_eq!(ints(&p), vec![96, 1]);
    }

    #[test]
    fn zero_poly_vanishes_everywhere() {
        let z = zero_poly::<F101>(3);
        assert_eq!(ints(&z), vec![0, 0, 0, 0]);
        for x in 0..101 {
            assert!(eval_poly(&z, fe(x)).is_zero());
        }
    }

    #[test]
    fn random_roots_vanish_and_non_roots_do_not() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for t in 1..=4 {
            let roots: Vec<F257> = (0..t).map(|_| F257::rand(&mut rng)).collect();
            let p = build_poly(&roots, t, &mut rng).unwrap();
            for r in &roots {
                assert!(eval_poly(&p, *r).is_zero());
            }
            // Exact count over the whole field: zeros are exactly the roots.
            let zeros = (0..257u64).filter(|&x| eval_poly(&p, fe(x)).is_zero()).count();
            let distinct: BTreeSet<_> = roots.iter().collect();
            assert_eq!(zeros, distinct.len());
        }
    }

    #[test]
    fn randomization_is_a_common_scalar_factor() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let roots = [fe::<F257>(10), fe(20), fe(30)];
        let p = build_poly(&roots, 4, &mut rng).unwrap();
        let q = build_poly(&roots, 4, &mut rng).unwrap();
        let ratio = q.0[3] / p.0[3];
        assert!(!ratio.is_zero());
        for (a, b) in p.0.iter().zip(&q.0) {
            assert_eq!(*a * ratio, *b);
        }
    }

    #[test]
    fn embedding_is_deterministic_and_domain_separated() {
        let v = AttributeValue::from("Tester");
        assert_eq!(embed_attr::<Fr>(1, &v), embed_attr::<Fr>(1, &v));
        assert_ne!(embed_attr::<Fr>(1, &v), embed_attr::<Fr>(2, &v));
        for i in 0..16 {
            assert_ne!(hash_join_value::<Fr>(&v), embed_attr::<Fr>(i, &v));
        }
        assert_ne!(
            hash_join_value::<Fr>(&"1".into()),
            hash_join_value::<Fr>(&"2".into())
        );
    }

    #[test]
    fn embedding_has_no_collisions_and_uniform_low_bits() {
        let mut seen = std::collections::HashSet::new();
        let mut buckets = [0usize; 16];
        let samples = 10_000;
        for i in 0..samples {
            let x: Fr = embed_attr(0, &AttributeValue::from(format!("value-{i}")));
            assert!(seen.insert(x));
            buckets[(x.into_bigint().0[0] & 0xF) as usize] += 1;
        }
        let expected = samples as f64 / 16.0;
        let chi2: f64 = buckets
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // 15 degrees of freedom; 0.999 quantile is about 37.7.
        assert!(chi2 < 37.7, "chi-square {chi2}");
    }

    #[test]
    fn clause_validation() {
        let c = SelectionClause::unconstrained().with_in(0, ["a", "b"]);
        assert!(c.validate(1, 2).is_ok());
        assert!(matches!(c.validate(1, 1), Err(Error::TooManyInValues { .. })));
        assert!(c.validate(0, 2).is_err());
        let empty = SelectionClause {
            per_attr: vec![Selection::In(BTreeSet::new())],
        };
        assert!(matches!(empty.validate(1, 1), Err(Error::EmptyInClause)));
        assert!(c.accepts(&["a".into()]));
        assert!(!c.accepts(&["c".into()]));
    }

    /// Every nonzero polynomial of degree ≤ 4 over F101 has at most 4 roots.
    #[test]
    fn schwartz_zippel_bound_exhaustive() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..200 {
            let p = PolyCoeffs((0..5).map(|_| F101::rand(&mut rng)).collect());
            if p.is_zero() {
                continue;
            }
            let zeros = (0..101u64).filter(|&x| eval_poly(&p, fe(x)).is_zero()).count();
            assert!(zeros <= 4);
        }
    }
}
