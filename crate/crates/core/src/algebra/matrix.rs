//! Dense square matrices over a prime field.
//!
//! Dimensions here are small (tens to low hundreds), so everything is plain
//! row-major storage and cubic Gaussian elimination.

use std::fmt;

use ark_ff::{Field, PrimeField};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct SquareMatrix<F> {
    dim: usize,
    entries: Vec<F>,
}

impl<F: Field> SquareMatrix<F> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![F::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = F::one();
        }
        m
    }

    pub fn diagonal(diag: &[F]) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = *d;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be `dim²`.
    pub fn from_entries(dim: usize, entries: Vec<F>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[F] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        out
    }

    pub fn scale(&self, k: F) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| *e * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · M`.
    pub fn left_mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        let n = self.dim;
        let mut out = vec![F::zero(); n];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += *vi * self.entries[i * n + j];
            }
        }
        Ok(out)
    }

    /// Determinant by row reduction with pivot search.
    pub fn determinant(&self) -> F {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = F::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return F::zero();
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            let p_inv = p.inverse().expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = a[r * n + col] * p_inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[r * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p_inv = a[col * n + col].inverse().expect("pivot is nonzero");
            for j in 0..n {
                a[col * n + j] *= p_inv;
                inv[col * n + j] *= p_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let sa = factor * a[col * n + j];
                    a[r * n + j] -= sa;
                    let si = factor * inv[col * n + j];
                    inv[r * n + j] -= si;
                }
            }
        }
        Ok(Self {
            dim: n,
            entries: inv,
        })
    }
}

impl<F: fmt::Debug> fmt::Debug for SquareMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.entries.chunks(self.dim.max(1)).collect();
        f.debug_struct("SquareMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

/// `det(B) · (B⁻¹)ᵀ`, so that `B · dual(B)ᵀ = det(B) · I`.
pub fn dual_matrix<F: Field>(b: &SquareMatrix<F>) -> Result<SquareMatrix<F>> {
    let det = b.determinant();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(b.inverse()?.transpose().scale(det))
}

pub fn determinant<F: Field>(m: &SquareMatrix<F>) -> F {
    m.determinant()
}

/// Uniform invertible matrix by rejection: resample the whole matrix until
/// its determinant is nonzero. `sample_entry` supplies field elements.
pub fn sample_invertible_matrix_with<F: Field>(
    dim: usize,
    mut sample_entry: impl FnMut() -> F,
) -> SquareMatrix<F> {
    assert!(dim >= 1, "matrix dimension must be at least 1");
    loop {
        let entries = (0..dim * dim).map(|_| sample_entry()).collect();
        let m = SquareMatrix { dim, entries };
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

pub fn sample_invertible_matrix<F: PrimeField, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> SquareMatrix<F> {
    sample_invertible_matrix_with(dim, || F::rand(rng))
}

/// `⟨x, y⟩` over the field.
pub fn inner_product<F: Field>(x: &[F], y: &[F]) -> F {
    x.iter().zip(y).map(|(a, b)| *a * b).sum()
}
