use nalgebra::DMatrix;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::C64;

/// Square complex matrix that is exactly Hermitian.
///
/// Every constructor symmetrizes with `(M + M^H) / 2`, so
/// `m[(a, b)] == m[(b, a)].conj()` holds bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "Hermitian matrix must be square");
        let n = m.nrows();
        let mut out = m;
        for a in 0..n {
            out[(a, a)] = C64::new(out[(a, a)].re, 0.0);
            for b in a + 1..n {
                let avg = (out[(a, b)] + out[(b, a)].conj()) * 0.5;
                out[(a, b)] = avg;
                out[(b, a)] = avg.conj();
            }
        }
        Self(out)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_matrix(DMatrix::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.0[(a, b)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        max_abs_diff(&self.0, &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Determinant by LU; real up to roundoff for Hermitian input.
    pub fn det(&self) -> f64 {
        self.0.clone().lu().determinant().re
    }

    pub fn leading_principal_minors(&self) -> Vec<f64> {
        (1..=self.dim())
            .map(|k| {
                self.0
                    .view((0, 0), (k, k))
                    .clone_owned()
                    .lu()
                    .determinant()
                    .re
            })
            .collect()
    }

    /// Sylvester's criterion: all leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        self.leading_principal_minors().iter().all(|&m| m > 0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let z = self.0[(a, b)];
                out.push([z.re, z.im]);
            }
        }
        out
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = self.to_pairs();
        let mut seq = serializer.serialize_seq(Some(pairs.len()))?;
        for p in &pairs {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_is_exact() {
        let m = DMatrix::from_fn(3, 3, |a, b| {
            C64::new((a * 3 + b) as f64, (a as f64) - 2.0 * b as f64)
        });
        let h = HermitianMatrix::from_matrix(m);
        for a in 0..3 {
            assert_eq!(h.get(a, a).im, 0.0);
            for b in 0..3 {
                assert_eq!(h.get(a, b), h.get(b, a).conj());
            }
        }
    }

    #[test]
    fn identity_is_positive_definite() {
        let i = HermitianMatrix::identity(4);
        assert!(i.is_positive_definite());
        assert!((i.det() - 1.0).abs() < 1e-15);
        assert!((i.min_eigenvalue() - 1.0).abs() < 1e-12);
        assert!(!i.scale(-1.0).is_positive_definite());
        assert_eq!(i.to_pairs().len(), 16);
    }
}
